#include <gtest/gtest.h>

#include <unistd.h>

#include "oracles.hpp"
#include "vanlearn/bench/suite.hpp"

using namespace vanlearn;
using namespace vanlearn::bench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("vanlearn_bench_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

const fs::path bundled = VANLEARN_DATASET_DIR;

// Raw UCI text reconstructed from the checked-in CSV: header dropped, trailing blank line.
std::string raw_from_bundled(const std::string& name) {
    std::string csv = read_file(bundled / (name + ".csv"));
    return csv.substr(csv.find('\n') + 1) + "\n";
}

std::pair<oracle::Rows, std::vector<double>> xy(const Dataset& d) {
    oracle::Rows x;
    std::vector<double> y;
    for (const auto& r : d.rows) {
        x.push_back({std::get<double>(r[0])});
        y.push_back(std::get<double>(r[1]));
    }
    return {x, y};
}

}  // namespace

TEST(Generator, SameSeedSameBytes) {
    const auto a = codec::export_dataset(generate_linear_data(200, 0.5, 7), codec::ExportFormat::csv);
    const auto b = codec::export_dataset(generate_linear_data(200, 0.5, 7), codec::ExportFormat::csv);
    const auto c = codec::export_dataset(generate_linear_data(200, 0.5, 8), codec::ExportFormat::csv);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Generator, NoiselessLineIsExact) {
    const Dataset d = generate_linear_data(100, 0.0, 1);
    ASSERT_EQ(d.columns, (std::vector<std::string>{"x", "y"}));
    for (const auto& r : d.rows) {
        const double x = std::get<double>(r[0]);
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 10.0);
        EXPECT_DOUBLE_EQ(std::get<double>(r[1]), 2.0 * x + 1.0);
    }
}

TEST(Generator, NoisyLineRecoversSlopeAndIntercept) {
    const auto [x, y] = xy(generate_linear_data(1000, 0.5, 42));
    const auto w = oracle::normal_equations(x, y);
    EXPECT_NEAR(w[0], 2.0, 0.1);
    EXPECT_NEAR(w[1], 1.0, 0.2);
}

TEST(Generator, RejectsBadArguments) {
    EXPECT_THROW(generate_linear_data(1, 0.5, 1), Error);
    EXPECT_THROW(generate_linear_data(10, -1.0, 1), Error);
    EXPECT_THROW(generate_linear_data(10, std::nan(""), 1), Error);
}

TEST(Registry, ConvertRawWhitespaceAndCounts) {
    DatasetSource src{"toy", "h", "/p", RawSeparator::whitespace, {"a", "b"}, 2, "b", ""};
    EXPECT_EQ(convert_raw(src, "1 2\n\n3\t\t4\r\n"), "a,b\n1,2\n3,4\n");
    try {
        convert_raw(src, "1 2\n3\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_CHECKSUM");
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_THROW(convert_raw(src, "1 2\n"), Error);
}

TEST(Registry, ConvertRawCommaTrimsFields) {
    DatasetSource src{"toy", "h", "/p", RawSeparator::comma, {"a", "b"}, 1, "b", ""};
    EXPECT_EQ(convert_raw(src, " 5.1 , Iris-setosa \n\n"), "a,b\n5.1,Iris-setosa\n");
}

TEST(Registry, BundledFilesMatchPinnedChecksums) {
    for (const auto& src : dataset_sources()) {
        if (src.bundled_sha256.empty()) continue;
        EXPECT_EQ(persistence::sha256_hex(read_file(bundled / (src.name + ".csv"))), src.bundled_sha256) << src.name;
    }
}

TEST(Fetch, OfflineCopiesBundledAndIsIdempotent) {
    TempDir dir("offline");
    const auto& iris = *find_source("iris");
    const auto first = fetch_dataset(iris, dir.path, bundled, true);
    EXPECT_EQ(first.origin, "bundled");
    EXPECT_EQ(first.rows, 150u);
    EXPECT_EQ(first.sha256, iris.bundled_sha256);
    const std::string manifest = read_file(dir.path / "checksums.json");

    const auto second = fetch_dataset(iris, dir.path, bundled, true);
    EXPECT_EQ(second.origin, "cached");
    EXPECT_EQ(second.sha256, first.sha256);
    EXPECT_EQ(read_file(dir.path / "checksums.json"), manifest);
    EXPECT_EQ(read_file(first.file), read_file(bundled / "iris.csv"));
}

TEST(Fetch, TamperedManifestIsRejected) {
    TempDir dir("tamper");
    write_file(dir.path / "checksums.json", R"({"haberman:bundled": "00"})");
    try {
        fetch_dataset(*find_source("haberman"), dir.path, bundled, true);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_CHECKSUM");
    }
}

TEST(Fetch, OfflineWithoutCopyExplainsItself) {
    TempDir dir("seeds");
    try {
        fetch_dataset(*find_source("seeds"), dir.path, bundled, true);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_NETWORK");
        EXPECT_NE(std::string(e.what()).find("210 rows"), std::string::npos);
    }
}

TEST(Fetch, NetworkPathRecordsThenVerifies) {
    TempDir dir("net");
    const auto& iris = *find_source("iris");
    int calls = 0;
    auto fake = [&](const DatasetSource& s) {
        ++calls;
        EXPECT_EQ(s.name, "iris");
        return raw_from_bundled("iris");
    };
    const auto a = fetch_dataset(iris, dir.path, bundled, false, fake);
    EXPECT_EQ(a.origin, "network");
    EXPECT_EQ(a.sha256, iris.bundled_sha256);  // conversion reproduces the checked-in bytes
    const auto b = fetch_dataset(iris, dir.path, bundled, false, fake);
    EXPECT_EQ(b.sha256, a.sha256);
    EXPECT_EQ(calls, 2);

    // upstream changed under us
    auto drifted = [&](const DatasetSource&) {
        std::string raw = raw_from_bundled("iris");
        raw[0] = raw[0] == '5' ? '6' : '5';
        return raw;
    };
    try {
        fetch_dataset(iris, dir.path, bundled, false, drifted);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "E_CHECKSUM");
    }
}

TEST(Fetch, NetworkFailurePropagates) {
    TempDir dir("neterr");
    auto down = [](const DatasetSource&) -> std::string { throw Error(errc::network, "unreachable"); };
    EXPECT_THROW(fetch_dataset(*find_source("seeds"), dir.path, bundled, false, down), Error);
    EXPECT_FALSE(fs::exists(dir.path / "seeds.csv"));
}

TEST(Run, TableRowsCarryArityAndClicks) {
    const Dataset iris = load_bench_dataset("iris", "/nonexistent", bundled);
    const auto tree = run_benchmark(iris, "Iris", {Algorithm::dtree, {}, {}, {}});
    EXPECT_EQ(tree.module_name, "Decision Tree");
    EXPECT_EQ(tree.parameter_count, 0);
    EXPECT_EQ(tree.click_count, 5);
    ASSERT_TRUE(tree.test_secs);
    EXPECT_EQ(tree.metric, "accuracy=1");

    const auto km = run_benchmark(iris, "Iris", {Algorithm::kmeans, 3, {}, std::string("species")});
    EXPECT_EQ(km.parameter_count, 1);
    EXPECT_EQ(km.click_count, 1);
    EXPECT_FALSE(km.test_secs);
    EXPECT_EQ(row_cells(km)[3], "/");

    const auto lin = run_benchmark(load_bench_dataset("self-generated", "", ""), "Self-generated",
                                   {Algorithm::linreg, {}, std::string("y"), {}});
    EXPECT_EQ(lin.parameter_count, 1);
    EXPECT_EQ(lin.click_count, 5);
}

TEST(Run, InputErrorsAreReported) {
    const Dataset iris = load_bench_dataset("iris", "/nonexistent", bundled);
    EXPECT_THROW(run_benchmark(iris, "Iris", {Algorithm::kmeans, {}, {}, std::string("species")}), Error);
    try {
        run_benchmark(iris, "Iris", {Algorithm::linreg, {}, std::string("species"), {}});
        FAIL();
    } catch (const ValidationFailed& e) {
        EXPECT_TRUE(e.report().codes().count(violation::non_numeric));
    }
    try {
        run_benchmark(iris, "Iris", {Algorithm::linreg, {}, std::string("nope"), {}});
        FAIL();
    } catch (const ValidationFailed& e) {
        EXPECT_TRUE(e.report().codes().count(violation::target_range));
    }
}

TEST(Run, HabermanTreeAndLogisticRun) {
    const Dataset h = load_bench_dataset("haberman", "/nonexistent", bundled);
    const auto tree = run_benchmark(h, "Haberman", {Algorithm::dtree, {}, {}, {}});
    EXPECT_EQ(tree.dataset_name, "Haberman");
    const auto lr = run_benchmark(h, "Haberman", {Algorithm::logreg, {}, std::string("survival"), {}});
    EXPECT_EQ(lr.module_name, "Logistic regression");
    EXPECT_EQ(lr.metric.rfind("accuracy=", 0), 0u);
}

TEST(Report, CsvRoundTripsToTheSameTable) {
    std::vector<BenchRow> rows = {{"k-means", "Seeds", 0.01234, std::nullopt, 1, 1, ""},
                                  {"Decision Tree", "Iris", 1.5, 0.25, 0, 5, ""}};
    const std::string csv = csv_report(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "Module Name,Dataset,Training (sec),Test (sec),Parameters,Clicks");
    EXPECT_EQ(text_report_from_csv(csv), text_report(rows));
    EXPECT_NE(text_report(rows).find("1.5000"), std::string::npos);
    EXPECT_THROW(text_report_from_csv("a,b\n1,2\n"), Error);
}

TEST(Suite, MissingDatasetIsAFailureNotAnAbort) {
    TempDir dir("suite");
    const auto r = run_suite(dir.path, dir.path);  // nothing bundled here
    EXPECT_EQ(r.rows.size(), 1u);                 // only the generated dataset
    EXPECT_EQ(r.failures.size(), 3u);
    for (const auto& f : r.failures) EXPECT_EQ(f.code, "E_NETWORK");
}
