#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vanlearn/bench/generate.hpp"
#include "vanlearn/bench/registry.hpp"
#include "vanlearn/bench/run.hpp"

namespace vanlearn::bench {

// Resolves "self-generated", a registered dataset name, or a file path.
// Registered names are looked up in data_dir first, then in the checked-in
// copies.
inline Dataset load_bench_dataset(const std::string& ref, const std::filesystem::path& data_dir,
                                  const std::filesystem::path& bundled_dir) {
    if (ref == "self-generated")
        return generate_linear_data(self_generated_rows, self_generated_noise, self_generated_seed);
    if (const DatasetSource* src = find_source(ref)) {
        for (const auto& dir : {data_dir, bundled_dir}) {
            const auto p = dir / (ref + ".csv");
            if (std::filesystem::exists(p)) return codec::parse_csv(read_file(p));
        }
        throw Error(errc::network, ref + ".csv not found in " + data_dir.string() + " and no bundled copy exists; run `" +
                                       "vanlearn-bench fetch` with network access first (expects " +
                                       std::to_string(src->expected_rows) + " rows)");
    }
    return codec::parse_csv(read_file(ref));
}

struct SuiteFailure {
    std::string module_name;
    std::string dataset_name;
    std::string code;
    std::string message;
};

struct SuiteResult {
    std::vector<BenchRow> rows;
    std::vector<SuiteFailure> failures;
};

// Runs every pairing in order; a missing or invalid dataset is recorded as a
// failure and the remaining rows still run.
inline SuiteResult run_suite(const std::filesystem::path& data_dir, const std::filesystem::path& bundled_dir) {
    SuiteResult out;
    for (const auto& e : default_suite()) {
        try {
            out.rows.push_back(run_benchmark(load_bench_dataset(e.dataset, data_dir, bundled_dir), e.display, e.spec));
        } catch (const Error& err) {
            out.failures.push_back({std::string(display_name(e.spec.algorithm)), e.display, err.code(), err.what()});
        }
    }
    return out;
}

}  // namespace vanlearn::bench
