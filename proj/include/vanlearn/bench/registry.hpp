#pragma once

// The public datasets used by the benchmark: where to download them, how to
// turn the raw files into header-bearing CSV, and how to check the result.

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vanlearn/codec/csv.hpp"
#include "vanlearn/error.hpp"
#include "vanlearn/persistence/crypto.hpp"

namespace vanlearn::bench {

enum class RawSeparator { comma, whitespace };

struct DatasetSource {
    std::string name;
    std::string host;  // https
    std::string path;
    RawSeparator separator;
    std::vector<std::string> header;
    std::size_t expected_rows;
    std::string label_column;
    // sha256 of the checked-in CSV under datasets/, empty when none is bundled.
    std::string bundled_sha256;
};

inline const std::vector<DatasetSource>& dataset_sources() {
    static const std::vector<DatasetSource> all = {
        {"seeds",
         "archive.ics.uci.edu",
         "/ml/machine-learning-databases/00236/seeds_dataset.txt",
         RawSeparator::whitespace,
         {"area", "perimeter", "compactness", "kernel_length", "kernel_width", "asymmetry", "groove_length", "variety"},
         210,
         "variety",
         ""},
        {"haberman",
         "archive.ics.uci.edu",
         "/ml/machine-learning-databases/haberman/haberman.data",
         RawSeparator::comma,
         {"age", "op_year", "axil_nodes", "survival"},
         306,
         "survival",
         "17e866e48af9b86aa56855efd6e05d42f991927c4820363a2a5b5938be0b8935"},
        {"iris",
         "archive.ics.uci.edu",
         "/ml/machine-learning-databases/iris/bezdekIris.data",
         RawSeparator::comma,
         {"sepal_length", "sepal_width", "petal_length", "petal_width", "species"},
         150,
         "species",
         "09d1766be79ec606b4c045059bc4b0d3e6a693b61d1cdfc6bdd45af42531df65"},
    };
    return all;
}

inline const DatasetSource* find_source(std::string_view name) {
    for (const auto& s : dataset_sources())
        if (s.name == name) return &s;
    return nullptr;
}

// Raw UCI text to CSV with the canonical header. Blank lines are dropped;
// every other line must carry exactly one field per header column.
inline std::string convert_raw(const DatasetSource& src, std::string_view raw) {
    std::string out;
    for (std::size_t j = 0; j < src.header.size(); ++j) {
        if (j) out += ',';
        out += src.header[j];
    }
    out += '\n';
    std::size_t rows = 0, line_no = 0, pos = 0;
    while (pos <= raw.size()) {
        std::size_t end = raw.find('\n', pos);
        if (end == std::string_view::npos) end = raw.size();
        std::string_view line = raw.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        std::vector<std::string> fields;
        if (src.separator == RawSeparator::comma) {
            if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
            std::size_t s = 0;
            while (true) {
                const std::size_t c = line.find(',', s);
                std::string_view f = line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s);
                while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
                while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
                fields.emplace_back(f);
                if (c == std::string_view::npos) break;
                s = c + 1;
            }
        } else {
            std::istringstream ss{std::string(line)};
            std::string f;
            while (ss >> f) fields.push_back(f);
            if (fields.empty()) continue;
        }
        if (fields.size() != src.header.size())
            throw Error(errc::checksum, src.name + " line " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) + " fields, expected " +
                                            std::to_string(src.header.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (j) out += ',';
            out += fields[j];
        }
        out += '\n';
        ++rows;
    }
    if (rows != src.expected_rows)
        throw Error(errc::checksum, src.name + " has " + std::to_string(rows) + " rows, expected " +
                                        std::to_string(src.expected_rows));
    return out;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(errc::not_found, "cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view bytes) {
    std::filesystem::create_directories(p.parent_path().empty() ? "." : p.parent_path());
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(errc::storage, "cannot write " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, p);
}

// Checksums of fetched files live in <data-dir>/checksums.json. The first
// fetch records them; later fetches must reproduce them exactly.
class ChecksumManifest {
public:
    explicit ChecksumManifest(std::filesystem::path dir) : path_(std::move(dir) / "checksums.json") {
        if (std::filesystem::exists(path_)) {
            const auto j = nlohmann::json::parse(read_file(path_), nullptr, false);
            if (!j.is_object()) throw Error(errc::checksum, path_.string() + " is not a JSON object");
            for (const auto& [k, v] : j.items())
                if (v.is_string()) entries_[k] = v.get<std::string>();
        }
    }

    std::optional<std::string> get(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void verify_or_record(const std::string& name, const std::string& sha) {
        if (auto known = get(name)) {
            if (*known != sha)
                throw Error(errc::checksum, name + " checksum " + sha + " differs from recorded " + *known);
            return;
        }
        entries_[name] = sha;
        write_file(path_, nlohmann::json(entries_).dump(2) + "\n");
    }

private:
    std::filesystem::path path_;
    std::map<std::string, std::string> entries_;
};

inline std::string download(const DatasetSource& src) {
    httplib::SSLClient cli(src.host);
    cli.set_follow_location(true);
    cli.set_connection_timeout(15);
    cli.set_read_timeout(60);
    auto res = cli.Get(src.path);
    if (!res)
        throw Error(errc::network, "download of " + src.name + " from https://" + src.host + src.path +
                                       " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(errc::network, "download of " + src.name + " returned HTTP " + std::to_string(res->status));
    return res->body;
}

struct FetchOutcome {
    std::string name;
    std::filesystem::path file;
    std::string sha256;
    std::size_t rows = 0;
    std::string origin;  // "network", "bundled" or "cached"
};

// Produces <data_dir>/<name>.csv. Offline mode copies the checked-in file when
// one exists and otherwise fails with guidance.
inline FetchOutcome fetch_dataset(const DatasetSource& src, const std::filesystem::path& data_dir,
                                  const std::filesystem::path& bundled_dir, bool offline,
                                  const std::function<std::string(const DatasetSource&)>& downloader = download) {
    ChecksumManifest manifest(data_dir);
    const auto target = data_dir / (src.name + ".csv");
    std::string csv, origin;
    std::string key = src.name;
    if (offline) {
        const auto bundled = bundled_dir / (src.name + ".csv");
        if (std::filesystem::exists(target)) {
            csv = read_file(target);
            origin = "cached";
            if (persistence::sha256_hex(csv) == manifest.get(src.name + ":bundled")) key += ":bundled";
        } else if (!src.bundled_sha256.empty() && std::filesystem::exists(bundled)) {
            csv = read_file(bundled);
            if (persistence::sha256_hex(csv) != src.bundled_sha256)
                throw Error(errc::checksum, "bundled " + bundled.string() + " does not match its pinned checksum");
            origin = "bundled";
            key += ":bundled";
        } else {
            throw Error(errc::network, src.name + " has no bundled copy; run `fetch` with network access or place " +
                                           src.name + ".csv (" + std::to_string(src.expected_rows) +
                                           " rows, header " + src.header.front() + ",...) in " + data_dir.string());
        }
    } else {
        csv = convert_raw(src, downloader(src));
        origin = "network";
    }
    const Dataset d = codec::parse_csv(csv);
    if (d.row_count() != src.expected_rows || d.columns != src.header)
        throw Error(errc::checksum, src.name + " does not have the expected header and " +
                                        std::to_string(src.expected_rows) + " rows");
    const std::string sha = persistence::sha256_hex(csv);
    manifest.verify_or_record(key, sha);
    if (!std::filesystem::exists(target) || read_file(target) != csv) write_file(target, csv);
    return {src.name, target, sha, d.row_count(), origin};
}

}  // namespace vanlearn::bench
