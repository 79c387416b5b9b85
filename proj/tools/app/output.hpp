#pragma once

// CSV tables (RFC 4180, '.' decimal, header row), SHA-256 digests and the JSON
// run manifest.

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pdiss::app {

using Json = nlohmann::ordered_json;

struct CsvTable {
    std::string file;  // relative to the output directory
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

// Locale-independent, round-trippable text for a double.
std::string format_number(double v);
std::string to_csv(const CsvTable& table);

struct CsvData {
    std::vector<std::string> header;
    std::map<std::string, std::vector<double>> columns;

    const std::vector<double>& column(const std::string& name) const;
};

// Numeric CSV with a one-line header; throws InvalidArgument on malformed rows.
CsvData read_csv(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

struct ManifestInput {
    std::string experiment;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    Json config;
    Json results;
    double wall_time_s = 0.0;
};

// Writes every table, then manifest.json listing them. Single writer: nothing
// touches the directory before all results exist.
Json write_outputs(const std::filesystem::path& dir, const std::vector<CsvTable>& tables, const ManifestInput& input);

// JSON Schema (draft 2020-12 subset) the manifest follows.
const Json& manifest_schema();

// Structural check against manifest_schema(), plus: every listed file exists
// and matches its digest. Empty result means valid.
std::vector<std::string> validate_manifest(const Json& manifest, const std::filesystem::path& dir);

}  // namespace pdiss::app
