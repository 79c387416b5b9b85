#pragma once

#include "config.hpp"
#include "output.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pdiss::app {

struct RunOutput {
    std::vector<CsvTable> tables;
    Json results = Json::object();
    std::string console;  // printed to stdout
};

// Runs the configured experiment; nothing is written.
RunOutput execute(const RunConfig& config);

// execute() then write_outputs(); returns the manifest.
Json run_to_directory(const RunConfig& config, const std::filesystem::path& dir, std::string* console = nullptr);

// Evaluates one closed-form expression; inputs are "<number> <unit>" strings.
struct AnalyticValue {
    std::string quantity;
    double value = 0.0;
    std::string unit;
    std::string note;
};

AnalyticValue evaluate_analytic(const AnalyticConfig& analytic, const model::DeviceParams& device);

}  // namespace pdiss::app
