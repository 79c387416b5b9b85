#pragma once

// Run configuration: YAML file -> validated RunConfig. Frequencies in the file
// are linear (omega / 2 pi) and must carry a unit suffix; they are converted to
// rad/us here and nowhere else.

#include "pdiss/calibration.hpp"
#include "pdiss/errors.hpp"
#include "pdiss/experiments.hpp"
#include "pdiss/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdiss::app {

using Json = nlohmann::ordered_json;

// Schema violation; carries the dotted field path and, when known, the line.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message, int line = -1);

    const std::string& path() const { return path_; }
    int line() const { return line_; }

private:
    std::string path_;
    int line_;
};

enum class Experiment { ringdown, reset, cool, spectroscopy, analytic, fit };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

struct RingdownConfig {
    experiments::SweepGrid grid;
    experiments::RingdownOptions options;
};

struct ResetConfig {
    experiments::ResetSpec spec;
    double g_p = units::from_MHz(10.0);
    std::vector<double> tau;
};

struct CoolConfig {
    experiments::RefrigerationSpec spec;
};

struct SpectroscopyConfig {
    std::vector<double> phi;
    experiments::SpectroscopyOptions options;
};

struct AnalyticConfig {
    std::string formula = "thermal";
    // Raw "<number> <unit>" strings keyed by input name; parsed per formula.
    std::map<std::string, std::string> inputs;
    int precision = 3;
};

enum class FitKind { exponential, lorentzian, avoided_crossing, flux_curve };

struct FitConfig {
    FitKind kind = FitKind::exponential;
    std::string input;
    std::string x = "x";
    std::string y = "y";
    std::string y2;  // upper branch for avoided crossings
    // Units of frequency-valued columns in the input file.
    std::string frequency_unit = "GHz";
    bool free_alpha = false;
    double alpha = units::from_MHz(-350.0);
    double noise_sigma = 0.0;  // optional synthetic noise added to y, seeded
};

struct RunConfig {
    model::DeviceParams device;
    Experiment experiment = Experiment::ringdown;
    std::optional<std::string> output;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    RingdownConfig ringdown;
    ResetConfig reset;
    CoolConfig cool;
    SpectroscopyConfig spectroscopy;
    AnalyticConfig analytic;
    FitConfig fit;
};

// Defaults for an experiment with no file.
RunConfig default_config(Experiment experiment);

// Throws ConfigError naming the field path and line.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

// Resolved configuration in display units, for the run manifest.
Json echo_config(const RunConfig& config);

}  // namespace pdiss::app
