#pragma once

// Numerical versions of the measurement campaigns: ringdown spectroscopy over
// drive frequency and strength, post-measurement cavity reset, continuous
// refrigeration under a cavity drive, and flux spectroscopy of the coupled
// linear modes.

#include "pdiss/analytics.hpp"
#include "pdiss/calibration.hpp"
#include "pdiss/dynamics.hpp"
#include "pdiss/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pdiss::experiments {

struct Axis {
    std::string name;
    std::string unit;  // display unit of `values` after conversion back, e.g. "MHz"
    std::vector<double> values;  // internal units
};

struct SweepGrid {
    std::vector<Axis> axes;  // one or two
    // Device overrides keyed by flat point index.
    std::map<std::size_t, model::DeviceParams> params_overrides;

    void validate() const;
    std::size_t size() const;
    // Flat index = i0 * n1 + i1.
    std::pair<std::size_t, std::size_t> unflatten(std::size_t flat) const;
};

enum class Frame { rotating, lab };

struct RingdownOptions {
    Frame frame = Frame::rotating;
    model::ModelOptions model;
    std::size_t initial_photons = 1;  // Fock state; linear regime
    std::size_t samples = 2000;
    // First window is this many decay times at the fastest reachable rate
    // (kappa_c + kappa_diss / 2); it grows x4 until the population falls below
    // `fit_stop`. The fit covers the tail from `fit_start` to `fit_stop`, past
    // the initial hybridization transient.
    double windows = 5.0;
    double duration = 0.0;  // us; overrides `windows` when positive
    int max_extensions = 8;
    double fit_start = std::exp(-1.0);
    double fit_stop = std::exp(-5.0);
    std::size_t min_fit_points = 100;
    unsigned threads = 1;
    // Gaussian noise (photons, 1 sigma) added to the population before the
    // fit; point k of a sweep draws from a generator seeded with seed + k.
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    model::ModulationConvention convention = model::ModulationConvention::sigma_z_amplitude;
};

struct RingdownPoint {
    std::size_t index = 0;
    double omega_p = 0.0;
    double g_p = 0.0;
    double rate = 0.0;
    double sigma = 0.0;
    double r2 = 0.0;
    bool ok = false;
    std::string message;
};

struct RingdownResult {
    SweepGrid grid;
    std::vector<RingdownPoint> points;  // flat index order
    double resonance = 0.0;             // |w_diss - w_c|
};

// Axis 0: omega_p (rad/us), axis 1: g_p (rad/us).
SweepGrid default_ringdown_grid(const model::DeviceParams& params, std::size_t n_frequency = 21,
                                std::size_t n_power = 11);

// Decay rate of the cavity population for one drive point.
RingdownPoint ringdown_point(const model::DeviceParams& params, double omega_p, double g_p,
                             const RingdownOptions& options = {});

RingdownResult ringdown_spectroscopy(const model::DeviceParams& params, const SweepGrid& grid,
                                     const RingdownOptions& options = {});

struct ResetSpec {
    double n_bar0 = 39.8;
    double gap = 0.080;  // us of free decay at kappa_c before the drive
    double kappa_eff = 0.0;  // drive-induced loss, 1/us; 0 = undriven
    double gamma_2_0 = 0.18;
    double threshold = 0.05;  // recovery when Gamma_2 <= (1 + threshold) Gamma_2^0
};

struct ResetResult {
    std::vector<double> tau;
    std::vector<double> n_bar;
    std::vector<double> gamma_2;
    double gamma_cav = 0.0;
    double recovery_time = 0.0;  // us; infinity if never within the grid span
};

// kappa_eff for a drive at coupling g_p: the damped-swap rate when
// overdamped, g_p itself when underdamped.
double exchange_rate(double g_p, double kappa_diss);

ResetResult reset_experiment(const model::DeviceParams& params, const ResetSpec& spec,
                             std::span<const double> tau_grid);

struct RefrigerationSpec {
    std::vector<double> g_p;           // power axis, rad/us
    std::vector<double> injected_n;    // cavity-drive rows; 0 means thermal only
    double gamma_2_0 = 0.124;
};

struct RefrigerationPoint {
    double g_p = 0.0;
    double injected_n = 0.0;
    double kappa_eff = 0.0;
    double n_thermal = 0.0;
    double n_coherent = 0.0;
    double gamma_2e = 0.0;
};

struct RefrigerationResult {
    std::vector<RefrigerationPoint> points;  // row-major: injected_n outer, g_p inner
    std::size_t n_power = 0;
};

RefrigerationResult refrigeration_experiment(const model::DeviceParams& params, const RefrigerationSpec& spec);

struct SpectroscopyOptions {
    bool include_cavity = true;
    bool include_filter = true;
    bool include_qubit = false;
    // Couplings in DeviceParams are quoted at this dissipator frequency and
    // rescaled with flux; 0 means params.omega_diss.
    double coupling_reference = 0.0;
};

struct SpectroscopyResult {
    std::vector<double> phi;
    std::vector<std::string> labels;  // bare mode of each branch at phi[0]
    std::vector<std::vector<double>> branches;  // branches[k][i], rad/us
};

// Single-excitation eigenfrequencies, sorted at phi[0], then tracked by
// eigenvector overlap.
Eigen::VectorXd single_excitation_frequencies(const model::DeviceParams& params, const SpectroscopyOptions& options,
                                              double phi, Eigen::MatrixXd* vectors = nullptr);
SpectroscopyResult flux_spectroscopy(const model::DeviceParams& params, std::span<const double> phi_grid,
                                     const SpectroscopyOptions& options = {});

struct CrossingGap {
    double phi = 0.0;
    double gap = 0.0;  // rad/us
};

// Minimum splitting of the two eigenvalues nearest `omega_target` around the
// bias where the bare dissipator reaches it (golden-section search).
CrossingGap find_crossing_gap(const model::DeviceParams& params, const SpectroscopyOptions& options,
                              double omega_target, double half_window = 0.02);

}  // namespace pdiss::experiments
