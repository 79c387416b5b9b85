#pragma once

// Lindblad master-equation evolution with fixed-step RK4, Liouvillian null
// space steady states, and the closed-form coherent ringdown used for large
// photon numbers.

#include "pdiss/model.hpp"
#include "pdiss/quantum.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pdiss::dynamics {

using quantum::Complex;
using quantum::DensityMatrix;
using quantum::Matrix;
using quantum::Operator;

struct LindbladSystem {
    Operator h_static;
    std::vector<model::TimeDependentTerm> h_time_dependent;
    std::vector<Operator> collapse;  // weights pre-multiplied

    // Throws when operators disagree on the space or h_static is not hermitian.
    void validate() const;
    Matrix hamiltonian_at(double t) const;
    bool time_dependent() const { return !h_time_dependent.empty(); }
};

struct NamedObservable {
    std::string label;
    Operator op;
};

struct TraceMetadata {
    std::optional<model::DeviceParams> params;
    std::optional<model::DriveSpec> drive;
    std::string note;
};

class ExpectationTrace {
public:
    ExpectationTrace() = default;
    ExpectationTrace(std::vector<double> times, std::vector<std::pair<std::string, std::vector<double>>> columns,
                     TraceMetadata metadata = {});

    const std::vector<double>& times() const { return times_; }
    const std::vector<std::pair<std::string, std::vector<double>>>& columns() const { return columns_; }
    const std::vector<double>& values(const std::string& label) const;
    const TraceMetadata& metadata() const { return metadata_; }
    TraceMetadata& metadata() { return metadata_; }
    std::size_t size() const { return times_.size(); }

private:
    std::vector<double> times_;
    std::vector<std::pair<std::string, std::vector<double>>> columns_;
    TraceMetadata metadata_;
};

struct EvolveOptions {
    // Step rule: max(dt ||H||, dt ||L^dag L||) <= max_phase_per_step, and at
    // least min_steps_per_period steps per drive period.
    double max_phase_per_step = 0.05;
    int min_steps_per_period = 40;
    // Renormalize trace drift below this; error above.
    double trace_tolerance = 1e-6;
    // Called with (t, rho) at every grid point.
    std::function<void(double, const Matrix&)> observer;
};

struct EvolveStats {
    std::size_t steps = 0;
    double step_size = 0.0;
    double max_trace_drift = 0.0;
    double max_cutoff_population = 0.0;
    bool cutoff_warning = false;
};

// Integrates d rho/dt = -i[H(t), rho] + sum_k (L rho L^dag - 1/2 {L^dag L, rho})
// recording Re Tr(rho O) at each time in `t_grid` (first entry may equal 0).
ExpectationTrace evolve(const LindbladSystem& system, const DensityMatrix& rho0, std::span<const double> t_grid,
                        const std::vector<NamedObservable>& observables, const EvolveOptions& options = {},
                        EvolveStats* stats = nullptr);

// Column-stacking superoperator of a time-independent system.
Matrix liouvillian(const LindbladSystem& system);

struct SteadyStateInfo {
    double residual = 0.0;  // max |L(rho)|
    Eigen::Index null_dimension = 0;
};

// Unique null vector of the Liouvillian, normalized to unit trace.
DensityMatrix steady_state(const LindbladSystem& system, SteadyStateInfo* info = nullptr);

struct CoherentState {
    Complex alpha;

    double n_bar() const { return std::norm(alpha); }
};

// Linear cavity under linear loss: n(t) = n0 e^{-k t}, |alpha(t)| = sqrt(n0) e^{-k t / 2}.
// Columns "n" and "amplitude".
ExpectationTrace coherent_ringdown(double n_bar0, double kappa_total, std::span<const double> t_grid);

// Uniform grid of `count` points on [t0, t1].
std::vector<double> linspace(double t0, double t1, std::size_t count);

}  // namespace pdiss::dynamics
