#include "pdiss/dynamics.hpp"

#include "pdiss/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pdiss::dynamics {

namespace {

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

// Norm of the part of a hermitian H that generates dynamics.
double traceless_norm(const Matrix& h) {
    const auto d = static_cast<double>(h.rows());
    Matrix shifted = h;
    shifted.diagonal().array() -= h.trace() / d;
    return spectral_norm(shifted);
}

bool all_finite(const Matrix& m) {
    return m.array().real().allFinite() && m.array().imag().allFinite();
}

double real_trace_product(const Matrix& rho, const Matrix& op) {
    // Tr(rho O) = sum_ij rho_ij O_ji
    return rho.cwiseProduct(op.transpose()).sum().real();
}

}  // namespace

void LindbladSystem::validate() const {
    const auto& space = *h_static.space();
    for (const auto& term : h_time_dependent) {
        quantum::require_same_space(space, *term.op.space(), "LindbladSystem time-dependent term");
        if (!term.coefficient) throw InvalidArgument("LindbladSystem: time-dependent term without coefficient");
    }
    for (const auto& l : collapse) quantum::require_same_space(space, *l.space(), "LindbladSystem collapse operator");
    const double scale = std::max(1.0, h_static.matrix().cwiseAbs().maxCoeff());
    if (h_static.hermiticity_error() > 1e-12 * scale) {
        throw InvalidArgument("LindbladSystem: h_static is not hermitian");
    }
}

Matrix LindbladSystem::hamiltonian_at(double t) const {
    Matrix h = h_static.matrix();
    for (const auto& term : h_time_dependent) h += term.coefficient(t) * term.op.matrix();
    return h;
}

ExpectationTrace::ExpectationTrace(std::vector<double> times,
                                   std::vector<std::pair<std::string, std::vector<double>>> columns,
                                   TraceMetadata metadata)
    : times_(std::move(times)), columns_(std::move(columns)), metadata_(std::move(metadata)) {
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) throw InvalidArgument("ExpectationTrace: times must be strictly increasing");
    }
    for (const auto& [label, values] : columns_) {
        if (values.size() != times_.size()) {
            throw InvalidArgument("ExpectationTrace: column '" + label + "' length differs from times");
        }
    }
}

const std::vector<double>& ExpectationTrace::values(const std::string& label) const {
    for (const auto& [name, values] : columns_) {
        if (name == label) return values;
    }
    throw InvalidArgument("ExpectationTrace: no column '" + label + "'");
}

ExpectationTrace evolve(const LindbladSystem& system, const DensityMatrix& rho0, std::span<const double> t_grid,
                        const std::vector<NamedObservable>& observables, const EvolveOptions& options,
                        EvolveStats* stats) {
    system.validate();
    quantum::require_same_space(*system.h_static.space(), *rho0.space(), "evolve initial state");
    for (const auto& obs : observables) quantum::require_same_space(*rho0.space(), *obs.op.space(), "evolve observable");
    if (t_grid.empty()) throw InvalidArgument("evolve: empty time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("evolve: t_grid must be strictly increasing");
    }
    if (!(options.max_phase_per_step > 0.0) || options.min_steps_per_period < 1) {
        throw InvalidArgument("evolve: invalid step rule");
    }

    const Eigen::Index d = static_cast<Eigen::Index>(rho0.space()->total_dim());
    Matrix decay = Matrix::Zero(d, d);
    for (const auto& l : system.collapse) decay += l.matrix().adjoint() * l.matrix();

    // Step size from the norm bound over the whole drive cycle.
    double h_norm = traceless_norm(system.h_static.matrix());
    double max_period = 0.0;
    double min_period = 0.0;
    for (const auto& term : system.h_time_dependent) {
        h_norm += term.amplitude_bound * spectral_norm(term.op.matrix());
        if (term.period > 0.0) {
            min_period = min_period == 0.0 ? term.period : std::min(min_period, term.period);
            max_period = std::max(max_period, term.period);
        }
    }
    double dt_max = std::numeric_limits<double>::infinity();
    for (const auto& l : system.collapse) {
        const double n = spectral_norm(l.matrix().adjoint() * l.matrix());
        if (n > 0.0) dt_max = std::min(dt_max, options.max_phase_per_step / n);
    }
    if (h_norm > 0.0) dt_max = std::min(dt_max, options.max_phase_per_step / h_norm);
    if (min_period > 0.0) dt_max = std::min(dt_max, min_period / options.min_steps_per_period);

    const Matrix h_static = system.h_static.matrix();
    const Matrix static_eff = h_static - Complex(0.0, 0.5) * decay;
    const bool driven = system.time_dependent();

    auto rhs = [&](double t, const Matrix& rho) {
        Matrix heff = static_eff;
        if (driven) {
            for (const auto& term : system.h_time_dependent) heff.noalias() += term.coefficient(t) * term.op.matrix();
        }
        Matrix out = Complex(0.0, -1.0) * (heff * rho - rho * heff.adjoint());
        for (const auto& l : system.collapse) out.noalias() += l.matrix() * rho * l.matrix().adjoint();
        return out;
    };

    std::vector<std::pair<std::string, std::vector<double>>> columns;
    columns.reserve(observables.size());
    for (const auto& obs : observables) {
        columns.emplace_back(obs.label, std::vector<double>{});
        columns.back().second.reserve(t_grid.size());
    }

    std::vector<std::string> bosonic_modes;
    for (const auto& mode : rho0.space()->modes()) {
        if (mode.kind == quantum::ModeKind::bosonic) bosonic_modes.push_back(mode.label);
    }

    EvolveStats local;
    Matrix rho = rho0.matrix();

    auto record = [&](double t) {
        if (!all_finite(rho)) throw NumericalError("evolve: non-finite density matrix at t = " + std::to_string(t));
        const Complex tr = rho.trace();
        const double drift = std::abs(tr - Complex(1.0, 0.0));
        local.max_trace_drift = std::max(local.max_trace_drift, drift);
        if (drift >= options.trace_tolerance) {
            throw NumericalError("evolve: trace drift " + std::to_string(drift) + " at t = " + std::to_string(t) +
                                 " exceeds tolerance; step too large");
        }
        rho /= tr;
        rho = 0.5 * (rho + rho.adjoint()).eval();
        for (std::size_t k = 0; k < observables.size(); ++k) {
            columns[k].second.push_back(real_trace_product(rho, observables[k].op.matrix()));
        }
        for (const auto& label : bosonic_modes) {
            const double p = quantum::top_levels_population(rho, *rho0.space(), label);
            local.max_cutoff_population = std::max(local.max_cutoff_population, p);
        }
        if (options.observer) options.observer(t, rho);
    };

    record(t_grid[0]);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double t0 = t_grid[i - 1];
        const double span = t_grid[i] - t0;
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt_max - 1e-9)));
        const double h = span / static_cast<double>(n);
        local.step_size = std::max(local.step_size, h);
        for (std::size_t s = 0; s < n; ++s) {
            const double t = t0 + static_cast<double>(s) * h;
            const Matrix k1 = rhs(t, rho);
            const Matrix k2 = rhs(t + 0.5 * h, rho + (0.5 * h) * k1);
            const Matrix k3 = rhs(t + 0.5 * h, rho + (0.5 * h) * k2);
            const Matrix k4 = rhs(t + h, rho + h * k3);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        local.steps += n;
        record(t_grid[i]);
    }
    local.cutoff_warning = local.max_cutoff_population >= quantum::kCutoffPopulationLimit;
    if (stats) *stats = local;

    return ExpectationTrace(std::vector<double>(t_grid.begin(), t_grid.end()), std::move(columns));
}

Matrix liouvillian(const LindbladSystem& system) {
    system.validate();
    if (system.time_dependent()) throw InvalidArgument("liouvillian: system must be time-independent");
    const Eigen::Index d = system.h_static.matrix().rows();
    const Matrix id = Matrix::Identity(d, d);
    Matrix decay = Matrix::Zero(d, d);
    for (const auto& l : system.collapse) decay += l.matrix().adjoint() * l.matrix();
    const Matrix heff = system.h_static.matrix() - Complex(0.0, 0.5) * decay;
    // vec(A rho B) = (B^T kron A) vec(rho), column-stacked.
    Matrix sup = Complex(0.0, -1.0) * Matrix(Eigen::kroneckerProduct(id, heff));
    sup += Complex(0.0, 1.0) * Matrix(Eigen::kroneckerProduct(heff.conjugate(), id));
    for (const auto& l : system.collapse) {
        sup += Matrix(Eigen::kroneckerProduct(l.matrix().conjugate(), l.matrix()));
    }
    return sup;
}

DensityMatrix steady_state(const LindbladSystem& system, SteadyStateInfo* info) {
    const Matrix sup = liouvillian(system);
    const Eigen::Index d = system.h_static.matrix().rows();
    Eigen::FullPivLU<Matrix> lu(sup);
    lu.setThreshold(1e-10);
    const Matrix kernel = lu.kernel();
    const Eigen::Index null_dim = lu.dimensionOfKernel();
    if (null_dim != 1) {
        throw NumericalError("steady_state: null space has dimension " + std::to_string(null_dim) +
                             " (decoupled sectors or no dissipation)");
    }
    Matrix rho = Eigen::Map<const Matrix>(kernel.data(), d, d);
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-14) throw NumericalError("steady_state: null vector has zero trace");
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint()).eval();

    const Eigen::VectorXcd vec = Eigen::Map<const Eigen::VectorXcd>(rho.data(), d * d);
    const double residual = (sup * vec).cwiseAbs().maxCoeff();
    if (info) *info = {residual, null_dim};
    if (residual >= 1e-9) {
        throw NumericalError("steady_state: residual " + std::to_string(residual) + " exceeds 1e-9");
    }
    return DensityMatrix(system.h_static.space(), rho);
}

ExpectationTrace coherent_ringdown(double n_bar0, double kappa_total, std::span<const double> t_grid) {
    if (n_bar0 < 0.0) throw InvalidArgument("coherent_ringdown: n_bar0 must be >= 0");
    if (kappa_total < 0.0) throw InvalidArgument("coherent_ringdown: kappa_total must be >= 0");
    std::vector<double> n;
    std::vector<double> amp;
    n.reserve(t_grid.size());
    amp.reserve(t_grid.size());
    const double a0 = std::sqrt(n_bar0);
    for (double t : t_grid) {
        n.push_back(n_bar0 * std::exp(-kappa_total * t));
        amp.push_back(a0 * std::exp(-0.5 * kappa_total * t));
    }
    return ExpectationTrace(std::vector<double>(t_grid.begin(), t_grid.end()),
                            {{"n", std::move(n)}, {"amplitude", std::move(amp)}});
}

std::vector<double> linspace(double t0, double t1, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {t0};
    std::vector<double> out(count);
    const double step = (t1 - t0) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = t0 + step * static_cast<double>(i);
    out.back() = t1;
    return out;
}

}  // namespace pdiss::dynamics
