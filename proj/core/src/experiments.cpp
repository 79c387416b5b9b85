#include "pdiss/experiments.hpp"

#include "pdiss/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace pdiss::experiments {

using model::DeviceParams;

void SweepGrid::validate() const {
    if (axes.empty() || axes.size() > 2) throw InvalidArgument("SweepGrid: need one or two axes");
    for (const auto& axis : axes) {
        if (axis.values.empty()) throw InvalidArgument("SweepGrid: axis '" + axis.name + "' is empty");
        for (double v : axis.values) {
            if (!std::isfinite(v)) throw InvalidArgument("SweepGrid: axis '" + axis.name + "' has non-finite values");
        }
    }
    for (const auto& [index, params] : params_overrides) {
        if (index >= size()) throw InvalidArgument("SweepGrid: override index out of range");
        params.validate();
    }
}

std::size_t SweepGrid::size() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.values.size();
    return axes.empty() ? 0 : n;
}

std::pair<std::size_t, std::size_t> SweepGrid::unflatten(std::size_t flat) const {
    if (axes.size() == 1) return {flat, 0};
    const std::size_t n1 = axes[1].values.size();
    return {flat / n1, flat % n1};
}

SweepGrid default_ringdown_grid(const DeviceParams& params, std::size_t n_frequency, std::size_t n_power) {
    if (n_frequency < 1 || n_power < 2) throw InvalidArgument("default_ringdown_grid: grid too small");
    const double resonance = std::abs(params.omega_diss - params.omega_c);
    Axis freq{"omega_p", "GHz", {}};
    for (double off : dynamics::linspace(-150.0, 150.0, n_frequency)) {
        freq.values.push_back(resonance + units::from_MHz(n_frequency == 1 ? 0.0 : off));
    }
    // Drive power scales as g_p^2, so equal power steps up to 11 MHz.
    Axis coupling{"g_p", "MHz", {}};
    for (std::size_t k = 0; k < n_power; ++k) {
        coupling.values.push_back(units::from_MHz(11.0) * std::sqrt(double(k) / double(n_power - 1)));
    }
    return SweepGrid{{freq, coupling}, {}};
}

namespace {

dynamics::LindbladSystem ringdown_system(const DeviceParams& params, const quantum::SpacePtr& space, double omega_p,
                                         double g_p, const RingdownOptions& options) {
    const double resonance = std::abs(params.omega_diss - params.omega_c);
    auto collapse = model::collapse_operators(space, params, false);
    if (options.frame == Frame::rotating) {
        return {model::rotating_frame_hamiltonian(space, params, g_p, resonance - omega_p), {}, std::move(collapse)};
    }
    dynamics::LindbladSystem sys{model::build_jc_hamiltonian(space, params, params.omega_diss), {}, std::move(collapse)};
    if (g_p > 0.0) {
        const auto drive = model::drive_for_coupling(params, g_p, omega_p, options.convention);
        sys.h_time_dependent.push_back(model::build_parametric_drive(space, drive));
    }
    return sys;
}

}  // namespace

RingdownPoint ringdown_point(const DeviceParams& params, double omega_p, double g_p, const RingdownOptions& options) {
    params.validate();
    if (g_p < 0.0) throw InvalidArgument("ringdown_point: g_p must be >= 0");
    if (options.initial_photons >= options.model.cavity_cutoff) {
        throw InvalidArgument("ringdown_point: initial photon number exceeds cavity cutoff");
    }
    if (options.samples < options.min_fit_points) throw InvalidArgument("ringdown_point: too few samples");

    RingdownPoint out;
    out.omega_p = omega_p;
    out.g_p = g_p;

    const auto space = model::cavity_dissipator_space(options.model);
    const auto system = ringdown_system(params, space, omega_p, g_p, options);
    std::vector<std::size_t> levels(space->mode_count(), 0);
    levels[space->index_of(model::kCavity)] = options.initial_photons;
    const auto rho0 = quantum::DensityMatrix::basis_state(space, levels);
    const std::vector<dynamics::NamedObservable> obs{{"n_c", quantum::number(space, model::kCavity)}};

    auto population = [&](double t_end, std::vector<double>& times) {
        times = dynamics::linspace(0.0, t_end, options.samples);
        return dynamics::evolve(system, rho0, times, obs).values("n_c");
    };
    auto first_below = [](const std::vector<double>& n, double level) {
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (n[i] <= level) return i;
        }
        return n.size();
    };

    // Pass 1: start from the fastest decay the drive can produce
    // (kappa_c + kappa_diss / 2) and grow the window until the tail is inside.
    const double fastest = params.kappa_c + 0.5 * params.kappa_diss;
    double t_end = options.duration > 0.0 ? options.duration : options.windows / fastest;
    std::vector<double> times;
    std::vector<double> n = population(t_end, times);
    const double n0 = n.front();
    for (int grow = 0; grow < options.max_extensions && first_below(n, options.fit_stop * n0) == n.size(); ++grow) {
        t_end *= 4.0;
        n = population(t_end, times);
    }
    // Pass 2: resample when the fit window holds too few points.
    const std::size_t stop = first_below(n, options.fit_stop * n0);
    const std::size_t start = first_below(n, options.fit_start * n0);
    if (stop < n.size() && stop - start < options.min_fit_points) {
        t_end = times[std::max<std::size_t>(stop, 1)];
        n = population(t_end, times);
    } else if (stop < n.size()) {
        times.resize(stop + 1);
        n.resize(stop + 1);
    }
    if (options.noise_sigma > 0.0) {
        std::mt19937_64 engine(options.seed);
        std::normal_distribution<double> noise(0.0, options.noise_sigma);
        for (double& v : n) v += noise(engine);
    }
    std::size_t begin = first_below(n, options.fit_start * n0);
    if (begin >= n.size() || n.size() - begin < options.min_fit_points) begin = 0;
    const std::span<const double> tt(times.data() + begin, times.size() - begin);
    const std::span<const double> yy(n.data() + begin, n.size() - begin);
    const auto fit = calibration::fit_exponential(tt, yy);
    out.rate = fit.value("rate");
    out.sigma = fit.sigma("rate");
    out.r2 = fit.r2;
    out.ok = fit.converged && !fit.degenerate;
    for (const auto& w : fit.warnings) out.message += (out.message.empty() ? "" : "; ") + w;
    return out;
}

RingdownResult ringdown_spectroscopy(const DeviceParams& params, const SweepGrid& grid, const RingdownOptions& options) {
    grid.validate();
    if (grid.axes.size() != 2 || grid.axes[0].name != "omega_p" || grid.axes[1].name != "g_p") {
        throw InvalidArgument("ringdown_spectroscopy: axes must be (omega_p, g_p)");
    }
    RingdownResult result;
    result.grid = grid;
    result.resonance = std::abs(params.omega_diss - params.omega_c);
    result.points.resize(grid.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            const auto [i, j] = grid.unflatten(k);
            const auto it = grid.params_overrides.find(k);
            const DeviceParams& p = it != grid.params_overrides.end() ? it->second : params;
            const double omega_p = grid.axes[0].values[i];
            const double g_p = grid.axes[1].values[j];
            RingdownPoint point;
            try {
                RingdownOptions local = options;
                local.seed = options.seed + k;
                point = ringdown_point(p, omega_p, g_p, local);
            } catch (const std::exception& e) {
                point.omega_p = omega_p;
                point.g_p = g_p;
                point.rate = std::numeric_limits<double>::quiet_NaN();
                point.ok = false;
                point.message = e.what();
            }
            point.index = k;
            result.points[k] = std::move(point);
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(grid.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return result;
}

double exchange_rate(double g_p, double kappa_diss) {
    const auto loss = analytics::effective_loss(g_p, kappa_diss);
    return loss.regime == analytics::DampingRegime::underdamped ? g_p : loss.rate;
}

ResetResult reset_experiment(const DeviceParams& params, const ResetSpec& spec, std::span<const double> tau_grid) {
    if (spec.n_bar0 < 0.0) throw InvalidArgument("reset_experiment: n_bar0 must be >= 0");
    if (spec.gap < 0.0 || spec.kappa_eff < 0.0 || spec.gamma_2_0 <= 0.0 || spec.threshold <= 0.0) {
        throw InvalidArgument("reset_experiment: invalid spec");
    }
    for (std::size_t i = 1; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] > tau_grid[i - 1])) throw InvalidArgument("reset_experiment: tau grid must be increasing");
    }
    ResetResult out;
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    out.gamma_cav = params.kappa_c + spec.kappa_eff;

    const double n_start = spec.n_bar0 * std::exp(-params.kappa_c * spec.gap);
    const auto ring = dynamics::coherent_ringdown(n_start, out.gamma_cav, tau_grid);
    out.n_bar = ring.values("n");
    const analytics::ResetDephasingParams rp{n_start, params.chi, params.kappa_c, out.gamma_cav, spec.gamma_2_0};
    out.gamma_2 = analytics::reset_dephasing_curve(rp, tau_grid);

    const double target = (1.0 + spec.threshold) * spec.gamma_2_0;
    out.recovery_time = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.tau.size(); ++i) {
        if (out.gamma_2[i] > target) continue;
        if (i == 0) {
            out.recovery_time = out.tau[0];
            break;
        }
        double lo = out.tau[i - 1];
        double hi = out.tau[i];
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (analytics::reset_dephasing(rp, mid) > target ? lo : hi) = mid;
        }
        out.recovery_time = hi;
        break;
    }
    return out;
}

RefrigerationResult refrigeration_experiment(const DeviceParams& params, const RefrigerationSpec& spec) {
    params.validate();
    if (spec.g_p.empty() || spec.injected_n.empty()) throw InvalidArgument("refrigeration_experiment: empty grid");
    const double n_c0 = analytics::thermal_occupation(params.omega_c, params.T0);
    const double n_d0 = analytics::thermal_occupation(params.omega_diss, params.T_bath);
    const auto cavity_thermal = analytics::bath_rates(params.kappa_c, n_c0);
    const auto diss_thermal = analytics::bath_rates(params.kappa_diss, n_d0);
    const auto diss_cold = analytics::bath_rates(params.kappa_diss, 0.0);

    RefrigerationResult out;
    out.n_power = spec.g_p.size();
    for (double injected : spec.injected_n) {
        if (injected < 0.0) throw InvalidArgument("refrigeration_experiment: injected occupation must be >= 0");
        for (double g : spec.g_p) {
            RefrigerationPoint p;
            p.g_p = g;
            p.injected_n = injected;
            p.kappa_eff = g > 0.0 ? exchange_rate(g, params.kappa_diss) : 0.0;
            // Thermal and injected populations obey the same linear rate
            // equations; only their photon statistics differ.
            p.n_thermal = analytics::driven_balance(cavity_thermal, diss_thermal, p.kappa_eff).n_c;
            p.n_coherent = injected > 0.0
                               ? analytics::driven_balance(analytics::bath_rates(params.kappa_c, injected), diss_cold,
                                                           p.kappa_eff)
                                     .n_c
                               : 0.0;
            const double kappa = params.kappa_c + p.kappa_eff;
            p.gamma_2e = analytics::photon_dephasing(params.chi, kappa, p.n_thermal, analytics::PhotonStatistics::thermal) +
                         analytics::photon_dephasing(params.chi, kappa, p.n_coherent,
                                                     analytics::PhotonStatistics::coherent) +
                         spec.gamma_2_0;
            out.points.push_back(p);
        }
    }
    return out;
}

namespace {

struct ModeEntry {
    std::string label;
    double omega;
};

std::vector<ModeEntry> spectroscopy_modes(const DeviceParams& params, const SpectroscopyOptions& options,
                                          double omega_diss) {
    std::vector<ModeEntry> modes{{model::kDissipator, omega_diss}};
    if (options.include_cavity) modes.push_back({model::kCavity, params.omega_c});
    if (options.include_filter) modes.push_back({model::kFilter, params.omega_f});
    if (options.include_qubit) modes.push_back({model::kQubit, params.omega_q});
    return modes;
}

}  // namespace

Eigen::VectorXd single_excitation_frequencies(const DeviceParams& params, const SpectroscopyOptions& options,
                                              double phi, Eigen::MatrixXd* vectors) {
    const double w_d = model::dissipator_frequency(params, model::FluxPoint{phi});
    const auto modes = spectroscopy_modes(params, options, w_d);
    const double ref = options.coupling_reference > 0.0 ? options.coupling_reference : params.omega_diss;
    const double g_c = model::coupling_flux_correction(params.g_c, ref, w_d, params.alpha_diss);
    const double g_f = model::coupling_flux_correction(params.g_f, ref, w_d, params.alpha_diss);

    const auto n = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    auto index = [&](const std::string& label) -> Eigen::Index {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (modes[static_cast<std::size_t>(i)].label == label) return i;
        }
        return -1;
    };
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) = modes[static_cast<std::size_t>(i)].omega;
    const auto d = index(model::kDissipator);
    if (const auto c = index(model::kCavity); c >= 0) h(d, c) = h(c, d) = g_c;
    if (const auto f = index(model::kFilter); f >= 0) h(d, f) = h(f, d) = g_f;
    if (const auto q = index(model::kQubit); q >= 0) {
        if (const auto c = index(model::kCavity); c >= 0) h(q, c) = h(c, q) = params.g_q;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (vectors) *vectors = solver.eigenvectors();
    return solver.eigenvalues();
}

SpectroscopyResult flux_spectroscopy(const DeviceParams& params, std::span<const double> phi_grid,
                                     const SpectroscopyOptions& options) {
    params.validate();
    if (phi_grid.empty()) throw InvalidArgument("flux_spectroscopy: empty flux grid");
    SpectroscopyResult out;
    out.phi.assign(phi_grid.begin(), phi_grid.end());

    Eigen::MatrixXd prev_vectors;
    Eigen::VectorXd prev_values = single_excitation_frequencies(params, options, phi_grid[0], &prev_vectors);
    const auto n = static_cast<std::size_t>(prev_values.size());
    const auto modes = spectroscopy_modes(params, options, 0.0);
    out.branches.assign(n, {});
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::Index bare = 0;
        prev_vectors.col(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff(&bare);
        out.labels.push_back(modes[static_cast<std::size_t>(bare)].label);
        out.branches[k].push_back(prev_values(static_cast<Eigen::Index>(k)));
    }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 1; i < phi_grid.size(); ++i) {
        Eigen::MatrixXd vectors;
        const Eigen::VectorXd values = single_excitation_frequencies(params, options, phi_grid[i], &vectors);
        const Eigen::MatrixXd overlap = (prev_vectors.transpose() * vectors).cwiseAbs();

        // Exhaustive assignment; at most four modes.
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::size_t> best = perm;
        double best_score = -1.0;
        double best_shift = std::numeric_limits<double>::infinity();
        do {
            double score = 0.0;
            double shift = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                score += overlap(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(perm[k]));
                shift += std::abs(values(static_cast<Eigen::Index>(perm[k])) - prev_values(static_cast<Eigen::Index>(k)));
            }
            if (score > best_score + 1e-12 || (std::abs(score - best_score) <= 1e-12 && shift < best_shift)) {
                best_score = score;
                best_shift = shift;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        Eigen::MatrixXd next_vectors(vectors.rows(), vectors.cols());
        Eigen::VectorXd next_values(values.size());
        for (std::size_t k = 0; k < n; ++k) {
            const auto src = static_cast<Eigen::Index>(best[k]);
            next_vectors.col(static_cast<Eigen::Index>(k)) = vectors.col(src);
            next_values(static_cast<Eigen::Index>(k)) = values(src);
            out.branches[k].push_back(values(src));
        }
        prev_vectors = std::move(next_vectors);
        prev_values = std::move(next_values);
    }
    return out;
}

CrossingGap find_crossing_gap(const DeviceParams& params, const SpectroscopyOptions& options, double omega_target,
                              double half_window) {
    const auto curve = model::FluxCurve::from(params);
    const double center = model::bias_for_frequency(curve, omega_target).phi;
    double lo = std::max(0.0, center - half_window);
    double hi = std::min(0.5, center + half_window);

    // Pair of adjacent eigenvalues straddling the target at the bare crossing.
    const Eigen::VectorXd at_center = single_excitation_frequencies(params, options, center);
    Eigen::Index k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < at_center.size(); ++i) {
        const double dist = std::abs(at_center(i) - omega_target) + std::abs(at_center(i + 1) - omega_target);
        if (dist < best) {
            best = dist;
            k = i;
        }
    }
    auto gap = [&](double phi) {
        const Eigen::VectorXd v = single_excitation_frequencies(params, options, phi);
        return v(k + 1) - v(k);
    };

    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = gap(x1);
    double f2 = gap(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = gap(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = gap(x2);
        }
    }
    const double phi = 0.5 * (lo + hi);
    return {phi, gap(phi)};
}

}  // namespace pdiss::experiments
