#include "pdiss/model.hpp"

#include "pdiss/analytics.hpp"
#include "pdiss/errors.hpp"

#include <cmath>
#include <numbers>

namespace pdiss::model {

using quantum::FewLevelOp;
using quantum::Matrix;
using quantum::ModeKind;

void DeviceParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be > 0");
    };
    auto non_positive = [](double v, const char* name) {
        if (!(v <= 0.0)) throw InvalidArgument(std::string(name) + " must be <= 0");
    };
    auto non_negative = [](double v, const char* name) {
        if (!(v >= 0.0)) throw InvalidArgument(std::string(name) + " must be >= 0");
    };
    positive(omega_c, "omega_c");
    positive(omega_q, "omega_q");
    positive(omega_f, "omega_f");
    positive(omega_diss_max, "omega_diss_max");
    positive(omega_diss, "omega_diss");
    non_positive(alpha_q, "alpha_q");
    non_positive(alpha_diss, "alpha_diss");
    non_negative(kappa_c, "kappa_c");
    non_negative(kappa_f, "kappa_f");
    non_negative(kappa_diss, "kappa_diss");
    non_negative(g_q, "g_q");
    non_negative(g_c, "g_c");
    non_negative(g_f, "g_f");
    if (!(d >= 0.0 && d < 1.0)) throw InvalidArgument("d must lie in [0, 1)");
    positive(T0, "T0");
    positive(T_bath, "T_bath");
}

std::string to_string(ModulationConvention c) {
    return c == ModulationConvention::sigma_z_amplitude ? "sigma_z_amplitude" : "frequency_depth";
}

void DriveSpec::validate() const {
    if (!(epsilon_p >= 0.0)) throw InvalidArgument("epsilon_p must be >= 0");
    if (epsilon_p > 0.0 && !(omega_p > 0.0)) throw InvalidArgument("omega_p must be > 0 when epsilon_p > 0");
    if (cavity_drive && cavity_drive->envelope == Envelope::rect && cavity_drive->stop < cavity_drive->start) {
        throw InvalidArgument("cavity drive stop precedes start");
    }
}

double modulation_depth(const DriveSpec& drive) {
    return drive.convention == ModulationConvention::sigma_z_amplitude ? 2.0 * drive.epsilon_p : drive.epsilon_p;
}

// ---------------------------------------------------------------------------
// Flux tuning

namespace {

// cos^2 + d^2 sin^2, written so it vanishes exactly at half flux when d = 0.
double asymmetry_factor(double d, double phi) {
    const double s = std::sin(std::numbers::pi * phi);
    return std::max(0.0, 1.0 - (1.0 - d * d) * s * s);
}

}  // namespace

double dissipator_frequency(const FluxCurve& curve, FluxPoint phi) {
    return (curve.omega_max - curve.alpha) * std::pow(asymmetry_factor(curve.d, phi.phi), 0.25) + curve.alpha;
}

double dissipator_frequency(const DeviceParams& params, FluxPoint phi) {
    return dissipator_frequency(FluxCurve::from(params), phi);
}

double flux_slope(const FluxCurve& curve, FluxPoint phi) {
    const double x = asymmetry_factor(curve.d, phi.phi);
    if (x <= 0.0) return 0.0;
    const double pi = std::numbers::pi;
    // dX/dphi = -pi sin(2 pi phi) (1 - d^2)
    const double dx = -pi * std::sin(2.0 * pi * phi.phi) * (1.0 - curve.d * curve.d);
    return (curve.omega_max - curve.alpha) * 0.25 * std::pow(x, -0.75) * dx;
}

FluxPoint bias_for_frequency(const FluxCurve& curve, double omega) {
    const double top = dissipator_frequency(curve, {0.0});
    const double bottom = dissipator_frequency(curve, {0.5});
    if (omega > top || omega < bottom) {
        throw InvalidArgument("bias_for_frequency: frequency outside the tunable range");
    }
    // Monotone decreasing on [0, 1/2].
    double lo = 0.0;
    double hi = 0.5;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (dissipator_frequency(curve, {mid}) > omega) lo = mid; else hi = mid;
    }
    return {0.5 * (lo + hi)};
}

double mean_driven_frequency(const FluxCurve& curve, FluxPoint bias, double flux_amplitude) {
    // Trapezoid rule on a periodic integrand converges spectrally.
    constexpr int kSamples = 256;
    double sum = 0.0;
    for (int k = 0; k < kSamples; ++k) {
        const double theta = units::kTwoPi * k / kSamples;
        sum += dissipator_frequency(curve, {bias.phi + flux_amplitude * std::sin(theta)});
    }
    return sum / kSamples;
}

double flux_to_epsilon_p(const DeviceParams& params, FluxPoint phi_bias, double flux_amplitude,
                         ModulationConvention convention) {
    const double depth = std::abs(flux_slope(FluxCurve::from(params), phi_bias)) * flux_amplitude;
    return convention == ModulationConvention::frequency_depth ? depth : 0.5 * depth;
}

double coupling_flux_correction(double g_ref, double omega_ref, double omega_now, double alpha) {
    if (!(omega_ref > 0.0) || !(omega_now > 0.0)) {
        throw InvalidArgument("coupling_flux_correction: frequencies must be > 0");
    }
    const double ej_ratio = std::pow((omega_now - alpha) / (omega_ref - alpha), 2.0);
    return g_ref * std::pow(ej_ratio, 0.25);
}

// ---------------------------------------------------------------------------
// Hamiltonians

SpacePtr cavity_dissipator_space(const ModelOptions& options) {
    return quantum::make_space({
        {kCavity, ModeKind::bosonic, options.cavity_cutoff},
        {kDissipator, ModeKind::few_level, options.dissipator_levels},
    });
}

namespace {

void require_modes(const SpacePtr& space, const char* context) {
    if (!space->has_mode(kCavity) || !space->has_mode(kDissipator)) {
        throw InvalidArgument(std::string(context) + ": space needs '" + kCavity + "' and '" + kDissipator + "' modes");
    }
}

Operator anharmonic_term(const SpacePtr& space, double alpha) {
    const Operator n = few_level_op(space, kDissipator, FewLevelOp::number);
    const Operator id = Operator::identity(space);
    return Complex(0.5 * alpha) * (n * (n - id));
}

}  // namespace

Operator build_jc_hamiltonian(const SpacePtr& space, const DeviceParams& params, double omega_diss) {
    require_modes(space, "build_jc_hamiltonian");
    const Operator a = quantum::annihilation(space, kCavity);
    const Operator ad = a.adjoint();
    const Operator sz = few_level_op(space, kDissipator, FewLevelOp::sigma_z);
    const Operator sp = few_level_op(space, kDissipator, FewLevelOp::raise);
    const Operator sm = few_level_op(space, kDissipator, FewLevelOp::lower);

    Operator h = Complex(params.omega_c) * (ad * a);
    h -= Complex(0.5 * omega_diss) * sz;
    h += Complex(params.g_c) * ((ad + a) * (sp + sm));
    if (space->mode(kDissipator).dim > 2) h += anharmonic_term(space, params.alpha_diss);
    return h;
}

TimeDependentTerm build_parametric_drive(const SpacePtr& space, const DriveSpec& drive) {
    drive.validate();
    if (!space->has_mode(kDissipator)) throw InvalidArgument("build_parametric_drive: no dissipator mode");
    const double amplitude = 0.5 * modulation_depth(drive);
    const double omega = drive.omega_p;
    TimeDependentTerm term{
        few_level_op(space, kDissipator, FewLevelOp::sigma_z),
        [amplitude, omega](double t) { return Complex(amplitude * std::sin(omega * t), 0.0); },
        amplitude,
        omega > 0.0 ? units::kTwoPi / omega : 0.0,
    };
    return term;
}

std::vector<TimeDependentTerm> build_cavity_drive(const SpacePtr& space, const CavityDrive& drive) {
    if (drive.envelope == Envelope::off || drive.amplitude == 0.0) return {};
    const Operator a = quantum::annihilation(space, kCavity);
    const double amp = drive.amplitude;
    const double w = drive.frequency;
    const double t0 = drive.start;
    const double t1 = drive.stop;
    const double period = w > 0.0 ? units::kTwoPi / w : 0.0;
    auto window = [t0, t1](double t) { return t >= t0 && t <= t1; };
    std::vector<TimeDependentTerm> terms;
    terms.push_back({a,
                     [=](double t) { return window(t) ? amp * std::exp(Complex(0.0, w * t)) : Complex(0.0); },
                     amp, period});
    terms.push_back({a.adjoint(),
                     [=](double t) { return window(t) ? amp * std::exp(Complex(0.0, -w * t)) : Complex(0.0); },
                     amp, period});
    return terms;
}

double sideband_coupling(double g_c, double depth, double omega_p, int n) {
    if (!(omega_p > 0.0)) throw InvalidArgument("sideband_coupling: omega_p must be > 0");
    double x = depth / omega_p;
    const unsigned order = static_cast<unsigned>(std::abs(n));
    double sign = 1.0;
    if (n < 0 && (order % 2 == 1)) sign = -sign;
    if (x < 0.0) {
        x = -x;
        if (order % 2 == 1) sign = -sign;
    }
    return sign * g_c * std::cyl_bessel_j(static_cast<double>(order), x);
}

SidebandCoupling effective_sideband_hamiltonian(const DeviceParams& params, const DriveSpec& drive, int n_sideband,
                                                std::optional<double> omega_diss_mean) {
    if (n_sideband < 0) throw InvalidArgument("effective_sideband_hamiltonian: n_sideband must be >= 0");
    const double mean = omega_diss_mean.value_or(params.omega_diss);
    const double delta = params.omega_c - mean;
    SidebandCoupling out;
    out.g_n = drive.omega_p > 0.0 ? sideband_coupling(params.g_c, modulation_depth(drive), drive.omega_p, n_sideband)
                                  : (n_sideband == 0 ? params.g_c : 0.0);
    out.detuning = n_sideband * drive.omega_p - std::abs(delta);
    return out;
}

DriveSpec drive_for_coupling(const DeviceParams& params, double g_p, double omega_p, ModulationConvention convention) {
    if (!(omega_p > 0.0)) throw InvalidArgument("drive_for_coupling: omega_p must be > 0");
    if (g_p < 0.0) throw InvalidArgument("drive_for_coupling: g_p must be >= 0");
    // J_1 rises monotonically to its first maximum at x = 1.8412.
    constexpr double kFirstMax = 1.8411837813406593;
    const double target = g_p / params.g_c;
    if (target > std::cyl_bessel_j(1.0, kFirstMax)) {
        throw InvalidArgument("drive_for_coupling: g_p exceeds the first-sideband maximum");
    }
    double lo = 0.0;
    double hi = kFirstMax;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (std::cyl_bessel_j(1.0, mid) < target) lo = mid; else hi = mid;
    }
    const double depth = 0.5 * (lo + hi) * omega_p;
    DriveSpec drive;
    drive.omega_p = omega_p;
    drive.convention = convention;
    drive.epsilon_p = convention == ModulationConvention::sigma_z_amplitude ? 0.5 * depth : depth;
    return drive;
}

Operator rotating_frame_hamiltonian(const SpacePtr& space, const DeviceParams& params, double g_p,
                                    double drive_detuning) {
    require_modes(space, "rotating_frame_hamiltonian");
    const Operator a = quantum::annihilation(space, kCavity);
    const Operator sp = few_level_op(space, kDissipator, FewLevelOp::raise);
    const Operator sm = few_level_op(space, kDissipator, FewLevelOp::lower);
    const Operator nd = few_level_op(space, kDissipator, FewLevelOp::number);

    Operator h = Complex(drive_detuning) * nd;
    h += Complex(g_p) * (a.adjoint() * sm + a * sp);
    if (space->mode(kDissipator).dim > 2) h += anharmonic_term(space, params.alpha_diss);
    return h;
}

double dressed_detuning(const SpacePtr& space, const DeviceParams& params, double omega_diss) {
    const Operator h = build_jc_hamiltonian(space, params, omega_diss);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    const auto index_e0 = [&] {
        std::vector<std::size_t> levels(space->mode_count(), 0);
        levels[space->index_of(kDissipator)] = 1;
        return levels;
    }();
    const auto index_g1 = [&] {
        std::vector<std::size_t> levels(space->mode_count(), 0);
        levels[space->index_of(kCavity)] = 1;
        return levels;
    }();
    auto flat = [&](const std::vector<std::size_t>& levels) {
        std::size_t idx = 0;
        for (std::size_t k = 0; k < levels.size(); ++k) idx = idx * space->modes()[k].dim + levels[k];
        return static_cast<Eigen::Index>(idx);
    };
    auto dressed_energy = [&](Eigen::Index bare) {
        Eigen::Index best = 0;
        double best_overlap = -1.0;
        for (Eigen::Index k = 0; k < es.eigenvectors().cols(); ++k) {
            const double o = std::norm(es.eigenvectors()(bare, k));
            if (o > best_overlap) {
                best_overlap = o;
                best = k;
            }
        }
        return es.eigenvalues()(best);
    };
    return std::abs(dressed_energy(flat(index_e0)) - dressed_energy(flat(index_g1)));
}

std::vector<Operator> collapse_operators(const SpacePtr& space, const DeviceParams& params, bool include_thermal) {
    std::vector<Operator> ops;
    const bool has_cavity = space->has_mode(kCavity);
    const bool has_diss = space->has_mode(kDissipator);
    double n_c = 0.0;
    double n_d = 0.0;
    if (include_thermal) {
        n_c = analytics::thermal_occupation(params.omega_c, params.T0);
        n_d = analytics::thermal_occupation(params.omega_diss, params.T_bath);
    }
    if (has_cavity) {
        const Operator a = quantum::annihilation(space, kCavity);
        ops.push_back(Complex(std::sqrt(params.kappa_c * (1.0 + n_c))) * a);
        if (include_thermal && n_c > 0.0) ops.push_back(Complex(std::sqrt(params.kappa_c * n_c)) * a.adjoint());
    }
    if (has_diss) {
        const auto kind = space->mode(kDissipator).kind;
        const Operator sm = kind == ModeKind::bosonic ? quantum::annihilation(space, kDissipator)
                                                      : few_level_op(space, kDissipator, FewLevelOp::lower);
        ops.push_back(Complex(std::sqrt(params.kappa_diss * (1.0 + n_d))) * sm);
        if (include_thermal && n_d > 0.0) ops.push_back(Complex(std::sqrt(params.kappa_diss * n_d)) * sm.adjoint());
    }
    return ops;
}

}  // namespace pdiss::model
