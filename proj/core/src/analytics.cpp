#include "pdiss/analytics.hpp"

#include "pdiss/errors.hpp"
#include "pdiss/units.hpp"

#include <cmath>

namespace pdiss::analytics {

double parametric_coupling(double g_c, double epsilon_p, double delta) {
    if (delta == 0.0) throw InvalidArgument("parametric_coupling: delta must be nonzero");
    return g_c * epsilon_p / std::abs(delta);
}

bool weak_drive_violated(double epsilon_p, double delta) {
    return delta == 0.0 || std::abs(epsilon_p / delta) > kWeakDriveRatioLimit;
}

double transition_amplitude(int n, double g_c, double epsilon_p, double delta) {
    if (n < 0) throw InvalidArgument("transition_amplitude: n must be >= 0");
    if (delta == 0.0) throw InvalidArgument("transition_amplitude: delta must be nonzero");
    return -2.0 * std::sqrt(n + 1.0) * g_c * epsilon_p / std::abs(delta);
}

double swap_rate(int n, double g_c, double epsilon_p, double delta) {
    return 0.5 * std::abs(transition_amplitude(n, g_c, epsilon_p, delta));
}

double swap_rate(int n, double g_c, double epsilon_p, double delta, double omega_p) {
    const double dw = transition_amplitude(n, g_c, epsilon_p, delta);
    const double detuning = omega_p - std::abs(delta);
    return 0.5 * std::sqrt(detuning * detuning + dw * dw);
}

double rabi_probability(int n, double g_c, double epsilon_p, double delta, double omega_p, double t) {
    if (t < 0.0) throw InvalidArgument("rabi_probability: t must be >= 0");
    const double omega_r = swap_rate(n, g_c, epsilon_p, delta, omega_p);
    if (omega_r == 0.0) return 0.0;
    // |dw| / 2 = sqrt(n+1) g_c eps / Delta, so the resonant prefactor is exactly 1.
    const double coupling = 0.5 * std::abs(transition_amplitude(n, g_c, epsilon_p, delta));
    const double prefactor = std::pow(coupling / omega_r, 2.0);
    const double s = std::sin(omega_r * t);
    return prefactor * s * s;
}

EffectiveLoss effective_loss(double g_p, double kappa_diss) {
    if (g_p < 0.0) throw InvalidArgument("effective_loss: g_p must be >= 0");
    if (!(kappa_diss > 0.0)) throw InvalidArgument("effective_loss: kappa_diss must be > 0");
    const double critical = 0.25 * kappa_diss;
    if (g_p < critical) {
        const double disc = kappa_diss * kappa_diss - 16.0 * g_p * g_p;
        // Rationalized form avoids cancellation at small g_p.
        const double rate = 8.0 * g_p * g_p / (kappa_diss + std::sqrt(disc));
        return {rate, DampingRegime::overdamped};
    }
    return {0.5 * kappa_diss, g_p == critical ? DampingRegime::critical : DampingRegime::underdamped};
}

double thermal_occupation(double omega, double T) {
    if (!(omega > 0.0)) throw InvalidArgument("thermal_occupation: omega must be > 0");
    if (T < 0.0) throw InvalidArgument("thermal_occupation: T must be >= 0");
    if (T == 0.0) return 0.0;
    const double x = units::constants::kHbarOverKbPerRadPerUs * omega / T;
    return 1.0 / std::expm1(x);
}

double occupation_to_temperature(double omega, double n_bar) {
    if (!(omega > 0.0)) throw InvalidArgument("occupation_to_temperature: omega must be > 0");
    if (!(n_bar > 0.0)) throw InvalidArgument("occupation_to_temperature: n_bar must be > 0");
    return units::constants::kHbarOverKbPerRadPerUs * omega / std::log1p(1.0 / n_bar);
}

double driven_cavity_temperature(const TwoBathParams& p, double kappa_eff) {
    if (kappa_eff < 0.0) throw InvalidArgument("driven_cavity_temperature: kappa_eff must be >= 0");
    const double total = p.kappa_c + kappa_eff;
    if (total == 0.0) throw InvalidArgument("driven_cavity_temperature: kappa_c + kappa_eff is zero");
    const double t_eff = p.omega_c / p.omega_diss * p.T_bath;
    return (p.kappa_c * p.T0 + kappa_eff * t_eff) / total;
}

double photon_dephasing(double chi, double kappa, double n_bar, PhotonStatistics m) {
    const double chi2 = chi * chi;
    const double denom = chi2 + kappa * kappa;
    if (denom == 0.0) return 0.0;
    return static_cast<double>(m) * chi2 * kappa / denom * n_bar;
}

DephasingBudget dephasing_budget(double chi, double kappa, double n_bar, PhotonStatistics m,
                                 double gamma_2_background) {
    return {photon_dephasing(chi, kappa, n_bar, m), gamma_2_background, n_bar, m};
}

double reset_dephasing(const ResetDephasingParams& p, double tau) {
    const double chi2 = p.chi * p.chi;
    const double denom = chi2 + p.kappa_c * p.kappa_c;
    const double amplitude = denom == 0.0 ? 0.0 : 2.0 * p.n_bar0 * chi2 * p.kappa_c / denom;
    return amplitude * std::exp(-p.gamma_cav * tau) + p.gamma_2_0;
}

std::vector<double> reset_dephasing_curve(const ResetDephasingParams& p, std::span<const double> tau_grid) {
    if (p.n_bar0 < 0.0 || p.kappa_c < 0.0 || p.gamma_cav < 0.0 || p.gamma_2_0 < 0.0) {
        throw InvalidArgument("reset_dephasing_curve: rates and occupation must be >= 0");
    }
    std::vector<double> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid) out.push_back(reset_dephasing(p, tau));
    return out;
}

BathRates bath_rates(double kappa, double n_bar) { return {kappa * n_bar, kappa}; }

DrivenBalance driven_balance(const BathRates& c, const BathRates& d, double kappa_eff) {
    const double denom = c.gamma_minus * d.gamma_minus + kappa_eff * (c.gamma_minus + d.gamma_minus);
    if (!(c.gamma_minus > 0.0) || denom == 0.0) throw InvalidArgument("driven_balance: zero denominator");
    DrivenBalance out;
    out.n_c = (c.gamma_plus * d.gamma_minus + kappa_eff * (d.gamma_plus + c.gamma_plus)) / denom;
    const double denom_d = d.gamma_minus + kappa_eff;
    if (denom_d == 0.0) throw InvalidArgument("driven_balance: zero dissipator denominator");
    out.n_diss = (d.gamma_plus + kappa_eff * out.n_c) / denom_d;
    out.delta_n = out.n_c - c.gamma_plus / c.gamma_minus;
    return out;
}

double driven_balance_difference(const BathRates& c, const BathRates& d, double kappa_eff) {
    const double num = kappa_eff * (c.gamma_minus * d.gamma_plus - c.gamma_plus * d.gamma_minus);
    const double den =
        c.gamma_minus * (d.gamma_minus * kappa_eff + c.gamma_minus * (d.gamma_minus + kappa_eff));
    if (den == 0.0) throw InvalidArgument("driven_balance_difference: zero denominator");
    return num / den;
}

bool cooling_condition(const BathRates& c, const BathRates& d) {
    return c.gamma_minus * d.gamma_plus < c.gamma_plus * d.gamma_minus;
}

double incoherent_exchange_rate(double g, double kappa_a, double kappa_b) {
    const double total = kappa_a + kappa_b;
    if (!(total > 0.0)) throw InvalidArgument("incoherent_exchange_rate: total damping must be > 0");
    return 4.0 * g * g / total;
}

}  // namespace pdiss::analytics
