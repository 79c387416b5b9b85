#pragma once

// Closed-form predictions: parametric coupling, swap rates, damped loss,
// thermal occupations, cavity temperature, photon-induced dephasing and the
// detailed-balance model of driven refrigeration.

#include <span>
#include <vector>

namespace pdiss::analytics {

// g_p = g_c eps / Delta. Throws on delta == 0.
double parametric_coupling(double g_c, double epsilon_p, double delta);
// Ratio above which eps << Delta no longer holds.
inline constexpr double kWeakDriveRatioLimit = 0.2;
bool weak_drive_violated(double epsilon_p, double delta);

// Resonant Omega_R = sqrt(n+1) g_c eps / Delta.
double swap_rate(int n, double g_c, double epsilon_p, double delta);
// Off-resonant generalization 1/2 sqrt((w_p - Delta)^2 + |dw|^2),
// dw = -2 sqrt(n+1) g_c eps / Delta.
double swap_rate(int n, double g_c, double epsilon_p, double delta, double omega_p);
double transition_amplitude(int n, double g_c, double epsilon_p, double delta);

// P = (g_c eps / (Delta Omega_R))^2 sin^2(Omega_R t) with sqrt(n+1) carried in
// the transition amplitude, so the prefactor is 1 on resonance.
double rabi_probability(int n, double g_c, double epsilon_p, double delta, double omega_p, double t);

enum class DampingRegime { overdamped, critical, underdamped };

struct EffectiveLoss {
    double rate = 0.0;
    DampingRegime regime = DampingRegime::overdamped;
};

// Overdamped (g_p < k/4): 1/2 (k - sqrt(k^2 - 16 g_p^2)); otherwise k/2.
EffectiveLoss effective_loss(double g_p, double kappa_diss);

// Bose-Einstein occupation; omega in rad/us, T in kelvin.
double thermal_occupation(double omega, double T);
double occupation_to_temperature(double omega, double n_bar);

struct TwoBathParams {
    double kappa_c = 0.0;
    double omega_c = 0.0;
    double omega_diss = 0.0;
    double T0 = 0.0;
    double T_bath = 0.0;
};

// (k_c T0 + k_eff (w_c / w_diss) T_bath) / (k_c + k_eff)
double driven_cavity_temperature(const TwoBathParams& p, double kappa_eff);

enum class PhotonStatistics { thermal = 1, coherent = 2 };

// m chi^2 kappa / (chi^2 + kappa^2) n
double photon_dephasing(double chi, double kappa, double n_bar, PhotonStatistics m);

struct DephasingBudget {
    double gamma_phi_photon = 0.0;
    double gamma_2_background = 0.0;
    double n_bar = 0.0;
    PhotonStatistics m = PhotonStatistics::thermal;

    double total() const { return gamma_phi_photon + gamma_2_background; }
};

DephasingBudget dephasing_budget(double chi, double kappa, double n_bar, PhotonStatistics m, double gamma_2_background);

struct ResetDephasingParams {
    double n_bar0 = 0.0;
    double chi = 0.0;
    double kappa_c = 0.0;
    double gamma_cav = 0.0;
    double gamma_2_0 = 0.0;
};

// Gamma_2(tau) = 2 n0 chi^2 k_c / (chi^2 + k_c^2) e^{-gamma_cav tau} + Gamma_2^0
double reset_dephasing(const ResetDephasingParams& p, double tau);
std::vector<double> reset_dephasing_curve(const ResetDephasingParams& p, std::span<const double> tau_grid);

struct BathRates {
    double gamma_plus = 0.0;   // excitation, 1/us
    double gamma_minus = 0.0;  // relaxation, 1/us

    double occupation() const { return gamma_plus / gamma_minus; }
};

// Rates of a bosonic mode damped at `kappa` by a bath at occupation n:
// gamma_- = kappa, gamma_+ = kappa n.
BathRates bath_rates(double kappa, double n_bar);

struct DrivenBalance {
    double n_c = 0.0;
    double n_diss = 0.0;
    double delta_n = 0.0;  // n_c - gamma_c+/gamma_c-
};

// Steady state of the rate equations for cavity and dissipator exchanging
// excitations at kappa_eff.
DrivenBalance driven_balance(const BathRates& cavity, const BathRates& dissipator, double kappa_eff);
// Closed form of n_c - n_0.
double driven_balance_difference(const BathRates& cavity, const BathRates& dissipator, double kappa_eff);
// Driving cools the cavity iff gamma_c- gamma_d+ < gamma_c+ gamma_d-.
bool cooling_condition(const BathRates& cavity, const BathRates& dissipator);

// Exchange rate of two resonantly coupled damped modes in the rate-equation
// limit: 4 g^2 / (k_a + k_b).
double incoherent_exchange_rate(double g, double kappa_a, double kappa_b);

}  // namespace pdiss::analytics
