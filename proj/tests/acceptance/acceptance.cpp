// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "config.hpp"
#include "runner.hpp"

#include "pdiss/analytics.hpp"
#include "pdiss/calibration.hpp"
#include "pdiss/dynamics.hpp"
#include "pdiss/experiments.hpp"
#include "pdiss/model.hpp"
#include "pdiss/quantum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace pdiss;
using units::from_GHz;
using units::from_kHz;
using units::from_MHz;
using units::to_GHz;
using units::to_MHz;

namespace {

class Checks {
public:
    // Records one sub-check; `detail` is printed either way.
    void expect(bool ok, const std::string& detail) {
        ok_ = ok_ && ok;
        lines_.push_back(std::string(ok ? "    ok   " : "    FAIL ") + detail);
    }
    void within(double value, double target, double rel, const std::string& what) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s = %.6g (target %.6g +/- %.3g%%)", what.c_str(), value, target, rel * 100);
        expect(std::isfinite(value) && std::abs(value - target) <= rel * std::abs(target), buf);
    }
    bool ok() const { return ok_; }
    const std::vector<std::string>& lines() const { return lines_; }

private:
    bool ok_ = true;
    std::vector<std::string> lines_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double resonance(const model::DeviceParams& p) { return std::abs(p.omega_diss - p.omega_c); }

std::vector<double> grid(double a, double b, int n) { return dynamics::linspace(a, b, n); }

void closed_forms(Checks& c) {
    const model::DeviceParams p;
    c.within(analytics::thermal_occupation(from_GHz(5.594), 0.115), 0.107, 0.01, "n_th(5.594 GHz, 115 mK)");
    c.within(analytics::thermal_occupation(from_GHz(5.594), 0.077), 0.032, 0.03, "n_th(5.594 GHz, 77 mK)");
    const analytics::TwoBathParams bath{3.0, from_GHz(5.594), from_GHz(8.6), 0.115, 0.115};
    c.within(units::to_mK(analytics::driven_cavity_temperature(bath, 54.0)), 77.0, 0.02, "T_c(k_eff = 54 /us) [mK]");
    c.within(analytics::photon_dephasing(from_kHz(200), from_kHz(477), 0.107, analytics::PhotonStatistics::thermal),
             0.048, 0.05, "Gamma_phi(200 kHz, 477 kHz, 0.107) [/us]");
    c.within(analytics::photon_dephasing(from_kHz(200), 57.0, 0.032, analytics::PhotonStatistics::thermal) * 1e3, 0.9,
             0.1, "Gamma_phi(k = 57 /us, 0.032) [/ms]");
    const auto curve = model::FluxCurve::from(p);
    c.within(to_GHz(model::dissipator_frequency(curve, {0.0})), 15.3, 1e-9, "w_diss(0) [GHz]");
    c.within(to_GHz(model::dissipator_frequency(curve, {0.5})), 4.2, 0.01, "w_diss(0.5) [GHz]");
}

void lindblad_oracle(Checks& c) {
    model::DeviceParams p;
    p.kappa_c = 0.0;  // isolate the dissipator-induced rate
    const double kd = p.kappa_diss;
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double g = kd / 40 + (kd / 8 - kd / 40) * k / 9.0;
        const auto pt = experiments::ringdown_point(p, resonance(p), g);
        const double closed_form = analytics::effective_loss(g, kd).rate;
        const double rel = std::abs(pt.rate / closed_form - 1);
        worst = std::max(worst, pt.ok ? rel : INFINITY);
        c.expect(pt.ok && rel <= 0.1, fmt("g_p/2pi = %5.2f MHz: fitted %.4f vs closed form %.4f /us", to_MHz(g), pt.rate, closed_form));
    }
    c.expect(worst <= 0.1, fmt("worst relative deviation %.4f (limit 0.1)", worst));

    // Underdamped: g_p = 5 kappa_diss.
    const model::DeviceParams d;
    const auto space = model::cavity_dissipator_space({3, 2});
    const double g = 5 * d.kappa_diss;
    dynamics::LindbladSystem sys{model::rotating_frame_hamiltonian(space, d, g, 0.0), {},
                                 model::collapse_operators(space, d, false)};
    const auto t = grid(0, 24.0 / d.kappa_diss, 4001);
    const auto trace = dynamics::evolve(sys, quantum::DensityMatrix::basis_state(space, {1, 0}), t,
                                        {{"n", quantum::number(space, model::kCavity)}});
    const auto& n = trace.values("n");
    c.within(calibration::dominant_frequency(t, n, d.kappa_diss), 2 * g, 0.05, "oscillation frequency vs 2 Omega_R [rad/us]");
    c.within(calibration::fit_peak_envelope(t, n).value("rate"), d.kappa_diss / 2, 0.1, "envelope decay vs kappa_diss/2 [/us]");
}

void frame_consistency(Checks& c) {
    const model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({3, 2});
    const double g = from_MHz(7.0);
    const auto drive = model::drive_for_coupling(p, g, model::dressed_detuning(space, p, p.omega_diss));
    const double ratio = drive.epsilon_p / resonance(p);
    c.expect(ratio <= 0.05, fmt("eps_p / Delta = %.4f", ratio));
    const double keff = p.kappa_c + analytics::effective_loss(g, p.kappa_diss).rate;
    const auto t = grid(0, 3.0 / keff, 301);
    const auto rho0 = quantum::DensityMatrix::basis_state(space, {1, 0});
    const std::vector<dynamics::NamedObservable> obs{{"n", quantum::number(space, model::kCavity)}};
    const auto loss = model::collapse_operators(space, p, false);
    const dynamics::LindbladSystem rot{model::rotating_frame_hamiltonian(space, p, g, 0.0), {}, loss};
    const dynamics::LindbladSystem lab{model::build_jc_hamiltonian(space, p, p.omega_diss),
                                       {model::build_parametric_drive(space, drive)}, loss};
    const auto a = dynamics::evolve(rot, rho0, t, obs).values("n");
    const auto b = dynamics::evolve(lab, rho0, t, obs).values("n");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    const double rms = std::sqrt(num / den);
    c.expect(rms <= 0.05, fmt("relative RMS difference over 3/k_eff = %.4f (limit 0.05)", rms));
}

void ringdown_map(Checks& c) {
    const model::DeviceParams p;
    const auto grid = experiments::default_ringdown_grid(p);
    const auto r = experiments::ringdown_spectroscopy(p, grid);
    const auto& w = grid.axes[0].values;
    const auto& g = grid.axes[1].values;
    const std::size_t ng = g.size();
    std::size_t failed = 0;
    for (const auto& pt : r.points) failed += pt.ok ? 0 : 1;
    c.expect(failed == 0, fmt("%g of %g points failed to fit", double(failed), double(r.points.size())));

    std::size_t centre = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (std::abs(w[i] - r.resonance) < std::abs(w[centre] - r.resonance)) centre = i;
    }
    bool ridge = true;
    for (std::size_t j = 1; j < ng; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (r.points[i * ng + j].rate > r.points[best * ng + j].rate) best = i;
        }
        ridge = ridge && best == centre;
    }
    c.expect(ridge, fmt("rate maximum at w_p - Delta = %.2f MHz for every nonzero drive", to_MHz(w[centre] - r.resonance)));

    const double top = r.points[centre * ng + ng - 1].rate;
    c.expect(std::abs(to_MHz(g.back()) - 11.0) < 1e-9 && top >= 45.0 && top <= 65.0,
             fmt("on-resonance rate at g_p/2pi = %.1f MHz: %.3f /us (window [45, 65])", to_MHz(g.back()), top));

    double worst_zero = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        worst_zero = std::max(worst_zero, std::abs(r.points[i * ng].rate / 3.0 - 1));
    }
    c.expect(worst_zero <= 0.05, fmt("zero-drive rates within %.4f of 3.0 /us (limit 0.05)", worst_zero));

    std::vector<double> power;
    std::vector<double> excess;
    for (std::size_t j = 0; j <= (ng - 1) / 2; ++j) {
        power.push_back(g[j] * g[j]);
        excess.push_back(r.points[centre * ng + j].rate - r.points[centre * ng].rate);
    }
    const auto fit = calibration::linear_regression(power, excess);
    c.expect(fit.r2 > 0.99, fmt("rate vs g_p^2 on the lower half: R^2 = %.5f over %g points", fit.r2, double(power.size())));
}

void reset_timing(Checks& c) {
    const model::DeviceParams p;
    const auto tau = grid(0.0, 3.0, 601);
    experiments::ResetSpec spec;
    const auto slow = experiments::reset_experiment(p, spec, tau);
    spec.kappa_eff = experiments::exchange_rate(from_MHz(10.0), p.kappa_diss);
    const auto fast = experiments::reset_experiment(p, spec, tau);
    c.within(fast.recovery_time * 1e3, 170.0, 0.2, "driven recovery [ns]");
    c.within(slow.recovery_time * 1e3, 2200.0, 0.25, "undriven recovery [ns]");
    const double ratio = slow.recovery_time / fast.recovery_time;
    c.expect(ratio > 10.0, fmt("speedup %.2f (> 10)", ratio));
}

void refrigeration_map(Checks& c) {
    const auto cfg = app::default_config(app::Experiment::cool);
    const auto r = experiments::refrigeration_experiment(cfg.device, cfg.cool.spec);
    const auto& rows = cfg.cool.spec.injected_n;
    const std::size_t np = r.n_power;
    bool monotone = true;
    for (std::size_t row = 0; row < rows.size(); ++row) {
        for (std::size_t i = 1; i < np; ++i) {
            monotone = monotone && r.points[row * np + i].gamma_2e <= r.points[row * np + i - 1].gamma_2e + 1e-12;
        }
    }
    c.expect(monotone, fmt("Gamma_2E nonincreasing in power for all %g rows", double(rows.size())));
    const std::vector<std::pair<double, double>> targets{{0.14, 0.274}, {0.35, 0.425}, {1.10, 0.980}};
    for (const auto& [n, target] : targets) {
        bool found = false;
        for (std::size_t row = 0; row < rows.size(); ++row) {
            if (std::abs(rows[row] - n) > 1e-12) continue;
            found = true;
            c.within(r.points[row * np].gamma_2e, target, 0.2, fmt("zero-power Gamma_2E at injected n = %.2f [/us]", n));
        }
        c.expect(found, fmt("row for injected n = %.2f present", n));
    }
    c.within(r.points[np - 1].gamma_2e, cfg.cool.spec.gamma_2_0, 0.1,
             fmt("Gamma_2E at g_p/2pi = %.1f MHz, no cavity drive [/us]", to_MHz(r.points[np - 1].g_p)));
}

void balance_suite(Checks& c) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> rate(0.01, 100.0);
    std::uniform_real_distribution<double> occ(0.0, 2.0);
    int bad = 0;
    for (int k = 0; k < 100; ++k) {
        const auto cav = analytics::bath_rates(rate(rng), occ(rng));
        const auto dis = analytics::bath_rates(rate(rng), occ(rng));
        const double dn = analytics::driven_balance(cav, dis, rate(rng)).delta_n;
        const bool cools = analytics::cooling_condition(cav, dis);
        const double law = cav.gamma_minus * dis.gamma_plus - cav.gamma_plus * dis.gamma_minus;
        if ((cools && !(dn < 0.0)) || (!cools && dn < 0.0) || (law != 0.0 && std::signbit(dn) != std::signbit(law))) ++bad;
    }
    c.expect(bad == 0, fmt("%g of 100 random tuples violate the cooling sign law", double(bad)));

    const auto cav = analytics::bath_rates(3.0, 0.107);
    const auto dis = analytics::bath_rates(377.0, 0.02);
    const auto zero = analytics::driven_balance(cav, dis, 0.0);
    c.within(zero.n_c, 0.107, 1e-12, "n_c at k_eff = 0");
    const auto huge = analytics::driven_balance(cav, dis, 1e9);
    c.expect(std::abs(huge.n_c - huge.n_diss) < 1e-6,
             fmt("|n_c - n_diss| at k_eff = 1e9: %.3g", std::abs(huge.n_c - huge.n_diss)));

    // Two damped bosonic modes exchanging resonantly, cutoff 6.
    const auto space = quantum::make_space({{"a", quantum::ModeKind::bosonic, 6}, {"b", quantum::ModeKind::bosonic, 6}});
    const double ka = 1.0;
    const double kb = 20.0;
    const double na = 0.3;
    const double nb = 0.05;
    const double g = 2.0;
    const auto a = quantum::annihilation(space, "a");
    const auto b = quantum::annihilation(space, "b");
    const auto ad = quantum::creation(space, "a");
    const auto bd = quantum::creation(space, "b");
    dynamics::LindbladSystem sys{quantum::Complex(g) * (ad * b + a * bd), {},
                                 {quantum::Complex(std::sqrt(ka * (1 + na))) * a, quantum::Complex(std::sqrt(ka * na)) * ad,
                                  quantum::Complex(std::sqrt(kb * (1 + nb))) * b, quantum::Complex(std::sqrt(kb * nb)) * bd}};
    const auto rho = dynamics::steady_state(sys);
    const double numeric = quantum::expectation(rho, quantum::number(space, "a")).real();
    const auto balance = analytics::driven_balance(analytics::bath_rates(ka, na), analytics::bath_rates(kb, nb),
                                                   analytics::incoherent_exchange_rate(g, ka, kb));
    c.within(numeric, balance.n_c, 0.05, "steady-state n_a vs rate balance");
}

void calibration_suite(Checks& c) {
    const double tight = 1e-6;
    {
        const auto t = grid(0, 0.1, 200);
        std::vector<double> y;
        for (double v : t) y.push_back(39.0 * std::exp(-57.4 * v) + 0.3);
        const auto f = calibration::fit_exponential(t, y);
        c.within(f.value("rate"), 57.4, tight, "exponential rate, noiseless");
        c.within(f.value("amplitude"), 39.0, tight, "exponential amplitude, noiseless");
        std::vector<double> y0;
        for (double v : t) y0.push_back(39.0 * std::exp(-57.4 * v));
        c.within(calibration::fit_exponential_no_offset(t, y0).value("rate"), 57.4, tight, "exponential (no offset) rate");
    }
    {
        const auto f = grid(-3, 3, 301);
        std::vector<double> y;
        for (double v : f) y.push_back(0.02 + 1.3 / (1 + std::pow(2 * (v - 0.11) / 0.477, 2)));
        const auto fit = calibration::fit_lorentzian(f, y);
        c.within(fit.value("fwhm"), 0.477, tight, "Lorentzian FWHM [MHz]");
        c.within(fit.value("center"), 0.11, tight, "Lorentzian center [MHz]");
    }
    {
        std::mt19937_64 rng(57);
        std::normal_distribution<double> noise(0.0, 0.1);
        const auto t = grid(0, 5.0 / 57.4, 100);
        std::vector<double> y;
        for (double v : t) y.push_back(39.0 * std::exp(-57.4 * v) + noise(rng));
        const auto f = calibration::fit_exponential(t, y);
        const double z = std::abs(f.value("rate") - 57.4) / f.sigma("rate");
        c.expect(z < 3.0, fmt("noisy rate %.3f +/- %.3f, %.2f sigma from 57.4", f.value("rate"), f.sigma("rate"), z));
    }
    const model::DeviceParams p;
    const auto curve = model::FluxCurve::from(p);
    for (const auto& [target, g, hw] : std::vector<std::tuple<double, double, double>>{
             {p.omega_c, from_MHz(118), 0.03}, {p.omega_f, from_MHz(535), 0.1}}) {
        const double centre = model::bias_for_frequency(curve, target).phi;
        const auto phi = grid(centre - hw, centre + hw, 81);
        std::vector<double> lo;
        std::vector<double> up;
        for (double x : phi) {
            const double w1 = model::dissipator_frequency(curve, {x});
            const double half = std::sqrt(0.25 * (w1 - target) * (w1 - target) + g * g);
            lo.push_back(0.5 * (w1 + target) - half);
            up.push_back(0.5 * (w1 + target) + half);
        }
        const auto fit = calibration::fit_avoided_crossing(phi, lo, up, curve);
        c.within(to_MHz(fit.value("g")), to_MHz(g), 0.005, "avoided-crossing g [MHz]");
    }
    {
        const model::FluxCurve truth{from_GHz(15.3), from_MHz(-350), 0.085};
        const auto phi = grid(0.0, 0.48, 25);
        std::vector<double> w;
        for (double x : phi) w.push_back(model::dissipator_frequency(truth, {x}));
        const auto fit = calibration::fit_flux_curve(phi, w);
        c.within(to_GHz(fit.value("omega_max")), 15.3, 0.001, "flux-curve w_max [GHz]");
        c.within(fit.value("d"), 0.085, 0.001, "flux-curve d");
    }
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void structural(Checks& c) {
    const model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({4, 2});
    dynamics::LindbladSystem sys{model::rotating_frame_hamiltonian(space, p, from_MHz(5.0), from_MHz(3.0)), {},
                                 model::collapse_operators(space, p, true)};
    double herm = 0.0;
    double eig = 0.0;
    dynamics::EvolveOptions opts;
    opts.observer = [&](double, const quantum::Matrix& rho) {
        herm = std::max(herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        eig = std::min(eig, quantum::hermitian_eigenvalues(rho).minCoeff());
    };
    dynamics::EvolveStats stats;
    dynamics::evolve(sys, quantum::DensityMatrix::basis_state(space, {2, 0}), std::vector<double>{0.0, 10.0}, {}, opts,
                     &stats);
    c.expect(stats.max_trace_drift < 1e-8, fmt("trace drift over 10 us: %.3g", stats.max_trace_drift));
    c.expect(herm < 1e-9, fmt("max |rho - rho^dag|: %.3g", herm));
    c.expect(eig >= -1e-7, fmt("min eigenvalue: %.3g", eig));

    auto cfg = app::load_config(std::string(PDISS_CONFIG_DIR) + "/ringdown_quick.yaml");
    cfg.seed = 7;
    cfg.ringdown.options.noise_sigma = 0.01;
    const auto root = fs::temp_directory_path() / "pdiss_acceptance";
    fs::remove_all(root);
    const auto m1 = app::run_to_directory(cfg, root / "a");
    const auto m2 = app::run_to_directory(cfg, root / "b");
    bool same = true;
    for (const auto& f : m1["files"]) {
        const std::string name = f["path"];
        same = same && slurp(root / "a" / name) == slurp(root / "b" / name);
    }
    same = same && m1["files"] == m2["files"] && m1["results"] == m2["results"];
    c.expect(same, "repeated seeded ringdown run: outputs byte-identical");
    fs::remove_all(root);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria{
        {"closed-form regression", closed_forms},
        {"Lindblad vs closed-form loss", lindblad_oracle},
        {"lab vs rotating frame", frame_consistency},
        {"ringdown spectroscopy map", ringdown_map},
        {"reset timing", reset_timing},
        {"refrigeration map", refrigeration_map},
        {"rate-balance properties", balance_suite},
        {"calibration fitters", calibration_suite},
        {"structural invariants and determinism", structural},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Checks c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[k].second(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %zu %s (%.1f s)\n", c.ok() ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs);
        for (const auto& line : c.lines()) std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        failures += c.ok() ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
