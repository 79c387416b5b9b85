#include "runner.hpp"

#include "pdiss/analytics.hpp"
#include "pdiss/calibration.hpp"
#include "pdiss/experiments.hpp"
#include "pdiss/units.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>

namespace pdiss::app {

namespace {

using units::Dimension;
using units::to_GHz;
using units::to_MHz;

std::string fmt(double v) { return format_number(v); }

RunOutput run_ringdown(const RunConfig& cfg) {
    auto options = cfg.ringdown.options;
    options.threads = cfg.threads;
    options.seed = cfg.seed;
    const auto result = experiments::ringdown_spectroscopy(cfg.device, cfg.ringdown.grid, options);

    RunOutput out;
    CsvTable table{"ringdown.csv",
                   {"omega_p_GHz", "detuning_MHz", "g_p_MHz", "rate_per_us", "uncertainty_per_us", "r2", "status"},
                   {}};
    std::size_t failed = 0;
    double zero_sum = 0.0;
    std::size_t zero_count = 0;
    double best_rate = -1.0;
    double best_omega = 0.0;
    double best_g = 0.0;
    for (const auto& p : result.points) {
        table.add_row({fmt(to_GHz(p.omega_p)), fmt(to_MHz(p.omega_p - result.resonance)), fmt(to_MHz(p.g_p)),
                       fmt(p.rate), fmt(p.sigma), fmt(p.r2), p.ok ? "ok" : (p.message.empty() ? "flagged" : p.message)});
        if (!p.ok) ++failed;
        if (p.g_p == 0.0 && std::isfinite(p.rate)) {
            zero_sum += p.rate;
            ++zero_count;
        }
        if (std::isfinite(p.rate) && p.rate > best_rate) {
            best_rate = p.rate;
            best_omega = p.omega_p;
            best_g = p.g_p;
        }
    }
    if (failed == result.points.size()) {
        throw NumericalError("ringdown: none of the " + std::to_string(failed) + " grid points gave a usable fit (first: " +
                             result.points.front().message + ")");
    }
    out.tables.push_back(std::move(table));
    out.results = {
        {"resonance_GHz", to_GHz(result.resonance)},
        {"points", result.points.size()},
        {"failed_points", failed},
        {"max_rate_per_us", best_rate},
        {"max_rate_detuning_MHz", to_MHz(best_omega - result.resonance)},
        {"max_rate_g_p_MHz", to_MHz(best_g)},
        {"zero_drive_rate_per_us", zero_count ? zero_sum / zero_count : std::numeric_limits<double>::quiet_NaN()},
    };
    char line[160];
    std::snprintf(line, sizeof line, "ringdown: %zu points, max rate %.2f /us at detuning %.1f MHz\n",
                  result.points.size(), best_rate, to_MHz(best_omega - result.resonance));
    out.console = line;
    return out;
}

RunOutput run_reset(const RunConfig& cfg) {
    const auto& rc = cfg.reset;
    RunOutput out;
    CsvTable table{"reset.csv", {"case", "tau_ns", "n_bar", "gamma_2_per_us"}, {}};
    Json summary = Json::object();
    double recovery[2] = {0.0, 0.0};
    const char* names[2] = {"driven", "undriven"};
    for (int k = 0; k < 2; ++k) {
        auto spec = rc.spec;
        spec.kappa_eff = k == 0 && rc.g_p > 0.0 ? experiments::exchange_rate(rc.g_p, cfg.device.kappa_diss) : 0.0;
        const auto r = experiments::reset_experiment(cfg.device, spec, rc.tau);
        for (std::size_t i = 0; i < r.tau.size(); ++i) {
            table.add_row({names[k], fmt(r.tau[i] * 1e3), fmt(r.n_bar[i]), fmt(r.gamma_2[i])});
        }
        recovery[k] = r.recovery_time;
        summary[names[k]] = {{"gamma_cav_per_us", r.gamma_cav},
                             {"recovery_ns", std::isfinite(r.recovery_time) ? Json(r.recovery_time * 1e3) : Json(nullptr)}};
    }
    summary["speedup"] = recovery[0] > 0.0 && std::isfinite(recovery[1]) ? Json(recovery[1] / recovery[0]) : Json(nullptr);
    out.tables.push_back(std::move(table));
    out.results = summary;
    char line[160];
    std::snprintf(line, sizeof line, "reset: recovery %.1f ns driven, %.1f ns undriven\n", recovery[0] * 1e3,
                  recovery[1] * 1e3);
    out.console = line;
    return out;
}

RunOutput run_cool(const RunConfig& cfg) {
    const auto r = experiments::refrigeration_experiment(cfg.device, cfg.cool.spec);
    RunOutput out;
    CsvTable table{"cool.csv",
                   {"injected_n", "g_p_MHz", "kappa_eff_per_us", "n_thermal", "n_coherent", "gamma_2e_per_us"},
                   {}};
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const auto& p = r.points[i];
        table.add_row({fmt(p.injected_n), fmt(to_MHz(p.g_p)), fmt(p.kappa_eff), fmt(p.n_thermal), fmt(p.n_coherent),
                       fmt(p.gamma_2e)});
        if (i % r.n_power == 0) {
            rows.push_back({{"injected_n", p.injected_n},
                            {"first_power_gamma_2e", p.gamma_2e},
                            {"last_power_gamma_2e", r.points[i + r.n_power - 1].gamma_2e}});
        }
    }
    out.tables.push_back(std::move(table));
    out.results = {{"rows", rows}};
    out.console = "cool: " + std::to_string(r.points.size()) + " points\n";
    return out;
}

RunOutput run_spectroscopy(const RunConfig& cfg) {
    const auto& sc = cfg.spectroscopy;
    const auto r = experiments::flux_spectroscopy(cfg.device, sc.phi, sc.options);
    RunOutput out;
    CsvTable table{"spectroscopy.csv", {"phi", "branch", "label", "frequency_GHz"}, {}};
    for (std::size_t k = 0; k < r.branches.size(); ++k) {
        for (std::size_t i = 0; i < r.phi.size(); ++i) {
            table.add_row({fmt(r.phi[i]), std::to_string(k), r.labels[k], fmt(to_GHz(r.branches[k][i]))});
        }
    }
    out.tables.push_back(std::move(table));
    Json gaps = Json::object();
    auto add_gap = [&](const char* name, double target) {
        try {
            const auto g = experiments::find_crossing_gap(cfg.device, sc.options, target);
            gaps[name] = {{"phi", g.phi}, {"gap_MHz", to_MHz(g.gap)}};
        } catch (const InvalidArgument& e) {
            gaps[name] = {{"error", e.what()}};
        }
    };
    if (sc.options.include_cavity) add_gap("dissipator_cavity", cfg.device.omega_c);
    if (sc.options.include_filter) add_gap("dissipator_filter", cfg.device.omega_f);
    out.results = {{"branches", r.labels}, {"crossings", gaps}};
    out.console = "spectroscopy: " + std::to_string(r.branches.size()) + " branches over " +
                  std::to_string(r.phi.size()) + " flux points\n";
    return out;
}

RunOutput run_analytic(const RunConfig& cfg) {
    const auto v = evaluate_analytic(cfg.analytic, cfg.device);
    RunOutput out;
    CsvTable table{"analytic.csv", {"formula", "quantity", "value", "unit"}, {}};
    table.add_row({cfg.analytic.formula, v.quantity, fmt(v.value), v.unit});
    out.tables.push_back(std::move(table));
    out.results = {{"formula", cfg.analytic.formula}, {"quantity", v.quantity}, {"value", v.value}, {"unit", v.unit}};
    if (!v.note.empty()) out.results["note"] = v.note;
    char line[64];
    std::snprintf(line, sizeof line, "%.*g\n", cfg.analytic.precision, v.value);
    out.console = line;
    return out;
}

double from_unit(double v, const std::string& unit) {
    if (unit == "GHz") return units::from_GHz(v);
    if (unit == "MHz") return units::from_MHz(v);
    return units::from_kHz(v);
}

double to_unit(double w, const std::string& unit) {
    if (unit == "GHz") return units::to_GHz(w);
    if (unit == "MHz") return units::to_MHz(w);
    return units::to_kHz(w);
}

RunOutput run_fit(const RunConfig& cfg) {
    const auto& fc = cfg.fit;
    if (fc.input.empty()) throw ConfigError("options.input", "required for fit");
    const CsvData data = read_csv(fc.input);
    const auto& x = data.column(fc.x);
    std::vector<double> y = data.column(fc.y);
    if (fc.noise_sigma > 0.0) {
        std::mt19937_64 engine(cfg.seed);
        std::normal_distribution<double> noise(0.0, fc.noise_sigma);
        for (double& v : y) v += noise(engine);
    }

    RunOutput out;
    CsvTable table{"fit.csv", {"parameter", "value", "sigma", "unit"}, {}};
    calibration::FitResult fit;
    const std::string& u = fc.frequency_unit;
    switch (fc.kind) {
        case FitKind::exponential:
            fit = calibration::fit_exponential(x, y);
            table.add_row({"amplitude", fmt(fit.values[0]), fmt(fit.sigmas[0]), ""});
            table.add_row({"rate", fmt(fit.values[1]), fmt(fit.sigmas[1]), "1/x"});
            table.add_row({"offset", fmt(fit.values[2]), fmt(fit.sigmas[2]), ""});
            break;
        case FitKind::lorentzian:
            fit = calibration::fit_lorentzian(x, y);
            table.add_row({"center", fmt(fit.values[0]), fmt(fit.sigmas[0]), u});
            table.add_row({"fwhm", fmt(fit.values[1]), fmt(fit.sigmas[1]), u});
            table.add_row({"height", fmt(fit.values[2]), fmt(fit.sigmas[2]), ""});
            table.add_row({"floor", fmt(fit.values[3]), fmt(fit.sigmas[3]), ""});
            table.add_row({"kappa", fmt(from_unit(fit.values[1], u)), fmt(from_unit(fit.sigmas[1], u)), "1/us"});
            break;
        case FitKind::avoided_crossing: {
            if (fc.y2.empty()) throw ConfigError("options.y2", "upper branch column required for avoided_crossing");
            std::vector<double> lower;
            std::vector<double> upper;
            for (double v : y) lower.push_back(from_unit(v, u));
            for (double v : data.column(fc.y2)) upper.push_back(from_unit(v, u));
            fit = calibration::fit_avoided_crossing(x, lower, upper, model::FluxCurve::from(cfg.device));
            table.add_row({"g", fmt(to_unit(fit.values[0], u)), fmt(to_unit(fit.sigmas[0], u)), u});
            table.add_row({"omega_bare", fmt(to_unit(fit.values[1], u)), fmt(to_unit(fit.sigmas[1], u)), u});
            break;
        }
        case FitKind::flux_curve: {
            std::vector<double> omega;
            for (double v : y) omega.push_back(from_unit(v, u));
            calibration::FluxFitOptions opts;
            opts.free_alpha = fc.free_alpha;
            opts.alpha = fc.alpha;
            fit = calibration::fit_flux_curve(x, omega, opts);
            table.add_row({"omega_max", fmt(to_unit(fit.values[0], u)), fmt(to_unit(fit.sigmas[0], u)), u});
            table.add_row({"d", fmt(fit.values[1]), fmt(fit.sigmas[1]), ""});
            if (fc.free_alpha) table.add_row({"alpha", fmt(to_unit(fit.values[2], u)), fmt(to_unit(fit.sigmas[2], u)), u});
            break;
        }
    }
    out.tables.push_back(std::move(table));
    out.results = {{"converged", fit.converged}, {"degenerate", fit.degenerate}, {"r2", fit.r2},
                   {"iterations", fit.iterations}, {"residual_norm", fit.residual_norm}, {"warnings", fit.warnings}};
    out.console = std::string("fit: ") + (fit.converged ? "converged" : "not converged") +
                  (fit.flagged() ? " (flagged)" : "") + "\n";
    return out;
}

}  // namespace

AnalyticValue evaluate_analytic(const AnalyticConfig& a, const model::DeviceParams& device) {
    std::set<std::string> used;
    auto get = [&](const std::string& key, Dimension dim, double fallback, bool required = false) {
        used.insert(key);
        const auto it = a.inputs.find(key);
        if (it == a.inputs.end()) {
            if (required) throw ConfigError("options." + key, "required by formula '" + a.formula + "'");
            return fallback;
        }
        try {
            return units::parse_quantity(it->second, dim);
        } catch (const InvalidArgument& e) {
            throw ConfigError("options." + key, e.what());
        }
    };
    // Loss rates: linear frequency (kappa / 2 pi) or an explicit rate.
    auto get_rate = [&](const std::string& key, double fallback) {
        used.insert(key);
        const auto it = a.inputs.find(key);
        if (it == a.inputs.end()) return fallback;
        try {
            return units::parse_quantity(it->second, Dimension::frequency);
        } catch (const InvalidArgument&) {
        }
        try {
            return units::parse_quantity(it->second, Dimension::rate);
        } catch (const InvalidArgument& e) {
            throw ConfigError("options." + key, e.what());
        }
    };
    auto get_plain = [&](const std::string& key, double fallback, bool required = false) {
        used.insert(key);
        const auto it = a.inputs.find(key);
        if (it == a.inputs.end()) {
            if (required) throw ConfigError("options." + key, "required by formula '" + a.formula + "'");
            return fallback;
        }
        try {
            std::size_t n = 0;
            const double v = std::stod(it->second, &n);
            if (n != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("options." + key, "expected a plain number, got '" + it->second + "'");
        }
    };

    AnalyticValue v;
    const std::string& f = a.formula;
    if (f == "thermal") {
        v = {"n_bar", analytics::thermal_occupation(get("f", Dimension::frequency, device.omega_c),
                                                    get("T", Dimension::temperature, device.T0)),
             "", ""};
    } else if (f == "temperature") {
        v = {"T", units::to_mK(analytics::occupation_to_temperature(get("f", Dimension::frequency, device.omega_c),
                                                                    get_plain("n", 0.0, true))),
             "mK", ""};
    } else if (f == "effective_loss") {
        const auto loss = analytics::effective_loss(get("g", Dimension::frequency, 0.0, true),
                                                    get_rate("kappa", device.kappa_diss));
        const char* regime = loss.regime == analytics::DampingRegime::overdamped  ? "overdamped"
                             : loss.regime == analytics::DampingRegime::critical ? "critical"
                                                                                  : "underdamped";
        v = {"kappa_eff", loss.rate, "1/us", regime};
    } else if (f == "dephasing") {
        const double m = get_plain("m", 1.0);
        if (m != 1.0 && m != 2.0) throw ConfigError("options.m", "expected 1 (thermal) or 2 (coherent)");
        v = {"gamma_phi",
             analytics::photon_dephasing(get("chi", Dimension::frequency, device.chi), get_rate("kappa", device.kappa_c),
                                         get_plain("n", 0.0, true),
                                         m == 2.0 ? analytics::PhotonStatistics::coherent
                                                  : analytics::PhotonStatistics::thermal),
             "1/us", ""};
    } else if (f == "cavity_temperature") {
        analytics::TwoBathParams p{get_rate("kappa_c", device.kappa_c), get("f_c", Dimension::frequency, device.omega_c),
                                   get("f_diss", Dimension::frequency, device.omega_diss),
                                   get("T0", Dimension::temperature, device.T0),
                                   get("T_bath", Dimension::temperature, device.T_bath)};
        v = {"T_c", units::to_mK(analytics::driven_cavity_temperature(p, get_rate("kappa_eff", 0.0))), "mK", ""};
    } else if (f == "flux") {
        v = {"omega_diss", to_GHz(model::dissipator_frequency(device, model::FluxPoint{get_plain("phi", 0.0, true)})),
             "GHz", ""};
    } else if (f == "coupling_from_chi") {
        v = {"g_q",
             to_MHz(calibration::infer_coupling_from_chi(
                 get("chi", Dimension::frequency, device.chi), get("f_q", Dimension::frequency, device.omega_q),
                 get("f_c", Dimension::frequency, device.omega_c), get("alpha", Dimension::frequency, device.alpha_q))),
             "MHz", ""};
    } else {
        throw ConfigError("options.formula", "unknown formula '" + f +
                                                 "' (thermal, temperature, effective_loss, dephasing, "
                                                 "cavity_temperature, flux, coupling_from_chi)");
    }
    for (const auto& [key, value] : a.inputs) {
        if (!used.count(key)) throw ConfigError("options." + key, "not used by formula '" + f + "'");
    }
    return v;
}

RunOutput execute(const RunConfig& config) {
    switch (config.experiment) {
        case Experiment::ringdown: return run_ringdown(config);
        case Experiment::reset: return run_reset(config);
        case Experiment::cool: return run_cool(config);
        case Experiment::spectroscopy: return run_spectroscopy(config);
        case Experiment::analytic: return run_analytic(config);
        case Experiment::fit: return run_fit(config);
    }
    throw Error("unhandled experiment");
}

Json run_to_directory(const RunConfig& config, const std::filesystem::path& dir, std::string* console) {
    const auto start = std::chrono::steady_clock::now();
    RunOutput out = execute(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (console) *console = out.console;
    ManifestInput input{to_string(config.experiment), config.seed, config.threads, echo_config(config), out.results,
                        wall};
    return write_outputs(dir, out.tables, input);
}

}  // namespace pdiss::app
