#include "config.hpp"
#include "runner.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

using namespace pdiss;
using namespace pdiss::app;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

int fail(int code, const std::string& type, const std::string& message, const Json& extra = Json::object()) {
    Json err = {{"error", {{"type", type}, {"message", message}}}};
    for (const auto& [k, v] : extra.items()) err["error"][k] = v;
    std::cerr << err.dump() << "\n";
    return code;
}

RunConfig base_config(Experiment experiment, const Flags& flags) {
    RunConfig cfg = flags.config.empty() ? default_config(experiment) : load_config(flags.config);
    if (!flags.config.empty() && cfg.experiment != experiment) {
        throw ConfigError("experiment", "config file declares '" + to_string(cfg.experiment) + "' but subcommand is '" +
                                            to_string(experiment) + "'");
    }
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
    if (!flags.out.empty()) cfg.output = flags.out;
    return cfg;
}

int run(const RunConfig& cfg, bool write_by_default) {
    std::string console;
    if (!cfg.output && !write_by_default) {
        console = execute(cfg).console;
    } else {
        const std::string dir = cfg.output.value_or("pdiss-out/" + to_string(cfg.experiment));
        run_to_directory(cfg, dir, &console);
        console += "wrote " + dir + "/manifest.json\n";
    }
    std::cout << console;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pdiss: parametrically driven dissipation in circuit QED"};
    app.set_version_flag("--version", PDISS_VERSION);
    app.require_subcommand(1);

    Flags flags;
    app.add_option("--config", flags.config, "YAML run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", flags.out, "output directory");
    app.add_option("--seed", flags.seed, "seed for synthetic noise");
    app.add_option("--threads", flags.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);

    auto* run_cmd = app.add_subcommand("run", "run whatever experiment the --config file declares");
    std::vector<std::pair<Experiment, CLI::App*>> sims;
    for (auto e : {Experiment::ringdown, Experiment::reset, Experiment::cool, Experiment::spectroscopy}) {
        sims.emplace_back(e, app.add_subcommand(to_string(e)));
    }
    sims[0].second->description("ringdown-rate map over pump frequency and strength");
    sims[1].second->description("qubit dephasing recovery after a cavity population pulse");
    sims[2].second->description("steady-state refrigeration and Hahn-echo rate vs drive power");
    sims[3].second->description("single-excitation spectrum vs dissipator flux");

    auto* analytic = app.add_subcommand("analytic", "evaluate one closed-form expression");
    std::string formula;
    std::map<std::string, std::string> inputs;
    int precision = 0;
    analytic->add_option("formula", formula,
                         "thermal | temperature | effective_loss | dephasing | cavity_temperature | flux | "
                         "coupling_from_chi");
    for (const char* key : {"f", "T", "n", "g", "kappa", "chi", "m", "phi", "kappa_c", "kappa_eff", "f_c", "f_diss",
                            "f_q", "alpha", "T0", "T_bath"}) {
        analytic->add_option_function<std::string>(
            std::string("--") + key, [&inputs, key](const std::string& v) { inputs[key] = v; }, "input value");
    }
    analytic->add_option("--precision", precision, "significant digits printed")->check(CLI::Range(1, 17));

    auto* fit = app.add_subcommand("fit", "fit a model to columns of a CSV file");
    std::string fit_input, fit_kind, fit_x, fit_y, fit_y2, fit_unit;
    fit->add_option("--input", fit_input, "CSV file")->check(CLI::ExistingFile);
    fit->add_option("--kind", fit_kind)->check(
        CLI::IsMember({"exponential", "lorentzian", "avoided_crossing", "flux_curve"}));
    fit->add_option("--x", fit_x, "x column");
    fit->add_option("--y", fit_y, "y column (lower branch for avoided_crossing)");
    fit->add_option("--y2", fit_y2, "upper branch column");
    fit->add_option("--unit", fit_unit, "unit of frequency columns")->check(CLI::IsMember({"GHz", "MHz", "kHz"}));

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kExitConfig, "usage", e.what());
    }

    try {
        if (*run_cmd) {
            if (flags.config.empty()) throw ConfigError("--config", "required by 'run'");
            RunConfig cfg = load_config(flags.config);
            return run(base_config(cfg.experiment, flags), cfg.experiment != Experiment::analytic);
        }
        for (const auto& [experiment, sub] : sims) {
            if (*sub) return run(base_config(experiment, flags), true);
        }
        if (*analytic) {
            RunConfig cfg = base_config(Experiment::analytic, flags);
            if (!formula.empty() && formula != cfg.analytic.formula) {
                cfg.analytic.formula = formula;
                cfg.analytic.inputs.clear();
            }
            for (const auto& [k, v] : inputs) cfg.analytic.inputs[k] = v;
            if (precision > 0) cfg.analytic.precision = precision;
            return run(cfg, false);
        }
        if (*fit) {
            RunConfig cfg = base_config(Experiment::fit, flags);
            if (!fit_kind.empty()) {
                static const std::map<std::string, FitKind> kinds = {{"exponential", FitKind::exponential},
                                                                     {"lorentzian", FitKind::lorentzian},
                                                                     {"avoided_crossing", FitKind::avoided_crossing},
                                                                     {"flux_curve", FitKind::flux_curve}};
                cfg.fit.kind = kinds.at(fit_kind);
            }
            if (!fit_input.empty()) cfg.fit.input = fit_input;
            if (!fit_x.empty()) cfg.fit.x = fit_x;
            if (!fit_y.empty()) cfg.fit.y = fit_y;
            if (!fit_y2.empty()) cfg.fit.y2 = fit_y2;
            if (!fit_unit.empty()) cfg.fit.frequency_unit = fit_unit;
            return run(cfg, true);
        }
    } catch (const ConfigError& e) {
        Json extra = {{"path", e.path()}};
        if (e.line() > 0) extra["line"] = e.line();
        return fail(kExitConfig, "config", e.what(), extra);
    } catch (const InvalidArgument& e) {
        return fail(kExitConfig, "invalid_argument", e.what());
    } catch (const NumericalError& e) {
        return fail(kExitNumerical, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(kExitNumerical, "runtime", e.what());
    }
    return 0;
}
