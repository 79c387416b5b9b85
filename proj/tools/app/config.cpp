#include "config.hpp"

#include "pdiss/dynamics.hpp"
#include "pdiss/units.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace pdiss::app {

ConfigError::ConfigError(std::string path, const std::string& message, int line)
    : Error((line >= 0 ? "line " + std::to_string(line) + ": " : std::string()) + path + ": " + message),
      path_(std::move(path)),
      line_(line) {}

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::ringdown: return "ringdown";
        case Experiment::reset: return "reset";
        case Experiment::cool: return "cool";
        case Experiment::spectroscopy: return "spectroscopy";
        case Experiment::analytic: return "analytic";
        case Experiment::fit: return "fit";
    }
    return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
    for (auto e : {Experiment::ringdown, Experiment::reset, Experiment::cool, Experiment::spectroscopy,
                   Experiment::analytic, Experiment::fit}) {
        if (to_string(e) == name) return e;
    }
    throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

namespace {

using units::Dimension;

int line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.line >= 0 ? mark.line + 1 : -1;
}

// Absent and explicit-null nodes both mean "use defaults".
bool given(const YAML::Node& node) { return node && !node.IsNull(); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_map(const YAML::Node& node, const std::string& path) {
    if (!node.IsMap()) throw ConfigError(path, "expected a mapping", line_of(node));
}

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    require_map(node, path);
    for (const auto& item : node) {
        const auto key = item.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key", line_of(item.first));
    }
}

std::string scalar(const YAML::Node& node, const std::string& path) {
    if (!node.IsScalar()) throw ConfigError(path, "expected a scalar", line_of(node));
    return node.Scalar();
}

double quantity(const YAML::Node& node, const std::string& path, Dimension dim) {
    const std::string text = scalar(node, path);
    try {
        return units::parse_quantity(text, dim);
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what(), line_of(node));
    }
}

// Rates accept either a linear frequency (kappa / 2 pi) or an explicit rate.
double rate_or_frequency(const YAML::Node& node, const std::string& path) {
    const std::string text = scalar(node, path);
    try {
        return units::parse_quantity(text, Dimension::frequency);
    } catch (const InvalidArgument&) {
    }
    try {
        return units::parse_quantity(text, Dimension::rate);
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what(), line_of(node));
    }
}

double number(const YAML::Node& node, const std::string& path) {
    const std::string text = scalar(node, path);
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(path, "expected a plain number, got '" + text + "'", line_of(node));
    }
}

long long integer(const YAML::Node& node, const std::string& path, long long min_value) {
    const std::string text = scalar(node, path);
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        if (v < min_value) throw ConfigError(path, "must be >= " + std::to_string(min_value), line_of(node));
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(path, "expected an integer, got '" + text + "'", line_of(node));
    }
}

bool boolean(const YAML::Node& node, const std::string& path) {
    const std::string text = scalar(node, path);
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError(path, "expected true or false", line_of(node));
}

enum class AxisKind { frequency, time, plain };

double axis_value(const YAML::Node& node, const std::string& path, AxisKind kind) {
    switch (kind) {
        case AxisKind::frequency: return quantity(node, path, Dimension::frequency);
        case AxisKind::time: return quantity(node, path, Dimension::time);
        case AxisKind::plain: return number(node, path);
    }
    return 0.0;
}

// {values: [...]} or {start, stop, count, spacing: linear|power}. `extra` lists
// caller-handled keys allowed alongside.
std::vector<double> parse_axis(const YAML::Node& node, const std::string& path, AxisKind kind,
                               const std::set<std::string>& extra = {}) {
    std::set<std::string> allowed{"values", "start", "stop", "count", "spacing"};
    allowed.insert(extra.begin(), extra.end());
    check_keys(node, path, allowed);
    std::vector<double> out;
    if (node["values"]) {
        if (node["start"] || node["stop"] || node["count"]) {
            throw ConfigError(path, "give either values or start/stop/count", line_of(node));
        }
        const auto& list = node["values"];
        if (!list.IsSequence() || list.size() == 0) {
            throw ConfigError(join(path, "values"), "expected a nonempty list", line_of(list));
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            out.push_back(axis_value(list[i], join(path, "values[" + std::to_string(i) + "]"), kind));
        }
        return out;
    }
    for (const char* key : {"start", "stop", "count"}) {
        if (!node[key]) throw ConfigError(join(path, key), "required", line_of(node));
    }
    const double start = axis_value(node["start"], join(path, "start"), kind);
    const double stop = axis_value(node["stop"], join(path, "stop"), kind);
    const auto count = static_cast<std::size_t>(integer(node["count"], join(path, "count"), 1));
    std::string spacing = "linear";
    if (node["spacing"]) spacing = scalar(node["spacing"], join(path, "spacing"));
    if (spacing == "linear") return dynamics::linspace(start, stop, count);
    if (spacing == "power") {
        // Equal steps in the square (drive power at fixed coupling per amplitude).
        for (double s : dynamics::linspace(start * start, stop * stop, count)) out.push_back(std::sqrt(s));
        return out;
    }
    throw ConfigError(join(path, "spacing"), "expected linear or power", line_of(node["spacing"]));
}

void parse_device(const YAML::Node& node, model::DeviceParams& d) {
    const std::string path = "device";
    check_keys(node, path,
               {"omega_c", "omega_q", "omega_f", "omega_diss_max", "omega_diss", "alpha_q", "alpha_diss", "g_q",
                "g_c", "g_f", "kappa_c", "kappa_f", "kappa_diss", "chi", "d", "T0", "T_bath"});
    const std::pair<const char*, double*> frequencies[] = {
        {"omega_c", &d.omega_c},       {"omega_q", &d.omega_q},     {"omega_f", &d.omega_f},
        {"omega_diss_max", &d.omega_diss_max}, {"omega_diss", &d.omega_diss}, {"alpha_q", &d.alpha_q},
        {"alpha_diss", &d.alpha_diss}, {"g_q", &d.g_q},             {"g_c", &d.g_c},
        {"g_f", &d.g_f},               {"kappa_c", &d.kappa_c},     {"kappa_f", &d.kappa_f},
        {"kappa_diss", &d.kappa_diss}, {"chi", &d.chi},
    };
    for (const auto& [key, target] : frequencies) {
        if (node[key]) *target = quantity(node[key], join(path, key), Dimension::frequency);
    }
    if (node["d"]) d.d = number(node["d"], "device.d");
    if (node["T0"]) d.T0 = quantity(node["T0"], "device.T0", Dimension::temperature);
    if (node["T_bath"]) d.T_bath = quantity(node["T_bath"], "device.T_bath", Dimension::temperature);
    try {
        d.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what(), line_of(node));
    }
}

model::ModulationConvention parse_convention(const YAML::Node& node, const std::string& path) {
    const auto s = scalar(node, path);
    if (s == "sigma_z_amplitude") return model::ModulationConvention::sigma_z_amplitude;
    if (s == "frequency_depth") return model::ModulationConvention::frequency_depth;
    throw ConfigError(path, "expected sigma_z_amplitude or frequency_depth", line_of(node));
}

void parse_ringdown(const YAML::Node& sweep, const YAML::Node& options, const model::DeviceParams& device,
                    RingdownConfig& cfg) {
    cfg.grid = experiments::default_ringdown_grid(device);
    const double resonance = std::abs(device.omega_diss - device.omega_c);
    if (given(sweep)) {
        check_keys(sweep, "sweep", {"omega_p", "g_p"});
        if (sweep["omega_p"]) {
            const auto& node = sweep["omega_p"];
            auto values = parse_axis(node, "sweep.omega_p", AxisKind::frequency, {"relative_to"});
            std::string relative = "resonance";
            if (node["relative_to"]) relative = scalar(node["relative_to"], "sweep.omega_p.relative_to");
            if (relative == "resonance") {
                for (double& v : values) v += resonance;
            } else if (relative != "absolute") {
                throw ConfigError("sweep.omega_p.relative_to", "expected resonance or absolute",
                                  line_of(node["relative_to"]));
            }
            cfg.grid.axes[0].values = std::move(values);
        }
        if (sweep["g_p"]) cfg.grid.axes[1].values = parse_axis(sweep["g_p"], "sweep.g_p", AxisKind::frequency);
    }
    if (!given(options)) return;
    check_keys(options, "options", {"frame", "cavity_cutoff", "initial_photons", "convention", "noise", "samples"});
    if (options["frame"]) {
        const auto f = scalar(options["frame"], "options.frame");
        if (f == "rotating") cfg.options.frame = experiments::Frame::rotating;
        else if (f == "lab") cfg.options.frame = experiments::Frame::lab;
        else throw ConfigError("options.frame", "expected rotating or lab", line_of(options["frame"]));
    }
    if (options["cavity_cutoff"]) {
        cfg.options.model.cavity_cutoff =
            static_cast<std::size_t>(integer(options["cavity_cutoff"], "options.cavity_cutoff", 2));
    }
    if (options["initial_photons"]) {
        cfg.options.initial_photons =
            static_cast<std::size_t>(integer(options["initial_photons"], "options.initial_photons", 1));
    }
    if (cfg.options.initial_photons >= cfg.options.model.cavity_cutoff) {
        throw ConfigError("options.initial_photons", "must be below cavity_cutoff", line_of(options));
    }
    if (options["convention"]) cfg.options.convention = parse_convention(options["convention"], "options.convention");
    if (options["noise"]) {
        cfg.options.noise_sigma = number(options["noise"], "options.noise");
        if (cfg.options.noise_sigma < 0.0) throw ConfigError("options.noise", "must be >= 0", line_of(options["noise"]));
    }
    if (options["samples"]) {
        cfg.options.samples = static_cast<std::size_t>(integer(options["samples"], "options.samples", 200));
    }
}

void parse_reset(const YAML::Node& sweep, const YAML::Node& options, ResetConfig& cfg) {
    cfg.tau = dynamics::linspace(0.0, 3.0, 601);
    if (given(sweep)) {
        check_keys(sweep, "sweep", {"tau"});
        if (sweep["tau"]) cfg.tau = parse_axis(sweep["tau"], "sweep.tau", AxisKind::time);
    }
    if (!given(options)) return;
    check_keys(options, "options", {"n_bar0", "gap", "g_p", "gamma_2_0", "threshold"});
    if (options["n_bar0"]) cfg.spec.n_bar0 = number(options["n_bar0"], "options.n_bar0");
    if (options["gap"]) cfg.spec.gap = quantity(options["gap"], "options.gap", Dimension::time);
    if (options["g_p"]) cfg.g_p = quantity(options["g_p"], "options.g_p", Dimension::frequency);
    if (options["gamma_2_0"]) cfg.spec.gamma_2_0 = rate_or_frequency(options["gamma_2_0"], "options.gamma_2_0");
    if (options["threshold"]) cfg.spec.threshold = number(options["threshold"], "options.threshold");
    if (cfg.spec.n_bar0 < 0.0) throw ConfigError("options.n_bar0", "must be >= 0", line_of(options["n_bar0"]));
}

void parse_cool(const YAML::Node& sweep, const YAML::Node& options, CoolConfig& cfg) {
    cfg.spec.g_p = experiments::default_ringdown_grid(model::DeviceParams{}).axes[1].values;
    cfg.spec.injected_n = {0.0, 0.14, 0.35, 1.10};
    if (given(sweep)) {
        check_keys(sweep, "sweep", {"g_p"});
        if (sweep["g_p"]) cfg.spec.g_p = parse_axis(sweep["g_p"], "sweep.g_p", AxisKind::frequency);
    }
    if (!given(options)) return;
    check_keys(options, "options", {"injected_n", "gamma_2_0"});
    if (options["injected_n"]) {
        const auto& list = options["injected_n"];
        if (!list.IsSequence() || list.size() == 0) {
            throw ConfigError("options.injected_n", "expected a nonempty list", line_of(list));
        }
        cfg.spec.injected_n.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            const double v = number(list[i], "options.injected_n[" + std::to_string(i) + "]");
            if (v < 0.0) throw ConfigError("options.injected_n", "must be >= 0", line_of(list[i]));
            cfg.spec.injected_n.push_back(v);
        }
    }
    if (options["gamma_2_0"]) cfg.spec.gamma_2_0 = rate_or_frequency(options["gamma_2_0"], "options.gamma_2_0");
}

void parse_spectroscopy(const YAML::Node& sweep, const YAML::Node& options, SpectroscopyConfig& cfg) {
    cfg.phi = dynamics::linspace(0.0, 0.5, 501);
    if (given(sweep)) {
        check_keys(sweep, "sweep", {"phi"});
        if (sweep["phi"]) cfg.phi = parse_axis(sweep["phi"], "sweep.phi", AxisKind::plain);
    }
    if (!given(options)) return;
    check_keys(options, "options", {"include_cavity", "include_filter", "include_qubit", "coupling_reference"});
    if (options["include_cavity"]) cfg.options.include_cavity = boolean(options["include_cavity"], "options.include_cavity");
    if (options["include_filter"]) cfg.options.include_filter = boolean(options["include_filter"], "options.include_filter");
    if (options["include_qubit"]) cfg.options.include_qubit = boolean(options["include_qubit"], "options.include_qubit");
    if (options["coupling_reference"]) {
        cfg.options.coupling_reference =
            quantity(options["coupling_reference"], "options.coupling_reference", Dimension::frequency);
    }
}

void parse_analytic(const YAML::Node& options, AnalyticConfig& cfg) {
    if (!given(options)) return;
    require_map(options, "options");
    for (const auto& item : options) {
        const auto key = item.first.as<std::string>();
        const std::string path = join("options", key);
        if (key == "formula") {
            cfg.formula = scalar(item.second, path);
        } else if (key == "precision") {
            cfg.precision = static_cast<int>(integer(item.second, path, 1));
        } else {
            cfg.inputs[key] = scalar(item.second, path);
        }
    }
}

void parse_fit(const YAML::Node& options, FitConfig& cfg) {
    if (!given(options)) return;
    check_keys(options, "options",
               {"kind", "input", "x", "y", "y2", "frequency_unit", "free_alpha", "alpha", "noise"});
    if (options["kind"]) {
        const auto k = scalar(options["kind"], "options.kind");
        if (k == "exponential") cfg.kind = FitKind::exponential;
        else if (k == "lorentzian") cfg.kind = FitKind::lorentzian;
        else if (k == "avoided_crossing") cfg.kind = FitKind::avoided_crossing;
        else if (k == "flux_curve") cfg.kind = FitKind::flux_curve;
        else throw ConfigError("options.kind", "unknown fit kind '" + k + "'", line_of(options["kind"]));
    }
    if (options["input"]) cfg.input = scalar(options["input"], "options.input");
    if (options["x"]) cfg.x = scalar(options["x"], "options.x");
    if (options["y"]) cfg.y = scalar(options["y"], "options.y");
    if (options["y2"]) cfg.y2 = scalar(options["y2"], "options.y2");
    if (options["frequency_unit"]) {
        cfg.frequency_unit = scalar(options["frequency_unit"], "options.frequency_unit");
        if (cfg.frequency_unit != "GHz" && cfg.frequency_unit != "MHz" && cfg.frequency_unit != "kHz") {
            throw ConfigError("options.frequency_unit", "expected GHz, MHz or kHz", line_of(options["frequency_unit"]));
        }
    }
    if (options["free_alpha"]) cfg.free_alpha = boolean(options["free_alpha"], "options.free_alpha");
    if (options["alpha"]) cfg.alpha = quantity(options["alpha"], "options.alpha", Dimension::frequency);
    if (options["noise"]) cfg.noise_sigma = number(options["noise"], "options.noise");
}

RunConfig from_yaml(const YAML::Node& root) {
    if (!root || root.IsNull()) throw ConfigError("<root>", "empty configuration");
    check_keys(root, "", {"experiment", "device", "sweep", "options", "output", "seed", "threads"});
    if (!root["experiment"]) throw ConfigError("experiment", "required", line_of(root));
    RunConfig cfg = default_config(experiment_from_string(scalar(root["experiment"], "experiment")));
    if (root["device"]) parse_device(root["device"], cfg.device);
    if (root["output"]) cfg.output = scalar(root["output"], "output");
    if (root["seed"]) cfg.seed = static_cast<std::uint64_t>(integer(root["seed"], "seed", 0));
    if (root["threads"]) cfg.threads = static_cast<unsigned>(integer(root["threads"], "threads", 1));

    const YAML::Node sweep = root["sweep"];
    const YAML::Node options = root["options"];
    switch (cfg.experiment) {
        case Experiment::ringdown: parse_ringdown(sweep, options, cfg.device, cfg.ringdown); break;
        case Experiment::reset: parse_reset(sweep, options, cfg.reset); break;
        case Experiment::cool: parse_cool(sweep, options, cfg.cool); break;
        case Experiment::spectroscopy: parse_spectroscopy(sweep, options, cfg.spectroscopy); break;
        case Experiment::analytic:
        case Experiment::fit:
            if (given(sweep)) throw ConfigError("sweep", "not used by " + to_string(cfg.experiment), line_of(sweep));
            if (cfg.experiment == Experiment::analytic) parse_analytic(options, cfg.analytic);
            else parse_fit(options, cfg.fit);
            break;
    }
    try {
        if (cfg.experiment == Experiment::ringdown) cfg.ringdown.grid.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError("sweep", e.what(), line_of(sweep));
    }
    return cfg;
}

}  // namespace

RunConfig default_config(Experiment experiment) {
    RunConfig cfg;
    cfg.experiment = experiment;
    YAML::Node none;
    parse_ringdown(none, none, cfg.device, cfg.ringdown);
    parse_reset(none, none, cfg.reset);
    parse_cool(none, none, cfg.cool);
    parse_spectroscopy(none, none, cfg.spectroscopy);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ConfigError("<file>", "cannot open '" + path + "'");
    } catch (const YAML::ParserException& e) {
        throw ConfigError("<file>", e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
    }
    return from_yaml(root);
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("<text>", e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
    }
    return from_yaml(root);
}

namespace {

// Unit conversion leaves 1-ulp noise (349.99999999999994); echo 12 digits.
void round_floats(Json& j) {
    if (j.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", j.get<double>());
        j = std::strtod(buf, nullptr);
    } else if (j.is_structured()) {
        for (auto& item : j) round_floats(item);
    }
}

}  // namespace

Json echo_config(const RunConfig& c) {
    using units::to_GHz;
    using units::to_kHz;
    using units::to_MHz;
    const auto& d = c.device;
    Json device = {
        {"omega_c_GHz", to_GHz(d.omega_c)},       {"omega_q_GHz", to_GHz(d.omega_q)},
        {"omega_f_GHz", to_GHz(d.omega_f)},       {"omega_diss_max_GHz", to_GHz(d.omega_diss_max)},
        {"omega_diss_GHz", to_GHz(d.omega_diss)}, {"alpha_q_MHz", to_MHz(d.alpha_q)},
        {"alpha_diss_MHz", to_MHz(d.alpha_diss)}, {"g_q_MHz", to_MHz(d.g_q)},
        {"g_c_MHz", to_MHz(d.g_c)},               {"g_f_MHz", to_MHz(d.g_f)},
        {"kappa_c_kHz", to_kHz(d.kappa_c)},       {"kappa_f_MHz", to_MHz(d.kappa_f)},
        {"kappa_diss_MHz", to_MHz(d.kappa_diss)}, {"chi_kHz", to_kHz(d.chi)},
        {"d", d.d},                               {"T0_mK", units::to_mK(d.T0)},
        {"T_bath_mK", units::to_mK(d.T_bath)},
    };
    Json out = {{"experiment", to_string(c.experiment)}, {"seed", c.seed}, {"device", device}};
    auto mhz = [](const std::vector<double>& v) {
        Json a = Json::array();
        for (double x : v) a.push_back(to_MHz(x));
        return a;
    };
    switch (c.experiment) {
        case Experiment::ringdown: {
            const auto& o = c.ringdown.options;
            out["sweep"] = {{"omega_p_MHz", mhz(c.ringdown.grid.axes[0].values)},
                            {"g_p_MHz", mhz(c.ringdown.grid.axes[1].values)}};
            out["options"] = {{"frame", o.frame == experiments::Frame::rotating ? "rotating" : "lab"},
                              {"cavity_cutoff", o.model.cavity_cutoff},
                              {"initial_photons", o.initial_photons},
                              {"convention", model::to_string(o.convention)},
                              {"noise", o.noise_sigma},
                              {"samples", o.samples}};
            break;
        }
        case Experiment::reset: {
            const auto& s = c.reset.spec;
            out["sweep"] = {{"tau_us", {{"start", c.reset.tau.front()}, {"stop", c.reset.tau.back()},
                                        {"count", c.reset.tau.size()}}}};
            out["options"] = {{"n_bar0", s.n_bar0},         {"gap_ns", s.gap * 1e3},
                              {"g_p_MHz", to_MHz(c.reset.g_p)}, {"gamma_2_0_per_us", s.gamma_2_0},
                              {"threshold", s.threshold}};
            break;
        }
        case Experiment::cool:
            out["sweep"] = {{"g_p_MHz", mhz(c.cool.spec.g_p)}};
            out["options"] = {{"injected_n", c.cool.spec.injected_n}, {"gamma_2_0_per_us", c.cool.spec.gamma_2_0}};
            break;
        case Experiment::spectroscopy:
            out["sweep"] = {{"phi", {{"start", c.spectroscopy.phi.front()}, {"stop", c.spectroscopy.phi.back()},
                                     {"count", c.spectroscopy.phi.size()}}}};
            out["options"] = {{"include_cavity", c.spectroscopy.options.include_cavity},
                              {"include_filter", c.spectroscopy.options.include_filter},
                              {"include_qubit", c.spectroscopy.options.include_qubit}};
            break;
        case Experiment::analytic:
            out["options"] = {{"formula", c.analytic.formula}, {"inputs", c.analytic.inputs}};
            break;
        case Experiment::fit: {
            static const char* kinds[] = {"exponential", "lorentzian", "avoided_crossing", "flux_curve"};
            out["options"] = {{"kind", kinds[static_cast<int>(c.fit.kind)]},
                              {"input", c.fit.input},
                              {"x", c.fit.x},
                              {"y", c.fit.y},
                              {"y2", c.fit.y2},
                              {"frequency_unit", c.fit.frequency_unit},
                              {"free_alpha", c.fit.free_alpha},
                              {"alpha_MHz", to_MHz(c.fit.alpha)},
                              {"noise", c.fit.noise_sigma}};
            break;
        }
    }
    round_floats(out);
    return out;
}

}  // namespace pdiss::app
