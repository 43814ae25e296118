#include "cimbo/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cimbo/error.hpp"

namespace cimbo {

namespace {

int line_of(const YAML::Node& n) {
    const auto mark = n.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
}

void allow_keys(const YAML::Node& map, std::initializer_list<std::string_view> keys, const std::string& where) {
    if (!map.IsMap()) throw ConfigError("'" + where + "' must be a mapping", line_of(map));
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError("unknown key '" + key + "' in '" + where + "'", line_of(kv.first));
        }
    }
}

template <class T>
void read(const YAML::Node& map, const char* key, T& out, const std::string& where) {
    const YAML::Node n = map[key];
    if (!n) return;
    try {
        out = n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("invalid value for '" + where + "." + key + "'", line_of(n));
    }
}

template <class T>
void read_count(const YAML::Node& map, const char* key, T& out, const std::string& where) {
    long long v = static_cast<long long>(out);
    read(map, key, v, where);
    if (v < 0) throw ConfigError("'" + where + "." + key + "' must be >= 0", line_of(map[key]));
    out = static_cast<T>(v);
}

template <class E>
E read_enum(const YAML::Node& map, const char* key, E fallback, std::initializer_list<std::pair<const char*, E>> names,
            const std::string& where) {
    std::string s;
    read(map, key, s, where);
    if (s.empty()) return fallback;
    for (const auto& [name, value] : names) {
        if (s == name) return value;
    }
    throw ConfigError("unknown " + std::string(key) + " '" + s + "' in '" + where + "'", line_of(map[key]));
}

std::vector<LayerSpec> network_layers(const std::string& network) {
    if (network == "vgg8") return vgg8_layers();
    if (network == "vgg16") return vgg16_layers();
    return {};
}

std::vector<ParameterSpec> network_params(const std::string& network) {
    if (network == "vgg8") return vgg8_params();
    if (network == "vgg16") return vgg16_params();
    return {};
}

CimCostModelParams network_cim(const std::string& network) {
    return network == "vgg16" ? vgg16_cim_params() : vgg8_cim_params();
}

LayerSpec parse_layer(const YAML::Node& n) {
    const std::string where = "space.layers[]";
    allow_keys(n, {"name", "kind", "fan_in", "fan_out", "output_positions", "sensitivity"}, where);
    LayerSpec l;
    read(n, "name", l.name, where);
    l.kind = read_enum(n, "kind", LayerKind::Linear, {{"conv", LayerKind::Conv}, {"linear", LayerKind::Linear}}, where);
    read(n, "fan_in", l.fan_in, where);
    read(n, "fan_out", l.fan_out, where);
    read(n, "output_positions", l.output_positions, where);
    read(n, "sensitivity", l.sensitivity, where);
    return l;
}

ParameterSpec parse_param(const YAML::Node& n) {
    const std::string where = "space.params[]";
    allow_keys(n, {"name", "scope", "levels"}, where);
    ParameterSpec p;
    read(n, "name", p.name, where);
    p.scope = read_enum(n, "scope", Scope::Global, {{"per-layer", Scope::PerLayer}, {"global", Scope::Global}}, where);
    read(n, "levels", p.levels, where);
    return p;
}

void parse_space(const YAML::Node& n, ExperimentConfig& cfg) {
    std::vector<LayerSpec> layers = network_layers(cfg.network);
    std::vector<ParameterSpec> params = network_params(cfg.network);
    if (n) {
        allow_keys(n, {"layers", "params"}, "space");
        if (const YAML::Node ls = n["layers"]) {
            if (!ls.IsSequence()) throw ConfigError("'space.layers' must be a list", line_of(ls));
            layers.clear();
            for (const auto& item : ls) layers.push_back(parse_layer(item));
        }
        if (const YAML::Node ps = n["params"]) {
            if (!ps.IsSequence()) throw ConfigError("'space.params' must be a list", line_of(ps));
            params.clear();
            for (const auto& item : ps) params.push_back(parse_param(item));
        }
    }
    try {
        cfg.space = DesignSpace(std::move(layers), std::move(params));
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("space: ") + e.what(), n ? line_of(n) : 0);
    }
}

void parse_cim(const YAML::Node& n, CimCostModelParams& p) {
    const std::string where = "evaluator.cim";
    allow_keys(n,
               {"cell_area", "peripheral_area_fraction", "cell_read_energy", "adc_area_unit", "adc_energy_unit",
                "adc_time_unit", "cycle_time", "accuracy_ceiling", "noise_weight_weights", "noise_weight_inputs",
                "noise_weight_adc"},
               where);
    read(n, "cell_area", p.cell_area, where);
    read(n, "peripheral_area_fraction", p.peripheral_area_fraction, where);
    read(n, "cell_read_energy", p.cell_read_energy, where);
    read(n, "adc_area_unit", p.adc_area_unit, where);
    read(n, "adc_energy_unit", p.adc_energy_unit, where);
    read(n, "adc_time_unit", p.adc_time_unit, where);
    read(n, "cycle_time", p.cycle_time, where);
    read(n, "accuracy_ceiling", p.accuracy_ceiling, where);
    read(n, "noise_weight_weights", p.noise_weight_weights, where);
    read(n, "noise_weight_inputs", p.noise_weight_inputs, where);
    read(n, "noise_weight_adc", p.noise_weight_adc, where);
    try {
        p.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what(), line_of(n));
    }
}

void parse_evaluator(const YAML::Node& n, ExperimentConfig& cfg) {
    auto& ev = cfg.evaluator;
    ev.cim = network_cim(cfg.network);
    if (!n) return;
    allow_keys(n, {"kind", "objectives", "cim"}, "evaluator");
    ev.kind = read_enum(n, "kind", EvaluatorKind::Cim,
                        {{"cim", EvaluatorKind::Cim}, {"zdt1", EvaluatorKind::Zdt1}, {"dtlz2", EvaluatorKind::Dtlz2}},
                        "evaluator");
    read_count(n, "objectives", ev.objectives, "evaluator");
    if (ev.kind == EvaluatorKind::Cim) ev.objectives = 5;
    if (ev.kind == EvaluatorKind::Zdt1) ev.objectives = 2;
    if (const YAML::Node c = n["cim"]) parse_cim(c, ev.cim);
}

void parse_nsga2(const YAML::Node& n, Nsga2Config& c, const std::string& where,
                 std::initializer_list<std::string_view> extra_keys = {}) {
    std::vector<std::string_view> keys{"population_size", "crossover_probability", "crossover_distribution_index",
                                       "mutation_probability", "mutation_distribution_index"};
    keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
    if (!n.IsMap()) throw ConfigError("'" + where + "' must be a mapping", line_of(n));
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError("unknown key '" + key + "' in '" + where + "'", line_of(kv.first));
        }
    }
    read_count(n, "population_size", c.population_size, where);
    read(n, "crossover_probability", c.crossover_probability, where);
    read(n, "crossover_distribution_index", c.crossover_distribution_index, where);
    read(n, "mutation_probability", c.mutation_probability, where);
    read(n, "mutation_distribution_index", c.mutation_distribution_index, where);
}

void parse_bo(const YAML::Node& n, ExperimentConfig& cfg) {
    auto& bo = cfg.bo;
    if (n) {
        allow_keys(n, {"n_init", "n_iterations", "n_sur", "beta", "ref_margin", "gp", "inner"}, "bo");
        read_count(n, "n_init", bo.n_init, "bo");
        read_count(n, "n_iterations", bo.n_iterations, "bo");
        read_count(n, "n_sur", bo.n_sur, "bo");
        read(n, "beta", bo.beta, "bo");
        read(n, "ref_margin", bo.ref_margin, "bo");
        if (const YAML::Node gp = n["gp"]) {
            allow_keys(gp, {"epochs", "step_size"}, "bo.gp");
            read_count(gp, "epochs", bo.gp.epochs, "bo.gp");
            read(gp, "step_size", bo.gp.step_size, "bo.gp");
        }
        if (const YAML::Node inner = n["inner"]) {
            parse_nsga2(inner, bo.inner, "bo.inner", {"generations"});
            read_count(inner, "generations", bo.inner.generations, "bo.inner");
        }
    }
    if (bo.inner.mutation_probability < 0.0) {
        bo.inner.mutation_probability = 1.0 / static_cast<double>(cfg.space.dimension());
    }
    try {
        bo.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("bo: ") + e.what(), n ? line_of(n) : 0);
    }
}

void parse_baseline(const YAML::Node& n, ExperimentConfig& cfg) {
    auto& b = cfg.baseline;
    if (n) {
        parse_nsga2(n, b.nsga2, "baseline", {"budget"});
        read_count(n, "budget", b.budget, "baseline");
    }
    if (b.nsga2.mutation_probability < 0.0) {
        b.nsga2.mutation_probability = 1.0 / static_cast<double>(cfg.space.dimension());
    }
    try {
        b.nsga2.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("baseline: ") + e.what(), n ? line_of(n) : 0);
    }
    const auto pop = b.nsga2.population_size;
    if (b.budget < pop || b.budget % pop != 0) {
        throw ConfigError("baseline budget " + std::to_string(b.budget) + " must be a positive multiple of population_size " +
                              std::to_string(pop),
                          n ? line_of(n) : 0);
    }
    b.nsga2.generations = b.budget / pop - 1;
}

void parse_sweep(const YAML::Node& n, ExperimentConfig& cfg) {
    cfg.sweep = default_sweep(cfg.network);
    if (!n) return;
    allow_keys(n, {"baseline", "vary"}, "sweep");
    if (const YAML::Node b = n["baseline"]) {
        cfg.sweep.baseline.clear();
        read(n, "baseline", cfg.sweep.baseline, "sweep");
    }
    if (const YAML::Node v = n["vary"]) {
        if (!v.IsSequence()) throw ConfigError("'sweep.vary' must be a list", line_of(v));
        cfg.sweep.vary.clear();
        for (const auto& item : v) {
            allow_keys(item, {"param", "values"}, "sweep.vary[]");
            SweepVariation sv;
            read(item, "param", sv.param, "sweep.vary[]");
            read(item, "values", sv.values, "sweep.vary[]");
            cfg.sweep.vary.push_back(std::move(sv));
        }
    }
    try {
        for (const auto& a : expand_sweep(cfg.sweep.baseline, cfg.sweep.vary)) uniform_point(cfg.space, a);
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("sweep: ") + e.what(), line_of(n));
    }
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Bo: return "bo";
        case Mode::Baseline: return "baseline";
        case Mode::Sweep: return "sweep";
        case Mode::Compare: return "compare";
        case Mode::Hv: return "hv";
    }
    return "bo";
}

std::string to_string(EvaluatorKind kind) {
    switch (kind) {
        case EvaluatorKind::Cim: return "cim";
        case EvaluatorKind::Zdt1: return "zdt1";
        case EvaluatorKind::Dtlz2: return "dtlz2";
    }
    return "cim";
}

SweepConfig default_sweep(const std::string& network) {
    if (network == "vgg8") {
        return {{{"WBP", 5}, {"IBP", 5}, {"ABP", 5}, {"CSS", 256}, {"CCM", 8}},
                {{"WBP", {3, 4, 5}}, {"IBP", {3, 4, 5}}, {"ABP", {4, 5}}, {"CSS", {256, 128, 64}}, {"CCM", {16, 8, 4}}}};
    }
    if (network == "vgg16") {
        return {{{"WBP", 8}, {"IBP", 8}, {"ABP", 8}, {"CSS", 256}, {"CCM", 8}},
                {{"WBP", {5, 6, 7, 8}},
                 {"IBP", {5, 6, 7, 8}},
                 {"ABP", {7, 8}},
                 {"CSS", {256, 128, 64}},
                 {"CCM", {16, 8, 4}}}};
    }
    return {};
}

ExperimentConfig parse_config_text(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("syntax error: " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
    if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    allow_keys(root, {"mode", "network", "space", "evaluator", "bo", "baseline", "sweep", "hv", "seeds", "output_dir"},
               "config");

    ExperimentConfig cfg;
    cfg.mode = read_enum(root, "mode", Mode::Bo,
                         {{"bo", Mode::Bo},
                          {"baseline", Mode::Baseline},
                          {"sweep", Mode::Sweep},
                          {"compare", Mode::Compare},
                          {"hv", Mode::Hv}},
                         "config");
    read(root, "network", cfg.network, "config");
    if (cfg.network != "vgg8" && cfg.network != "vgg16" && cfg.network != "custom") {
        throw ConfigError("unknown network '" + cfg.network + "' (vgg8, vgg16 or custom)", line_of(root["network"]));
    }
    parse_space(root["space"], cfg);
    parse_evaluator(root["evaluator"], cfg);
    parse_bo(root["bo"], cfg);
    parse_baseline(root["baseline"], cfg);
    parse_sweep(root["sweep"], cfg);
    if (const YAML::Node hv = root["hv"]) {
        allow_keys(hv, {"front", "ref"}, "hv");
        read(hv, "front", cfg.hv.front, "hv");
        read(hv, "ref", cfg.hv.ref, "hv");
    }
    read(root, "seeds", cfg.seeds, "config");
    if (cfg.seeds.empty()) throw ConfigError("'seeds' must not be empty", line_of(root["seeds"]));
    read(root, "output_dir", cfg.output_dir, "config");

    try {
        if (cfg.evaluator.kind == EvaluatorKind::Cim) {
            CimEvaluator probe(cfg.space, cfg.evaluator.cim);
        } else {
            SyntheticEvaluator probe(cfg.space,
                                     cfg.evaluator.kind == EvaluatorKind::Zdt1 ? SyntheticProblem::Zdt1
                                                                               : SyntheticProblem::Dtlz2,
                                     cfg.evaluator.objectives);
        }
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("evaluator: ") + e.what(), line_of(root["evaluator"]));
    }
    if (cfg.mode == Mode::Compare && cfg.bo.n_init + cfg.bo.n_iterations != cfg.baseline.budget) {
        throw ConfigError("compare mode needs bo.n_init + bo.n_iterations (" +
                              std::to_string(cfg.bo.n_init + cfg.bo.n_iterations) + ") == baseline.budget (" +
                              std::to_string(cfg.baseline.budget) + ")",
                          line_of(root["baseline"]));
    }
    if (cfg.mode == Mode::Hv && (cfg.hv.front.empty() || cfg.hv.ref.empty())) {
        throw ConfigError("hv mode needs hv.front and hv.ref", line_of(root));
    }
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

nlohmann::json nsga2_json(const Nsga2Config& c) {
    return {
        {"population_size", c.population_size},
        {"crossover_probability", c.crossover_probability},
        {"crossover_distribution_index", c.crossover_distribution_index},
        {"mutation_probability", c.mutation_probability},
        {"mutation_distribution_index", c.mutation_distribution_index},
    };
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    using nlohmann::json;
    json layers = json::array();
    for (const auto& l : cfg.space.layers()) {
        layers.push_back({{"name", l.name},
                          {"kind", to_string(l.kind)},
                          {"fan_in", l.fan_in},
                          {"fan_out", l.fan_out},
                          {"output_positions", l.output_positions},
                          {"sensitivity", l.sensitivity}});
    }
    json params = json::array();
    for (const auto& p : cfg.space.params()) {
        params.push_back({{"name", p.name}, {"scope", to_string(p.scope)}, {"levels", p.levels}});
    }
    const auto& c = cfg.evaluator.cim;
    json cim = {{"cell_area", c.cell_area},
                {"peripheral_area_fraction", c.peripheral_area_fraction},
                {"cell_read_energy", c.cell_read_energy},
                {"adc_area_unit", c.adc_area_unit},
                {"adc_energy_unit", c.adc_energy_unit},
                {"adc_time_unit", c.adc_time_unit},
                {"cycle_time", c.cycle_time},
                {"accuracy_ceiling", c.accuracy_ceiling},
                {"noise_weight_weights", c.noise_weight_weights},
                {"noise_weight_inputs", c.noise_weight_inputs},
                {"noise_weight_adc", c.noise_weight_adc}};
    json inner = nsga2_json(cfg.bo.inner);
    inner["generations"] = cfg.bo.inner.generations;
    json baseline = nsga2_json(cfg.baseline.nsga2);
    baseline["budget"] = cfg.baseline.budget;
    json vary = json::array();
    for (const auto& v : cfg.sweep.vary) vary.push_back({{"param", v.param}, {"values", v.values}});

    json out = {
        {"mode", to_string(cfg.mode)},
        {"network", cfg.network},
        {"space", {{"layers", layers}, {"params", params}}},
        {"evaluator", {{"kind", to_string(cfg.evaluator.kind)}, {"objectives", cfg.evaluator.objectives}, {"cim", cim}}},
        {"bo",
         {{"n_init", cfg.bo.n_init},
          {"n_iterations", cfg.bo.n_iterations},
          {"n_sur", cfg.bo.n_sur},
          {"beta", cfg.bo.beta},
          {"ref_margin", cfg.bo.ref_margin},
          {"gp", {{"epochs", cfg.bo.gp.epochs}, {"step_size", cfg.bo.gp.step_size}}},
          {"inner", inner}}},
        {"baseline", baseline},
        {"sweep", {{"baseline", cfg.sweep.baseline}, {"vary", vary}}},
        {"seeds", cfg.seeds},
        {"output_dir", cfg.output_dir},
    };
    if (!cfg.hv.front.empty() || !cfg.hv.ref.empty()) out["hv"] = {{"front", cfg.hv.front}, {"ref", cfg.hv.ref}};
    return out;
}

std::string emit_config(const ExperimentConfig& config) { return config_to_json(config).dump(2) + "\n"; }

}  // namespace cimbo
