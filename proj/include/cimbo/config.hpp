#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cimbo/bo.hpp"
#include "cimbo/design_space.hpp"
#include "cimbo/evaluators.hpp"
#include "cimbo/nsga2.hpp"

namespace cimbo {

enum class Mode { Bo, Baseline, Sweep, Compare, Hv };
enum class EvaluatorKind { Cim, Zdt1, Dtlz2 };

std::string to_string(Mode mode);
std::string to_string(EvaluatorKind kind);

struct EvaluatorConfig {
    EvaluatorKind kind = EvaluatorKind::Cim;
    std::size_t objectives = 5;  // dtlz2 only; cim is fixed at 5, zdt1 at 2
    CimCostModelParams cim;

    bool operator==(const EvaluatorConfig&) const = default;
};

// Expensive-evaluation NSGA-II. generations = budget / population_size - 1.
struct BaselineConfig {
    std::size_t budget = 200;
    Nsga2Config nsga2{.population_size = 20, .generations = 9};

    bool operator==(const BaselineConfig&) const = default;
};

struct SweepConfig {
    std::map<std::string, int> baseline;
    std::vector<SweepVariation> vary;

    bool operator==(const SweepConfig&) const = default;
};

struct HvConfig {
    std::string front;
    std::vector<double> ref;

    bool operator==(const HvConfig&) const = default;
};

struct ExperimentConfig {
    Mode mode = Mode::Bo;
    std::string network = "vgg8";  // vgg8 | vgg16 | custom
    DesignSpace space;
    EvaluatorConfig evaluator;
    BoConfig bo;
    BaselineConfig baseline;
    SweepConfig sweep;
    HvConfig hv;
    std::vector<std::uint64_t> seeds{0};
    std::string output_dir = "runs";

    bool operator==(const ExperimentConfig&) const = default;
};

// YAML (or JSON) text with every default applied. Unknown keys, bad types and
// constraint violations raise ConfigError carrying the 1-based line.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

// Fully resolved configuration; emit_config output parses back to an equal config.
nlohmann::json config_to_json(const ExperimentConfig& config);
std::string emit_config(const ExperimentConfig& config);

// Default uniform sweep for the named network (baseline plus one-at-a-time variations).
SweepConfig default_sweep(const std::string& network);

}  // namespace cimbo
