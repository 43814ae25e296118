#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cimbo/bo.hpp"
#include "cimbo/config.hpp"
#include "cimbo/evaluators.hpp"

namespace cimbo {

inline constexpr const char* kVersion = "0.1.0";

std::unique_ptr<Evaluator> make_evaluator(const ExperimentConfig& config);

// Expensive-evaluation NSGA-II: every fitness call is one evaluator query.
// With `reference` unset, the reference point is frozen from the first
// `pre_pass` evaluations (then replayed into the archive).
RunLog run_nsga2_baseline(const DesignSpace& space, Evaluator& evaluator, const BaselineConfig& config,
                          std::uint64_t seed, std::optional<ObjectiveVector> reference, std::size_t pre_pass,
                          double ref_margin);

// runlog.csv, timing.csv, pareto.csv, pareto.json, meta.json
void write_run_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config, std::uint64_t seed,
                         const std::string& method, const RunLog& log, const DesignSpace& space,
                         const Evaluator& evaluator);

RunLog run_bo(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& dir);
RunLog run_baseline(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& dir);

struct CompareResult {
    std::vector<std::uint64_t> seeds;
    std::vector<RunLog> bo;
    std::vector<RunLog> baseline;
    std::vector<ObjectiveVector> references;  // internal sense, one per seed
};

// Per seed: a BO run, then a baseline with the same budget scored against the
// BO run's frozen reference point. Writes hv_curves.csv at the top level.
CompareResult run_compare(const ExperimentConfig& config, const std::filesystem::path& dir);

// Query-indexed hypervolume curves: row q holds every run's hv after q queries.
std::string emit_hv_curves_csv(const CompareResult& result, std::size_t budget);

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const std::filesystem::path& dir);

// Exact hypervolume of a front file; `ref` is in raw units.
double front_file_hypervolume(const std::filesystem::path& front, const std::vector<double>& ref);

// Dispatch on config.mode; writes everything under `dir`.
void run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir);

}  // namespace cimbo
