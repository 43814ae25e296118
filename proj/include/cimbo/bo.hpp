#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "cimbo/acquisition.hpp"
#include "cimbo/design_space.hpp"
#include "cimbo/evaluators.hpp"
#include "cimbo/gp.hpp"
#include "cimbo/nsga2.hpp"
#include "cimbo/pareto.hpp"

namespace cimbo {

struct BoConfig {
    std::size_t n_init = 10;
    std::size_t n_iterations = 190;
    std::size_t n_sur = 2000;
    double beta = kDefaultBeta;
    FitOptions gp;
    Nsga2Config inner;
    std::uint64_t rng_seed = 0;
    double ref_margin = 0.1;

    void validate() const;

    bool operator==(const BoConfig& o) const {
        return n_init == o.n_init && n_iterations == o.n_iterations && n_sur == o.n_sur && beta == o.beta &&
               gp.epochs == o.gp.epochs && gp.step_size == o.gp.step_size && inner == o.inner &&
               rng_seed == o.rng_seed && ref_margin == o.ref_margin;
    }
};

struct IterationRecord {
    std::size_t iteration = 0;  // 0 for the initial samples
    DesignPoint design;
    ObjectiveVector objectives;  // raw evaluator output
    double hypervolume = 0.0;    // archive hypervolume after this query
    std::size_t queries = 0;     // cumulative evaluator queries
    double wall_seconds = 0.0;
    bool accepted = false;       // entered the archive
};

struct RunLog {
    std::vector<IterationRecord> records;
    ParetoArchive archive;  // internal (all-minimization) objective vectors
};

// Worst observed value per objective pushed out by margin * observed range.
// Objectives with zero range use margin * max(|worst|, 1).
ObjectiveVector reference_from_observations(const std::vector<ObjectiveVector>& internal, double margin);

// Multi-objective BO loop: GP per objective, LCB scoring, NSGA-II over the
// acquisition vector, hypervolume-improvement selection, one query per step.
class BoEngine {
public:
    BoEngine(BoConfig config, DesignSpace space, Evaluator& evaluator);

    // n_init distinct uniform designs, frozen reference, initial archive and GP fits.
    void initialize();

    // One iteration; exactly one evaluator query.
    void step();

    // initialize() then n_iterations steps.
    const RunLog& run();

    bool initialized() const noexcept { return initialized_; }
    std::size_t iterations_done() const noexcept { return iteration_; }
    const RunLog& log() const noexcept { return log_; }
    const ParetoArchive& archive() const noexcept { return log_.archive; }
    const std::vector<GpModel>& models() const noexcept { return models_; }
    const BoConfig& config() const noexcept { return config_; }
    const DesignSpace& space() const noexcept { return space_; }
    bool evaluated(const DesignPoint& p) const { return evaluated_.contains(p); }

    // The acquisition-front candidates of the most recent step with their
    // predicted (de-standardized, internal-sense) objective vectors and HVI.
    struct Candidate {
        DesignPoint design;
        ObjectiveVector predicted;
        double hvi = 0.0;
        double crowding = 0.0;
    };
    const std::vector<Candidate>& last_candidates() const noexcept { return last_candidates_; }

private:
    void fit_models();
    void observe(std::size_t iteration, DesignPoint design, double seconds);
    std::vector<double> acquisition(const DesignPoint& p) const;
    DesignPoint random_unevaluated();

    BoConfig config_;
    DesignSpace space_;
    Evaluator& evaluator_;
    std::mt19937_64 rng_;

    std::vector<DesignPoint> designs_;
    std::vector<ObjectiveVector> observed_;  // internal sense
    std::set<DesignPoint> evaluated_;
    std::vector<GpModel> models_;
    bool models_stale_ = true;
    bool initialized_ = false;
    std::size_t iteration_ = 0;
    std::vector<Candidate> last_candidates_;
    RunLog log_;
};

// Deterministic sub-seed derivation (splitmix64 of seed and stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace cimbo
