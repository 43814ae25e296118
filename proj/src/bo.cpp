#include "cimbo/bo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <spdlog/spdlog.h>

#include "cimbo/error.hpp"
#include "cimbo/hypervolume.hpp"

namespace cimbo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::MatrixXd encode_rows(const std::vector<DesignPoint>& points, const DesignSpace& space) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(space.dimension()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto e = encode(points[i], space);
        for (std::size_t d = 0; d < e.size(); ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = e[d];
    }
    return x;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void BoConfig::validate() const {
    if (n_init < 2) throw ValidationError("n_init must be >= 2");
    inner.validate();
    if (n_sur < inner.population_size) throw ValidationError("n_sur must be >= the inner population size");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and >= 0");
    if (!(ref_margin >= 0.0) || !std::isfinite(ref_margin)) throw ValidationError("ref_margin must be >= 0");
    if (!(gp.step_size > 0.0)) throw ValidationError("gp step_size must be > 0");
}

ObjectiveVector reference_from_observations(const std::vector<ObjectiveVector>& internal, double margin) {
    if (internal.empty()) throw ValidationError("reference point needs at least one observation");
    const std::size_t m = internal[0].size();
    ObjectiveVector worst(internal[0]);
    ObjectiveVector best(internal[0]);
    for (const auto& y : internal) {
        for (std::size_t i = 0; i < m; ++i) {
            worst[i] = std::max(worst[i], y[i]);
            best[i] = std::min(best[i], y[i]);
        }
    }
    ObjectiveVector ref(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double range = worst[i] - best[i];
        ref[i] = worst[i] + margin * (range > 0.0 ? range : std::max(std::abs(worst[i]), 1.0));
    }
    return ref;
}

BoEngine::BoEngine(BoConfig config, DesignSpace space, Evaluator& evaluator)
    : config_(std::move(config)), space_(std::move(space)), evaluator_(evaluator), rng_(config_.rng_seed) {
    config_.validate();
}

void BoEngine::initialize() {
    if (initialized_) throw ValidationError("BO engine already initialized");
    if (cardinality(space_) < config_.n_init) throw ValidationError("design space smaller than n_init");

    // Distinct designs only: each initial query must be new.
    std::vector<DesignPoint> init;
    std::set<DesignPoint> seen;
    std::uniform_int_distribution<std::uint64_t> seeds;
    while (init.size() < config_.n_init) {
        auto p = sample_uniform(space_, 1, seeds(rng_)).front();
        if (seen.insert(p).second) init.push_back(std::move(p));
    }

    for (auto& p : init) {
        const auto start = Clock::now();
        auto raw = evaluator_.evaluate(p);
        designs_.push_back(p);
        observed_.push_back(evaluator_.to_internal(raw));
        evaluated_.insert(p);
        IterationRecord rec;
        rec.iteration = 0;
        rec.design = std::move(p);
        rec.objectives = std::move(raw);
        rec.queries = evaluator_.query_count();
        rec.wall_seconds = seconds_since(start);
        log_.records.push_back(std::move(rec));
    }

    // Freeze the reference, then replay the initial inserts for the hv column.
    log_.archive.freeze_reference(reference_from_observations(observed_, config_.ref_margin));
    double hv = 0.0;
    for (std::size_t i = 0; i < designs_.size(); ++i) {
        const double gain = hvi(log_.archive, observed_[i]);
        log_.records[i].accepted = log_.archive.insert(designs_[i], observed_[i]) == InsertResult::Accepted;
        hv += log_.records[i].accepted ? gain : 0.0;
        log_.records[i].hypervolume = hv;
    }
    spdlog::debug("initialized: {} designs, {} on the front, hv {:.6g}", designs_.size(), log_.archive.size(), hv);

    fit_models();
    initialized_ = true;
}

void BoEngine::fit_models() {
    const Eigen::MatrixXd x = encode_rows(designs_, space_);
    const std::size_t m = evaluator_.objective_count();
    models_.clear();
    models_.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(observed_.size()));
        for (std::size_t i = 0; i < observed_.size(); ++i) y(static_cast<Eigen::Index>(i)) = observed_[i][j];
        models_.push_back(GpModel::fit(x, std::move(y), config_.gp));
    }
    models_stale_ = false;
}

std::vector<double> BoEngine::acquisition(const DesignPoint& p) const {
    const auto x = encode(p, space_);
    std::vector<double> scores(models_.size());
    for (std::size_t m = 0; m < models_.size(); ++m) {
        const auto pred = models_[m].predict(x);
        scores[m] = lcb(pred.mean, std::sqrt(pred.variance), config_.beta);
    }
    return scores;
}

DesignPoint BoEngine::random_unevaluated() {
    std::uniform_int_distribution<std::uint64_t> seeds;
    for (std::size_t attempt = 0; attempt < 100000; ++attempt) {
        auto p = sample_uniform(space_, 1, seeds(rng_)).front();
        if (!evaluated_.contains(p)) return p;
    }
    throw ValidationError("could not find an unevaluated design; the space may be exhausted");
}

void BoEngine::step() {
    if (!initialized_) throw ValidationError("BO engine not initialized");
    const auto start = Clock::now();
    ++iteration_;

    // (1) surrogate training
    if (models_stale_) fit_models();
    const double t_fit = seconds_since(start);

    // (2) score the N_sur candidate pool
    std::uniform_int_distribution<std::uint64_t> seeds;
    const auto pool = sample_uniform(space_, config_.n_sur, seeds(rng_));
    const Eigen::MatrixXd pool_x = encode_rows(pool, space_);
    const auto pool_scores = score_batch(models_, pool_x, config_.beta);

    std::map<DesignPoint, std::vector<double>> cache;
    std::vector<std::vector<double>> pool_fitness;
    pool_fitness.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        cache.emplace(pool[i], pool_scores[i].scores);
        pool_fitness.push_back(pool_scores[i].scores);
    }

    // (3) NSGA-II on the acquisition vector, seeded from the pool's best members
    std::vector<Genome> seeds_genomes;
    for (std::size_t i : select_best(pool_fitness, config_.inner.population_size)) {
        Genome g(static_cast<std::size_t>(pool_x.cols()));
        for (std::size_t d = 0; d < g.size(); ++d) g[d] = pool_x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
        seeds_genomes.push_back(std::move(g));
    }
    Nsga2Config inner = config_.inner;
    inner.rng_seed = derive_seed(config_.rng_seed ^ config_.inner.rng_seed, iteration_);
    const FitnessFn fitness = [&](std::span<const double> g) {
        auto p = decode(g, space_);
        auto it = cache.find(p);
        if (it != cache.end()) return it->second;
        auto s = acquisition(p);
        cache.emplace(std::move(p), s);
        return s;
    };
    const auto evolved = evolve(fitness, inner, space_.dimension(), std::move(seeds_genomes));
    const double t_inner = seconds_since(start);

    // (4) predicted objective vectors for the unique designs on the acquisition front
    std::vector<DesignPoint> front_designs;
    std::vector<std::vector<double>> front_scores;
    std::set<DesignPoint> unique;
    for (const auto& ind : evolved.front) {
        auto p = decode(ind.genome, space_);
        if (!unique.insert(p).second) continue;
        front_scores.push_back(cache.at(p));
        front_designs.push_back(std::move(p));
    }
    const auto crowding = crowding_distance(front_scores);

    last_candidates_.clear();
    for (std::size_t i = 0; i < front_designs.size(); ++i) {
        Candidate c;
        c.design = front_designs[i];
        c.predicted.resize(models_.size());
        for (std::size_t m = 0; m < models_.size(); ++m) c.predicted[m] = models_[m].to_raw(front_scores[i][m]);
        // (5) hypervolume improvement over the current archive
        c.hvi = hvi(log_.archive, c.predicted);
        c.crowding = crowding[i];
        last_candidates_.push_back(std::move(c));
    }

    const double t_hvi = seconds_since(start);

    // (6) argmax HVI, then larger crowding, then lower index; skip evaluated designs
    const Candidate* chosen = nullptr;
    for (const auto& c : last_candidates_) {
        if (evaluated_.contains(c.design)) continue;
        if (!chosen || c.hvi > chosen->hvi || (c.hvi == chosen->hvi && c.crowding > chosen->crowding)) chosen = &c;
    }
    DesignPoint selected = chosen ? chosen->design : random_unevaluated();
    if (!chosen) spdlog::debug("iteration {}: acquisition front fully evaluated, drawing a random design", iteration_);

    // (7)-(8) one query, archive insert, surrogate update
    observe(iteration_, std::move(selected), 0.0);
    log_.records.back().wall_seconds = seconds_since(start);
    spdlog::debug("iteration {}: front {} candidates, archive {}, hv {:.6g} (fit {:.3f}s, acquisition {:.3f}s, hvi {:.3f}s)",
                  iteration_, front_designs.size(), log_.archive.size(), log_.records.back().hypervolume, t_fit,
                  t_inner - t_fit, t_hvi - t_inner);
}

void BoEngine::observe(std::size_t iteration, DesignPoint design, double seconds) {
    auto raw = evaluator_.evaluate(design);
    auto internal = evaluator_.to_internal(raw);
    const double before = log_.records.empty() ? 0.0 : log_.records.back().hypervolume;
    const double gain = hvi(log_.archive, internal);
    const bool accepted = log_.archive.insert(design, internal) == InsertResult::Accepted;

    IterationRecord rec;
    rec.iteration = iteration;
    rec.design = design;
    rec.objectives = std::move(raw);
    rec.hypervolume = before + (accepted ? gain : 0.0);
    rec.queries = evaluator_.query_count();
    rec.wall_seconds = seconds;
    rec.accepted = accepted;
    log_.records.push_back(std::move(rec));

    const auto x = encode(design, space_);
    for (std::size_t m = 0; m < models_.size(); ++m) models_[m] = models_[m].extend(x, internal[m]);
    designs_.push_back(design);
    observed_.push_back(std::move(internal));
    evaluated_.insert(std::move(design));
    models_stale_ = true;
}

const RunLog& BoEngine::run() {
    if (!initialized_) initialize();
    while (iteration_ < config_.n_iterations) step();
    return log_;
}

}  // namespace cimbo
