#include "cimbo/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cimbo/error.hpp"
#include "cimbo/pareto.hpp"

namespace cimbo {

void Nsga2Config::validate() const {
    if (population_size < 4 || population_size % 2 != 0) {
        throw ValidationError("population_size must be even and >= 4 (got " + std::to_string(population_size) + ")");
    }
    if (!(crossover_probability >= 0.0 && crossover_probability <= 1.0)) {
        throw ValidationError("crossover_probability must lie in [0,1]");
    }
    if (mutation_probability > 1.0) throw ValidationError("mutation_probability must lie in [0,1]");
    if (!(crossover_distribution_index > 0.0) || !(mutation_distribution_index > 0.0)) {
        throw ValidationError("distribution indices must be > 0");
    }
}

std::vector<std::vector<std::size_t>> fast_non_dominated_sort(const std::vector<std::vector<double>>& fitnesses) {
    if (fitnesses.empty()) return {};
    const std::size_t n = fitnesses.size();
    for (const auto& f : fitnesses) {
        if (f.size() != fitnesses[0].size()) throw ValidationError("fast_non_dominated_sort: mixed vector lengths");
    }

    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(fitnesses[p], fitnesses[q])) {
                dominated_by[p].push_back(q);
                ++domination_count[q];
            } else if (dominates(fitnesses[q], fitnesses[p])) {
                dominated_by[q].push_back(p);
                ++domination_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (domination_count[p] == 0) fronts[0].push_back(p);
    }
    for (std::size_t k = 0; !fronts[k].empty(); ++k) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[k]) {
            for (std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) next.push_back(q);
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front) {
    const std::size_t n = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    const std::size_t m = front[0].size();
    std::vector<std::size_t> order(n);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][obj] < front[b][obj]; });
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        const double range = front[order.back()][obj] - front[order.front()][obj];
        if (!(range > 0.0)) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            dist[order[i]] += (front[order[i + 1]][obj] - front[order[i - 1]][obj]) / range;
        }
    }
    return dist;
}

namespace detail {

double sbx_spread(double u, double distribution_index) {
    const double exponent = 1.0 / (distribution_index + 1.0);
    if (u <= 0.5) return std::pow(2.0 * u, exponent);
    return std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
}

std::pair<double, double> sbx_blend(double a, double b, double spread) {
    return {0.5 * ((1.0 + spread) * a + (1.0 - spread) * b), 0.5 * ((1.0 - spread) * a + (1.0 + spread) * b)};
}

}  // namespace detail

std::pair<Genome, Genome> sbx_crossover(std::span<const double> a, std::span<const double> b,
                                        double crossover_probability, double distribution_index,
                                        std::mt19937_64& rng) {
    if (a.size() != b.size()) throw ValidationError("sbx_crossover: parent length mismatch");
    Genome c1(a.begin(), a.end());
    Genome c2(b.begin(), b.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) >= crossover_probability) return {c1, c2};
    for (std::size_t i = 0; i < a.size(); ++i) {
        // Per-gene exchange with probability 0.5.
        if (unit(rng) >= 0.5) continue;
        const double spread = detail::sbx_spread(unit(rng), distribution_index);
        const auto [x, y] = detail::sbx_blend(a[i], b[i], spread);
        c1[i] = std::clamp(x, 0.0, 1.0);
        c2[i] = std::clamp(y, 0.0, 1.0);
    }
    return {c1, c2};
}

Genome polynomial_mutation(std::span<const double> genome, double mutation_probability, double distribution_index,
                           std::mt19937_64& rng) {
    Genome out(genome.begin(), genome.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double power = 1.0 / (distribution_index + 1.0);
    for (double& y : out) {
        if (unit(rng) >= mutation_probability) continue;
        const double r = unit(rng);
        double delta;
        if (r < 0.5) {
            const double xy = 1.0 - y;
            const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(xy, distribution_index + 1.0);
            delta = std::pow(val, power) - 1.0;
        } else {
            const double xy = y;
            const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(xy, distribution_index + 1.0);
            delta = 1.0 - std::pow(val, power);
        }
        y = std::clamp(y + delta, 0.0, 1.0);
    }
    return out;
}

namespace {

std::vector<std::vector<double>> fitness_of(const std::vector<Individual>& pop) {
    std::vector<std::vector<double>> f;
    f.reserve(pop.size());
    for (const auto& ind : pop) f.push_back(ind.fitness);
    return f;
}

// Sets rank and crowding of every member of `pop`.
std::vector<std::vector<std::size_t>> assign_rank_and_crowding(std::vector<Individual>& pop) {
    auto fronts = fast_non_dominated_sort(fitness_of(pop));
    for (std::size_t k = 0; k < fronts.size(); ++k) {
        std::vector<std::vector<double>> ff;
        ff.reserve(fronts[k].size());
        for (std::size_t i : fronts[k]) ff.push_back(pop[i].fitness);
        const auto cd = crowding_distance(ff);
        for (std::size_t j = 0; j < fronts[k].size(); ++j) {
            pop[fronts[k][j]].rank = k;
            pop[fronts[k][j]].crowding = cd[j];
        }
    }
    return fronts;
}

std::vector<std::size_t> truncate(const std::vector<std::vector<std::size_t>>& fronts,
                                  const std::vector<double>& crowding, std::size_t count) {
    std::vector<std::size_t> keep;
    keep.reserve(count);
    for (const auto& front : fronts) {
        if (keep.size() + front.size() <= count) {
            keep.insert(keep.end(), front.begin(), front.end());
            if (keep.size() == count) break;
            continue;
        }
        std::vector<std::size_t> sorted = front;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [&](std::size_t a, std::size_t b) { return crowding[a] > crowding[b]; });
        sorted.resize(count - keep.size());
        keep.insert(keep.end(), sorted.begin(), sorted.end());
        break;
    }
    return keep;
}

}  // namespace

std::vector<std::size_t> select_best(const std::vector<std::vector<double>>& fitnesses, std::size_t count) {
    if (count >= fitnesses.size()) {
        std::vector<std::size_t> all(fitnesses.size());
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    const auto fronts = fast_non_dominated_sort(fitnesses);
    std::vector<double> crowding(fitnesses.size(), 0.0);
    for (const auto& front : fronts) {
        std::vector<std::vector<double>> ff;
        for (std::size_t i : front) ff.push_back(fitnesses[i]);
        const auto cd = crowding_distance(ff);
        for (std::size_t j = 0; j < front.size(); ++j) crowding[front[j]] = cd[j];
    }
    return truncate(fronts, crowding, count);
}

Nsga2Result evolve(const FitnessFn& fitness, const Nsga2Config& config, std::size_t genome_length,
                   std::vector<Genome> initial) {
    config.validate();
    if (genome_length == 0) throw ValidationError("evolve: genome length must be >= 1");
    if (initial.size() > config.population_size) {
        throw ValidationError("evolve: initial population larger than population_size");
    }
    const std::size_t n = config.population_size;
    const double p_m =
        config.mutation_probability < 0.0 ? 1.0 / static_cast<double>(genome_length) : config.mutation_probability;

    std::mt19937_64 rng(config.rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    Nsga2Result result;
    auto evaluate = [&](Individual& ind) {
        ind.fitness = fitness(ind.genome);
        ++result.evaluations;
    };

    std::vector<Individual> pop(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < initial.size()) {
            if (initial[i].size() != genome_length) throw ValidationError("evolve: initial genome length mismatch");
            pop[i].genome = std::move(initial[i]);
            for (double& g : pop[i].genome) g = std::clamp(g, 0.0, 1.0);
        } else {
            pop[i].genome.resize(genome_length);
            for (double& g : pop[i].genome) g = unit(rng);
        }
        evaluate(pop[i]);
    }
    assign_rank_and_crowding(pop);

    auto tournament = [&]() -> const Individual& {
        const Individual& a = pop[pick(rng)];
        const Individual& b = pop[pick(rng)];
        if (crowded_less(a, b)) return a;
        if (crowded_less(b, a)) return b;
        return unit(rng) < 0.5 ? a : b;
    };

    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        std::vector<Individual> merged = pop;
        merged.reserve(2 * n);
        while (merged.size() < 2 * n) {
            const Individual& p1 = tournament();
            const Individual& p2 = tournament();
            auto [c1, c2] =
                sbx_crossover(p1.genome, p2.genome, config.crossover_probability, config.crossover_distribution_index, rng);
            Individual k1, k2;
            k1.genome = polynomial_mutation(c1, p_m, config.mutation_distribution_index, rng);
            k2.genome = polynomial_mutation(c2, p_m, config.mutation_distribution_index, rng);
            merged.push_back(std::move(k1));
            merged.push_back(std::move(k2));
        }
        for (std::size_t i = n; i < merged.size(); ++i) evaluate(merged[i]);

        const auto fronts = assign_rank_and_crowding(merged);
        std::vector<double> crowding(merged.size());
        for (std::size_t i = 0; i < merged.size(); ++i) crowding[i] = merged[i].crowding;
        const auto keep = truncate(fronts, crowding, n);
        std::vector<Individual> next;
        next.reserve(n);
        for (std::size_t i : keep) next.push_back(std::move(merged[i]));
        pop = std::move(next);
        assign_rank_and_crowding(pop);
    }

    for (const auto& ind : pop) {
        if (ind.rank == 0) result.front.push_back(ind);
    }
    result.population = std::move(pop);
    return result;
}

}  // namespace cimbo
