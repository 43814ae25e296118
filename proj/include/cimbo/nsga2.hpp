#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace cimbo {

// Continuous relaxation of a design: one coordinate per slot in [0,1].
using Genome = std::vector<double>;

struct Individual {
    Genome genome;
    std::vector<double> fitness;  // minimization
    std::size_t rank = 0;
    double crowding = 0.0;
};

struct Nsga2Config {
    std::size_t population_size = 100;
    std::size_t generations = 20;
    double crossover_probability = 0.9;
    double crossover_distribution_index = 15.0;
    double mutation_probability = -1.0;  // per gene; negative means 1/genome_length
    double mutation_distribution_index = 20.0;
    std::uint64_t rng_seed = 0;

    // Throws ValidationError: population must be even and >= 4, probabilities in [0,1], indices > 0.
    void validate() const;

    bool operator==(const Nsga2Config&) const = default;
};

using FitnessFn = std::function<std::vector<double>(std::span<const double>)>;

struct Nsga2Result {
    std::vector<Individual> population;
    std::vector<Individual> front;  // rank-0 members of the final population
    std::size_t evaluations = 0;    // population_size * (generations + 1)
};

// Front 0 is the non-dominated set, front k is non-dominated once fronts < k are removed.
std::vector<std::vector<std::size_t>> fast_non_dominated_sort(const std::vector<std::vector<double>>& fitnesses);

std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front_fitnesses);

// Crowded-comparison order on (rank, crowding).
inline bool crowded_less(const Individual& a, const Individual& b) {
    return a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding);
}

std::pair<Genome, Genome> sbx_crossover(std::span<const double> a, std::span<const double> b,
                                        double crossover_probability, double distribution_index,
                                        std::mt19937_64& rng);

Genome polynomial_mutation(std::span<const double> genome, double mutation_probability, double distribution_index,
                           std::mt19937_64& rng);

// Generational NSGA-II. `initial` may hold up to population_size genomes; the
// rest of the first population is drawn uniformly.
Nsga2Result evolve(const FitnessFn& fitness, const Nsga2Config& config, std::size_t genome_length,
                   std::vector<Genome> initial = {});

// Picks `count` members by non-dominated rank, then crowding within the last
// front that fits. Returns indices into `fitnesses`.
std::vector<std::size_t> select_best(const std::vector<std::vector<double>>& fitnesses, std::size_t count);

namespace detail {

// SBX spread factor for a uniform draw u in [0,1).
double sbx_spread(double u, double distribution_index);

// Children for one gene before clamping: sum is always a + b.
std::pair<double, double> sbx_blend(double a, double b, double spread);

}  // namespace detail

}  // namespace cimbo
