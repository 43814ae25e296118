#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "cimbo/error.hpp"
#include "cimbo/evaluators.hpp"
#include "cimbo/hypervolume.hpp"
#include "cimbo/nsga2.hpp"
#include "oracles.hpp"

using namespace cimbo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double snap(double g, int levels) { return std::floor(std::clamp(g, 0.0, 1.0) * (levels - 1) + 0.5) / (levels - 1); }

}  // namespace

TEST_CASE("fast non-dominated sort examples") {
    using F = std::vector<std::vector<double>>;
    CHECK(fast_non_dominated_sort(F{{1, 1}, {2, 2}, {3, 3}}) == std::vector<std::vector<std::size_t>>{{0}, {1}, {2}});
    CHECK(fast_non_dominated_sort(F{{1, 2}, {2, 1}}) == std::vector<std::vector<std::size_t>>{{0, 1}});
    CHECK(fast_non_dominated_sort(F{}).empty());
    CHECK_THROWS_AS(fast_non_dominated_sort(F{{1, 2}, {1}}), ValidationError);
}

TEST_CASE("fast non-dominated sort matches brute force and partitions the input") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> u(0, 6);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng() % 40, m = 2 + rng() % 3;
        std::vector<std::vector<double>> f(n, std::vector<double>(m));
        for (auto& y : f) {
            for (auto& v : y) v = u(rng);
        }
        const auto fronts = fast_non_dominated_sort(f);
        const auto ranks = oracle::brute_force_ranks(f);
        std::multiset<std::size_t> seen;
        for (std::size_t r = 0; r < fronts.size(); ++r) {
            CHECK_FALSE(fronts[r].empty());
            for (auto i : fronts[r]) {
                CHECK(ranks[i] == r);
                seen.insert(i);
            }
        }
        CHECK(seen.size() == n);
        CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == n);
    }
}

TEST_CASE("crowding distance") {
    CHECK(crowding_distance({{1, 1}}) == std::vector<double>{kInf});
    CHECK(crowding_distance({{1, 2}, {2, 1}}) == std::vector<double>{kInf, kInf});
    const auto d = crowding_distance({{0, 2}, {1, 1}, {2, 0}});
    CHECK(d[0] == kInf);
    CHECK(d[2] == kInf);
    CHECK(d[1] == doctest::Approx(2.0));
    for (double v : crowding_distance({{0, 5}, {1, 4}, {1, 4}, {3, 1}, {4, 0}})) CHECK(v >= 0.0);
}

TEST_CASE("SBX crossover") {
    std::mt19937_64 rng(2);
    const std::vector<double> a{0.1, 0.5, 0.9}, b{0.3, 0.2, 0.4};
    const auto [c1, c2] = sbx_crossover(a, b, 0.0, 15.0, rng);
    CHECK(c1 == a);
    CHECK(c2 == b);
    for (double eta : {1.0, 15.0, 100.0}) {
        const auto [d1, d2] = sbx_crossover(a, a, 1.0, eta, rng);
        CHECK(d1 == a);
        CHECK(d2 == a);
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10000; ++t) {
        const double x = u(rng), y = u(rng);
        const auto [p, q] = detail::sbx_blend(x, y, detail::sbx_spread(u(rng), 15.0));
        CHECK(p + q == doctest::Approx(x + y).epsilon(1e-12));
        const auto [e1, e2] = sbx_crossover(a, b, 1.0, 2.0, rng);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(e1[k] >= 0.0);
            CHECK(e1[k] <= 1.0);
            CHECK(e2[k] >= 0.0);
            CHECK(e2[k] <= 1.0);
        }
    }
}

TEST_CASE("polynomial mutation") {
    std::mt19937_64 rng(3);
    const std::vector<double> g{0.0, 0.25, 0.5, 1.0};
    CHECK(polynomial_mutation(g, 0.0, 20.0, rng) == g);
    for (int t = 0; t < 100000; ++t) {
        for (double v : polynomial_mutation(g, 1.0, 5.0, rng)) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    auto mean_abs_shift = [&](double eta) {
        double s = 0.0;
        for (int t = 0; t < 20000; ++t) s += std::abs(polynomial_mutation(std::vector{0.5}, 1.0, eta, rng)[0] - 0.5);
        return s / 20000.0;
    };
    const double wide = mean_abs_shift(10.0), narrow = mean_abs_shift(1000.0);
    CHECK(narrow < wide / 10.0);
    CHECK(narrow < 1e-3);
}

TEST_CASE("config validation") {
    Nsga2Config c;
    CHECK_NOTHROW(c.validate());
    c.population_size = 101;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.population_size = 2;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.crossover_probability = 1.5;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = {};
    c.mutation_distribution_index = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("evolve counts every fitness call") {
    std::size_t calls = 0;
    const FitnessFn f = [&](std::span<const double> g) {
        ++calls;
        return std::vector<double>{g[0], 1.0 - g[0]};
    };
    Nsga2Config c{.population_size = 20, .generations = 7, .rng_seed = 4};
    const auto r = evolve(f, c, 3);
    CHECK(calls == 20 * 8);
    CHECK(r.evaluations == calls);
    CHECK(r.population.size() == 20);
    for (const auto& ind : r.front) CHECK(ind.rank == 0);
}

TEST_CASE("evolve covers a one-gene discretized front") {
    const FitnessFn f = [](std::span<const double> g) {
        const double x = snap(g[0], 64);
        return std::vector<double>{x, 1.0 - x};
    };
    const auto r = evolve(f, Nsga2Config{.population_size = 100, .generations = 50, .rng_seed = 5}, 1);
    std::set<long> levels;
    for (const auto& ind : r.front) levels.insert(std::lround(snap(ind.genome[0], 64) * 63));
    CHECK(levels.size() >= 50);
}

TEST_CASE("evolve is deterministic per seed and uses the initial population") {
    const FitnessFn f = [](std::span<const double> g) { return zdt1(g); };
    Nsga2Config c{.population_size = 20, .generations = 10, .rng_seed = 6};
    const auto a = evolve(f, c, 5), b = evolve(f, c, 5);
    REQUIRE(a.front.size() == b.front.size());
    for (std::size_t i = 0; i < a.front.size(); ++i) CHECK(a.front[i].genome == b.front[i].genome);

    std::vector<Genome> seeds{Genome(5, 0.0)};
    seeds[0][0] = 0.5;
    const auto s = evolve(f, Nsga2Config{.population_size = 20, .generations = 0, .rng_seed = 7}, 5, seeds);
    CHECK(std::any_of(s.population.begin(), s.population.end(), [&](const auto& i) { return i.genome == seeds[0]; }));
    CHECK_THROWS_AS(evolve(f, c, 5, std::vector<Genome>(21, Genome(5, 0.0))), ValidationError);
}

TEST_CASE("evolve reaches 95% of the discretized ZDT1 front hypervolume") {
    const FitnessFn f = [](std::span<const double> g) {
        std::vector<double> x(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) x[i] = snap(g[i], 64);
        return zdt1(x);
    };
    const auto r = evolve(f, Nsga2Config{.population_size = 100, .generations = 250, .rng_seed = 8}, 30);
    std::vector<ObjectiveVector> found, truth;
    for (const auto& ind : r.front) found.push_back(ind.fitness);
    for (int k = 0; k < 64; ++k) truth.push_back({k / 63.0, 1.0 - std::sqrt(k / 63.0)});
    const std::vector<double> ref{11.0, 11.0};
    CHECK(hypervolume_exact(found, ref) >= 0.95 * hypervolume_exact(truth, ref));
}

TEST_CASE("select_best takes whole fronts then the most spread members") {
    const std::vector<std::vector<double>> f{{0, 3}, {1, 2}, {2, 1}, {3, 0}, {5, 5}, {6, 6}};
    auto picked = select_best(f, 3);
    std::sort(picked.begin(), picked.end());
    CHECK(picked.size() == 3);
    CHECK(std::find(picked.begin(), picked.end(), 0) != picked.end());
    CHECK(std::find(picked.begin(), picked.end(), 3) != picked.end());
    auto five = select_best(f, 5);
    std::sort(five.begin(), five.end());
    CHECK(five == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(select_best(f, 10).size() == 6);
}
