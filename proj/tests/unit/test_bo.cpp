#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "cimbo/bo.hpp"
#include "cimbo/error.hpp"
#include "cimbo/hypervolume.hpp"
#include "cimbo/io.hpp"

using namespace cimbo;

namespace {

BoConfig small_config(std::uint64_t seed) {
    BoConfig c;
    c.n_init = 10;
    c.n_iterations = 12;
    c.n_sur = 200;
    c.gp = {.epochs = 30, .step_size = 0.05};
    c.inner = Nsga2Config{.population_size = 20, .generations = 5};
    c.rng_seed = seed;
    return c;
}

DesignSpace grid_space() {
    return DesignSpace({LayerSpec{.name = "a"}, LayerSpec{.name = "b"}, LayerSpec{.name = "c"}},
                       {{"x", Scope::PerLayer, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}}});
}

bool mutually_nondominated(const ParetoArchive& a) {
    for (const auto& x : a.entries()) {
        for (const auto& y : a.entries()) {
            if (&x != &y && (dominates(x.objectives, y.objectives) || x.objectives == y.objectives)) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("reference point from observations") {
    const std::vector<ObjectiveVector> obs{{1, -5, 2}, {3, -1, 2}, {2, -3, 2}};
    const auto ref = reference_from_observations(obs, 0.1);
    CHECK(ref[0] == doctest::Approx(3.2));
    CHECK(ref[1] == doctest::Approx(-0.6));
    CHECK(ref[2] == doctest::Approx(2.2));
    const auto neg = reference_from_observations({{-0.5}}, 0.1);
    CHECK(neg[0] == doctest::Approx(-0.4));
    CHECK_THROWS_AS(reference_from_observations({}, 0.1), ValidationError);
}

TEST_CASE("derive_seed is a deterministic stream split") {
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("config validation") {
    auto c = small_config(0);
    c.n_init = 1;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(0);
    c.inner.population_size = 21;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = small_config(0);
    c.beta = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("initialize spends exactly n_init distinct queries") {
    CimEvaluator ev(vgg8_space(), vgg8_cim_params());
    BoEngine engine(small_config(1), vgg8_space(), ev);
    CHECK_THROWS_AS(engine.step(), ValidationError);
    engine.initialize();
    CHECK(ev.query_count() == 10);
    const auto& log = engine.log();
    REQUIRE(log.records.size() == 10);
    std::set<DesignPoint> designs;
    for (const auto& r : log.records) {
        designs.insert(r.design);
        CHECK(r.iteration == 0);
    }
    CHECK(designs.size() == 10);
    CHECK(engine.archive().frozen());
    CHECK(mutually_nondominated(engine.archive()));
    CHECK(log.records.back().hypervolume ==
          doctest::Approx(hypervolume_exact(engine.archive().clipped_front(), engine.archive().reference())));
    CHECK(engine.models().size() == 5);
    CHECK_THROWS_AS(engine.initialize(), ValidationError);
}

TEST_CASE("each step costs one query and picks the best unevaluated candidate") {
    CimEvaluator ev(vgg8_space(), vgg8_cim_params());
    BoEngine engine(small_config(2), vgg8_space(), ev);
    engine.initialize();
    for (int t = 0; t < 4; ++t) {
        std::set<DesignPoint> before;
        for (const auto& r : engine.log().records) before.insert(r.design);
        const double hv_before = engine.log().records.back().hypervolume;
        const std::size_t q = ev.query_count();
        engine.step();
        CHECK(ev.query_count() == q + 1);
        const auto& rec = engine.log().records.back();
        CHECK(rec.iteration == engine.iterations_done());
        CHECK(rec.queries == q + 1);
        CHECK(rec.hypervolume >= hv_before);
        CHECK_FALSE(before.contains(rec.design));
        CHECK(mutually_nondominated(engine.archive()));
        CHECK(rec.hypervolume ==
              doctest::Approx(hypervolume_exact(engine.archive().clipped_front(), engine.archive().reference())));

        const auto& cands = engine.last_candidates();
        REQUIRE_FALSE(cands.empty());
        const BoEngine::Candidate* chosen = nullptr;
        for (const auto& c : cands) {
            CHECK(c.hvi >= 0.0);
            CHECK(c.predicted.size() == 5);
            if (c.design == rec.design) chosen = &c;
        }
        if (chosen) {
            for (const auto& c : cands) {
                if (!before.contains(c.design)) CHECK(c.hvi <= chosen->hvi);
            }
        }
    }
}

TEST_CASE("run spends the full budget with monotone hypervolume and no repeats") {
    SyntheticEvaluator ev(grid_space(), SyntheticProblem::Zdt1, 2);
    BoEngine engine(small_config(3), grid_space(), ev);
    const auto& log = engine.run();
    CHECK(ev.query_count() == 22);
    CHECK(log.records.size() == 22);
    std::set<DesignPoint> designs;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        designs.insert(log.records[i].design);
        CHECK(log.records[i].queries == i + 1);
        if (i > 0) CHECK(log.records[i].hypervolume >= log.records[i - 1].hypervolume);
    }
    CHECK(designs.size() == 22);
}

TEST_CASE("identical seeds give identical run logs") {
    auto run_once = [](std::uint64_t seed) {
        CimEvaluator ev(vgg8_space(), vgg8_cim_params());
        BoEngine engine(small_config(seed), vgg8_space(), ev);
        return emit_runlog_csv(engine.run(), vgg8_space(), ev);
    };
    const auto a = run_once(4);
    CHECK(a == run_once(4));
    CHECK(a != run_once(5));
}

TEST_CASE("a tiny space is exhausted by random fallback and then reported") {
    const DesignSpace tiny({LayerSpec{.name = "a"}}, {{"x", Scope::PerLayer, {0, 1, 2, 3}}, {"y", Scope::Global, {0, 1, 2}}});
    SyntheticEvaluator ev(tiny, SyntheticProblem::Zdt1, 2);
    auto c = small_config(6);
    c.n_init = 4;
    c.n_iterations = 8;
    BoEngine engine(c, tiny, ev);
    engine.run();
    std::set<DesignPoint> designs;
    for (const auto& r : engine.log().records) designs.insert(r.design);
    CHECK(designs.size() == 12);
    CHECK_THROWS_AS(engine.step(), ValidationError);

    c.n_init = 13;
    SyntheticEvaluator ev2(tiny, SyntheticProblem::Zdt1, 2);
    BoEngine too_small(c, tiny, ev2);
    CHECK_THROWS_AS(too_small.initialize(), ValidationError);
}
