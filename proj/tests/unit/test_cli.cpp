#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "cimbo/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(CIMBO_CLI_PATH) + " " + args + " 2>&1";
    Result r{0, ""};
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (fgets(buf, sizeof(buf), pipe)) r.out += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("cimbo_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* kSmallBo = R"(mode: bo
network: custom
space:
  layers:
    - {name: a}
    - {name: b}
    - {name: c}
  params:
    - {name: x, scope: per-layer, levels: [0, 1, 2, 3, 4, 5, 6, 7]}
evaluator: {kind: zdt1}
bo:
  n_init: 5
  n_iterations: 5
  n_sur: 100
  gp: {epochs: 20}
  inner: {population_size: 20, generations: 3}
baseline: {budget: 10, population_size: 10}
seeds: [3]
)";

}  // namespace

TEST_CASE("hv subcommand prints the exact hypervolume") {
    const auto dir = scratch("hv");
    cimbo::write_text(dir / "front.csv", "f1[min],f2[min]\n1,2\n2,1\n");
    const auto r = run("hv --front " + (dir / "front.csv").string() + " --ref 3,3");
    CHECK(r.code == 0);
    CHECK(r.out == "3.0\n");

    cimbo::write_text(dir / "max.csv", "id,acc[max],area[min]\n0,90,2\n1,80,1\n");
    const auto m = run("hv --front " + (dir / "max.csv").string() + " --ref 70,3");
    CHECK(m.code == 0);
    CHECK(m.out == "30.0\n");

    CHECK(run("hv --front " + (dir / "front.csv").string() + " --ref 3").code != 0);
}

TEST_CASE("config errors exit with 1 and a line number") {
    const auto dir = scratch("bad");
    cimbo::write_text(dir / "bad.yaml", "mode: bo\nbo:\n  betaa: 1\n");
    const auto r = run("run --config " + (dir / "bad.yaml").string());
    CHECK(r.code == 1);
    CHECK(r.out.find("betaa") != std::string::npos);
    CHECK(r.out.find("line 3") != std::string::npos);
    CHECK(run("run --config " + (dir / "missing.yaml").string()).code == 1);
    CHECK(run("frobnicate").code != 0);
}

TEST_CASE("run writes reproducible artifacts") {
    const auto dir = scratch("run");
    cimbo::write_text(dir / "cfg.yaml", kSmallBo);
    REQUIRE(run("run --config " + (dir / "cfg.yaml").string() + " --out " + (dir / "a").string()).code == 0);
    REQUIRE(run("run --config " + (dir / "cfg.yaml").string() + " --out " + (dir / "b").string()).code == 0);
    for (const char* f : {"runlog.csv", "pareto.csv", "pareto.json", "meta.json", "timing.csv"}) {
        CHECK(fs::exists(dir / "a" / "seed_3" / f));
    }
    CHECK(cimbo::read_text(dir / "a" / "seed_3" / "runlog.csv") == cimbo::read_text(dir / "b" / "seed_3" / "runlog.csv"));
    CHECK(cimbo::read_text(dir / "a" / "seed_3" / "pareto.csv") == cimbo::read_text(dir / "b" / "seed_3" / "pareto.csv"));

    const auto log = cimbo::parse_runlog_csv(cimbo::read_text(dir / "a" / "seed_3" / "runlog.csv"));
    CHECK(log.records.size() == 10);
    CHECK(log.slot_names == std::vector<std::string>{"x.a", "x.b", "x.c"});
    CHECK(log.objective_names == std::vector<std::string>{"f1", "f2"});

    const auto meta = nlohmann::json::parse(cimbo::read_text(dir / "a" / "seed_3" / "meta.json"));
    CHECK(meta["config"]["bo"]["beta"] == 2.0);
    CHECK(meta["queries"] == 10);

    // the front file re-parses and its hypervolume matches the last logged value
    const auto front = cimbo::parse_front_csv(cimbo::read_text(dir / "a" / "seed_3" / "pareto.csv"));
    CHECK(front.objectives.size() == nlohmann::json::parse(cimbo::read_text(dir / "a" / "seed_3" / "pareto.json"))["entries"].size());
    const auto ref = meta["reference_point"].get<std::vector<double>>();
    const auto hv = run("hv --front " + (dir / "a" / "seed_3" / "pareto.csv").string() + " --ref " +
                        cimbo::format_double(ref[0]) + "," + cimbo::format_double(ref[1]));
    CHECK(cimbo::parse_double(hv.out.substr(0, hv.out.size() - 1)) ==
          doctest::Approx(log.records.back().hypervolume).epsilon(1e-12));
}

TEST_CASE("compare writes per-seed runs and query-indexed curves") {
    const auto dir = scratch("compare");
    std::string cfg = kSmallBo;
    cfg.replace(cfg.find("seeds: [3]"), 10, "seeds: [1, 2]");
    cimbo::write_text(dir / "cfg.yaml", cfg);
    const auto r = run("compare --config " + (dir / "cfg.yaml").string() + " --out " + (dir / "out").string());
    REQUIRE(r.code == 0);
    for (const char* s : {"seed_1", "seed_2"}) {
        CHECK(fs::exists(dir / "out" / s / "bo" / "runlog.csv"));
        CHECK(fs::exists(dir / "out" / s / "baseline" / "runlog.csv"));
    }
    const auto text = cimbo::read_text(dir / "out" / "hv_curves.csv");
    CHECK(text.substr(0, text.find('\n')) ==
          "queries,bo_seed1,bo_seed2,nsga2_seed1,nsga2_seed2,bo_mean,bo_std,nsga2_mean,nsga2_std");
    std::size_t rows = 0;
    for (char c : text) rows += c == '\n';
    CHECK(rows == 11);

    const auto base = cimbo::parse_runlog_csv(cimbo::read_text(dir / "out" / "seed_1" / "baseline" / "runlog.csv"));
    CHECK(base.records.size() == 10);
    CHECK(base.records.back().queries == 10);
}

TEST_CASE("sweep writes one row per uniform design") {
    const auto dir = scratch("sweep");
    cimbo::write_text(dir / "cfg.yaml", "network: vgg8\n");
    REQUIRE(run("sweep --config " + (dir / "cfg.yaml").string() + " --out " + (dir / "out").string()).code == 0);
    const auto text = cimbo::read_text(dir / "out" / "sweep.csv");
    std::size_t rows = 0;
    for (char c : text) rows += c == '\n';
    CHECK(rows == 1 + 3 + 3 + 2 + 3 + 3);
    CHECK(text.find("WBP=3,3,5,256,5,8,") != std::string::npos);
}
