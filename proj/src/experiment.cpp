#include "cimbo/experiment.hpp"

#include <cmath>
#include <iostream>

#include <spdlog/spdlog.h>

#include "cimbo/error.hpp"
#include "cimbo/hypervolume.hpp"
#include "cimbo/io.hpp"

namespace cimbo {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBaselineStream = 0xBA5E;

fs::path seed_dir(const fs::path& dir, std::uint64_t seed) { return dir / ("seed_" + std::to_string(seed)); }

// Freezes the reference from every record so far and replays them into the archive.
void freeze_and_replay(RunLog& log, const Evaluator& evaluator, double margin) {
    std::vector<ObjectiveVector> internal;
    for (const auto& r : log.records) internal.push_back(evaluator.to_internal(r.objectives));
    log.archive.freeze_reference(reference_from_observations(internal, margin));
    double hv = 0.0;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const double gain = hvi(log.archive, internal[i]);
        log.records[i].accepted = log.archive.insert(log.records[i].design, internal[i]) == InsertResult::Accepted;
        hv += log.records[i].accepted ? gain : 0.0;
        log.records[i].hypervolume = hv;
    }
}

}  // namespace

std::unique_ptr<Evaluator> make_evaluator(const ExperimentConfig& config) {
    switch (config.evaluator.kind) {
        case EvaluatorKind::Cim: return std::make_unique<CimEvaluator>(config.space, config.evaluator.cim);
        case EvaluatorKind::Zdt1:
            return std::make_unique<SyntheticEvaluator>(config.space, SyntheticProblem::Zdt1, 2);
        case EvaluatorKind::Dtlz2:
            return std::make_unique<SyntheticEvaluator>(config.space, SyntheticProblem::Dtlz2,
                                                        config.evaluator.objectives);
    }
    throw ValidationError("unknown evaluator kind");
}

RunLog run_nsga2_baseline(const DesignSpace& space, Evaluator& evaluator, const BaselineConfig& config,
                          std::uint64_t seed, std::optional<ObjectiveVector> reference, std::size_t pre_pass,
                          double ref_margin) {
    RunLog log;
    if (reference) log.archive.freeze_reference(*reference);
    const std::size_t pop = config.nsga2.population_size;
    std::size_t calls = 0;

    const FitnessFn fitness = [&](std::span<const double> genome) {
        auto design = decode(genome, space);
        auto raw = evaluator.evaluate(design);
        auto internal = evaluator.to_internal(raw);
        IterationRecord rec;
        rec.iteration = calls / pop;
        rec.design = design;
        rec.objectives = std::move(raw);
        rec.queries = evaluator.query_count();
        ++calls;
        if (log.archive.frozen()) {
            const double before = log.records.empty() ? 0.0 : log.records.back().hypervolume;
            const double gain = hvi(log.archive, internal);
            rec.accepted = log.archive.insert(std::move(design), internal) == InsertResult::Accepted;
            rec.hypervolume = before + (rec.accepted ? gain : 0.0);
            log.records.push_back(std::move(rec));
        } else {
            log.records.push_back(std::move(rec));
            if (log.records.size() == pre_pass) freeze_and_replay(log, evaluator, ref_margin);
        }
        return internal;
    };

    Nsga2Config nsga2 = config.nsga2;
    nsga2.generations = config.budget / pop - 1;
    nsga2.rng_seed = derive_seed(seed, kBaselineStream);
    evolve(fitness, nsga2, space.dimension());
    if (!log.archive.frozen()) freeze_and_replay(log, evaluator, ref_margin);
    return log;
}

void write_run_artifacts(const fs::path& dir, const ExperimentConfig& config, std::uint64_t seed,
                         const std::string& method, const RunLog& log, const DesignSpace& space,
                         const Evaluator& evaluator) {
    write_text(dir / "runlog.csv", emit_runlog_csv(log, space, evaluator));
    write_text(dir / "timing.csv", emit_timing_csv(log));
    if (log.archive.frozen()) {
        write_text(dir / "pareto.csv", emit_front_csv(front_from_archive(log.archive, space, evaluator)));
        write_text(dir / "pareto.json", pareto_json(log.archive, space, evaluator).dump(2) + "\n");
    }

    nlohmann::json objectives = nlohmann::json::array();
    for (std::size_t m = 0; m < evaluator.objective_count(); ++m) {
        objectives.push_back(
            {{"name", evaluator.objective_names()[m]}, {"sense", to_string(evaluator.objective_senses()[m])}});
    }
    nlohmann::json meta = {
        {"tool", "cimbo"},
        {"version", kVersion},
        {"method", method},
        {"seed", seed},
        {"queries", evaluator.query_count()},
        {"objectives", objectives},
        {"config", config_to_json(config)},
    };
    if (log.archive.frozen()) meta["reference_point"] = evaluator.to_raw(log.archive.reference());
    if (config.evaluator.kind == EvaluatorKind::Cim) {
        meta["note"] =
            "synthetic analytical CIM cost model; accuracy_proxy is a closed-form quantization-noise proxy, "
            "not measured network accuracy";
    }
    write_text(dir / "meta.json", meta.dump(2) + "\n");
}

RunLog run_bo(const ExperimentConfig& config, std::uint64_t seed, const fs::path& dir) {
    auto evaluator = make_evaluator(config);
    BoConfig bo = config.bo;
    bo.rng_seed = seed;
    BoEngine engine(bo, config.space, *evaluator);
    try {
        engine.initialize();
        while (engine.iterations_done() < bo.n_iterations) {
            engine.step();
            spdlog::info("bo seed {} iteration {}/{} hv {:.6g} front {}", seed, engine.iterations_done(),
                         bo.n_iterations, engine.log().records.back().hypervolume, engine.archive().size());
        }
    } catch (...) {
        write_run_artifacts(dir, config, seed, "bo", engine.log(), config.space, *evaluator);
        throw;
    }
    write_run_artifacts(dir, config, seed, "bo", engine.log(), config.space, *evaluator);
    return engine.log();
}

RunLog run_baseline(const ExperimentConfig& config, std::uint64_t seed, const fs::path& dir) {
    auto evaluator = make_evaluator(config);
    auto log = run_nsga2_baseline(config.space, *evaluator, config.baseline, seed, std::nullopt, config.bo.n_init,
                                  config.bo.ref_margin);
    write_run_artifacts(dir, config, seed, "nsga2", log, config.space, *evaluator);
    return log;
}

CompareResult run_compare(const ExperimentConfig& config, const fs::path& dir) {
    CompareResult result;
    for (auto seed : config.seeds) {
        const auto sd = seed_dir(dir, seed);
        auto bo_log = run_bo(config, seed, sd / "bo");
        const ObjectiveVector ref = bo_log.archive.reference();

        auto evaluator = make_evaluator(config);
        auto base_log =
            run_nsga2_baseline(config.space, *evaluator, config.baseline, seed, ref, config.bo.n_init, config.bo.ref_margin);
        write_run_artifacts(sd / "baseline", config, seed, "nsga2", base_log, config.space, *evaluator);
        spdlog::info("compare seed {}: bo hv {:.6g}, nsga2 hv {:.6g}", seed, bo_log.records.back().hypervolume,
                     base_log.records.back().hypervolume);

        result.seeds.push_back(seed);
        result.references.push_back(ref);
        result.bo.push_back(std::move(bo_log));
        result.baseline.push_back(std::move(base_log));
    }
    write_text(dir / "hv_curves.csv", emit_hv_curves_csv(result, config.baseline.budget));
    return result;
}

std::string emit_hv_curves_csv(const CompareResult& result, std::size_t budget) {
    const std::size_t k = result.seeds.size();
    std::string out = "queries";
    for (auto s : result.seeds) out += ",bo_seed" + std::to_string(s);
    for (auto s : result.seeds) out += ",nsga2_seed" + std::to_string(s);
    out += ",bo_mean,bo_std,nsga2_mean,nsga2_std\n";

    auto at = [&](const RunLog& log, std::size_t q) {
        // Runs shorter than the budget hold their last value.
        if (log.records.empty()) return 0.0;
        return log.records[std::min(q, log.records.size()) - 1].hypervolume;
    };
    auto stats = [&](const std::vector<RunLog>& logs, std::size_t q) {
        double mean = 0.0;
        for (const auto& l : logs) mean += at(l, q);
        mean /= static_cast<double>(logs.size());
        double ss = 0.0;
        for (const auto& l : logs) ss += (at(l, q) - mean) * (at(l, q) - mean);
        const double sd = logs.size() > 1 ? std::sqrt(ss / static_cast<double>(logs.size() - 1)) : 0.0;
        return std::pair{mean, sd};
    };
    for (std::size_t q = 1; q <= budget; ++q) {
        out += std::to_string(q);
        for (std::size_t i = 0; i < k; ++i) out += "," + format_double(at(result.bo[i], q));
        for (std::size_t i = 0; i < k; ++i) out += "," + format_double(at(result.baseline[i], q));
        const auto [bm, bs] = stats(result.bo, q);
        const auto [nm, ns] = stats(result.baseline, q);
        out += "," + format_double(bm) + "," + format_double(bs) + "," + format_double(nm) + "," + format_double(ns) + "\n";
    }
    return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const fs::path& dir) {
    if (config.evaluator.kind != EvaluatorKind::Cim) throw ValidationError("sweep mode needs the cim evaluator");
    const auto assignments = expand_sweep(config.sweep.baseline, config.sweep.vary);
    auto rows = sweep_uniform(config.space, config.evaluator.cim, assignments);

    std::string out = "label";
    for (const auto& p : config.space.params()) out += "," + p.name;
    CimEvaluator evaluator(config.space, config.evaluator.cim);
    for (std::size_t m = 0; m < evaluator.objective_count(); ++m) {
        out += "," + objective_header(evaluator.objective_names()[m], evaluator.objective_senses()[m]);
    }
    out += "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += rows[i].label;
        for (const auto& p : config.space.params()) out += "," + std::to_string(assignments[i].values.at(p.name));
        for (double v : rows[i].objectives) out += "," + format_double(v);
        out += "\n";
    }
    write_text(dir / "sweep.csv", out);
    nlohmann::json meta = {{"tool", "cimbo"}, {"version", kVersion}, {"method", "sweep"}, {"config", config_to_json(config)}};
    write_text(dir / "meta.json", meta.dump(2) + "\n");
    return rows;
}

double front_file_hypervolume(const fs::path& front, const std::vector<double>& ref) {
    const auto file = parse_front_csv(read_text(front));
    if (ref.size() != file.objective_names.size()) {
        throw ValidationError("reference has " + std::to_string(ref.size()) + " components, front has " +
                              std::to_string(file.objective_names.size()) + " objectives");
    }
    ObjectiveVector internal_ref(ref);
    for (std::size_t m = 0; m < ref.size(); ++m) {
        if (file.senses[m] == Sense::Maximize) internal_ref[m] = -internal_ref[m];
    }
    const auto pts = internal_objectives(file);
    if (ref.size() > kMaxExactObjectives) return hypervolume_mc(pts, internal_ref, 1000000, 0).estimate;
    return hypervolume_exact(pts, internal_ref);
}

void run_experiment(const ExperimentConfig& config, const fs::path& dir) {
    switch (config.mode) {
        case Mode::Bo:
            for (auto seed : config.seeds) run_bo(config, seed, seed_dir(dir, seed));
            return;
        case Mode::Baseline:
            for (auto seed : config.seeds) run_baseline(config, seed, seed_dir(dir, seed));
            return;
        case Mode::Sweep: run_sweep(config, dir); return;
        case Mode::Compare: run_compare(config, dir); return;
        case Mode::Hv: std::cout << format_double(front_file_hypervolume(config.hv.front, config.hv.ref)) << "\n"; return;
    }
}

}  // namespace cimbo
