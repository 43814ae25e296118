// cimbo: multi-objective Bayesian optimization of layer-wise crossbar CIM designs.
//
//   cimbo run     --config <path> [--seed N] [--out DIR]
//   cimbo sweep   --config <path> [--out DIR]
//   cimbo compare --config <path> [--seed N] [--out DIR]
//   cimbo hv      --front <csv> --ref v1,...,vM
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.
// CIMBO_LOG sets the log level (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "cimbo/config.hpp"
#include "cimbo/error.hpp"
#include "cimbo/experiment.hpp"
#include "cimbo/io.hpp"

namespace {

void configure_logging() {
    spdlog::set_pattern("[%H:%M:%S] [%^%l%$] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("CIMBO_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

std::vector<double> parse_ref(const std::string& text) {
    std::vector<double> ref;
    for (const auto& cell : cimbo::split_csv_line(text)) ref.push_back(cimbo::parse_double(cell));
    return ref;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Multi-objective Bayesian optimization for crossbar compute-in-memory design"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;

    auto add_run_options = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--config", config_path, "experiment config (YAML)")->required();
        if (with_seed) sub->add_option("--seed", seed, "run a single seed instead of the configured list");
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    };
    auto* run = app.add_subcommand("run", "run the experiment in the config's mode");
    add_run_options(run, true);
    auto* sweep = app.add_subcommand("sweep", "evaluate the uniform-parameter sweep");
    add_run_options(sweep, false);
    auto* compare = app.add_subcommand("compare", "iso-budget BO vs NSGA-II comparison");
    add_run_options(compare, true);

    auto* hv = app.add_subcommand("hv", "exact hypervolume of a front file");
    std::string front_path;
    std::string ref_text;
    hv->add_option("--front", front_path, "front CSV")->required();
    hv->add_option("--ref", ref_text, "reference point in raw units, comma separated")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (hv->parsed()) {
        try {
            std::cout << cimbo::format_double(cimbo::front_file_hypervolume(front_path, parse_ref(ref_text))) << "\n";
            return 0;
        } catch (const cimbo::ValidationError& e) {
            spdlog::error("{}", e.what());
            return 1;
        } catch (const std::exception& e) {
            spdlog::error("{}", e.what());
            return 2;
        }
    }

    cimbo::ExperimentConfig config;
    try {
        config = cimbo::parse_config(config_path);
        if (sweep->parsed()) config.mode = cimbo::Mode::Sweep;
        if (compare->parsed()) {
            config.mode = cimbo::Mode::Compare;
            if (config.bo.n_init + config.bo.n_iterations != config.baseline.budget) {
                throw cimbo::ConfigError("compare needs bo.n_init + bo.n_iterations == baseline.budget");
            }
        }
        if (seed) config.seeds = {*seed};
        if (!out_dir.empty()) config.output_dir = out_dir;
    } catch (const cimbo::ConfigError& e) {
        spdlog::error("{}: {}", config_path, e.what());
        return 1;
    }

    try {
        spdlog::info("mode {} -> {}", cimbo::to_string(config.mode), config.output_dir);
        cimbo::run_experiment(config, config.output_dir);
    } catch (const cimbo::ConfigError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("run failed: {}", e.what());
        return 2;
    }
    return 0;
}
