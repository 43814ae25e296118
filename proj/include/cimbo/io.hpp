#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cimbo/bo.hpp"
#include "cimbo/design_space.hpp"
#include "cimbo/evaluators.hpp"

namespace cimbo {

// Shortest representation that parses back to the same double, always with
// a decimal point or exponent (3.0, not 3).
std::string format_double(double v);
double parse_double(std::string_view s);

// "name[min]" / "name[max]"
std::string objective_header(const std::string& name, Sense sense);

// CSV of designs (level indices per slot) followed by raw objective values.
// Objective columns are recognised by their [min]/[max] suffix.
struct FrontFile {
    std::vector<std::string> design_columns;
    std::vector<std::string> objective_names;
    std::vector<Sense> senses;
    std::vector<std::vector<std::size_t>> designs;
    std::vector<std::vector<double>> objectives;

    bool operator==(const FrontFile&) const = default;
};

std::string emit_front_csv(const FrontFile& front);
FrontFile parse_front_csv(std::string_view text);

// Archive (internal sense) to raw-valued front file.
FrontFile front_from_archive(const ParetoArchive& archive, const DesignSpace& space, const Evaluator& evaluator);

// Objective vectors of a front file converted to all-minimization.
std::vector<ObjectiveVector> internal_objectives(const FrontFile& front);

// runlog.csv: iteration, queries, hv, accepted, one column per slot (level
// index), one per objective (raw). Wall time lives in timing.csv so that the
// run log is reproducible byte for byte.
std::string emit_runlog_csv(const RunLog& log, const DesignSpace& space, const Evaluator& evaluator);
std::string emit_timing_csv(const RunLog& log);

struct RunLogTable {
    std::vector<std::string> slot_names;
    std::vector<std::string> objective_names;
    std::vector<IterationRecord> records;  // wall_seconds left at 0
};
RunLogTable parse_runlog_csv(std::string_view text);

nlohmann::json pareto_json(const ParetoArchive& archive, const DesignSpace& space, const Evaluator& evaluator);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace cimbo
