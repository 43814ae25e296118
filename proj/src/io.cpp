#include "cimbo/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cimbo/error.hpp"

namespace cimbo {

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, r.ptr);
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw ValidationError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

namespace {

std::size_t parse_index(std::string_view s) {
    std::size_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw ValidationError("not a level index: '" + std::string(s) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        if (!line.empty()) out.push_back(line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

// Splits "name[min]" into name and sense. False for plain columns.
bool parse_objective_header(std::string_view cell, std::string& name, Sense& sense) {
    if (cell.ends_with("[min]")) {
        sense = Sense::Minimize;
    } else if (cell.ends_with("[max]")) {
        sense = Sense::Maximize;
    } else {
        return false;
    }
    name = std::string(cell.substr(0, cell.size() - 5));
    return true;
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::string objective_header(const std::string& name, Sense sense) { return name + "[" + to_string(sense) + "]"; }

std::string emit_front_csv(const FrontFile& front) {
    std::string out;
    std::vector<std::string> header = front.design_columns;
    for (std::size_t m = 0; m < front.objective_names.size(); ++m) {
        header.push_back(objective_header(front.objective_names[m], front.senses[m]));
    }
    append_row(out, header);
    for (std::size_t r = 0; r < front.objectives.size(); ++r) {
        std::vector<std::string> cells;
        if (r < front.designs.size()) {
            for (auto idx : front.designs[r]) cells.push_back(std::to_string(idx));
        }
        for (double v : front.objectives[r]) cells.push_back(format_double(v));
        append_row(out, cells);
    }
    return out;
}

FrontFile parse_front_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ValidationError("front file is empty");
    FrontFile front;
    const auto header = split_csv_line(lines[0]);
    for (const auto& cell : header) {
        std::string name;
        Sense sense;
        if (parse_objective_header(cell, name, sense)) {
            front.objective_names.push_back(std::move(name));
            front.senses.push_back(sense);
        } else {
            if (!front.objective_names.empty()) {
                throw ValidationError("front file: design column '" + cell + "' after objective columns");
            }
            front.design_columns.push_back(cell);
        }
    }
    if (front.objective_names.empty()) throw ValidationError("front file has no [min]/[max] objective columns");
    const std::size_t nd = front.design_columns.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != header.size()) {
            throw ValidationError("front file line " + std::to_string(i + 1) + ": expected " +
                                  std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        }
        std::vector<std::size_t> design;
        for (std::size_t c = 0; c < nd; ++c) design.push_back(parse_index(cells[c]));
        std::vector<double> obj;
        for (std::size_t c = nd; c < cells.size(); ++c) obj.push_back(parse_double(cells[c]));
        if (nd > 0) front.designs.push_back(std::move(design));
        front.objectives.push_back(std::move(obj));
    }
    return front;
}

FrontFile front_from_archive(const ParetoArchive& archive, const DesignSpace& space, const Evaluator& evaluator) {
    FrontFile f;
    for (const auto& s : space.slots()) f.design_columns.push_back(s.name);
    f.objective_names = evaluator.objective_names();
    f.senses = evaluator.objective_senses();
    for (const auto& e : archive.entries()) {
        f.designs.push_back(e.design.indices);
        f.objectives.push_back(evaluator.to_raw(e.objectives));
    }
    return f;
}

std::vector<ObjectiveVector> internal_objectives(const FrontFile& front) {
    std::vector<ObjectiveVector> out;
    for (const auto& row : front.objectives) {
        ObjectiveVector y(row);
        for (std::size_t m = 0; m < y.size(); ++m) {
            if (front.senses[m] == Sense::Maximize) y[m] = -y[m];
        }
        out.push_back(std::move(y));
    }
    return out;
}

std::string emit_runlog_csv(const RunLog& log, const DesignSpace& space, const Evaluator& evaluator) {
    std::string out;
    std::vector<std::string> header{"iteration", "queries", "hv", "accepted"};
    for (const auto& s : space.slots()) header.push_back(s.name);
    for (std::size_t m = 0; m < evaluator.objective_count(); ++m) {
        header.push_back(objective_header(evaluator.objective_names()[m], evaluator.objective_senses()[m]));
    }
    append_row(out, header);
    for (const auto& r : log.records) {
        std::vector<std::string> cells{std::to_string(r.iteration), std::to_string(r.queries),
                                       format_double(r.hypervolume), r.accepted ? "1" : "0"};
        for (auto idx : r.design.indices) cells.push_back(std::to_string(idx));
        for (double v : r.objectives) cells.push_back(format_double(v));
        append_row(out, cells);
    }
    return out;
}

std::string emit_timing_csv(const RunLog& log) {
    std::string out = "iteration,queries,wall_seconds\n";
    for (const auto& r : log.records) {
        append_row(out, {std::to_string(r.iteration), std::to_string(r.queries), format_double(r.wall_seconds)});
    }
    return out;
}

RunLogTable parse_runlog_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw ValidationError("run log is empty");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 4 || header[0] != "iteration" || header[1] != "queries" || header[2] != "hv" ||
        header[3] != "accepted") {
        throw ValidationError("run log header must start with iteration,queries,hv,accepted");
    }
    RunLogTable t;
    for (std::size_t c = 4; c < header.size(); ++c) {
        std::string name;
        Sense sense;
        if (parse_objective_header(header[c], name, sense)) {
            t.objective_names.push_back(std::move(name));
        } else {
            t.slot_names.push_back(header[c]);
        }
    }
    const std::size_t ns = t.slot_names.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != header.size()) {
            throw ValidationError("run log line " + std::to_string(i + 1) + " has the wrong number of cells");
        }
        IterationRecord r;
        r.iteration = parse_index(cells[0]);
        r.queries = parse_index(cells[1]);
        r.hypervolume = parse_double(cells[2]);
        r.accepted = cells[3] == "1";
        for (std::size_t c = 0; c < ns; ++c) r.design.indices.push_back(parse_index(cells[4 + c]));
        for (std::size_t c = 4 + ns; c < cells.size(); ++c) r.objectives.push_back(parse_double(cells[c]));
        t.records.push_back(std::move(r));
    }
    return t;
}

nlohmann::json pareto_json(const ParetoArchive& archive, const DesignSpace& space, const Evaluator& evaluator) {
    using nlohmann::json;
    json entries = json::array();
    for (const auto& e : archive.entries()) {
        json design = json::object();
        for (std::size_t s = 0; s < space.dimension(); ++s) design[space.slots()[s].name] = space.value(e.design, s);
        json objectives = json::object();
        const auto raw = evaluator.to_raw(e.objectives);
        for (std::size_t m = 0; m < raw.size(); ++m) objectives[evaluator.objective_names()[m]] = raw[m];
        entries.push_back({{"indices", e.design.indices}, {"design", design}, {"objectives", objectives}});
    }
    json senses = json::object();
    for (std::size_t m = 0; m < evaluator.objective_count(); ++m) {
        senses[evaluator.objective_names()[m]] = to_string(evaluator.objective_senses()[m]);
    }
    return {{"senses", senses},
            {"reference_point", evaluator.to_raw(archive.reference())},
            {"hypervolume", archive.hypervolume()},
            {"entries", entries}};
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace cimbo
