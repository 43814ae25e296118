#include "cimbo/evaluators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cimbo/error.hpp"

namespace cimbo {

std::string to_string(Sense sense) { return sense == Sense::Maximize ? "max" : "min"; }

std::string to_string(SyntheticProblem problem) { return problem == SyntheticProblem::Zdt1 ? "zdt1" : "dtlz2"; }

ObjectiveVector Evaluator::to_internal(const ObjectiveVector& raw) const {
    const auto& senses = objective_senses();
    if (raw.size() != senses.size()) throw ValidationError("objective vector length does not match evaluator");
    ObjectiveVector out(raw);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (senses[i] == Sense::Maximize) out[i] = -out[i];
    }
    return out;
}

double CimCostModelParams::adc_area(int bits) const { return adc_area_unit * std::ldexp(1.0, bits); }
double CimCostModelParams::adc_energy(int bits) const { return adc_energy_unit * std::ldexp(1.0, bits); }
double CimCostModelParams::adc_time(int bits) const { return adc_time_unit * bits; }

void CimCostModelParams::validate() const {
    const std::pair<const char*, double> positive[] = {
        {"cell_area", cell_area},
        {"peripheral_area_fraction", peripheral_area_fraction},
        {"cell_read_energy", cell_read_energy},
        {"adc_area_unit", adc_area_unit},
        {"adc_energy_unit", adc_energy_unit},
        {"adc_time_unit", adc_time_unit},
        {"cycle_time", cycle_time},
        {"accuracy_ceiling", accuracy_ceiling},
    };
    for (const auto& [name, v] : positive) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("CIM parameter ") + name + " must be > 0");
    }
    const std::pair<const char*, double> nonnegative[] = {
        {"noise_weight_weights", noise_weight_weights},
        {"noise_weight_inputs", noise_weight_inputs},
        {"noise_weight_adc", noise_weight_adc},
    };
    for (const auto& [name, v] : nonnegative) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string("CIM parameter ") + name + " must be >= 0");
    }
}

CimCostModelParams vgg8_cim_params() { return {}; }

CimCostModelParams vgg16_cim_params() {
    CimCostModelParams p;
    p.accuracy_ceiling = 0.6;
    p.noise_weight_weights = 3.0;
    p.noise_weight_inputs = 10.0;
    p.noise_weight_adc = 4.0;
    return p;
}

namespace {

struct CimParamSlots {
    std::size_t wbp, ibp, css, abp, ccm;
};

CimParamSlots locate(const DesignSpace& space) {
    auto find = [&](const char* name) {
        auto p = space.find_param(name);
        if (!p) throw ValidationError(std::string("CIM model needs parameter '") + name + "' in the design space");
        return *p;
    };
    return {find("WBP"), find("IBP"), find("CSS"), find("ABP"), find("CCM")};
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

ObjectiveVector evaluate_cim(const DesignPoint& point, const DesignSpace& space, const CimCostModelParams& params) {
    space.validate(point);
    const auto slots = locate(space);
    auto value = [&](std::size_t param, std::size_t layer) { return space.value(point, space.slot_of(param, layer)); };

    double area = 0.0;
    double latency = 0.0;
    double energy = 0.0;
    double used_cells = 0.0;
    double provisioned_cells = 0.0;
    double noise = 0.0;

    for (std::size_t l = 0; l < space.layers().size(); ++l) {
        const auto& layer = space.layers()[l];
        const int wbp = value(slots.wbp, l);
        const int ibp = value(slots.ibp, l);
        const int css = value(slots.css, l);
        const int abp = value(slots.abp, l);
        const int ccm = value(slots.ccm, l);
        if (wbp < 1 || ibp < 1 || abp < 1 || css < 1 || ccm < 1) {
            throw ValidationError("CIM parameters must be positive integers (layer '" + layer.name + "')");
        }

        // One 1-bit cell per weight bit.
        const std::int64_t columns = layer.fan_out * wbp;
        const std::int64_t row_tiles = ceil_div(layer.fan_in, css);
        const std::int64_t col_tiles = ceil_div(columns, css);
        const double subarrays = static_cast<double>(row_tiles * col_tiles);
        const double positions = static_cast<double>(layer.output_positions);
        const double css_d = css;

        area += subarrays * (css_d * css_d * params.cell_area * (1.0 + params.peripheral_area_fraction) +
                             (css_d / ccm) * params.adc_area(abp));

        latency += positions * ibp * ccm * params.adc_time(abp) * static_cast<double>(row_tiles);
        latency += positions * ibp * params.cycle_time;

        const double cell_reads = static_cast<double>(layer.fan_in) * static_cast<double>(columns);
        const double conversions = static_cast<double>(row_tiles) * static_cast<double>(columns) / ccm;
        energy += positions * ibp * (cell_reads * params.cell_read_energy + conversions * params.adc_energy(abp));

        used_cells += cell_reads;
        provisioned_cells += subarrays * css_d * css_d;

        noise += layer.sensitivity * (params.noise_weight_weights * std::ldexp(1.0, -2 * wbp) +
                                      params.noise_weight_inputs * std::ldexp(1.0, -2 * ibp) +
                                      params.noise_weight_adc * std::ldexp(1.0, -2 * abp) * std::log2(css_d));
    }

    const double accuracy = params.accuracy_ceiling * (1.0 - std::min(1.0, noise)) * 100.0;
    const double mem_util = provisioned_cells > 0.0 ? used_cells / provisioned_cells * 100.0 : 0.0;
    return {accuracy, area, latency, energy, mem_util};
}

CimEvaluator::CimEvaluator(DesignSpace space, CimCostModelParams params)
    : space_(std::move(space)), params_(params) {
    params_.validate();
    locate(space_);
}

const std::vector<Sense>& CimEvaluator::objective_senses() const {
    static const std::vector<Sense> senses{Sense::Maximize, Sense::Minimize, Sense::Minimize, Sense::Minimize,
                                           Sense::Maximize};
    return senses;
}

ObjectiveVector zdt1(std::span<const double> x) {
    if (x.size() < 2) throw ValidationError("zdt1 needs at least 2 variables");
    double tail = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) tail += x[i];
    const double g = 1.0 + 9.0 * tail / static_cast<double>(x.size() - 1);
    const double f1 = x[0];
    return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

ObjectiveVector dtlz2(std::span<const double> x, std::size_t objectives) {
    if (objectives < 2) throw ValidationError("dtlz2 needs at least 2 objectives");
    if (x.size() < objectives) throw ValidationError("dtlz2 needs at least as many variables as objectives");
    double g = 0.0;
    for (std::size_t i = objectives - 1; i < x.size(); ++i) g += (x[i] - 0.5) * (x[i] - 0.5);
    ObjectiveVector f(objectives, 1.0 + g);
    const double half_pi = std::numbers::pi / 2.0;
    for (std::size_t m = 0; m < objectives; ++m) {
        const std::size_t cos_terms = objectives - 1 - m;
        for (std::size_t i = 0; i < cos_terms; ++i) f[m] *= std::cos(x[i] * half_pi);
        if (m > 0) f[m] *= std::sin(x[cos_terms] * half_pi);
    }
    return f;
}

ObjectiveVector evaluate_synthetic(const DesignPoint& point, const DesignSpace& space, SyntheticProblem problem,
                                   std::size_t objectives) {
    const auto x = encode(point, space);
    if (problem == SyntheticProblem::Zdt1) {
        if (objectives != 2) throw ValidationError("zdt1 has exactly 2 objectives");
        return zdt1(x);
    }
    return dtlz2(x, objectives);
}

SyntheticEvaluator::SyntheticEvaluator(DesignSpace space, SyntheticProblem problem, std::size_t objectives)
    : space_(std::move(space)), problem_(problem) {
    if (problem_ == SyntheticProblem::Zdt1 && objectives != 2) throw ValidationError("zdt1 has exactly 2 objectives");
    if (problem_ == SyntheticProblem::Zdt1 && space_.dimension() < 2) {
        throw ValidationError("zdt1 needs a space with at least 2 slots");
    }
    if (problem_ == SyntheticProblem::Dtlz2 && (objectives < 2 || space_.dimension() < objectives)) {
        throw ValidationError("dtlz2 needs 2 <= objectives <= space dimension");
    }
    for (std::size_t m = 0; m < objectives; ++m) names_.push_back("f" + std::to_string(m + 1));
    senses_.assign(objectives, Sense::Minimize);
}

DesignPoint uniform_point(const DesignSpace& space, const UniformAssignment& assignment) {
    for (const auto& [name, v] : assignment.values) {
        if (!space.find_param(name)) throw ValidationError("uniform assignment names unknown parameter '" + name + "'");
    }
    DesignPoint point;
    point.indices.resize(space.dimension());
    for (std::size_t s = 0; s < space.dimension(); ++s) {
        const auto& param = space.params()[space.slots()[s].param];
        auto it = assignment.values.find(param.name);
        if (it == assignment.values.end()) {
            throw ValidationError("uniform assignment '" + assignment.label + "' does not set parameter '" +
                                  param.name + "'");
        }
        auto pos = std::find(param.levels.begin(), param.levels.end(), it->second);
        if (pos == param.levels.end()) {
            throw ValidationError("value " + std::to_string(it->second) + " is not a level of parameter '" +
                                  param.name + "'");
        }
        point.indices[s] = static_cast<std::size_t>(pos - param.levels.begin());
    }
    return point;
}

std::vector<SweepRow> sweep_uniform(const DesignSpace& space, const CimCostModelParams& params,
                                    const std::vector<UniformAssignment>& overrides) {
    std::vector<SweepRow> rows;
    rows.reserve(overrides.size());
    for (const auto& a : overrides) {
        auto point = uniform_point(space, a);
        auto y = evaluate_cim(point, space, params);
        rows.push_back({a.label, std::move(point), std::move(y)});
    }
    return rows;
}

std::vector<UniformAssignment> expand_sweep(const std::map<std::string, int>& baseline,
                                            const std::vector<SweepVariation>& vary) {
    std::vector<UniformAssignment> out;
    for (const auto& v : vary) {
        if (!baseline.contains(v.param)) {
            throw ValidationError("sweep varies '" + v.param + "' which has no baseline value");
        }
        for (int value : v.values) {
            UniformAssignment a{v.param + "=" + std::to_string(value), baseline};
            a.values[v.param] = value;
            out.push_back(std::move(a));
        }
    }
    return out;
}

}  // namespace cimbo
