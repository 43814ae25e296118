#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cimbo/design_space.hpp"
#include "cimbo/pareto.hpp"

namespace cimbo {

enum class Sense { Minimize, Maximize };

std::string to_string(Sense sense);

// Expensive black box. evaluate() returns raw objective values (maximize-sense
// objectives un-negated) and counts every call.
class Evaluator {
public:
    virtual ~Evaluator() = default;

    ObjectiveVector evaluate(const DesignPoint& point) {
        auto y = compute(point);
        queries_.fetch_add(1, std::memory_order_relaxed);
        return y;
    }

    std::size_t query_count() const noexcept { return queries_.load(std::memory_order_relaxed); }

    virtual const std::vector<std::string>& objective_names() const = 0;
    virtual const std::vector<Sense>& objective_senses() const = 0;
    std::size_t objective_count() const { return objective_names().size(); }

    // Raw values -> all-minimization, and back. Maximize-sense components flip sign.
    ObjectiveVector to_internal(const ObjectiveVector& raw) const;
    ObjectiveVector to_raw(const ObjectiveVector& internal) const { return to_internal(internal); }

protected:
    virtual ObjectiveVector compute(const DesignPoint& point) const = 0;

private:
    std::atomic<std::size_t> queries_{0};
};

// Analytical crossbar model constants. ADC costs scale with resolution b as
// area = adc_area_unit * 2^b, energy = adc_energy_unit * 2^b, time = adc_time_unit * b.
struct CimCostModelParams {
    double cell_area = 1e-7;                // mm^2 per 1-bit cell
    double peripheral_area_fraction = 0.3;  // per-array overhead on cell area
    double cell_read_energy = 1e-9;         // uJ per cell access
    double adc_area_unit = 1e-5;            // mm^2
    double adc_energy_unit = 2e-8;          // uJ per conversion
    double adc_time_unit = 1e-6;            // ms per conversion bit
    double cycle_time = 1e-5;               // ms per input bit
    double accuracy_ceiling = 0.965;        // fraction
    double noise_weight_weights = 0.055;
    double noise_weight_inputs = 0.6;
    double noise_weight_adc = 0.64;

    double adc_area(int bits) const;
    double adc_energy(int bits) const;
    double adc_time(int bits) const;

    // Throws ValidationError on non-positive constants or negative noise weights.
    void validate() const;

    bool operator==(const CimCostModelParams&) const = default;
};

CimCostModelParams vgg8_cim_params();
CimCostModelParams vgg16_cim_params();

// Accuracy proxy (%), area (mm^2), latency (ms), energy (uJ), memory utilization (%).
inline const std::vector<std::string>& cim_objective_names() {
    static const std::vector<std::string> names{"accuracy_proxy", "area", "latency", "energy", "mem_util"};
    return names;
}

// Closed-form CIM cost model. The space must declare WBP, IBP, CSS, ABP and
// CCM (any scope); the returned vector is in raw units.
ObjectiveVector evaluate_cim(const DesignPoint& point, const DesignSpace& space, const CimCostModelParams& params);

class CimEvaluator final : public Evaluator {
public:
    CimEvaluator(DesignSpace space, CimCostModelParams params);

    const std::vector<std::string>& objective_names() const override { return cim_objective_names(); }
    const std::vector<Sense>& objective_senses() const override;
    const DesignSpace& space() const noexcept { return space_; }
    const CimCostModelParams& params() const noexcept { return params_; }

protected:
    ObjectiveVector compute(const DesignPoint& point) const override { return evaluate_cim(point, space_, params_); }

private:
    DesignSpace space_;
    CimCostModelParams params_;
};

enum class SyntheticProblem { Zdt1, Dtlz2 };

std::string to_string(SyntheticProblem problem);

// Benchmarks on the encoded genome (each slot's normalized coordinate).
ObjectiveVector evaluate_synthetic(const DesignPoint& point, const DesignSpace& space, SyntheticProblem problem,
                                   std::size_t objectives);

// Same functions on a raw genome in [0,1]^n.
ObjectiveVector zdt1(std::span<const double> x);
ObjectiveVector dtlz2(std::span<const double> x, std::size_t objectives);

class SyntheticEvaluator final : public Evaluator {
public:
    SyntheticEvaluator(DesignSpace space, SyntheticProblem problem, std::size_t objectives);

    const std::vector<std::string>& objective_names() const override { return names_; }
    const std::vector<Sense>& objective_senses() const override { return senses_; }

protected:
    ObjectiveVector compute(const DesignPoint& point) const override {
        return evaluate_synthetic(point, space_, problem_, names_.size());
    }

private:
    DesignSpace space_;
    SyntheticProblem problem_;
    std::vector<std::string> names_;
    std::vector<Sense> senses_;
};

// Every slot of each named parameter set to one level value.
struct UniformAssignment {
    std::string label;
    std::map<std::string, int> values;

    bool operator==(const UniformAssignment&) const = default;
};

struct SweepRow {
    std::string label;
    DesignPoint design;
    ObjectiveVector objectives;  // raw
};

// Throws ValidationError if a parameter is missing or a value is not one of its levels.
DesignPoint uniform_point(const DesignSpace& space, const UniformAssignment& assignment);

std::vector<SweepRow> sweep_uniform(const DesignSpace& space, const CimCostModelParams& params,
                                    const std::vector<UniformAssignment>& overrides);

// One assignment per listed value of each varied parameter, all others at `baseline`.
struct SweepVariation {
    std::string param;
    std::vector<int> values;

    bool operator==(const SweepVariation&) const = default;
};

std::vector<UniformAssignment> expand_sweep(const std::map<std::string, int>& baseline,
                                            const std::vector<SweepVariation>& vary);

}  // namespace cimbo
