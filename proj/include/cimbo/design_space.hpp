#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cimbo {

enum class Scope { PerLayer, Global };

enum class LayerKind { Conv, Linear };

struct ParameterSpec {
    std::string name;
    Scope scope = Scope::Global;
    std::vector<int> levels;  // strictly increasing

    bool operator==(const ParameterSpec&) const = default;
};

struct LayerSpec {
    std::string name;
    LayerKind kind = LayerKind::Linear;
    std::int64_t fan_in = 1;            // in_channels * kh * kw for conv
    std::int64_t fan_out = 1;
    std::int64_t output_positions = 1;  // 1 for linear layers
    double sensitivity = 1.0;

    bool operator==(const LayerSpec&) const = default;
};

// A concrete configuration: one level index per slot of the space.
struct DesignPoint {
    std::vector<std::size_t> indices;

    auto operator<=>(const DesignPoint&) const = default;
};

// One coordinate of the design vector. Per-layer parameters expand to one slot
// per layer; global parameters occupy a single slot.
struct Slot {
    std::string name;
    std::size_t param = 0;
    std::optional<std::size_t> layer;
};

// Discrete layer-wise design space. Slots are ordered parameter-major: every
// per-layer slot of the first parameter, then the next parameter, and so on.
class DesignSpace {
public:
    DesignSpace() = default;
    DesignSpace(std::vector<LayerSpec> layers, std::vector<ParameterSpec> params);

    std::size_t dimension() const noexcept { return slots_.size(); }
    const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
    const std::vector<ParameterSpec>& params() const noexcept { return params_; }
    const std::vector<Slot>& slots() const noexcept { return slots_; }

    const std::vector<int>& levels(std::size_t slot) const { return params_.at(slots_.at(slot).param).levels; }
    std::size_t level_count(std::size_t slot) const { return levels(slot).size(); }

    // Parameter index by name, or nullopt.
    std::optional<std::size_t> find_param(std::string_view name) const;

    // Slot index of `param` for `layer` (layer ignored for global params).
    std::size_t slot_of(std::size_t param, std::size_t layer = 0) const;

    // Raw level value of the given slot in `point`.
    int value(const DesignPoint& point, std::size_t slot) const { return levels(slot).at(point.indices.at(slot)); }

    // Throws ValidationError naming the first offending slot.
    void validate(const DesignPoint& point) const;

    bool operator==(const DesignSpace& other) const {
        return layers_ == other.layers_ && params_ == other.params_;
    }

private:
    std::vector<LayerSpec> layers_;
    std::vector<ParameterSpec> params_;
    std::vector<Slot> slots_;
};

// Ordinal embedding: index i of a slot with L levels maps to i/(L-1); single-level slots map to 0.
std::vector<double> encode(const DesignPoint& point, const DesignSpace& space);

// Clamp to [0,1], then round to the nearest grid value. Exact midpoints go to the higher index.
DesignPoint decode(std::span<const double> vector, const DesignSpace& space);

// n independent uniform draws; duplicates allowed; deterministic per seed.
std::vector<DesignPoint> sample_uniform(const DesignSpace& space, std::size_t n, std::uint64_t rng_seed);

boost::multiprecision::cpp_int cardinality(const DesignSpace& space);

// The networks used in the experiments, with their parameter level sets.
std::vector<LayerSpec> vgg8_layers();
std::vector<LayerSpec> vgg16_layers();
std::vector<ParameterSpec> vgg8_params();
std::vector<ParameterSpec> vgg16_params();
DesignSpace vgg8_space();
DesignSpace vgg16_space();

std::string to_string(Scope scope);
std::string to_string(LayerKind kind);

}  // namespace cimbo
