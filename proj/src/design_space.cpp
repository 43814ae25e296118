#include "cimbo/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cimbo/error.hpp"

namespace cimbo {

namespace {

void check_param(const ParameterSpec& p) {
    if (p.name.empty()) throw ValidationError("parameter with empty name");
    if (p.levels.empty()) throw ValidationError("parameter '" + p.name + "' has no levels");
    for (std::size_t i = 1; i < p.levels.size(); ++i) {
        if (p.levels[i] <= p.levels[i - 1]) {
            throw ValidationError("parameter '" + p.name + "' levels must be strictly increasing");
        }
    }
}

void check_layer(const LayerSpec& l) {
    if (l.name.empty()) throw ValidationError("layer with empty name");
    if (l.fan_in < 1 || l.fan_out < 1 || l.output_positions < 1) {
        throw ValidationError("layer '" + l.name + "' needs fan_in, fan_out, output_positions >= 1");
    }
    if (!(l.sensitivity >= 0.0) || !std::isfinite(l.sensitivity)) {
        throw ValidationError("layer '" + l.name + "' sensitivity must be finite and >= 0");
    }
}

LayerSpec conv(std::string name, std::int64_t in_ch, std::int64_t out_ch, std::int64_t side) {
    return {std::move(name), LayerKind::Conv, in_ch * 9, out_ch, side * side, 1.0};
}

LayerSpec linear(std::string name, std::int64_t in, std::int64_t out) {
    return {std::move(name), LayerKind::Linear, in, out, 1, 1.0};
}

}  // namespace

DesignSpace::DesignSpace(std::vector<LayerSpec> layers, std::vector<ParameterSpec> params)
    : layers_(std::move(layers)), params_(std::move(params)) {
    for (const auto& l : layers_) check_layer(l);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        check_param(params_[i]);
        for (std::size_t j = 0; j < i; ++j) {
            if (params_[j].name == params_[i].name) {
                throw ValidationError("duplicate parameter '" + params_[i].name + "'");
            }
        }
    }
    for (std::size_t p = 0; p < params_.size(); ++p) {
        if (params_[p].scope == Scope::Global) {
            slots_.push_back({params_[p].name, p, std::nullopt});
            continue;
        }
        if (layers_.empty()) {
            throw ValidationError("per-layer parameter '" + params_[p].name + "' in a space without layers");
        }
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            slots_.push_back({params_[p].name + "." + layers_[l].name, p, l});
        }
    }
    if (slots_.empty()) throw ValidationError("design space has no slots");
}

std::optional<std::size_t> DesignSpace::find_param(std::string_view name) const {
    for (std::size_t p = 0; p < params_.size(); ++p) {
        if (params_[p].name == name) return p;
    }
    return std::nullopt;
}

std::size_t DesignSpace::slot_of(std::size_t param, std::size_t layer) const {
    for (std::size_t s = 0; s < slots_.size(); ++s) {
        if (slots_[s].param != param) continue;
        if (!slots_[s].layer || *slots_[s].layer == layer) return s;
    }
    throw ValidationError("no slot for parameter index " + std::to_string(param));
}

void DesignSpace::validate(const DesignPoint& point) const {
    if (point.indices.size() != slots_.size()) {
        throw ValidationError("design point has " + std::to_string(point.indices.size()) +
                              " indices, space has " + std::to_string(slots_.size()) + " slots");
    }
    for (std::size_t s = 0; s < slots_.size(); ++s) {
        if (point.indices[s] >= level_count(s)) {
            throw ValidationError("slot '" + slots_[s].name + "' index " + std::to_string(point.indices[s]) +
                                  " out of range (levels: " + std::to_string(level_count(s)) + ")");
        }
    }
}

std::vector<double> encode(const DesignPoint& point, const DesignSpace& space) {
    space.validate(point);
    std::vector<double> out(space.dimension());
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto count = space.level_count(s);
        out[s] = count == 1 ? 0.0 : static_cast<double>(point.indices[s]) / static_cast<double>(count - 1);
    }
    return out;
}

DesignPoint decode(std::span<const double> vector, const DesignSpace& space) {
    if (vector.size() != space.dimension()) {
        throw ValidationError("vector length " + std::to_string(vector.size()) + " does not match dimension " +
                              std::to_string(space.dimension()));
    }
    DesignPoint point;
    point.indices.resize(vector.size());
    for (std::size_t s = 0; s < vector.size(); ++s) {
        if (!std::isfinite(vector[s])) {
            throw ValidationError("non-finite coordinate for slot '" + space.slots()[s].name + "'");
        }
        const auto top = static_cast<double>(space.level_count(s) - 1);
        const double scaled = std::clamp(vector[s], 0.0, 1.0) * top;
        point.indices[s] = static_cast<std::size_t>(std::min(std::floor(scaled + 0.5), top));
    }
    return point;
}

std::vector<DesignPoint> sample_uniform(const DesignSpace& space, std::size_t n, std::uint64_t rng_seed) {
    if (n < 1) throw ValidationError("sample_uniform needs n >= 1");
    std::mt19937_64 rng(rng_seed);
    std::vector<DesignPoint> out(n);
    for (auto& p : out) {
        p.indices.resize(space.dimension());
        for (std::size_t s = 0; s < space.dimension(); ++s) {
            std::uniform_int_distribution<std::size_t> pick(0, space.level_count(s) - 1);
            p.indices[s] = pick(rng);
        }
    }
    return out;
}

boost::multiprecision::cpp_int cardinality(const DesignSpace& space) {
    boost::multiprecision::cpp_int total = 1;
    for (std::size_t s = 0; s < space.dimension(); ++s) total *= space.level_count(s);
    return total;
}

std::vector<LayerSpec> vgg8_layers() {
    return {
        conv("conv1", 3, 128, 32),   conv("conv2", 128, 128, 32), conv("conv3", 128, 256, 16),
        conv("conv4", 256, 256, 16), conv("conv5", 256, 512, 8),  conv("conv6", 512, 512, 8),
        linear("fc1", 8192, 1024),   linear("fc2", 1024, 10),
    };
}

// 64x64 inputs, five pooling stages.
std::vector<LayerSpec> vgg16_layers() {
    return {
        conv("conv1_1", 3, 64, 64),    conv("conv1_2", 64, 64, 64),   conv("conv2_1", 64, 128, 32),
        conv("conv2_2", 128, 128, 32), conv("conv3_1", 128, 256, 16), conv("conv3_2", 256, 256, 16),
        conv("conv3_3", 256, 256, 16), conv("conv4_1", 256, 512, 8),  conv("conv4_2", 512, 512, 8),
        conv("conv4_3", 512, 512, 8),  conv("conv5_1", 512, 512, 4),  conv("conv5_2", 512, 512, 4),
        conv("conv5_3", 512, 512, 4),  linear("fc1", 2048, 4096),     linear("fc2", 4096, 4096),
        linear("fc3", 4096, 200),
    };
}

std::vector<ParameterSpec> vgg8_params() {
    return {
        {"WBP", Scope::PerLayer, {3, 4, 5}},
        {"IBP", Scope::PerLayer, {3, 4, 5}},
        {"CSS", Scope::PerLayer, {64, 128, 256}},
        {"ABP", Scope::Global, {4, 5}},
        {"CCM", Scope::Global, {4, 8, 16}},
    };
}

std::vector<ParameterSpec> vgg16_params() {
    return {
        {"WBP", Scope::PerLayer, {5, 6, 7, 8}},
        {"IBP", Scope::PerLayer, {5, 6, 7, 8}},
        {"CSS", Scope::PerLayer, {64, 128, 256}},
        {"ABP", Scope::Global, {7, 8}},
        {"CCM", Scope::Global, {4, 8, 16}},
    };
}

DesignSpace vgg8_space() { return {vgg8_layers(), vgg8_params()}; }
DesignSpace vgg16_space() { return {vgg16_layers(), vgg16_params()}; }

std::string to_string(Scope scope) { return scope == Scope::PerLayer ? "per-layer" : "global"; }
std::string to_string(LayerKind kind) { return kind == LayerKind::Conv ? "conv" : "linear"; }

}  // namespace cimbo
