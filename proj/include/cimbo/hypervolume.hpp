#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "cimbo/pareto.hpp"

namespace cimbo {

inline constexpr std::size_t kMaxExactObjectives = 6;

// Exact dominated volume of the union of boxes [clip(y), ref]. Recursive
// slicing (WFG): each point's exclusive contribution is its box minus the
// hypervolume of the later points limited to it. Empty front -> 0.
// Throws UnsupportedDimension for more than kMaxExactObjectives objectives.
double hypervolume_exact(std::span<const ObjectiveVector> front, std::span<const double> ref);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Uniform sampling over [componentwise min(front), ref].
McEstimate hypervolume_mc(std::span<const ObjectiveVector> front, std::span<const double> ref,
                          std::size_t n_samples, std::uint64_t rng_seed);

// Volume added by `candidate` to the archive's front. Computed as the
// candidate's box minus the part already covered, which equals
// HV(front + candidate) - HV(front) without the cancellation.
double hvi(const ParetoArchive& archive, std::span<const double> candidate);

}  // namespace cimbo
