#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cimbo/design_space.hpp"

namespace cimbo {

// Objective values under the internal all-minimization convention.
using ObjectiveVector = std::vector<double>;

// a <= b everywhere and a < b somewhere. Throws ValidationError on length mismatch.
bool dominates(std::span<const double> a, std::span<const double> b);

// Non-dominated subset of `points` (first occurrence wins among exact duplicates).
std::vector<ObjectiveVector> nondominated(std::vector<ObjectiveVector> points);

// Componentwise min(y, ref).
ObjectiveVector clip(std::span<const double> y, std::span<const double> ref);

enum class InsertResult { Accepted, Dominated };

// Unbounded set of mutually non-dominated evaluated designs. The reference
// point is set once and never moves; entries beyond it are clipped when
// hypervolume is computed but stored unmodified.
class ParetoArchive {
public:
    struct Entry {
        DesignPoint design;
        ObjectiveVector objectives;
    };

    ParetoArchive() = default;
    explicit ParetoArchive(ObjectiveVector reference) { freeze_reference(std::move(reference)); }

    // Rejects y if any entry dominates or equals it; otherwise removes entries y dominates.
    InsertResult insert(DesignPoint design, ObjectiveVector y);

    void freeze_reference(ObjectiveVector reference);
    bool frozen() const noexcept { return reference_.has_value(); }
    const ObjectiveVector& reference() const;

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    // Entries clipped to the reference point.
    std::vector<ObjectiveVector> clipped_front() const;

    double hypervolume() const;

private:
    std::vector<Entry> entries_;
    std::optional<ObjectiveVector> reference_;
};

}  // namespace cimbo
