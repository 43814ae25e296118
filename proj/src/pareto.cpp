#include "cimbo/pareto.hpp"

#include <algorithm>
#include <cmath>

#include "cimbo/error.hpp"
#include "cimbo/hypervolume.hpp"

namespace cimbo {

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("dominates: length mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

std::vector<ObjectiveVector> nondominated(std::vector<ObjectiveVector> points) {
    std::vector<ObjectiveVector> keep;
    keep.reserve(points.size());
    for (auto& p : points) {
        bool covered = false;
        for (const auto& k : keep) {
            if (dominates(k, p) || k == p) {
                covered = true;
                break;
            }
        }
        if (covered) continue;
        std::erase_if(keep, [&](const ObjectiveVector& k) { return dominates(p, k); });
        keep.push_back(std::move(p));
    }
    return keep;
}

ObjectiveVector clip(std::span<const double> y, std::span<const double> ref) {
    if (y.size() != ref.size()) throw ValidationError("clip: length mismatch");
    ObjectiveVector out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::min(y[i], ref[i]);
    return out;
}

InsertResult ParetoArchive::insert(DesignPoint design, ObjectiveVector y) {
    for (double v : y) {
        if (!std::isfinite(v)) throw ValidationError("archive insert: non-finite objective");
    }
    for (const auto& e : entries_) {
        if (e.objectives == y || dominates(e.objectives, y)) return InsertResult::Dominated;
    }
    std::erase_if(entries_, [&](const Entry& e) { return dominates(y, e.objectives); });
    entries_.push_back({std::move(design), std::move(y)});
    return InsertResult::Accepted;
}

void ParetoArchive::freeze_reference(ObjectiveVector reference) {
    if (reference_) throw ValidationError("archive reference point is already frozen");
    for (double v : reference) {
        if (!std::isfinite(v)) throw ValidationError("reference point must be finite");
    }
    reference_ = std::move(reference);
}

const ObjectiveVector& ParetoArchive::reference() const {
    if (!reference_) throw ValidationError("archive reference point not set");
    return *reference_;
}

std::vector<ObjectiveVector> ParetoArchive::clipped_front() const {
    const auto& ref = reference();
    std::vector<ObjectiveVector> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(clip(e.objectives, ref));
    return out;
}

double ParetoArchive::hypervolume() const {
    const auto front = clipped_front();
    return hypervolume_exact(front, reference());
}

}  // namespace cimbo
