#include "cimbo/hypervolume.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cimbo/error.hpp"

namespace cimbo {

namespace {

using Front = std::vector<ObjectiveVector>;

double box_volume(const ObjectiveVector& p, std::span<const double> ref) {
    double v = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) v *= ref[i] - p[i];
    return v;
}

// Drops points with zero volume (touching the reference in some objective),
// dominated points and duplicates.
Front filter(Front pts, std::span<const double> ref) {
    std::erase_if(pts, [&](const ObjectiveVector& p) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] >= ref[i]) return true;
        }
        return false;
    });
    return nondominated(std::move(pts));
}

double hv_2d(Front pts, std::span<const double> ref) {
    std::sort(pts.begin(), pts.end());
    double vol = 0.0;
    double ceiling = ref[1];
    for (const auto& p : pts) {
        if (p[1] < ceiling) {
            vol += (ref[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    return vol;
}

// pts must already be filtered.
double wfg(Front pts, std::span<const double> ref) {
    if (pts.empty()) return 0.0;
    const std::size_t m = ref.size();
    if (m == 1) {
        double best = ref[0];
        for (const auto& p : pts) best = std::min(best, p[0]);
        return ref[0] - best;
    }
    if (m == 2) return hv_2d(std::move(pts), ref);
    if (pts.size() == 1) return box_volume(pts[0], ref);

    // Worst-first in the last objective keeps limit sets small.
    std::sort(pts.begin(), pts.end(), [](const ObjectiveVector& a, const ObjectiveVector& b) {
        if (a.back() != b.back()) return a.back() > b.back();
        return a < b;
    });
    double vol = 0.0;
    Front limited;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        limited.clear();
        for (std::size_t j = k + 1; j < pts.size(); ++j) {
            ObjectiveVector q(m);
            for (std::size_t i = 0; i < m; ++i) q[i] = std::max(pts[k][i], pts[j][i]);
            limited.push_back(std::move(q));
        }
        vol += box_volume(pts[k], ref) - wfg(filter(std::move(limited), ref), ref);
        limited = Front{};
    }
    return vol;
}

void check_front(std::span<const ObjectiveVector> front, std::span<const double> ref) {
    for (const auto& p : front) {
        if (p.size() != ref.size()) throw ValidationError("hypervolume: point/reference length mismatch");
        for (double v : p) {
            if (!std::isfinite(v)) throw ValidationError("hypervolume: non-finite objective");
        }
    }
}

}  // namespace

double hypervolume_exact(std::span<const ObjectiveVector> front, std::span<const double> ref) {
    if (front.empty()) return 0.0;
    if (ref.size() > kMaxExactObjectives) {
        throw UnsupportedDimension("exact hypervolume supports at most " + std::to_string(kMaxExactObjectives) +
                                   " objectives; use hypervolume_mc for " + std::to_string(ref.size()));
    }
    check_front(front, ref);
    Front pts;
    pts.reserve(front.size());
    for (const auto& p : front) pts.push_back(clip(p, ref));
    return wfg(filter(std::move(pts), ref), ref);
}

McEstimate hypervolume_mc(std::span<const ObjectiveVector> front, std::span<const double> ref,
                          std::size_t n_samples, std::uint64_t rng_seed) {
    if (n_samples < 1) throw ValidationError("hypervolume_mc needs n_samples >= 1");
    if (front.empty()) return {};
    check_front(front, ref);
    const std::size_t m = ref.size();
    Front pts;
    for (const auto& p : front) pts.push_back(clip(p, ref));
    std::vector<double> lo(ref.begin(), ref.end());
    for (const auto& p : pts) {
        for (std::size_t i = 0; i < m; ++i) lo[i] = std::min(lo[i], p[i]);
    }
    double box = 1.0;
    for (std::size_t i = 0; i < m; ++i) box *= ref[i] - lo[i];
    if (!(box > 0.0)) return {};

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> s(m);
    std::size_t hits = 0;
    for (std::size_t n = 0; n < n_samples; ++n) {
        for (std::size_t i = 0; i < m; ++i) s[i] = lo[i] + unit(rng) * (ref[i] - lo[i]);
        for (const auto& p : pts) {
            bool covered = true;
            for (std::size_t i = 0; i < m && covered; ++i) covered = p[i] <= s[i];
            if (covered) {
                ++hits;
                break;
            }
        }
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(n_samples);
    return {box * frac, box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(n_samples))};
}

double hvi(const ParetoArchive& archive, std::span<const double> candidate) {
    const auto& ref = archive.reference();
    if (candidate.size() != ref.size()) throw ValidationError("hvi: candidate/reference length mismatch");
    const ObjectiveVector c = clip(candidate, ref);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] >= ref[i]) return 0.0;
    }
    if (ref.size() > kMaxExactObjectives) {
        throw UnsupportedDimension("hvi: too many objectives for exact hypervolume");
    }
    Front limited;
    limited.reserve(archive.size());
    for (const auto& e : archive.entries()) {
        ObjectiveVector q(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) q[i] = std::max(c[i], std::min(e.objectives[i], ref[i]));
        limited.push_back(std::move(q));
    }
    const double gain = box_volume(c, ref) - wfg(filter(std::move(limited), ref), ref);
    return std::max(0.0, gain);
}

}  // namespace cimbo
