#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cimbo/gp.hpp"
#include "cimbo/pareto.hpp"

namespace oracle {

// Volume of the union of boxes [min(y, ref), ref] by inclusion-exclusion over
// every non-empty subset. Only usable for small fronts (2^n terms).
inline double hypervolume_ie(const std::vector<cimbo::ObjectiveVector>& front, const std::vector<double>& ref) {
    const std::size_t n = front.size();
    const std::size_t m = ref.size();
    double total = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> corner(m, -INFINITY);
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1U)) continue;
            ++bits;
            for (std::size_t k = 0; k < m; ++k) corner[k] = std::max(corner[k], std::min(front[i][k], ref[k]));
        }
        double vol = 1.0;
        for (std::size_t k = 0; k < m; ++k) vol *= std::max(0.0, ref[k] - corner[k]);
        total += (bits % 2 ? 1.0 : -1.0) * vol;
    }
    return total;
}

// Random mutually non-dominated front in [0,1]^m. Points on a noisy simplex
// shell, filtered through the dominance check.
inline std::vector<cimbo::ObjectiveVector> random_front(std::size_t m, std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cimbo::ObjectiveVector> pts;
    while (pts.size() < n) {
        cimbo::ObjectiveVector y(m);
        double s = 0.0;
        for (auto& v : y) {
            v = u(rng) + 1e-3;
            s += v;
        }
        for (auto& v : y) v = std::min(1.0, v / s * (0.8 + 0.4 * u(rng)) * static_cast<double>(m) / 2.0);
        pts.push_back(std::move(y));
        pts = cimbo::nondominated(std::move(pts));
    }
    return pts;
}

// Posterior mean and variance (standardized scale) by explicit dense inverse.
struct DensePrediction {
    double mean;
    double variance;
};

inline DensePrediction dense_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std,
                                     const cimbo::KernelHyperparams& h, const Eigen::VectorXd& q) {
    const auto n = x.rows();
    Eigen::MatrixXd k(n, n);
    Eigen::VectorXd kq(n);
    auto kern = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        double s = 0.0;
        for (Eigen::Index d = 0; d < a.size(); ++d) {
            const double z = (a(d) - b(d)) / std::exp(h.log_length_scales(d));
            s += z * z;
        }
        return std::exp(h.log_signal_variance) * std::exp(-0.5 * s);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) k(i, j) = kern(x.row(i).transpose(), x.row(j).transpose());
        kq(i) = kern(x.row(i).transpose(), q);
    }
    k.diagonal().array() += std::exp(h.log_noise_variance);
    const Eigen::MatrixXd kinv = k.fullPivLu().inverse();
    const double mean = kq.dot(kinv * y_std);
    const double var = std::exp(h.log_signal_variance) - kq.dot(kinv * kq);
    return {mean, std::max(0.0, var)};
}

// Central finite differences of the log marginal likelihood in log-space.
inline Eigen::VectorXd mll_fd_gradient(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const cimbo::KernelHyperparams& h, double step) {
    const Eigen::VectorXd theta = h.pack();
    Eigen::VectorXd g(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp(j) += step;
        tm(j) -= step;
        const double fp = cimbo::log_marginal_likelihood(x, y, cimbo::KernelHyperparams::unpack(tp), false).value;
        const double fm = cimbo::log_marginal_likelihood(x, y, cimbo::KernelHyperparams::unpack(tm), false).value;
        g(j) = (fp - fm) / (2.0 * step);
    }
    return g;
}

// Non-dominated rank of every point by repeated peeling with an O(n^2) check.
inline std::vector<std::size_t> brute_force_ranks(const std::vector<std::vector<double>>& f) {
    std::vector<std::size_t> rank(f.size(), 0);
    std::vector<bool> removed(f.size(), false);
    std::size_t left = f.size();
    for (std::size_t r = 0; left > 0; ++r) {
        std::vector<std::size_t> layer;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (removed[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < f.size() && !dominated; ++j) {
                if (!removed[j] && j != i && cimbo::dominates(f[j], f[i])) dominated = true;
            }
            if (!dominated) layer.push_back(i);
        }
        for (auto i : layer) {
            rank[i] = r;
            removed[i] = true;
        }
        left -= layer.size();
    }
    return rank;
}

}  // namespace oracle
