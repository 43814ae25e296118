#include "cimbo/acquisition.hpp"

#include <cmath>

#include "cimbo/error.hpp"

namespace cimbo {

std::vector<AcquisitionVector> score_batch(std::span<const GpModel> models, const Eigen::MatrixXd& candidates,
                                           double beta) {
    if (models.empty()) throw ValidationError("score_batch: no models");
    if (candidates.rows() == 0) throw ValidationError("score_batch: no candidates");
    if (!(beta >= 0.0)) throw ValidationError("score_batch: beta must be >= 0");

    std::vector<AcquisitionVector> out(static_cast<std::size_t>(candidates.rows()));
    for (auto& a : out) {
        a.scores.resize(models.size());
        a.beta = beta;
    }
    Eigen::VectorXd mean, var;
    for (std::size_t m = 0; m < models.size(); ++m) {
        models[m].predict_batch(candidates, mean, var);
        for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
            out[static_cast<std::size_t>(i)].scores[m] = lcb(mean(i), std::sqrt(var(i)), beta);
        }
    }
    return out;
}

std::vector<AcquisitionVector> score_batch(std::span<const GpModel> models,
                                           const std::vector<std::vector<double>>& candidates, double beta) {
    if (candidates.empty()) throw ValidationError("score_batch: no candidates");
    Eigen::MatrixXd q(static_cast<Eigen::Index>(candidates.size()), static_cast<Eigen::Index>(candidates[0].size()));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].size() != candidates[0].size()) throw ValidationError("score_batch: ragged candidates");
        for (std::size_t d = 0; d < candidates[i].size(); ++d) {
            q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = candidates[i][d];
        }
    }
    return score_batch(models, q, beta);
}

}  // namespace cimbo
