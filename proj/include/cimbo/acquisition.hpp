#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cimbo/gp.hpp"

namespace cimbo {

inline constexpr double kDefaultBeta = 2.0;

// One lower-confidence-bound score per objective; lower is better everywhere.
struct AcquisitionVector {
    std::vector<double> scores;
    double beta = kDefaultBeta;
};

// mean - beta * std
inline double lcb(double mean, double std_dev, double beta) { return mean - beta * std_dev; }

// Scores every row of `candidates` against every model, in standardized units.
std::vector<AcquisitionVector> score_batch(std::span<const GpModel> models, const Eigen::MatrixXd& candidates,
                                           double beta);

std::vector<AcquisitionVector> score_batch(std::span<const GpModel> models,
                                           const std::vector<std::vector<double>>& candidates, double beta);

}  // namespace cimbo
