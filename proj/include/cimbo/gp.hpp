#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace cimbo {

// ARD squared-exponential kernel hyperparameters, stored as logs.
struct KernelHyperparams {
    double log_signal_variance = 0.0;
    Eigen::VectorXd log_length_scales;
    double log_noise_variance = 0.0;

    // sigma_f^2 = 1, every length scale 0.5*sqrt(D), noise 1e-2.
    static KernelHyperparams initial(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(log_length_scales.size()); }
    double signal_variance() const;
    double noise_variance() const;
    double length_scale(std::size_t d) const;

    // Layout: [log sigma_f^2, log l_1 .. log l_D, log lambda^2].
    Eigen::VectorXd pack() const;
    static KernelHyperparams unpack(const Eigen::VectorXd& theta);
};

double kernel(std::span<const double> a, std::span<const double> b, const KernelHyperparams& h);

// Dense K (no noise) between the rows of A and the rows of B.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelHyperparams& h);

struct FitOptions {
    std::size_t epochs = 250;
    double step_size = 0.05;
};

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

struct MllResult {
    double value = 0.0;
    Eigen::VectorXd gradient;  // d MLL / d pack(), empty unless requested
    double jitter = 0.0;
};

// Log marginal likelihood of targets y under the zero-mean GP with
// covariance K + lambda^2 I, and its analytic gradient in log-space:
// 1/2 tr((alpha alpha^T - (K + lambda^2 I)^-1) dK/dtheta_j).
MllResult log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const KernelHyperparams& h,
                                  bool with_gradient);

// Exact GP regression on one objective. Targets are standardized internally;
// predict() answers in the standardized scale, predict_raw() in objective units.
class GpModel {
public:
    // Adam ascent on the log marginal likelihood from KernelHyperparams::initial;
    // keeps the best hyperparameters seen. Requires n >= 2.
    static GpModel fit(Eigen::MatrixXd x, Eigen::VectorXd y, const FitOptions& options = {});

    // Factorize with the given hyperparameters, no training. Requires n >= 1.
    static GpModel condition(Eigen::MatrixXd x, Eigen::VectorXd y, KernelHyperparams h);

    // Append one observation and retrain from scratch.
    GpModel update(std::span<const double> x_new, double y_new, const FitOptions& options = {}) const;

    // Append one observation keeping the current hyperparameters.
    GpModel extend(std::span<const double> x_new, double y_new) const;

    Prediction predict(std::span<const double> x) const;
    Prediction predict_raw(std::span<const double> x) const;

    // Standardized-scale predictions for every row of `queries`.
    void predict_batch(const Eigen::MatrixXd& queries, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const;

    double to_raw(double standardized) const { return standardized * target_std_ + target_mean_; }

    const KernelHyperparams& hyperparams() const noexcept { return hyper_; }
    const Eigen::MatrixXd& train_inputs() const noexcept { return x_; }
    const Eigen::VectorXd& train_targets() const noexcept { return y_raw_; }
    const Eigen::VectorXd& standardized_targets() const noexcept { return y_; }
    double target_mean() const noexcept { return target_mean_; }
    double target_std() const noexcept { return target_std_; }
    double jitter() const noexcept { return jitter_; }
    double log_marginal_likelihood() const noexcept { return mll_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(x_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.cols()); }
    Eigen::MatrixXd factor() const { return llt_.matrixL(); }

private:
    GpModel() = default;
    void standardize();
    void factorize();

    KernelHyperparams hyper_;
    Eigen::MatrixXd x_;
    Eigen::VectorXd y_raw_;
    Eigen::VectorXd y_;
    double target_mean_ = 0.0;
    double target_std_ = 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
    double mll_ = 0.0;
};

}  // namespace cimbo
