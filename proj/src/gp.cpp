#include "cimbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cimbo/error.hpp"

namespace cimbo {

namespace {

constexpr double kJitterSchedule[] = {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
constexpr double kStdFloor = 1e-12;

// Box on the log-parameters during training.
constexpr double kLogSignalMin = -6.907755278982137;  // 1e-3
constexpr double kLogSignalMax = 6.907755278982137;   // 1e3
constexpr double kLogLengthMin = -4.605170185988091;  // 1e-2
constexpr double kLogLengthMax = 4.605170185988091;   // 1e2
constexpr double kLogNoiseMin = -13.815510557964274;  // 1e-6
constexpr double kLogNoiseMax = 2.302585092994046;    // 10

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct Factorization {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
};

Factorization factorize_with_jitter(const Eigen::MatrixXd& k_noisy) {
    const auto n = k_noisy.rows();
    for (double jitter : kJitterSchedule) {
        Factorization f;
        f.jitter = jitter;
        if (jitter == 0.0) {
            f.llt.compute(k_noisy);
        } else {
            f.llt.compute(k_noisy + jitter * Eigen::MatrixXd::Identity(n, n));
        }
        if (f.llt.info() == Eigen::Success) return f;
    }
    throw NumericalError("covariance factorization failed after jitter escalation to 1e-2");
}

Eigen::MatrixXd scaled_sq_dist(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& inv_ell) {
    const Eigen::MatrixXd as = a * inv_ell.asDiagonal();
    const Eigen::MatrixXd bs = b * inv_ell.asDiagonal();
    Eigen::MatrixXd d2 = (-2.0 * as * bs.transpose()).eval();
    d2.colwise() += as.rowwise().squaredNorm();
    d2.rowwise() += bs.rowwise().squaredNorm().transpose();
    return d2.cwiseMax(0.0);
}

// Inverse of a lower-triangular matrix by 2x2 block recursion:
// [A 0; B C]^-1 = [A^-1 0; -C^-1 B A^-1  C^-1].
void lower_inverse(Eigen::Ref<Eigen::MatrixXd> out, const Eigen::Ref<const Eigen::MatrixXd>& l) {
    const auto n = l.rows();
    if (n <= 48) {
        out.setIdentity();
        l.triangularView<Eigen::Lower>().solveInPlace(out);
        return;
    }
    const auto h = n / 2;
    const auto r = n - h;
    lower_inverse(out.topLeftCorner(h, h), l.topLeftCorner(h, h));
    lower_inverse(out.bottomRightCorner(r, r), l.bottomRightCorner(r, r));
    out.topRightCorner(h, r).setZero();
    const Eigen::MatrixXd ba = l.bottomLeftCorner(r, h) * out.topLeftCorner(h, h).triangularView<Eigen::Lower>();
    out.bottomLeftCorner(r, h).noalias() = -(out.bottomRightCorner(r, r).triangularView<Eigen::Lower>() * ba);
}

void clamp_theta(Eigen::VectorXd& theta) {
    const auto last = theta.size() - 1;
    theta(0) = std::clamp(theta(0), kLogSignalMin, kLogSignalMax);
    for (Eigen::Index d = 1; d < last; ++d) theta(d) = std::clamp(theta(d), kLogLengthMin, kLogLengthMax);
    theta(last) = std::clamp(theta(last), kLogNoiseMin, kLogNoiseMax);
}

void check_shapes(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t min_rows) {
    if (static_cast<std::size_t>(x.rows()) < min_rows) {
        throw ValidationError("GP needs at least " + std::to_string(min_rows) + " training points");
    }
    if (x.rows() != y.size()) throw ValidationError("GP inputs and targets differ in length");
    if (!x.allFinite() || !y.allFinite()) throw ValidationError("GP training data must be finite");
}

}  // namespace

KernelHyperparams KernelHyperparams::initial(std::size_t dim) {
    KernelHyperparams h;
    h.log_signal_variance = 0.0;
    h.log_length_scales = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim),
                                                    std::log(0.5 * std::sqrt(static_cast<double>(dim))));
    h.log_noise_variance = std::log(1e-2);
    return h;
}

double KernelHyperparams::signal_variance() const { return std::exp(log_signal_variance); }
double KernelHyperparams::noise_variance() const { return std::exp(log_noise_variance); }
double KernelHyperparams::length_scale(std::size_t d) const {
    return std::exp(log_length_scales(static_cast<Eigen::Index>(d)));
}

Eigen::VectorXd KernelHyperparams::pack() const {
    Eigen::VectorXd theta(log_length_scales.size() + 2);
    theta(0) = log_signal_variance;
    theta.segment(1, log_length_scales.size()) = log_length_scales;
    theta(theta.size() - 1) = log_noise_variance;
    return theta;
}

KernelHyperparams KernelHyperparams::unpack(const Eigen::VectorXd& theta) {
    if (theta.size() < 2) throw ValidationError("packed hyperparameters need at least 2 entries");
    KernelHyperparams h;
    h.log_signal_variance = theta(0);
    h.log_length_scales = theta.segment(1, theta.size() - 2);
    h.log_noise_variance = theta(theta.size() - 1);
    return h;
}

double kernel(std::span<const double> a, std::span<const double> b, const KernelHyperparams& h) {
    if (a.size() != b.size() || a.size() != h.dim()) throw ValidationError("kernel: dimension mismatch");
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double z = (a[d] - b[d]) / h.length_scale(d);
        s += z * z;
    }
    return h.signal_variance() * std::exp(-0.5 * s);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelHyperparams& h) {
    if (a.cols() != b.cols() || static_cast<std::size_t>(a.cols()) != h.dim()) {
        throw ValidationError("kernel_matrix: dimension mismatch");
    }
    const Eigen::VectorXd inv_ell = (-h.log_length_scales).array().exp();
    return h.signal_variance() * (-0.5 * scaled_sq_dist(a, b, inv_ell)).array().exp().matrix();
}

MllResult log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const KernelHyperparams& h,
                                  bool with_gradient) {
    check_shapes(x, y, 1);
    const auto n = x.rows();
    const auto dim = x.cols();
    const Eigen::MatrixXd kf = kernel_matrix(x, x, h);
    const double noise = h.noise_variance();
    Eigen::MatrixXd k_noisy = kf;
    k_noisy.diagonal().array() += noise;

    const auto f = factorize_with_jitter(k_noisy);
    const Eigen::VectorXd alpha = f.llt.solve(y);
    const Eigen::MatrixXd l = f.llt.matrixL();

    MllResult r;
    r.jitter = f.jitter;
    r.value = -0.5 * y.dot(alpha) - l.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    if (!with_gradient) return r;

    // W = alpha alpha^T - K^-1, with K^-1 = L^-T L^-1 built as a symmetric rank update.
    Eigen::MatrixXd l_inv(n, n);
    lower_inverse(l_inv, l);
    Eigen::MatrixXd w = alpha * alpha.transpose();
    w.selfadjointView<Eigen::Lower>().rankUpdate(l_inv.transpose(), -1.0);
    w.triangularView<Eigen::StrictlyUpper>() = w.transpose();
    const Eigen::MatrixXd wk = w.cwiseProduct(kf);

    // sum_ij WK_ij (x_id - x_jd)^2 = 2 (sum_i s_i x_id^2 - x_d^T WK x_d), s = WK 1
    const Eigen::VectorXd s = wk.rowwise().sum();
    const Eigen::MatrixXd wkx = wk * x;
    r.gradient.resize(dim + 2);
    r.gradient(0) = 0.5 * s.sum();
    for (Eigen::Index d = 0; d < dim; ++d) {
        const double inv_ell2 = std::exp(-2.0 * h.log_length_scales(d));
        const double acc = 2.0 * (s.dot(x.col(d).cwiseAbs2()) - x.col(d).dot(wkx.col(d)));
        r.gradient(d + 1) = 0.5 * acc * inv_ell2;
    }
    r.gradient(dim + 1) = 0.5 * noise * w.trace();
    return r;
}

GpModel GpModel::fit(Eigen::MatrixXd x, Eigen::VectorXd y, const FitOptions& options) {
    check_shapes(x, y, 2);
    GpModel m;
    m.x_ = std::move(x);
    m.y_raw_ = std::move(y);
    m.standardize();

    Eigen::VectorXd theta = KernelHyperparams::initial(m.dim()).pack();
    clamp_theta(theta);
    Eigen::VectorXd best = theta;
    double best_value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());

    for (std::size_t epoch = 0; epoch <= options.epochs; ++epoch) {
        const bool last = epoch == options.epochs;
        const auto r = cimbo::log_marginal_likelihood(m.x_, m.y_, KernelHyperparams::unpack(theta), !last);
        if (std::isfinite(r.value) && r.value > best_value) {
            best_value = r.value;
            best = theta;
        }
        if (last) break;
        if (!r.gradient.allFinite()) break;
        const double t = static_cast<double>(epoch + 1);
        m1 = kAdamBeta1 * m1 + (1.0 - kAdamBeta1) * r.gradient;
        m2 = kAdamBeta2 * m2 + (1.0 - kAdamBeta2) * r.gradient.cwiseAbs2();
        const Eigen::VectorXd m1_hat = m1 / (1.0 - std::pow(kAdamBeta1, t));
        const Eigen::VectorXd m2_hat = m2 / (1.0 - std::pow(kAdamBeta2, t));
        theta.array() += options.step_size * m1_hat.array() / (m2_hat.array().sqrt() + kAdamEps);
        clamp_theta(theta);
    }

    m.hyper_ = KernelHyperparams::unpack(best);
    m.factorize();
    return m;
}

GpModel GpModel::condition(Eigen::MatrixXd x, Eigen::VectorXd y, KernelHyperparams h) {
    check_shapes(x, y, 1);
    if (h.dim() != static_cast<std::size_t>(x.cols())) throw ValidationError("hyperparameter/input dimension mismatch");
    GpModel m;
    m.x_ = std::move(x);
    m.y_raw_ = std::move(y);
    m.hyper_ = std::move(h);
    m.standardize();
    m.factorize();
    return m;
}

GpModel GpModel::update(std::span<const double> x_new, double y_new, const FitOptions& options) const {
    GpModel grown = extend(x_new, y_new);
    return fit(std::move(grown.x_), std::move(grown.y_raw_), options);
}

GpModel GpModel::extend(std::span<const double> x_new, double y_new) const {
    if (x_new.size() != dim()) throw ValidationError("update: input dimension mismatch");
    Eigen::MatrixXd x(x_.rows() + 1, x_.cols());
    x.topRows(x_.rows()) = x_;
    for (std::size_t d = 0; d < x_new.size(); ++d) x(x_.rows(), static_cast<Eigen::Index>(d)) = x_new[d];
    Eigen::VectorXd y(y_raw_.size() + 1);
    y.head(y_raw_.size()) = y_raw_;
    y(y_raw_.size()) = y_new;
    return condition(std::move(x), std::move(y), hyper_);
}

void GpModel::standardize() {
    target_mean_ = y_raw_.mean();
    const double var = (y_raw_.array() - target_mean_).square().mean();
    target_std_ = std::max(std::sqrt(var), kStdFloor);
    y_ = (y_raw_.array() - target_mean_) / target_std_;
}

void GpModel::factorize() {
    Eigen::MatrixXd k = kernel_matrix(x_, x_, hyper_);
    k.diagonal().array() += hyper_.noise_variance();
    auto f = factorize_with_jitter(k);
    llt_ = std::move(f.llt);
    jitter_ = f.jitter;
    alpha_ = llt_.solve(y_);
    const Eigen::MatrixXd l = llt_.matrixL();
    mll_ = -0.5 * y_.dot(alpha_) - l.diagonal().array().log().sum() -
           0.5 * static_cast<double>(x_.rows()) * std::log(2.0 * std::numbers::pi);
}

void GpModel::predict_batch(const Eigen::MatrixXd& queries, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const {
    if (queries.cols() != x_.cols()) throw ValidationError("predict: input dimension mismatch");
    const Eigen::MatrixXd k_cross = kernel_matrix(x_, queries, hyper_);  // n x q
    mean = k_cross.transpose() * alpha_;
    const Eigen::MatrixXd v = llt_.matrixL().solve(k_cross);
    variance = (hyper_.signal_variance() - v.colwise().squaredNorm().array()).cwiseMax(0.0).matrix().transpose();
}

Prediction GpModel::predict(std::span<const double> x) const {
    Eigen::MatrixXd q(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t d = 0; d < x.size(); ++d) q(0, static_cast<Eigen::Index>(d)) = x[d];
    Eigen::VectorXd mean, var;
    predict_batch(q, mean, var);
    return {mean(0), var(0)};
}

Prediction GpModel::predict_raw(std::span<const double> x) const {
    const auto p = predict(x);
    return {to_raw(p.mean), p.variance * target_std_ * target_std_};
}

}  // namespace cimbo
