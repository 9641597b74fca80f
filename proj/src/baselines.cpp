#include "olrwa/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "olrwa/error.hpp"

namespace olrwa::baselines {

namespace {

double sign(double v) noexcept {
    return static_cast<double>((v > 0.0) - (v < 0.0));
}

void check_dims(const OnlineState& s, Eigen::Index cols) {
    if (cols != s.dims()) {
        throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(cols) + " features, learner expects " +
                                                      std::to_string(s.dims()));
    }
}

// Gradient step on (y - y_hat)^2 plus an optional penalty gradient on the
// non-bias weights.
template <typename Penalty>
OnlineState penalized_step(OnlineState s, const VectorXd& x, double y, double eta, Penalty penalty) {
    check_dims(s, x.size());
    const VectorXd xt = s.augment(x);
    const double residual = y - s.theta.dot(xt);
    VectorXd grad = -2.0 * residual * xt;
    const Eigen::Index m = x.size();
    for (Eigen::Index j = 0; j < m; ++j) {
        grad(j) += penalty(s.theta(j));
    }
    s.theta -= eta * grad;
    ++s.steps;
    return s;
}

} // namespace

std::string_view to_string(PaVariant v) noexcept {
    switch (v) {
    case PaVariant::I: return "I";
    case PaVariant::II: return "II";
    case PaVariant::III: return "III";
    }
    return "III";
}

std::optional<PaVariant> parse_pa_variant(std::string_view s) noexcept {
    if (s == "I") return PaVariant::I;
    if (s == "II") return PaVariant::II;
    if (s == "III") return PaVariant::III;
    return std::nullopt;
}

void RegressorConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
    if (epoch_multiplier == 0) throw Error(ErrorCode::InvalidConfig, "epoch_multiplier must be at least 1");
    if (!(reg_lambda >= 0.0)) throw Error(ErrorCode::InvalidConfig, "reg_lambda must be non-negative");
    if (batch_size == 0 && batch_multiplier == 0) {
        throw Error(ErrorCode::InvalidConfig, "batch_multiplier must be at least 1");
    }
    if (!(rls_forgetting > 0.0 && rls_forgetting <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "rls_forgetting must lie in (0, 1]");
    }
    if (!(rls_delta > 0.0)) throw Error(ErrorCode::InvalidConfig, "rls_delta must be positive");
    if (!(aggressiveness > 0.0)) throw Error(ErrorCode::InvalidConfig, "aggressiveness must be positive");
    if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be non-negative");
}

std::size_t RegressorConfig::resolved_batch_size(std::size_t dims) const {
    return batch_size > 0 ? batch_size : std::max<std::size_t>(1, dims * batch_multiplier);
}

OnlineState OnlineState::zeros(Eigen::Index dims, bool bias) {
    if (dims < 1) throw Error(ErrorCode::InvalidArgument, "learner needs at least one feature");
    OnlineState s;
    s.bias = bias;
    s.theta = VectorXd::Zero(bias ? dims + 1 : dims);
    return s;
}

OnlineState OnlineState::rls(Eigen::Index dims, double delta, bool bias) {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "RLS delta must be positive");
    OnlineState s = zeros(dims, bias);
    s.P = delta * MatrixXd::Identity(s.theta.size(), s.theta.size());
    return s;
}

VectorXd OnlineState::augment(const VectorXd& x) const {
    if (!bias) return x;
    VectorXd xt(x.size() + 1);
    xt.head(x.size()) = x;
    xt(x.size()) = 1.0;
    return xt;
}

double OnlineState::predict(const VectorXd& x) const {
    return theta.dot(augment(x));
}

VectorXd OnlineState::predict(const MatrixXd& X) const {
    check_dims(*this, X.cols());
    const Eigen::Index m = X.cols();
    VectorXd out = X * theta.head(m);
    if (bias) out.array() += theta(m);
    return out;
}

OnlineState sgd_update(OnlineState s, const VectorXd& x, double y, double eta) {
    return penalized_step(std::move(s), x, y, eta, [](double) { return 0.0; });
}

OnlineState lasso_update(OnlineState s, const VectorXd& x, double y, double eta, double lambda) {
    return penalized_step(std::move(s), x, y, eta, [lambda](double w) { return lambda * sign(w); });
}

OnlineState ridge_update(OnlineState s, const VectorXd& x, double y, double eta, double lambda) {
    return penalized_step(std::move(s), x, y, eta, [lambda](double w) { return 2.0 * lambda * w; });
}

OnlineState mbgd_update(OnlineState s, const MatrixXd& X, const VectorXd& y, double eta) {
    if (X.rows() < 1) throw Error(ErrorCode::InvalidArgument, "mbgd_update: empty batch");
    if (X.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "mbgd_update: X rows and y length differ");
    check_dims(s, X.cols());
    const VectorXd residual = y - s.predict(X);
    const double k = static_cast<double>(X.rows());
    VectorXd grad(s.theta.size());
    const Eigen::Index m = X.cols();
    grad.head(m) = -2.0 / k * (X.transpose() * residual);
    if (s.bias) grad(m) = -2.0 / k * residual.sum();
    s.theta -= eta * grad;
    ++s.steps;
    return s;
}

OnlineState lms_update(OnlineState s, const VectorXd& x, double y, double eta) {
    check_dims(s, x.size());
    const VectorXd xt = s.augment(x);
    const double y_hat = s.theta.dot(xt);
    s.theta -= 2.0 * eta * (y_hat - y) * xt;
    ++s.steps;
    return s;
}

OnlineState rls_update(OnlineState s, const VectorXd& x, double y, double forgetting) {
    check_dims(s, x.size());
    if (s.P.rows() != s.theta.size()) {
        throw Error(ErrorCode::InvalidArgument, "rls_update: state has no inverse-correlation matrix");
    }
    const VectorXd xt = s.augment(x);
    const VectorXd px = s.P * xt;
    const double denom = forgetting + xt.dot(px);
    if (denom < 1e-12) ++s.ill_conditioned_steps;
    MatrixXd next = (s.P - (px * px.transpose()) / denom) / forgetting;
    s.P = 0.5 * (next + next.transpose());
    const double innovation = y - xt.dot(s.theta);
    s.theta += s.P * xt * innovation;
    ++s.steps;
    return s;
}

double epsilon_insensitive_loss(double y_hat, double y, double epsilon) noexcept {
    return std::max(0.0, std::abs(y_hat - y) - epsilon);
}

OnlineState pa_update(OnlineState s, const VectorXd& x, double y, double aggressiveness, double epsilon,
                      PaVariant variant, bool norm_includes_bias) {
    check_dims(s, x.size());
    const VectorXd xt = s.augment(x);
    const double y_hat = s.theta.dot(xt);
    const double loss = epsilon_insensitive_loss(y_hat, y, epsilon);
    ++s.steps;
    if (loss == 0.0) return s;

    const double sq_norm = (s.bias && !norm_includes_bias) ? x.squaredNorm() : xt.squaredNorm();
    if (sq_norm == 0.0 && variant != PaVariant::III) return s;
    double tau = 0.0;
    switch (variant) {
    case PaVariant::I: tau = loss / sq_norm; break;
    case PaVariant::II: tau = std::min(aggressiveness, loss / sq_norm); break;
    case PaVariant::III: tau = loss / (sq_norm + 1.0 / (2.0 * aggressiveness)); break;
    }
    s.theta += sign(y - y_hat) * tau * xt;
    return s;
}

} // namespace olrwa::baselines
