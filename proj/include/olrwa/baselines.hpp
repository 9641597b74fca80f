#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace olrwa::baselines {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class PaVariant { I, II, III };

std::string_view to_string(PaVariant v) noexcept;
std::optional<PaVariant> parse_pa_variant(std::string_view s) noexcept;

struct RegressorConfig {
    double learning_rate = 0.01;
    /// SGD/OLR/ORR: E = N * epoch_multiplier single-point updates.
    /// MBGD: epoch_multiplier passes over the mini-batches.
    std::size_t epoch_multiplier = 2;
    double reg_lambda = 0.1;
    /// MBGD batch size; 0 means M * batch_multiplier.
    std::size_t batch_size = 0;
    std::size_t batch_multiplier = 5;
    double rls_forgetting = 0.99;
    double rls_delta = 1e4;
    double aggressiveness = 0.1;
    double epsilon = 0.1;
    PaVariant pa_variant = PaVariant::III;
    bool pa_norm_includes_bias = true;
    /// LMS, RLS and PA are single-pass unless this is set, in which case
    /// they also make epoch_multiplier passes.
    bool replay = false;

    void validate() const;
    std::size_t resolved_batch_size(std::size_t dims) const;
};

/// Bias-augmented parameter vector (bias last when enabled) plus the RLS
/// inverse-correlation matrix.
struct OnlineState {
    VectorXd theta;
    MatrixXd P;
    bool bias = true;
    std::uint64_t steps = 0;
    std::uint64_t ill_conditioned_steps = 0;

    static OnlineState zeros(Eigen::Index dims, bool bias = true);
    static OnlineState rls(Eigen::Index dims, double delta, bool bias = true);

    Eigen::Index dims() const noexcept { return bias ? theta.size() - 1 : theta.size(); }
    VectorXd augment(const VectorXd& x) const;
    double predict(const VectorXd& x) const;
    VectorXd predict(const MatrixXd& X) const;
};

/// Single-point descent on (y - y_hat)^2.
OnlineState sgd_update(OnlineState s, const VectorXd& x, double y, double eta);
/// Descent on (y - y_hat)^2 + lambda * |w|_1, bias unpenalized, sign(0) = 0.
OnlineState lasso_update(OnlineState s, const VectorXd& x, double y, double eta, double lambda);
/// Descent on (y - y_hat)^2 + lambda * |w|^2, bias unpenalized.
OnlineState ridge_update(OnlineState s, const VectorXd& x, double y, double eta, double lambda);
/// Descent on the batch mean of (y - y_hat)^2.
OnlineState mbgd_update(OnlineState s, const MatrixXd& X, const VectorXd& y, double eta);
OnlineState lms_update(OnlineState s, const VectorXd& x, double y, double eta);
OnlineState rls_update(OnlineState s, const VectorXd& x, double y, double forgetting);
OnlineState pa_update(OnlineState s, const VectorXd& x, double y, double aggressiveness, double epsilon,
                      PaVariant variant, bool norm_includes_bias = true);

/// max(0, |y_hat - y| - epsilon)
double epsilon_insensitive_loss(double y_hat, double y, double epsilon) noexcept;

} // namespace olrwa::baselines
