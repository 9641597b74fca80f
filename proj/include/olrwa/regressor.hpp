#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olrwa/baselines.hpp"
#include "olrwa/olr_wa.hpp"

namespace olrwa {

/// Common streaming interface over OLR-WA, the baselines and the batch
/// reference. Every learner starts from the all-zeros model.
class OnlineRegressor {
public:
    virtual ~OnlineRegressor() = default;

    virtual Eigen::Index dims() const = 0;
    /// Feeds rows in stream order. Chunking never changes the result.
    virtual void observe_batch(const MatrixXd& X, const VectorXd& y) = 0;
    /// End of the training stream: flushes partial batches and runs any
    /// configured replay epochs.
    virtual void finish() {}
    virtual VectorXd predict(const MatrixXd& X) const = 0;
    virtual std::string snapshot() const = 0;
};

enum class ModelKind { Batch, Sgd, Mbgd, Lms, Orr, Olr, Rls, Pa, OlrWa };

std::string_view to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept;

struct ModelSpec {
    std::string name;
    ModelKind kind = ModelKind::OlrWa;
    baselines::RegressorConfig regressor;
    OlrWaConfig olr_wa;
};

/// One-line hyperparameter echo, e.g. "sgd eta=0.01 E=N*2".
std::string describe(const ModelSpec& spec);

/// Builds a fresh learner. n_train resolves size-relative settings (the
/// OLR-WA base size); seed is mixed into any learner randomness.
std::unique_ptr<OnlineRegressor> make_regressor(const ModelSpec& spec, Eigen::Index dims, std::size_t n_train,
                                                std::uint64_t seed);

/// Pseudo-inverse fit over everything seen so far.
class BatchRegressor final : public OnlineRegressor {
public:
    explicit BatchRegressor(Eigen::Index dims);

    Eigen::Index dims() const override { return dims_; }
    void observe_batch(const MatrixXd& X, const VectorXd& y) override;
    VectorXd predict(const MatrixXd& X) const override;
    std::string snapshot() const override;

    std::size_t rows() const noexcept { return rows_.size(); }

private:
    const LinearModel& fitted() const;

    Eigen::Index dims_;
    std::vector<VectorXd> rows_;
    std::vector<double> targets_;
    mutable std::optional<LinearModel> cache_;
};

/// SGD, online lasso and online ridge. Each arriving point is learned once;
/// finish() cycles through the buffered stream for the remaining
/// (epoch_multiplier - 1) * N updates.
class GradientRegressor final : public OnlineRegressor {
public:
    GradientRegressor(ModelKind kind, baselines::RegressorConfig cfg, Eigen::Index dims);

    Eigen::Index dims() const override { return state_.dims(); }
    void observe_batch(const MatrixXd& X, const VectorXd& y) override;
    void finish() override;
    VectorXd predict(const MatrixXd& X) const override { return state_.predict(X); }
    std::string snapshot() const override;

    const baselines::OnlineState& state() const noexcept { return state_; }

private:
    void step(const VectorXd& x, double y);

    ModelKind kind_;
    baselines::RegressorConfig cfg_;
    baselines::OnlineState state_;
    std::vector<VectorXd> xs_;
    std::vector<double> ys_;
    bool finished_ = false;
};

/// Mini-batch gradient descent with K = resolved batch size.
class MbgdRegressor final : public OnlineRegressor {
public:
    MbgdRegressor(baselines::RegressorConfig cfg, Eigen::Index dims);

    Eigen::Index dims() const override { return state_.dims(); }
    void observe_batch(const MatrixXd& X, const VectorXd& y) override;
    void finish() override;
    VectorXd predict(const MatrixXd& X) const override { return state_.predict(X); }
    std::string snapshot() const override;

private:
    void step(std::size_t begin, std::size_t end);

    baselines::RegressorConfig cfg_;
    std::size_t batch_;
    baselines::OnlineState state_;
    std::vector<VectorXd> xs_;
    std::vector<double> ys_;
    std::size_t consumed_ = 0;
    bool finished_ = false;
};

/// LMS, RLS and passive-aggressive: strictly one update per point unless
/// replay is enabled.
class PointwiseRegressor final : public OnlineRegressor {
public:
    PointwiseRegressor(ModelKind kind, baselines::RegressorConfig cfg, Eigen::Index dims);

    Eigen::Index dims() const override { return state_.dims(); }
    void observe_batch(const MatrixXd& X, const VectorXd& y) override;
    void finish() override;
    VectorXd predict(const MatrixXd& X) const override { return state_.predict(X); }
    std::string snapshot() const override;

    const baselines::OnlineState& state() const noexcept { return state_; }

private:
    void step(const VectorXd& x, double y);

    ModelKind kind_;
    baselines::RegressorConfig cfg_;
    baselines::OnlineState state_;
    std::vector<VectorXd> xs_;
    std::vector<double> ys_;
    bool finished_ = false;
};

/// OLR-WA over a point stream: the first base_count rows build the base
/// model, then every K rows form one incremental mini-batch.
class OlrWaRegressor final : public OnlineRegressor {
public:
    OlrWaRegressor(OlrWaConfig cfg, Eigen::Index dims, std::size_t base_count);

    Eigen::Index dims() const override { return dims_; }
    void observe_batch(const MatrixXd& X, const VectorXd& y) override;
    /// Initializes the base from whatever arrived if the stream was shorter
    /// than base_count; a trailing partial batch is merged when it has at
    /// least M + 1 rows and dropped otherwise.
    void finish() override;
    VectorXd predict(const MatrixXd& X) const override;
    std::string snapshot() const override;

    const std::optional<OlrWaState>& state() const noexcept { return state_; }
    std::size_t batch_size() const noexcept { return batch_; }
    std::size_t base_count() const noexcept { return base_count_; }

private:
    void drain(bool final);

    OlrWaConfig cfg_;
    Eigen::Index dims_;
    std::size_t base_count_;
    std::size_t batch_;
    std::optional<OlrWaState> state_;
    std::vector<VectorXd> pending_x_;
    std::vector<double> pending_y_;
};

} // namespace olrwa
