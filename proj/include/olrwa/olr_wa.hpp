#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>

#include "olrwa/linalg.hpp"

namespace olrwa {

using linalg::AugmentedHyperplane;
using linalg::LinearModel;
using linalg::Point;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class WeightMode { Equal, Dynamic, TimeBased, ConfidenceBased, Custom };

std::string_view to_string(WeightMode mode) noexcept;
std::optional<WeightMode> parse_weight_mode(std::string_view s) noexcept;

/// Relative importance of the base model versus each incremental model.
/// Only the ratio matters.
struct WeightScheme {
    WeightMode mode = WeightMode::Equal;
    double w_base = 0.5;
    double w_inc = 0.5;

    static WeightScheme equal() { return {WeightMode::Equal, 0.5, 0.5}; }
    /// w_base tracks points_seen / K * w_inc before each update.
    static WeightScheme dynamic(double w_inc = 0.01) { return {WeightMode::Dynamic, w_inc, w_inc}; }
    static WeightScheme time_based(double w_base = 0.1, double w_inc = 2.0) {
        return {WeightMode::TimeBased, w_base, w_inc};
    }
    static WeightScheme confidence_based(double w_base = 2.0, double w_inc = 0.1) {
        return {WeightMode::ConfidenceBased, w_base, w_inc};
    }
    static WeightScheme custom(double w_base, double w_inc) { return {WeightMode::Custom, w_base, w_inc}; }

    void validate() const;

    /// Weights in force for an update that merges a batch of `batch_rows`
    /// into a base built from `points_seen` points.
    std::pair<double, double> weights_for(std::uint64_t points_seen, std::size_t batch_rows) const;
};

struct OlrWaConfig {
    WeightScheme weights = WeightScheme::equal();
    /// Base model size as a fraction of the training stream, unless
    /// base_count overrides it.
    double base_fraction = 0.1;
    std::optional<std::size_t> base_count;
    std::size_t user_batch = 1;       // U
    std::size_t batch_multiplier = 5; // Z+
    std::size_t sample_size_factor = 1;
    std::uint64_t rng_seed = 0;

    void validate() const;
    std::size_t resolve_base_count(std::size_t n_train) const;
    std::size_t batch_size(std::size_t dims) const;
};

/// K = max(U, M * Z).
std::size_t effective_batch_size(std::size_t user_batch, std::size_t dims, std::size_t multiplier);

struct MiniBatch {
    MatrixXd X;
    VectorXd y;

    Eigen::Index rows() const noexcept { return X.rows(); }
    Eigen::Index dims() const noexcept { return X.cols(); }
    void validate() const;
};

struct OlrWaState {
    AugmentedHyperplane base_plane;
    VectorXd feature_lo;
    VectorXd feature_hi;
    std::uint64_t points_seen = 0;
    Eigen::Index dims = 0;
    std::mt19937_64 rng;

    std::uint64_t updates = 0;
    std::uint64_t coincide_skips = 0;
    std::uint64_t parallel_merges = 0;
    std::uint64_t degenerate_updates = 0;

    LinearModel model() const { return linalg::hyperplane_to_model(base_plane); }
};

bool operator==(const OlrWaState& a, const OlrWaState& b);

OlrWaState init_base(const MatrixXd& X, const VectorXd& y, const OlrWaConfig& cfg);

bool coincide(const AugmentedHyperplane& h1, const AugmentedHyperplane& h2);

/// Weighted average of the two planes' foot points (closest points to the
/// origin). Requires parallel, non-coincident planes.
Point weighted_mid_point(const AugmentedHyperplane& h_base, const AugmentedHyperplane& h_inc, double w_base,
                         double w_inc);

/// Appends sample_size_factor * K synthetic rows drawn uniformly from the
/// running feature bounds and labelled exactly by the base model.
MiniBatch sample_and_combine(OlrWaState& state, const MiniBatch& batch, std::size_t sample_size_factor = 1);

/// The two merged normals: V1 = a v_base + b v_inc, V2 = -a v_base + b v_inc
/// with (a, b) the normalized weights. Either may be degenerate.
struct CandidateNormals {
    std::optional<VectorXd> first;
    std::optional<VectorXd> second;
};
CandidateNormals candidate_normals(const VectorXd& v_base, const VectorXd& v_inc, double w_base, double w_inc);

enum class UpdateOutcome { Merged, Coincident, Degenerate };

struct UpdateReport {
    UpdateOutcome outcome = UpdateOutcome::Merged;
    bool parallel = false;
    int selected = 0; // 1 or 2 when merged
    double err_first = 0.0;
    double err_second = 0.0;
    std::optional<AugmentedHyperplane> first;
    std::optional<AugmentedHyperplane> second;
};

/// One merge step over an incremental mini-batch.
UpdateReport update(OlrWaState& state, const MiniBatch& batch, const OlrWaConfig& cfg);

VectorXd predict(const OlrWaState& state, const MatrixXd& X);

/// key=value lines; round-trips every finite value exactly.
std::string serialize(const OlrWaState& state);
OlrWaState deserialize(std::string_view text);

} // namespace olrwa
