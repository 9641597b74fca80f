#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olrwa/datagen.hpp"
#include "olrwa/regressor.hpp"

namespace olrwa::evaluation {

/// 1 - SS_res / SS_tot. Negative when worse than the mean predictor.
/// Throws ZeroVariance when y_true is constant.
double r_squared(const VectorXd& y_true, const VectorXd& y_pred);

double mean_squared_error(const VectorXd& y_true, const VectorXd& y_pred);

struct Fold {
    std::vector<std::size_t> train;  // ascending: stream order
    std::vector<std::size_t> test;   // ascending
};

/// Seeded shuffle, then k contiguous test blocks whose sizes differ by at
/// most one (the first n % k folds get the extra element).
std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

enum class EvalSide { All, NewTrend, OldTrend };

std::string_view to_string(EvalSide side) noexcept;
std::optional<EvalSide> parse_eval_side(std::string_view s) noexcept;

struct Protocol {
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::size_t folds = 5;
    EvalSide eval_side = EvalSide::All;
    /// z-score features using train-fold statistics.
    bool standardize = true;
    std::size_t threads = 1;

    void validate() const;
};

/// Folds for one seed. For drift data with a NewTrend/OldTrend side only the
/// rows of that segment are partitioned into test folds; every other row is
/// always training data.
std::vector<Fold> protocol_folds(const Dataset& data, const Protocol& protocol, std::uint64_t seed);

struct FoldData {
    MatrixXd X_train;
    VectorXd y_train;
    MatrixXd X_test;
    VectorXd y_test;
};

FoldData prepare_fold(const Dataset& data, const Fold& fold, bool standardize);

struct RunResult {
    std::string model;
    std::uint64_t seed = 0;
    std::size_t fold = 0;
    double r2 = 0.0;
    double mse = 0.0;
    double runtime_ms = 0.0;
};

struct ModelSummary {
    std::string model;
    std::size_t runs = 0;
    double mean_r2 = 0.0;
    double std_r2 = 0.0;  // sample standard deviation
    double mean_mse = 0.0;
};

struct BenchmarkReport {
    std::vector<RunResult> runs;  // ordered by model, seed, fold
    std::vector<ModelSummary> summary;
    std::vector<std::string> hyperparameters;  // one line per model
};

/// Reduces runs per model in (seed, fold) order, so the result does not
/// depend on the order runs were produced in.
std::vector<ModelSummary> aggregate(std::vector<RunResult> runs, const std::vector<std::string>& model_order);

/// Trains a fresh learner on the fold and scores it on the test rows.
RunResult run_single(const ModelSpec& spec, const FoldData& fold, std::uint64_t seed, std::size_t fold_index);

BenchmarkReport run_benchmark(const std::vector<ModelSpec>& models, const Dataset& data, const Protocol& protocol);

struct EvalRecord {
    std::size_t points_seen = 0;
    double r2 = 0.0;
    double mse = 0.0;
};

/// Streams the training rows in checkpoint_step chunks and scores after each
/// chunk. The last record (at the end of the stream) is taken after
/// finish(), so it matches what run_single reports.
std::vector<EvalRecord> learning_curve(OnlineRegressor& model, const MatrixXd& X_train, const VectorXd& y_train,
                                       const MatrixXd& X_test, const VectorXd& y_test, std::size_t checkpoint_step);

/// Protocol-level curves: every (seed, fold) run truncated to `limit`
/// training points (0 means the shortest training fold), averaged
/// checkpoint-wise. One series per model.
std::vector<std::vector<EvalRecord>> curve_benchmark(const std::vector<ModelSpec>& models, const Dataset& data,
                                                     const Protocol& protocol, std::size_t checkpoint_step,
                                                     std::size_t limit);

} // namespace olrwa::evaluation
