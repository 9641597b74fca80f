#include "olrwa/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>
#include <tuple>

#include "olrwa/ingestion.hpp"

namespace olrwa::evaluation {

namespace {

MatrixXd take_rows(const MatrixXd& X, const std::vector<std::size_t>& idx) {
    MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

VectorXd take_rows(const VectorXd& y, const std::vector<std::size_t>& idx) {
    VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(idx[i]));
    return out;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first exception
// is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    workers.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace

double r_squared(const VectorXd& y_true, const VectorXd& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw Error(ErrorCode::DimensionMismatch, "r_squared: length mismatch");
    }
    if (y_true.size() < 2) throw Error(ErrorCode::InvalidArgument, "r_squared: need at least two points");
    const double mean = y_true.mean();
    const double ss_tot = (y_true.array() - mean).square().sum();
    if (ss_tot == 0.0) throw Error(ErrorCode::ZeroVariance, "r_squared: y_true has zero variance");
    const double ss_res = (y_true - y_pred).squaredNorm();
    return 1.0 - ss_res / ss_tot;
}

double mean_squared_error(const VectorXd& y_true, const VectorXd& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw Error(ErrorCode::DimensionMismatch, "mean_squared_error: length mismatch");
    }
    if (y_true.size() < 1) throw Error(ErrorCode::InvalidArgument, "mean_squared_error: empty input");
    return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size());
}

std::vector<Fold> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "kfold_split: k must be at least 2");
    if (n < k) throw Error(ErrorCode::InvalidArgument, "kfold_split: fewer rows than folds");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<Fold> folds(k);
    std::vector<std::size_t> owner(n);
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        for (std::size_t i = start; i < start + size; ++i) owner[order[i]] = f;
        start += size;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t f = 0; f < k; ++f) {
            (owner[i] == f ? folds[f].test : folds[f].train).push_back(i);
        }
    }
    return folds;
}

std::string_view to_string(EvalSide side) noexcept {
    switch (side) {
    case EvalSide::All: return "all";
    case EvalSide::NewTrend: return "new_trend";
    case EvalSide::OldTrend: return "old_trend";
    }
    return "all";
}

std::optional<EvalSide> parse_eval_side(std::string_view s) noexcept {
    if (s == "all") return EvalSide::All;
    if (s == "new_trend") return EvalSide::NewTrend;
    if (s == "old_trend") return EvalSide::OldTrend;
    return std::nullopt;
}

void Protocol::validate() const {
    if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "protocol.seeds must not be empty");
    if (folds < 2) throw Error(ErrorCode::InvalidConfig, "protocol.folds must be at least 2");
}

std::vector<Fold> protocol_folds(const Dataset& data, const Protocol& protocol, std::uint64_t seed) {
    const std::size_t n = data.rows();
    if (protocol.eval_side == EvalSide::All) return kfold_split(n, protocol.folds, seed);
    if (!data.drift_index) {
        throw Error(ErrorCode::InvalidConfig, "eval_side " + std::string(to_string(protocol.eval_side)) +
                                                  " needs a dataset with a drift point");
    }
    const std::size_t drift = *data.drift_index;
    const bool newer = protocol.eval_side == EvalSide::NewTrend;
    const std::size_t seg_begin = newer ? drift : 0;
    const std::size_t seg_end = newer ? n : drift;

    std::vector<Fold> local = kfold_split(seg_end - seg_begin, protocol.folds, seed);
    std::vector<Fold> folds(local.size());
    for (std::size_t f = 0; f < local.size(); ++f) {
        std::vector<bool> held(n, false);
        for (std::size_t i : local[f].test) {
            folds[f].test.push_back(seg_begin + i);
            held[seg_begin + i] = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!held[i]) folds[f].train.push_back(i);
        }
    }
    return folds;
}

FoldData prepare_fold(const Dataset& data, const Fold& fold, bool standardize) {
    FoldData out;
    out.X_train = take_rows(data.X, fold.train);
    out.y_train = take_rows(data.y, fold.train);
    out.X_test = take_rows(data.X, fold.test);
    out.y_test = take_rows(data.y, fold.test);
    if (standardize && out.X_train.rows() > 0) {
        const auto params = ingestion::fit_standardization(out.X_train);
        out.X_train = ingestion::apply_standardization(params, out.X_train);
        out.X_test = ingestion::apply_standardization(params, out.X_test);
    }
    return out;
}

std::vector<ModelSummary> aggregate(std::vector<RunResult> runs, const std::vector<std::string>& model_order) {
    std::stable_sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) {
        return std::tie(a.seed, a.fold) < std::tie(b.seed, b.fold);
    });
    std::vector<ModelSummary> out;
    for (const std::string& name : model_order) {
        ModelSummary s;
        s.model = name;
        double sum = 0.0;
        double sum_mse = 0.0;
        for (const RunResult& r : runs) {
            if (r.model != name) continue;
            ++s.runs;
            sum += r.r2;
            sum_mse += r.mse;
        }
        if (s.runs > 0) {
            s.mean_r2 = sum / static_cast<double>(s.runs);
            s.mean_mse = sum_mse / static_cast<double>(s.runs);
            double sq = 0.0;
            for (const RunResult& r : runs) {
                if (r.model == name) sq += (r.r2 - s.mean_r2) * (r.r2 - s.mean_r2);
            }
            s.std_r2 = s.runs > 1 ? std::sqrt(sq / static_cast<double>(s.runs - 1)) : 0.0;
        }
        out.push_back(s);
    }
    return out;
}

RunResult run_single(const ModelSpec& spec, const FoldData& fold, std::uint64_t seed, std::size_t fold_index) {
    const auto start = std::chrono::steady_clock::now();
    auto model = make_regressor(spec, fold.X_train.cols(), static_cast<std::size_t>(fold.X_train.rows()),
                                seed * 1000003ULL + fold_index);
    model->observe_batch(fold.X_train, fold.y_train);
    model->finish();
    const VectorXd pred = model->predict(fold.X_test);
    RunResult r;
    r.model = spec.name;
    r.seed = seed;
    r.fold = fold_index;
    r.r2 = r_squared(fold.y_test, pred);
    r.mse = mean_squared_error(fold.y_test, pred);
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

BenchmarkReport run_benchmark(const std::vector<ModelSpec>& models, const Dataset& data, const Protocol& protocol) {
    protocol.validate();
    if (models.empty()) throw Error(ErrorCode::InvalidConfig, "no models to run");

    struct Task {
        std::size_t model;
        std::uint64_t seed;
        std::size_t fold;
        const FoldData* data;
    };
    std::vector<FoldData> fold_data;
    std::vector<std::pair<std::uint64_t, std::size_t>> keys;
    for (std::uint64_t seed : protocol.seeds) {
        const auto folds = protocol_folds(data, protocol, seed);
        for (std::size_t f = 0; f < folds.size(); ++f) {
            fold_data.push_back(prepare_fold(data, folds[f], protocol.standardize));
            keys.emplace_back(seed, f);
        }
    }
    std::vector<Task> tasks;
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (std::size_t i = 0; i < fold_data.size(); ++i) {
            tasks.push_back({m, keys[i].first, keys[i].second, &fold_data[i]});
        }
    }

    BenchmarkReport report;
    report.runs.resize(tasks.size());
    parallel_for(tasks.size(), protocol.threads, [&](std::size_t i) {
        const Task& t = tasks[i];
        report.runs[i] = run_single(models[t.model], *t.data, t.seed, t.fold);
    });

    std::vector<std::string> names;
    for (const ModelSpec& m : models) {
        names.push_back(m.name);
        report.hyperparameters.push_back(describe(m));
    }
    report.summary = aggregate(report.runs, names);
    return report;
}

std::vector<EvalRecord> learning_curve(OnlineRegressor& model, const MatrixXd& X_train, const VectorXd& y_train,
                                       const MatrixXd& X_test, const VectorXd& y_test, std::size_t checkpoint_step) {
    if (checkpoint_step < 1) throw Error(ErrorCode::InvalidArgument, "learning_curve: checkpoint_step must be >= 1");
    const auto n = static_cast<std::size_t>(X_train.rows());
    std::vector<EvalRecord> records;
    for (std::size_t begin = 0; begin < n; begin += checkpoint_step) {
        const std::size_t end = std::min(n, begin + checkpoint_step);
        const auto b = static_cast<Eigen::Index>(begin);
        const auto len = static_cast<Eigen::Index>(end - begin);
        model.observe_batch(X_train.middleRows(b, len), y_train.segment(b, len));
        if (end == n) model.finish();
        const VectorXd pred = model.predict(X_test);
        records.push_back({end, r_squared(y_test, pred), mean_squared_error(y_test, pred)});
    }
    return records;
}

std::vector<std::vector<EvalRecord>> curve_benchmark(const std::vector<ModelSpec>& models, const Dataset& data,
                                                     const Protocol& protocol, std::size_t checkpoint_step,
                                                     std::size_t limit) {
    protocol.validate();
    if (models.empty()) throw Error(ErrorCode::InvalidConfig, "no models to run");

    std::vector<FoldData> fold_data;
    std::vector<std::pair<std::uint64_t, std::size_t>> keys;
    std::size_t shortest = data.rows();
    for (std::uint64_t seed : protocol.seeds) {
        const auto folds = protocol_folds(data, protocol, seed);
        for (std::size_t f = 0; f < folds.size(); ++f) {
            fold_data.push_back(prepare_fold(data, folds[f], protocol.standardize));
            keys.emplace_back(seed, f);
            shortest = std::min(shortest, folds[f].train.size());
        }
    }
    const std::size_t points = limit == 0 ? shortest : std::min(limit, shortest);

    const std::size_t runs = fold_data.size();
    std::vector<std::vector<EvalRecord>> per_run(models.size() * runs);
    parallel_for(per_run.size(), protocol.threads, [&](std::size_t i) {
        const std::size_t m = i / runs;
        const std::size_t r = i % runs;
        const FoldData& fd = fold_data[r];
        auto model = make_regressor(models[m], fd.X_train.cols(), points, keys[r].first * 1000003ULL + keys[r].second);
        const auto len = static_cast<Eigen::Index>(points);
        per_run[i] = learning_curve(*model, fd.X_train.topRows(len), fd.y_train.head(len), fd.X_test, fd.y_test,
                                    checkpoint_step);
    });

    std::vector<std::vector<EvalRecord>> out(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
        const auto& first = per_run[m * runs];
        out[m].resize(first.size());
        for (std::size_t c = 0; c < first.size(); ++c) {
            double r2 = 0.0;
            double mse = 0.0;
            for (std::size_t r = 0; r < runs; ++r) {
                r2 += per_run[m * runs + r][c].r2;
                mse += per_run[m * runs + r][c].mse;
            }
            out[m][c] = {first[c].points_seen, r2 / static_cast<double>(runs), mse / static_cast<double>(runs)};
        }
    }
    return out;
}

} // namespace olrwa::evaluation
