#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "olrwa/commands.hpp"
#include "olrwa/evaluation.hpp"
#include "olrwa/report.hpp"
#include "olrwa/run_config.hpp"
#include "support.hpp"

using namespace olrwa;
using evaluation::BenchmarkReport;
using evaluation::EvalSide;
using evaluation::Protocol;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [!]");
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ModelSpec spec(ModelKind kind) {
    ModelSpec s;
    s.kind = kind;
    s.name = std::string(to_string(kind));
    return s;
}

ModelSpec olr_wa(WeightScheme w) {
    ModelSpec s = spec(ModelKind::OlrWa);
    s.olr_wa.weights = w;
    s.olr_wa.base_fraction = 0.1;
    s.olr_wa.batch_multiplier = 5;
    return s;
}

DatasetSpec shape(std::size_t n, std::size_t m, double noise, Scenario sc, std::uint64_t seed) {
    DatasetSpec d;
    d.n_points = n;
    d.n_dims = m;
    d.noise_std = noise;
    d.scenario = sc;
    d.seed = seed;
    d.weight_range = {-10.0, 10.0};
    return d;
}

double mean_r2(const BenchmarkReport& r, const std::string& name) {
    for (const auto& s : r.summary)
        if (s.model == name) return s.mean_r2;
    throw Error(ErrorCode::InvalidArgument, "no model " + name);
}

struct LinearFit {
    double slope;
    double t_stat;
};

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - my - slope * (x[i] - mx);
        sse += r * r;
    }
    const double se = std::sqrt(sse / (n - 2.0) / sxx);
    return {slope, slope / se};
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

Verdict batch_parity() {
    Verdict v;
    const auto t0 = Clock::now();
    const Protocol p;
    const std::vector<ModelSpec> models{spec(ModelKind::Batch), olr_wa(WeightScheme::equal())};
    const auto ds1 = evaluation::run_benchmark(models, generate(shape(1000, 3, 10, Scenario::Normal, 1)), p);
    const auto ds2 = evaluation::run_benchmark(models, generate(shape(10000, 20, 20, Scenario::Normal, 2)), p);
    const double elapsed = seconds_since(t0);
    const double gap1 = std::abs(mean_r2(ds1, "olr_wa") - mean_r2(ds1, "batch"));
    const double gap2 = std::abs(mean_r2(ds2, "olr_wa") - mean_r2(ds2, "batch"));
    v.require(gap1 <= 0.02, "DS1 |dR2| " + fmt("%.5f", gap1) + " (batch " + fmt("%.5f", mean_r2(ds1, "batch")) +
                                ", olr_wa " + fmt("%.5f", mean_r2(ds1, "olr_wa")) + ")");
    v.require(gap2 <= 0.02, "DS2 |dR2| " + fmt("%.5f", gap2) + " (batch " + fmt("%.5f", mean_r2(ds2, "batch")) +
                                ", olr_wa " + fmt("%.5f", mean_r2(ds2, "olr_wa")) + ")");
    v.require(elapsed < 60.0, "runtime " + fmt("%.2f", elapsed) + " s");
    return v;
}

Verdict time_drift() {
    Verdict v;
    Protocol p;
    p.eval_side = EvalSide::NewTrend;
    const std::vector<ModelSpec> models{olr_wa(WeightScheme::time_based(0.1, 2.0)), spec(ModelKind::Batch),
                                        spec(ModelKind::Lms), spec(ModelKind::Pa)};
    const auto r = evaluation::run_benchmark(models, generate(shape(5000, 20, 20, Scenario::TimeDrift, 5)), p);
    v.require(mean_r2(r, "olr_wa") >= 0.90, "olr_wa " + fmt("%.5f", mean_r2(r, "olr_wa")));
    v.require(mean_r2(r, "batch") < 0.0, "batch " + fmt("%.5f", mean_r2(r, "batch")));
    v.require(mean_r2(r, "lms") >= 0.85, "lms " + fmt("%.5f", mean_r2(r, "lms")));
    v.require(mean_r2(r, "pa") >= 0.85, "pa " + fmt("%.5f", mean_r2(r, "pa")));
    return v;
}

Verdict confidence_drift() {
    Verdict v;
    Protocol p;
    p.eval_side = EvalSide::OldTrend;
    std::vector<ModelSpec> models{olr_wa(WeightScheme::confidence_based(4.0, 0.01))};
    for (ModelKind k : {ModelKind::Sgd, ModelKind::Mbgd, ModelKind::Lms, ModelKind::Orr, ModelKind::Olr,
                        ModelKind::Rls, ModelKind::Pa})
        models.push_back(spec(k));
    const auto r = evaluation::run_benchmark(models, generate(shape(5000, 20, 20, Scenario::ConfidenceDrift, 7)), p);
    v.require(mean_r2(r, "olr_wa") >= 0.90, "olr_wa " + fmt("%.5f", mean_r2(r, "olr_wa")));
    for (std::size_t i = 1; i < models.size(); ++i) {
        const double r2 = mean_r2(r, models[i].name);
        v.require(r2 < 0.5, models[i].name + " " + fmt("%.4f", r2));
    }
    return v;
}

// Oracle R^2 ceiling of a generated stationary dataset: signal variance over
// signal plus noise variance, with uniform features.
double r2_ceiling(const DatasetSpec& d) {
    const Dataset data = generate(d);
    const double width = d.feature_range.second - d.feature_range.first;
    const double signal = data.true_weights_pre.squaredNorm() * width * width / 12.0;
    return signal / (signal + d.noise_std * d.noise_std);
}

Verdict fast_start() {
    Verdict v;
    DatasetSpec d = shape(1000, 2, 20, Scenario::Normal, 0);
    d.weight_range = {-14.0, 14.0};
    for (d.seed = 1; d.seed < 1000; ++d.seed) {
        const double c = r2_ceiling(d);
        if (c >= 0.90 && c <= 0.93) break;
    }
    ModelSpec olr = spec(ModelKind::OlrWa);
    olr.olr_wa.base_count = 10;
    const auto curves = evaluation::curve_benchmark({olr, spec(ModelKind::Sgd)}, generate(d), Protocol{}, 10, 150);
    const auto& o = curves[0];
    const auto& s = curves[1];
    double peak = o.front().r2, drawdown = 0.0;
    for (const auto& rec : o) {
        peak = std::max(peak, rec.r2);
        drawdown = std::max(drawdown, peak - rec.r2);
    }
    v.detail = "DS9 seed " + std::to_string(d.seed) + " ceiling " + fmt("%.3f", r2_ceiling(d));
    v.require(o.front().points_seen == 10 && s.front().points_seen == 10, "first checkpoint at 10 points");
    v.require(o.front().r2 > 0.75, "olr_wa@10 " + fmt("%.4f", o.front().r2));
    v.require(o.front().r2 - s.front().r2 >= 0.3, "sgd@10 " + fmt("%.4f", s.front().r2));
    v.require(drawdown <= 0.05, "max drawdown " + fmt("%.4f", drawdown));
    return v;
}

Verdict oracle_equivalences() {
    Verdict v;
    std::mt19937_64 rng(20240501);

    double worst_ne = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index m = 1 + i % 8;
        const Eigen::Index n = m + 2 + i % 40;
        const MatrixXd X = testing::uniform_matrix(rng, n, m, -10, 10);
        const VectorXd y = testing::uniform_vector(rng, n, -50, 50);
        const auto fit = linalg::pinv_fit(X, y);
        MatrixXd A(n, m + 1);
        A << X, VectorXd::Ones(n);
        VectorXd theta(m + 1);
        theta << fit.weights, fit.intercept;
        const VectorXd grad = A.transpose() * (A * theta - y);
        worst_ne = std::max(worst_ne, grad.norm() / (A.norm() * A.norm() * theta.norm() + A.norm() * y.norm()));
    }
    v.require(worst_ne <= 1e-8, "pinv normal-equation residual " + fmt("%.2e", worst_ne));

    double worst_rls = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index m = 1 + trial % 5;
        const MatrixXd X = testing::uniform_matrix(rng, 200, m, -10, 10);
        const linalg::LinearModel truth{testing::uniform_vector(rng, m, -5, 5), 3.0};
        const VectorXd y = truth.predict(X);
        auto s = baselines::OnlineState::rls(m, 1e4);
        for (Eigen::Index i = 0; i < 200; ++i) s = baselines::rls_update(s, X.row(i).transpose(), y(i), 1.0);
        const auto batch = linalg::pinv_fit(X, y);
        VectorXd oracle(m + 1);
        oracle << batch.weights, batch.intercept;
        worst_rls = std::max(worst_rls, (s.theta - oracle).norm() / oracle.norm());
    }
    v.require(worst_rls <= 1e-6, "rls vs batch rel " + fmt("%.2e", worst_rls));

    const double eta = 1e-3, h = 1e-6, lambda = 0.3;
    auto point_loss = [](const VectorXd& t, const VectorXd& x, double y) {
        const double r = y - t.head(x.size()).dot(x) - t(x.size());
        return r * r;
    };
    auto fd = [h](const std::function<double(const VectorXd&)>& f, const VectorXd& t) {
        VectorXd g(t.size());
        for (Eigen::Index i = 0; i < t.size(); ++i) {
            VectorXd up = t, down = t;
            up(i) += h;
            down(i) -= h;
            g(i) = (f(up) - f(down)) / (2 * h);
        }
        return g;
    };
    auto rel = [](const VectorXd& a, const VectorXd& b) { return (a - b).norm() / std::max(1e-12, b.norm()); };
    double worst[4] = {0, 0, 0, 0};
    for (int i = 0; i < 20; ++i) {
        const Eigen::Index m = 1 + i % 5;
        const VectorXd x = testing::uniform_vector(rng, m, -3, 3);
        const double y = testing::uniform_vector(rng, 1, -10, 10)(0);
        // keep weights away from zero so the L1 term is differentiable
        VectorXd theta = testing::uniform_vector(rng, m + 1, 0.2, 2.0);
        for (Eigen::Index j = 0; j < m + 1; j += 2) theta(j) = -theta(j);
        baselines::OnlineState s = baselines::OnlineState::zeros(m);
        s.theta = theta;

        worst[0] = std::max(worst[0], rel((theta - baselines::sgd_update(s, x, y, eta).theta) / eta,
                                          fd([&](const VectorXd& t) { return point_loss(t, x, y); }, theta)));
        worst[1] = std::max(worst[1], rel((theta - baselines::lasso_update(s, x, y, eta, lambda).theta) / eta,
                                          fd([&](const VectorXd& t) {
                                              return point_loss(t, x, y) + lambda * t.head(m).lpNorm<1>();
                                          }, theta)));
        worst[2] = std::max(worst[2], rel((theta - baselines::ridge_update(s, x, y, eta, lambda).theta) / eta,
                                          fd([&](const VectorXd& t) {
                                              return point_loss(t, x, y) + lambda * t.head(m).squaredNorm();
                                          }, theta)));
        const MatrixXd Xb = testing::uniform_matrix(rng, 6, m, -3, 3);
        const VectorXd yb = testing::uniform_vector(rng, 6, -10, 10);
        worst[3] = std::max(worst[3], rel((theta - baselines::mbgd_update(s, Xb, yb, eta).theta) / eta,
                                          fd([&](const VectorXd& t) {
                                              double sum = 0;
                                              for (Eigen::Index r = 0; r < 6; ++r)
                                                  sum += point_loss(t, Xb.row(r).transpose(), yb(r));
                                              return sum / 6.0;
                                          }, theta)));
    }
    const char* names[] = {"sgd", "lasso", "ridge", "mbgd"};
    for (int k = 0; k < 4; ++k) v.require(worst[k] <= 1e-5, std::string(names[k]) + " fd " + fmt("%.1e", worst[k]));
    return v;
}

Verdict geometry() {
    Verdict v;
    std::mt19937_64 rng(7);

    double worst_rt = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Eigen::Index m = 1 + i % 6;
        const linalg::LinearModel model{testing::uniform_vector(rng, m, -20, 20),
                                        testing::uniform_vector(rng, 1, -20, 20)(0)};
        const auto back = linalg::hyperplane_to_model(linalg::model_to_hyperplane(model));
        worst_rt = std::max({worst_rt, (back.weights - model.weights).cwiseAbs().maxCoeff(),
                             std::abs(back.intercept - model.intercept)});
    }
    v.require(worst_rt <= 1e-10, "round-trip " + fmt("%.1e", worst_rt));

    double worst_ix = 0.0;
    int points = 0;
    for (int i = 0; i < 300; ++i) {
        const Eigen::Index m = 1 + i % 5;
        const auto h1 = linalg::canonicalize(testing::uniform_vector(rng, m + 1), testing::uniform_vector(rng, 1)(0));
        const auto h2 = linalg::canonicalize(testing::uniform_vector(rng, m + 1), testing::uniform_vector(rng, 1)(0));
        const auto ix = linalg::intersection_point(h1, h2);
        if (const auto* p = std::get_if<linalg::Point>(&ix)) {
            ++points;
            worst_ix = std::max({worst_ix, std::abs(h1.residual(p->coords)), std::abs(h2.residual(p->coords))});
        }
    }
    v.require(points == 300 && worst_ix <= 1e-8, "intersections " + fmt("%.1e", worst_ix));

    int scale_mismatch = 0, coincide_changes = 0, coincide_runs = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index m = 1 + trial % 4;
        const linalg::LinearModel a{testing::uniform_vector(rng, m, -3, 3), 0.5};
        const linalg::LinearModel b{testing::uniform_vector(rng, m, -3, 3), -1.0};
        const MatrixXd X0 = testing::uniform_matrix(rng, 10, m, -5, 5);
        std::vector<MiniBatch> batches;
        std::normal_distribution<double> noise(0.0, 0.3);
        for (int i = 0; i < 8; ++i) {
            MiniBatch mb{testing::uniform_matrix(rng, 5 * m, m, -5, 5), VectorXd()};
            mb.y = (i % 2 ? a : b).predict(mb.X);
            for (Eigen::Index r = 0; r < mb.y.size(); ++r) mb.y(r) += noise(rng);
            batches.push_back(mb);
        }
        auto run = [&](double wb, double wi) {
            OlrWaConfig cfg;
            cfg.weights = WeightScheme::custom(wb, wi);
            OlrWaState s = init_base(X0, a.predict(X0), cfg);
            for (const auto& mb : batches) update(s, mb, cfg);
            return s;
        };
        const double wb = 1.0 + trial % 3, wi = 0.25 * (1 + trial % 5);
        const OlrWaState ref = run(wb, wi);
        for (double c : {0.5, 3.0, 4.0, 1024.0}) {
            const OlrWaState scaled = run(c * wb, c * wi);
            if (!(scaled.base_plane.normal == ref.base_plane.normal && scaled.base_plane.offset == ref.base_plane.offset))
                ++scale_mismatch;
        }

        OlrWaState s = ref;
        for (int k = 0; k < 5; ++k) {
            const MatrixXd X = testing::uniform_matrix(rng, 5 * m, m, -20, 20);
            const auto before = s.base_plane;
            const auto rep = update(s, MiniBatch{X, s.model().predict(X)}, OlrWaConfig{});
            ++coincide_runs;
            if (rep.outcome != UpdateOutcome::Coincident || !(s.base_plane.normal == before.normal) ||
                s.base_plane.offset != before.offset)
                ++coincide_changes;
        }
    }
    v.require(scale_mismatch == 0, "weight scaling mismatches " + std::to_string(scale_mismatch) + "/80");
    v.require(coincide_changes == 0,
              "coincide changes " + std::to_string(coincide_changes) + "/" + std::to_string(coincide_runs));
    return v;
}

Verdict determinism() {
    Verdict v;
    testing::TempDir dir("acceptance");
    std::ofstream(dir / "cfg.json") << R"({
      "dataset": {"generator": {"n_points": 1000, "n_dims": 3, "noise_std": 10, "seed": 1, "weight_range": [-10, 10]}},
      "models": [{"kind": "batch"}, {"kind": "olr_wa"}, {"kind": "sgd"}, {"kind": "mbgd"}, {"kind": "lms"},
                 {"kind": "orr"}, {"kind": "olr"}, {"kind": "rls"}, {"kind": "pa"}],
      "protocol": {"seeds": [0, 1, 2, 3, 4], "folds": 5, "threads": 2},
      "output_dir": "out"
    })";
    std::ostringstream out, err;
    const int c1 = cli::cmd_run(dir / "cfg.json", out, err);
    const std::string first = c1 == 0 ? read_text_file(dir / "out" / "runs.csv") : std::string();
    const int c2 = cli::cmd_run(dir / "cfg.json", out, err);
    const std::string second = c2 == 0 ? read_text_file(dir / "out" / "runs.csv") : std::string();
    v.require(c1 == 0 && c2 == 0, "exit codes " + std::to_string(c1) + "," + std::to_string(c2));
    v.require(!first.empty() && first == second, "runs.csv byte-identical (" + std::to_string(first.size()) + " bytes)");
    const auto runs = first.empty() ? std::vector<evaluation::RunResult>{} : report::parse_runs_csv(first);
    int bad = 0;
    for (const char* name : {"batch", "olr_wa", "sgd", "mbgd", "lms", "orr", "olr", "rls", "pa"}) {
        bad += std::count_if(runs.begin(), runs.end(), [&](const auto& r) { return r.model == name; }) != 25;
    }
    v.require(bad == 0 && runs.size() == 225, std::to_string(runs.size()) + " rows, 25 per model");
    return v;
}

Verdict complexity() {
    Verdict v;
    std::mt19937_64 rng(99);
    const Eigen::Index m = 5;
    OlrWaConfig cfg;
    const auto k = static_cast<Eigen::Index>(cfg.batch_size(m));
    const linalg::LinearModel truth{testing::uniform_vector(rng, m, -5, 5), 1.0};
    std::normal_distribution<double> noise(0.0, 2.0);
    auto draw = [&](Eigen::Index rows) {
        MiniBatch mb{testing::uniform_matrix(rng, rows, m, -10, 10), VectorXd()};
        mb.y = truth.predict(mb.X);
        for (Eigen::Index r = 0; r < rows; ++r) mb.y(r) += noise(rng);
        return mb;
    };

    // Stream 10k updates and keep the state every 100 of them. Each saved
    // state is then timed on the same probe batches in a shuffled order, so
    // slow periods of the machine land on random stream positions.
    const MiniBatch base = draw(k);
    OlrWaState state = init_base(base.X, base.y, cfg);
    const int updates = 10000, every = 100, rounds = 15;
    std::vector<OlrWaState> saved;
    const auto stream_t0 = Clock::now();
    for (int i = 1; i <= updates; ++i) {
        update(state, draw(k), cfg);
        if (i % every == 0) saved.push_back(state);
    }
    const double stream_us = std::chrono::duration<double, std::micro>(Clock::now() - stream_t0).count() / updates;
    std::vector<MiniBatch> probes;
    for (int i = 0; i < 5; ++i) probes.push_back(draw(k));

    std::vector<std::vector<double>> samples(saved.size());
    std::vector<std::size_t> order(saved.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int r = 0; r < rounds; ++r) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            for (const MiniBatch& mb : probes) {
                OlrWaState s = saved[i];
                const auto t0 = Clock::now();
                update(s, mb, cfg);
                samples[i].push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
            }
        }
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < saved.size(); ++i) {
        x.push_back(static_cast<double>(saved[i].points_seen));
        y.push_back(median(samples[i]));
    }
    const LinearFit fit = ols(x, y);
    const double mean_us = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    // two-sided 5% critical value of Student's t with 98 degrees of freedom
    const double t_crit = 1.984;
    v.require(std::abs(fit.t_stat) < t_crit,
              "olr_wa " + fmt("%.2f", mean_us) + " us/update (" + fmt("%.2f", stream_us) +
                  " us with data draws in the stream loop), slope t " + fmt("%.2f", fit.t_stat) +
                  ", fitted change over stream " + fmt("%.1f%%", 100.0 * fit.slope * (x.back() - x.front()) / mean_us));

    // naive baseline: refit a pseudo-inverse over everything after each batch
    const int refits = 400;
    MatrixXd X(refits * k, m);
    VectorXd Y(refits * k);
    for (int i = 0; i < refits; ++i) {
        const MiniBatch mb = draw(k);
        X.middleRows(i * k, k) = mb.X;
        Y.segment(i * k, k) = mb.y;
    }
    std::vector<double> cumulative;
    double total = 0.0;
    for (int i = 1; i <= refits; ++i) {
        const auto t0 = Clock::now();
        linalg::pinv_fit(X.topRows(i * k), Y.head(i * k));
        total += std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
        cumulative.push_back(total);
    }
    const double exponent = std::log(cumulative[refits - 1] / cumulative[refits / 4 - 1]) / std::log(4.0);
    v.require(exponent > 1.5, "refit-all cumulative time ~ n^" + fmt("%.2f", exponent));
    return v;
}

} // namespace

int main() {
    struct Criterion {
        const char* title;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {"batch parity on DS1/DS2", batch_parity},
        {"time-based drift tracking", time_drift},
        {"confidence-based drift resistance", confidence_drift},
        {"fast start on DS9", fast_start},
        {"oracle equivalences", oracle_equivalences},
        {"geometry suite", geometry},
        {"protocol determinism", determinism},
        {"per-update cost independent of stream length", complexity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto t0 = Clock::now();
        try {
            v = criteria[i].run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failed += !v.pass;
        std::printf("[%s] criterion %zu: %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].title,
                    seconds_since(t0), v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
