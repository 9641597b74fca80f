#include "olrwa/datagen.hpp"

#include <cmath>
#include <random>

#include "olrwa/error.hpp"

namespace olrwa {

namespace {

struct Draws {
    std::mt19937_64 rng;

    explicit Draws(std::uint64_t seed) : rng(seed) {}

    double uniform(std::pair<double, double> range) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return range.first + u * (range.second - range.first);
    }
};

struct Sample {
    MatrixXd X;
    VectorXd w;
    double b = 0.0;
    VectorXd noise;
};

// Weights first, then the feature matrix row by row, then the noise, so a
// drift dataset and a stationary dataset with the same seed share X.
Sample draw(const DatasetSpec& spec) {
    Draws d(spec.seed);
    const auto n = static_cast<Eigen::Index>(spec.n_points);
    const auto m = static_cast<Eigen::Index>(spec.n_dims);
    Sample s;
    s.w.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) s.w(j) = d.uniform(spec.weight_range);
    s.b = d.uniform(spec.weight_range);
    s.X.resize(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) s.X(i, j) = d.uniform(spec.feature_range);
    }
    s.noise = VectorXd::Zero(n);
    if (spec.noise_std > 0.0) {
        std::normal_distribution<double> gauss(0.0, spec.noise_std);
        for (Eigen::Index i = 0; i < n; ++i) s.noise(i) = gauss(d.rng);
    }
    return s;
}

void invalid(const char* field, const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, std::string(field) + ": " + why);
}

} // namespace

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
    case Scenario::Normal: return "normal";
    case Scenario::TimeDrift: return "time_drift";
    case Scenario::ConfidenceDrift: return "confidence_drift";
    case Scenario::Convergence: return "convergence";
    }
    return "normal";
}

std::optional<Scenario> parse_scenario(std::string_view s) noexcept {
    for (Scenario sc : {Scenario::Normal, Scenario::TimeDrift, Scenario::ConfidenceDrift, Scenario::Convergence}) {
        if (to_string(sc) == s) return sc;
    }
    return std::nullopt;
}

bool is_drift(Scenario s) noexcept {
    return s == Scenario::TimeDrift || s == Scenario::ConfidenceDrift;
}

void DatasetSpec::validate() const {
    if (n_points < 1) invalid("n_points", "must be at least 1");
    if (n_dims < 1) invalid("n_dims", "must be at least 1");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) invalid("noise_std", "must be finite and non-negative");
    if (!(feature_range.first <= feature_range.second) || !std::isfinite(feature_range.first) ||
        !std::isfinite(feature_range.second)) {
        invalid("feature_range", "must be a finite [low, high] pair with low <= high");
    }
    if (!(weight_range.first <= weight_range.second) || !std::isfinite(weight_range.first) ||
        !std::isfinite(weight_range.second)) {
        invalid("weight_range", "must be a finite [low, high] pair with low <= high");
    }
    if (is_drift(scenario)) {
        if (!(drift_fraction > 0.0 && drift_fraction < 1.0)) {
            invalid("drift_fraction", "must lie strictly inside (0, 1) for drift scenarios");
        }
        const auto idx = static_cast<std::size_t>(std::floor(drift_fraction * static_cast<double>(n_points)));
        if (idx == 0 || idx >= n_points) invalid("drift_fraction", "leaves one drift segment empty");
    }
}

Dataset gen_linear(const DatasetSpec& spec) {
    if (is_drift(spec.scenario)) {
        throw Error(ErrorCode::InvalidArgument, "gen_linear: drift scenarios go through gen_drift");
    }
    spec.validate();
    Sample s = draw(spec);
    Dataset out;
    out.y = (s.X * s.w).array() + s.b;
    out.y += s.noise;
    out.X = std::move(s.X);
    out.true_weights_pre = std::move(s.w);
    out.true_intercept_pre = s.b;
    return out;
}

Dataset gen_drift(const DatasetSpec& spec) {
    if (!is_drift(spec.scenario)) {
        throw Error(ErrorCode::InvalidArgument, "gen_drift: scenario is not a drift scenario");
    }
    spec.validate();
    Sample s = draw(spec);
    const auto drift = static_cast<Eigen::Index>(std::floor(spec.drift_fraction * static_cast<double>(spec.n_points)));
    const Eigen::Index n = s.X.rows();

    Dataset out;
    out.y.resize(n);
    out.y.head(drift) = (s.X.topRows(drift) * s.w).array() + s.b;
    out.y.tail(n - drift) = -((s.X.bottomRows(n - drift) * s.w).array() + s.b);
    out.y += s.noise;
    out.X = std::move(s.X);
    out.true_weights_post = -s.w;
    out.true_intercept_post = -s.b;
    out.true_weights_pre = std::move(s.w);
    out.true_intercept_pre = s.b;
    out.drift_index = static_cast<std::size_t>(drift);
    return out;
}

Dataset generate(const DatasetSpec& spec) {
    return is_drift(spec.scenario) ? gen_drift(spec) : gen_linear(spec);
}

} // namespace olrwa
