#include "olrwa/olr_wa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

#include "olrwa/text_format.hpp"

namespace olrwa {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void widen_bounds(OlrWaState& state, const MatrixXd& X) {
    if (X.rows() == 0) return;
    const VectorXd lo = X.colwise().minCoeff().transpose();
    const VectorXd hi = X.colwise().maxCoeff().transpose();
    if (state.points_seen == 0) {
        state.feature_lo = lo;
        state.feature_hi = hi;
    } else {
        state.feature_lo = state.feature_lo.cwiseMin(lo);
        state.feature_hi = state.feature_hi.cwiseMax(hi);
    }
}

std::optional<double> candidate_error(const std::optional<VectorXd>& normal, const Point& through,
                                      const MiniBatch& sample, std::optional<AugmentedHyperplane>& plane) {
    if (!normal) return std::nullopt;
    plane = linalg::define_hyperplane(*normal, through);
    if (std::abs(plane->normal(plane->dims())) <= linalg::kVerticalTol) {
        plane.reset();
        return std::nullopt;
    }
    return linalg::mse(*plane, sample.X, sample.y);
}

} // namespace

std::string_view to_string(WeightMode mode) noexcept {
    switch (mode) {
    case WeightMode::Equal: return "equal";
    case WeightMode::Dynamic: return "dynamic";
    case WeightMode::TimeBased: return "time_based";
    case WeightMode::ConfidenceBased: return "confidence_based";
    case WeightMode::Custom: return "custom";
    }
    return "custom";
}

std::optional<WeightMode> parse_weight_mode(std::string_view s) noexcept {
    if (s == "equal") return WeightMode::Equal;
    if (s == "dynamic") return WeightMode::Dynamic;
    if (s == "time_based") return WeightMode::TimeBased;
    if (s == "confidence_based") return WeightMode::ConfidenceBased;
    if (s == "custom") return WeightMode::Custom;
    return std::nullopt;
}

void WeightScheme::validate() const {
    if (!(w_base > 0.0) || !(w_inc > 0.0) || !std::isfinite(w_base) || !std::isfinite(w_inc)) {
        throw Error(ErrorCode::InvalidConfig, "weight scheme: w_base and w_inc must be positive and finite");
    }
    if (mode == WeightMode::Equal && w_base != w_inc) {
        throw Error(ErrorCode::InvalidConfig, "weight scheme: equal mode requires w_base == w_inc");
    }
}

std::pair<double, double> WeightScheme::weights_for(std::uint64_t points_seen, std::size_t batch_rows) const {
    if (mode == WeightMode::Dynamic) {
        const double rows = static_cast<double>(std::max<std::size_t>(batch_rows, 1));
        const double base = static_cast<double>(points_seen) / rows * w_inc;
        return {base > 0.0 ? base : w_inc, w_inc};
    }
    return {w_base, w_inc};
}

void OlrWaConfig::validate() const {
    weights.validate();
    if (!base_count && !(base_fraction > 0.0 && base_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "base_fraction must lie in (0, 1]");
    }
    if (base_count && *base_count == 0) {
        throw Error(ErrorCode::InvalidConfig, "base_count must be at least 1");
    }
    if (user_batch == 0) throw Error(ErrorCode::InvalidConfig, "user_batch must be at least 1");
    if (batch_multiplier == 0) throw Error(ErrorCode::InvalidConfig, "batch_multiplier must be at least 1");
    if (sample_size_factor == 0) throw Error(ErrorCode::InvalidConfig, "sample_size_factor must be at least 1");
}

std::size_t OlrWaConfig::resolve_base_count(std::size_t n_train) const {
    if (base_count) return *base_count;
    const auto count = static_cast<std::size_t>(std::floor(base_fraction * static_cast<double>(n_train)));
    return std::max<std::size_t>(count, 1);
}

std::size_t OlrWaConfig::batch_size(std::size_t dims) const {
    return effective_batch_size(user_batch, dims, batch_multiplier);
}

std::size_t effective_batch_size(std::size_t user_batch, std::size_t dims, std::size_t multiplier) {
    if (user_batch == 0 || dims == 0 || multiplier == 0) {
        throw Error(ErrorCode::InvalidArgument, "effective_batch_size: arguments must be >= 1");
    }
    return std::max(user_batch, dims * multiplier);
}

void MiniBatch::validate() const {
    if (X.rows() < 1) throw Error(ErrorCode::InvalidArgument, "mini-batch is empty");
    if (X.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "mini-batch: X rows and y length differ");
    }
    linalg::require_finite(X, "mini-batch X");
    linalg::require_finite(y, "mini-batch y");
}

bool operator==(const OlrWaState& a, const OlrWaState& b) {
    return a.dims == b.dims && a.points_seen == b.points_seen && a.updates == b.updates &&
           a.coincide_skips == b.coincide_skips && a.parallel_merges == b.parallel_merges &&
           a.degenerate_updates == b.degenerate_updates && a.base_plane.offset == b.base_plane.offset &&
           a.base_plane.normal == b.base_plane.normal && a.feature_lo == b.feature_lo &&
           a.feature_hi == b.feature_hi && a.rng == b.rng;
}

OlrWaState init_base(const MatrixXd& X, const VectorXd& y, const OlrWaConfig& cfg) {
    cfg.validate();
    const LinearModel fit = linalg::pinv_fit(X, y);
    OlrWaState state;
    state.dims = X.cols();
    state.base_plane = linalg::model_to_hyperplane(fit);
    state.rng.seed(cfg.rng_seed);
    widen_bounds(state, X);
    state.points_seen = static_cast<std::uint64_t>(X.rows());
    return state;
}

bool coincide(const AugmentedHyperplane& h1, const AugmentedHyperplane& h2) {
    return std::holds_alternative<linalg::Coincident>(linalg::intersection_point(h1, h2));
}

Point weighted_mid_point(const AugmentedHyperplane& h_base, const AugmentedHyperplane& h_inc, double w_base,
                         double w_inc) {
    if (!linalg::normals_parallel(h_base.normal, h_inc.normal)) {
        throw Error(ErrorCode::NotParallel, "weighted_mid_point: planes intersect");
    }
    if (!(w_base > 0.0) || !(w_inc > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "weighted_mid_point: weights must be positive");
    }
    VectorXd n_inc = h_inc.normal;
    double d_inc = h_inc.offset;
    if (h_base.normal.dot(n_inc) < 0.0) {
        n_inc = -n_inc;
        d_inc = -d_inc;
    }
    const VectorXd foot_base = -h_base.offset * h_base.normal;
    const VectorXd foot_inc = -d_inc * n_inc;
    const double total = w_base + w_inc;
    return Point{(w_base / total) * foot_base + (w_inc / total) * foot_inc};
}

MiniBatch sample_and_combine(OlrWaState& state, const MiniBatch& batch, std::size_t sample_size_factor) {
    if (state.points_seen == 0) {
        throw Error(ErrorCode::InvalidArgument, "sample_and_combine: state has seen no data");
    }
    if (batch.dims() != state.dims) {
        throw Error(ErrorCode::DimensionMismatch, "sample_and_combine: batch dimension differs from state");
    }
    const Eigen::Index k = batch.rows();
    const Eigen::Index s = k * static_cast<Eigen::Index>(sample_size_factor);
    const Eigen::Index m = state.dims;
    const LinearModel base = state.model();

    MiniBatch out;
    out.X.resize(k + s, m);
    out.y.resize(k + s);
    out.X.topRows(k) = batch.X;
    out.y.head(k) = batch.y;
    for (Eigen::Index r = 0; r < s; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            const double lo = state.feature_lo(c);
            const double hi = state.feature_hi(c);
            out.X(k + r, c) = lo == hi ? lo : lo + uniform01(state.rng) * (hi - lo);
        }
        out.y(k + r) = base.predict(VectorXd(out.X.row(k + r).transpose()));
    }
    return out;
}

CandidateNormals candidate_normals(const VectorXd& v_base, const VectorXd& v_inc, double w_base, double w_inc) {
    CandidateNormals out;
    try {
        out.first = linalg::weighted_average_vector(v_base, v_inc, w_base, w_inc);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateAverage) throw;
    }
    try {
        out.second = linalg::weighted_average_vector(-v_base, v_inc, w_base, w_inc);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateAverage) throw;
    }
    return out;
}

UpdateReport update(OlrWaState& state, const MiniBatch& batch, const OlrWaConfig& cfg) {
    batch.validate();
    if (batch.dims() != state.dims) {
        throw Error(ErrorCode::DimensionMismatch, "update: batch has " + std::to_string(batch.dims()) +
                                                      " features, state has " + std::to_string(state.dims));
    }
    const auto [w_base, w_inc] = cfg.weights.weights_for(state.points_seen, static_cast<std::size_t>(batch.rows()));

    const AugmentedHyperplane inc = linalg::model_to_hyperplane(linalg::pinv_fit(batch.X, batch.y));
    UpdateReport report;

    auto absorb = [&] {
        widen_bounds(state, batch.X);
        state.points_seen += static_cast<std::uint64_t>(batch.rows());
    };

    const linalg::Intersection meet = linalg::intersection_point(state.base_plane, inc);
    if (std::holds_alternative<linalg::Coincident>(meet)) {
        report.outcome = UpdateOutcome::Coincident;
        ++state.coincide_skips;
        absorb();
        return report;
    }
    Point through;
    if (const auto* p = std::get_if<Point>(&meet)) {
        through = *p;
    } else {
        through = weighted_mid_point(state.base_plane, inc, w_base, w_inc);
        report.parallel = true;
        ++state.parallel_merges;
    }

    // Both normals are canonical (target component <= 0), so V1 and V2 are
    // the two intersection sides in a fixed order.
    const CandidateNormals normals = candidate_normals(state.base_plane.normal, inc.normal, w_base, w_inc);
    const MiniBatch combined = sample_and_combine(state, batch, cfg.sample_size_factor);

    constexpr double inf = std::numeric_limits<double>::infinity();
    report.err_first = candidate_error(normals.first, through, combined, report.first).value_or(inf);
    report.err_second = candidate_error(normals.second, through, combined, report.second).value_or(inf);

    if (!report.first && !report.second) {
        report.outcome = UpdateOutcome::Degenerate;
        ++state.degenerate_updates;
        absorb();
        return report;
    }
    // Ties keep the first candidate.
    if (report.err_second < report.err_first) {
        state.base_plane = *report.second;
        report.selected = 2;
    } else {
        state.base_plane = *report.first;
        report.selected = 1;
    }
    ++state.updates;
    absorb();
    return report;
}

VectorXd predict(const OlrWaState& state, const MatrixXd& X) {
    return state.model().predict(X);
}

std::string serialize(const OlrWaState& state) {
    std::ostringstream out;
    out << "format=olrwa-state-v1\n";
    out << "dims=" << state.dims << '\n';
    out << "normal=" << text::format_vector(state.base_plane.normal) << '\n';
    out << "offset=" << text::format_double(state.base_plane.offset) << '\n';
    out << "feature_lo=" << text::format_vector(state.feature_lo) << '\n';
    out << "feature_hi=" << text::format_vector(state.feature_hi) << '\n';
    out << "points_seen=" << state.points_seen << '\n';
    out << "updates=" << state.updates << '\n';
    out << "coincide_skips=" << state.coincide_skips << '\n';
    out << "parallel_merges=" << state.parallel_merges << '\n';
    out << "degenerate_updates=" << state.degenerate_updates << '\n';
    out << "rng=" << state.rng << '\n';
    return out.str();
}

OlrWaState deserialize(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    for (std::string_view line : text::split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ParseError, "state record: line without '=': " + std::string(line));
        }
        kv.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
    }
    auto field = [&](std::string_view key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(ErrorCode::ParseError, "state record: missing key " + std::string(key));
        return it->second;
    };
    auto integer = [&](std::string_view key) -> std::uint64_t {
        const std::string& s = field(key);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw Error(ErrorCode::ParseError, "state record: bad integer for " + std::string(key));
        }
        return v;
    };
    auto vector = [&](std::string_view key) -> VectorXd {
        auto v = text::parse_vector(field(key));
        if (!v) throw Error(ErrorCode::ParseError, "state record: bad vector for " + std::string(key));
        return *v;
    };

    if (field("format") != "olrwa-state-v1") {
        throw Error(ErrorCode::ParseError, "state record: unsupported format " + field("format"));
    }
    OlrWaState state;
    state.dims = static_cast<Eigen::Index>(integer("dims"));
    state.base_plane.normal = vector("normal");
    auto offset = text::parse_double(field("offset"));
    if (!offset) throw Error(ErrorCode::ParseError, "state record: bad offset");
    state.base_plane.offset = *offset;
    state.feature_lo = vector("feature_lo");
    state.feature_hi = vector("feature_hi");
    state.points_seen = integer("points_seen");
    state.updates = integer("updates");
    state.coincide_skips = integer("coincide_skips");
    state.parallel_merges = integer("parallel_merges");
    state.degenerate_updates = integer("degenerate_updates");
    std::istringstream rng_in(field("rng"));
    rng_in >> state.rng;
    if (rng_in.fail()) throw Error(ErrorCode::ParseError, "state record: bad rng state");

    if (state.base_plane.normal.size() != state.dims + 1 || state.feature_lo.size() != state.dims ||
        state.feature_hi.size() != state.dims) {
        throw Error(ErrorCode::ParseError, "state record: vector lengths disagree with dims");
    }
    return state;
}

} // namespace olrwa
