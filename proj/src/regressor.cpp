#include "olrwa/regressor.hpp"

#include <sstream>

#include "olrwa/text_format.hpp"

namespace olrwa {

namespace {

void check_input(Eigen::Index dims, const MatrixXd& X, const VectorXd& y) {
    if (X.cols() != dims) {
        throw Error(ErrorCode::DimensionMismatch,
                    "observe_batch: X has " + std::to_string(X.cols()) + " columns, expected " + std::to_string(dims));
    }
    if (X.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "observe_batch: X rows and y length differ");
    }
    linalg::require_finite(X, "observe_batch X");
    linalg::require_finite(y, "observe_batch y");
}

MatrixXd stack(const std::vector<VectorXd>& rows, std::size_t begin, std::size_t end, Eigen::Index dims) {
    MatrixXd X(static_cast<Eigen::Index>(end - begin), dims);
    for (std::size_t i = begin; i < end; ++i) X.row(static_cast<Eigen::Index>(i - begin)) = rows[i].transpose();
    return X;
}

VectorXd stack(const std::vector<double>& ys, std::size_t begin, std::size_t end) {
    return Eigen::Map<const VectorXd>(ys.data() + begin, static_cast<Eigen::Index>(end - begin));
}

std::string state_snapshot(std::string_view model, const baselines::OnlineState& s) {
    std::ostringstream out;
    out << "model=" << model << '\n';
    out << "theta=" << text::format_vector(s.theta) << '\n';
    out << "bias=" << (s.bias ? 1 : 0) << '\n';
    out << "steps=" << s.steps << '\n';
    if (s.P.size() > 0) {
        const Eigen::Map<const VectorXd> flat(s.P.data(), s.P.size());
        out << "P=" << text::format_vector(flat) << '\n';
        out << "ill_conditioned_steps=" << s.ill_conditioned_steps << '\n';
    }
    return out.str();
}

} // namespace

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
    case ModelKind::Batch: return "batch";
    case ModelKind::Sgd: return "sgd";
    case ModelKind::Mbgd: return "mbgd";
    case ModelKind::Lms: return "lms";
    case ModelKind::Orr: return "orr";
    case ModelKind::Olr: return "olr";
    case ModelKind::Rls: return "rls";
    case ModelKind::Pa: return "pa";
    case ModelKind::OlrWa: return "olr_wa";
    }
    return "olr_wa";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) noexcept {
    for (ModelKind k : {ModelKind::Batch, ModelKind::Sgd, ModelKind::Mbgd, ModelKind::Lms, ModelKind::Orr,
                        ModelKind::Olr, ModelKind::Rls, ModelKind::Pa, ModelKind::OlrWa}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::unique_ptr<OnlineRegressor> make_regressor(const ModelSpec& spec, Eigen::Index dims, std::size_t n_train,
                                                std::uint64_t seed) {
    switch (spec.kind) {
    case ModelKind::Batch: return std::make_unique<BatchRegressor>(dims);
    case ModelKind::Sgd:
    case ModelKind::Orr:
    case ModelKind::Olr: return std::make_unique<GradientRegressor>(spec.kind, spec.regressor, dims);
    case ModelKind::Mbgd: return std::make_unique<MbgdRegressor>(spec.regressor, dims);
    case ModelKind::Lms:
    case ModelKind::Rls:
    case ModelKind::Pa: return std::make_unique<PointwiseRegressor>(spec.kind, spec.regressor, dims);
    case ModelKind::OlrWa: {
        OlrWaConfig cfg = spec.olr_wa;
        // splitmix-style mixing keeps per-run streams apart
        std::uint64_t z = cfg.rng_seed + 0x9E3779B97F4A7C15ULL * (seed + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        cfg.rng_seed = z ^ (z >> 31);
        return std::make_unique<OlrWaRegressor>(cfg, dims, cfg.resolve_base_count(n_train));
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

std::string describe(const ModelSpec& spec) {
    const auto& r = spec.regressor;
    const auto f = [](double v) { return text::format_double(v); };
    std::ostringstream out;
    out << spec.name << ": " << to_string(spec.kind);
    switch (spec.kind) {
    case ModelKind::Batch: out << " pseudo-inverse"; break;
    case ModelKind::Sgd: out << " eta=" << f(r.learning_rate) << " E=N*" << r.epoch_multiplier; break;
    case ModelKind::Orr:
    case ModelKind::Olr:
        out << " eta=" << f(r.learning_rate) << " E=N*" << r.epoch_multiplier << " lambda=" << f(r.reg_lambda);
        break;
    case ModelKind::Mbgd:
        out << " eta=" << f(r.learning_rate);
        if (r.batch_size > 0) {
            out << " K=" << r.batch_size;
        } else {
            out << " K=M*" << r.batch_multiplier;
        }
        out << " E=N/K*" << r.epoch_multiplier;
        break;
    case ModelKind::Lms: out << " eta=" << f(r.learning_rate); break;
    case ModelKind::Rls: out << " lambda=" << f(r.rls_forgetting) << " delta=" << f(r.rls_delta); break;
    case ModelKind::Pa:
        out << " PA-" << baselines::to_string(r.pa_variant) << " C=" << f(r.aggressiveness)
            << " epsilon=" << f(r.epsilon);
        break;
    case ModelKind::OlrWa: {
        const auto& c = spec.olr_wa;
        out << " weights=" << to_string(c.weights.mode) << " w_base=" << f(c.weights.w_base)
            << " w_inc=" << f(c.weights.w_inc);
        if (c.base_count) {
            out << " BK=" << *c.base_count;
        } else {
            out << " BK=N*" << f(c.base_fraction);
        }
        out << " K=max(" << c.user_batch << ",M*" << c.batch_multiplier << ")";
        break;
    }
    }
    if (r.replay && (spec.kind == ModelKind::Lms || spec.kind == ModelKind::Rls || spec.kind == ModelKind::Pa)) {
        out << " replay=" << r.epoch_multiplier;
    }
    return out.str();
}

// ---------------------------------------------------------------- batch

BatchRegressor::BatchRegressor(Eigen::Index dims) : dims_(dims) {
    if (dims < 1) throw Error(ErrorCode::InvalidArgument, "learner needs at least one feature");
}

void BatchRegressor::observe_batch(const MatrixXd& X, const VectorXd& y) {
    check_input(dims_, X, y);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        rows_.emplace_back(X.row(r).transpose());
        targets_.push_back(y(r));
    }
    cache_.reset();
}

const LinearModel& BatchRegressor::fitted() const {
    if (!cache_) {
        if (rows_.empty()) {
            cache_ = LinearModel{VectorXd::Zero(dims_), 0.0};
        } else {
            cache_ = linalg::pinv_fit(stack(rows_, 0, rows_.size(), dims_), stack(targets_, 0, targets_.size()));
        }
    }
    return *cache_;
}

VectorXd BatchRegressor::predict(const MatrixXd& X) const {
    return fitted().predict(X);
}

std::string BatchRegressor::snapshot() const {
    const LinearModel& m = fitted();
    std::ostringstream out;
    out << "model=batch\nweights=" << text::format_vector(m.weights) << "\nintercept="
        << text::format_double(m.intercept) << "\nrows=" << rows_.size() << '\n';
    return out.str();
}

// ---------------------------------------------------------------- sgd / lasso / ridge

GradientRegressor::GradientRegressor(ModelKind kind, baselines::RegressorConfig cfg, Eigen::Index dims)
    : kind_(kind), cfg_(cfg), state_(baselines::OnlineState::zeros(dims)) {
    cfg_.validate();
}

void GradientRegressor::step(const VectorXd& x, double y) {
    switch (kind_) {
    case ModelKind::Olr: state_ = baselines::lasso_update(std::move(state_), x, y, cfg_.learning_rate, cfg_.reg_lambda); break;
    case ModelKind::Orr: state_ = baselines::ridge_update(std::move(state_), x, y, cfg_.learning_rate, cfg_.reg_lambda); break;
    default: state_ = baselines::sgd_update(std::move(state_), x, y, cfg_.learning_rate); break;
    }
}

void GradientRegressor::observe_batch(const MatrixXd& X, const VectorXd& y) {
    check_input(dims(), X, y);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        xs_.emplace_back(X.row(r).transpose());
        ys_.push_back(y(r));
        step(xs_.back(), ys_.back());
    }
}

void GradientRegressor::finish() {
    if (finished_) return;
    finished_ = true;
    for (std::size_t pass = 1; pass < cfg_.epoch_multiplier; ++pass) {
        for (std::size_t i = 0; i < xs_.size(); ++i) step(xs_[i], ys_[i]);
    }
}

std::string GradientRegressor::snapshot() const {
    return state_snapshot(to_string(kind_), state_);
}

// ---------------------------------------------------------------- mbgd

MbgdRegressor::MbgdRegressor(baselines::RegressorConfig cfg, Eigen::Index dims)
    : cfg_(cfg), batch_(cfg.resolved_batch_size(static_cast<std::size_t>(dims))),
      state_(baselines::OnlineState::zeros(dims)) {
    cfg_.validate();
}

void MbgdRegressor::step(std::size_t begin, std::size_t end) {
    state_ = baselines::mbgd_update(std::move(state_), stack(xs_, begin, end, dims()), stack(ys_, begin, end),
                                    cfg_.learning_rate);
}

void MbgdRegressor::observe_batch(const MatrixXd& X, const VectorXd& y) {
    check_input(dims(), X, y);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        xs_.emplace_back(X.row(r).transpose());
        ys_.push_back(y(r));
        if (xs_.size() - consumed_ == batch_) {
            step(consumed_, xs_.size());
            consumed_ = xs_.size();
        }
    }
}

void MbgdRegressor::finish() {
    if (finished_) return;
    finished_ = true;
    if (consumed_ < xs_.size()) {
        step(consumed_, xs_.size());
        consumed_ = xs_.size();
    }
    for (std::size_t pass = 1; pass < cfg_.epoch_multiplier; ++pass) {
        for (std::size_t begin = 0; begin < xs_.size(); begin += batch_) {
            step(begin, std::min(begin + batch_, xs_.size()));
        }
    }
}

std::string MbgdRegressor::snapshot() const {
    return state_snapshot("mbgd", state_);
}

// ---------------------------------------------------------------- lms / rls / pa

PointwiseRegressor::PointwiseRegressor(ModelKind kind, baselines::RegressorConfig cfg, Eigen::Index dims)
    : kind_(kind), cfg_(cfg),
      state_(kind == ModelKind::Rls ? baselines::OnlineState::rls(dims, cfg.rls_delta)
                                    : baselines::OnlineState::zeros(dims)) {
    cfg_.validate();
}

void PointwiseRegressor::step(const VectorXd& x, double y) {
    switch (kind_) {
    case ModelKind::Rls: state_ = baselines::rls_update(std::move(state_), x, y, cfg_.rls_forgetting); break;
    case ModelKind::Pa:
        state_ = baselines::pa_update(std::move(state_), x, y, cfg_.aggressiveness, cfg_.epsilon, cfg_.pa_variant,
                                      cfg_.pa_norm_includes_bias);
        break;
    default: state_ = baselines::lms_update(std::move(state_), x, y, cfg_.learning_rate); break;
    }
}

void PointwiseRegressor::observe_batch(const MatrixXd& X, const VectorXd& y) {
    check_input(dims(), X, y);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        VectorXd x = X.row(r).transpose();
        step(x, y(r));
        if (cfg_.replay) {
            xs_.push_back(std::move(x));
            ys_.push_back(y(r));
        }
    }
}

void PointwiseRegressor::finish() {
    if (finished_) return;
    finished_ = true;
    if (!cfg_.replay) return;
    for (std::size_t pass = 1; pass < cfg_.epoch_multiplier; ++pass) {
        for (std::size_t i = 0; i < xs_.size(); ++i) step(xs_[i], ys_[i]);
    }
}

std::string PointwiseRegressor::snapshot() const {
    return state_snapshot(to_string(kind_), state_);
}

// ---------------------------------------------------------------- olr-wa

OlrWaRegressor::OlrWaRegressor(OlrWaConfig cfg, Eigen::Index dims, std::size_t base_count)
    : cfg_(std::move(cfg)), dims_(dims), base_count_(base_count),
      batch_(cfg_.batch_size(static_cast<std::size_t>(dims))) {
    cfg_.validate();
    if (dims < 1) throw Error(ErrorCode::InvalidArgument, "learner needs at least one feature");
    if (base_count_ == 0) throw Error(ErrorCode::InvalidArgument, "base_count must be at least 1");
}

void OlrWaRegressor::drain(bool final) {
    const std::size_t need = state_ ? batch_ : base_count_;
    std::size_t have = pending_x_.size();
    if (have == 0) return;
    if (have < need) {
        if (!final) return;
        if (state_ && have < static_cast<std::size_t>(dims_) + 1) {
            pending_x_.clear();
            pending_y_.clear();
            return;
        }
    }
    const std::size_t take = std::min(have, need);
    MatrixXd X = stack(pending_x_, 0, take, dims_);
    VectorXd y = stack(pending_y_, 0, take);
    if (!state_) {
        state_ = init_base(X, y, cfg_);
    } else {
        update(*state_, MiniBatch{std::move(X), std::move(y)}, cfg_);
    }
    pending_x_.erase(pending_x_.begin(), pending_x_.begin() + static_cast<std::ptrdiff_t>(take));
    pending_y_.erase(pending_y_.begin(), pending_y_.begin() + static_cast<std::ptrdiff_t>(take));
}

void OlrWaRegressor::observe_batch(const MatrixXd& X, const VectorXd& y) {
    check_input(dims_, X, y);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        pending_x_.emplace_back(X.row(r).transpose());
        pending_y_.push_back(y(r));
        drain(false);
    }
}

void OlrWaRegressor::finish() {
    drain(true);
    drain(true);
}

VectorXd OlrWaRegressor::predict(const MatrixXd& X) const {
    if (!state_) {
        if (X.cols() != dims_) throw Error(ErrorCode::DimensionMismatch, "predict: column count mismatch");
        return VectorXd::Zero(X.rows());
    }
    return olrwa::predict(*state_, X);
}

std::string OlrWaRegressor::snapshot() const {
    if (!state_) return "format=olrwa-state-v1\ninitialized=0\n";
    return serialize(*state_);
}

} // namespace olrwa
