#include "olrwa/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "olrwa/error.hpp"

namespace olrwa {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, field + ": " + why);
}

// Typed access to one JSON object that rejects unknown keys.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) bad(path_.empty() ? "config" : path_, "must be an object");
    }

    const std::string& path() const { return path_; }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const {
        seen_.insert(key);
        return node_.contains(key);
    }
    const json& at(const std::string& key) const {
        seen_.insert(key);
        return node_.at(key);
    }

    double number(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number()) bad(field(key), "must be a number");
        return v.get<double>();
    }

    std::size_t count(const std::string& key, std::size_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) bad(field(key), "must be a non-negative integer");
        return v.get<std::size_t>();
    }

    std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        return as_seed(at(key), field(key));
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_boolean()) bad(field(key), "must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_string()) bad(field(key), "must be a string");
        return v.get<std::string>();
    }

    std::pair<double, double> range(const std::string& key, std::pair<double, double> fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            bad(field(key), "must be a [low, high] pair of numbers");
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!seen_.count(it.key())) bad(field(it.key()), "unknown key");
        }
    }

    static std::uint64_t as_seed(const json& v, const std::string& where) {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
            bad(where, "must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

private:
    const json& node_;
    std::string path_;
    mutable std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
    }
}

DatasetSpec dataset_spec_from(const Section& s) {
    DatasetSpec spec;
    spec.n_points = s.count("n_points", spec.n_points);
    spec.n_dims = s.count("n_dims", spec.n_dims);
    spec.noise_std = s.number("noise_std", spec.noise_std);
    const std::string scenario = s.string("scenario", std::string(to_string(spec.scenario)));
    auto parsed = parse_scenario(scenario);
    if (!parsed) bad(s.field("scenario"), "unknown scenario '" + scenario + "'");
    spec.scenario = *parsed;
    spec.drift_fraction = s.number("drift_fraction", spec.drift_fraction);
    spec.seed = s.seed("seed", spec.seed);
    spec.feature_range = s.range("feature_range", spec.feature_range);
    spec.weight_range = s.range("weight_range", spec.weight_range);
    s.finish();
    spec.validate();
    return spec;
}

WeightScheme weights_from(const Section& s) {
    const std::string mode_name = s.string("mode", "equal");
    auto mode = parse_weight_mode(mode_name);
    if (!mode) bad(s.field("mode"), "unknown weight mode '" + mode_name + "'");
    WeightScheme w;
    switch (*mode) {
    case WeightMode::Equal: w = WeightScheme::equal(); break;
    case WeightMode::Dynamic: w = WeightScheme::dynamic(); break;
    case WeightMode::TimeBased: w = WeightScheme::time_based(); break;
    case WeightMode::ConfidenceBased: w = WeightScheme::confidence_based(); break;
    case WeightMode::Custom: w = WeightScheme::custom(0.5, 0.5); break;
    }
    w.w_base = s.number("w_base", w.w_base);
    w.w_inc = s.number("w_inc", w.w_inc);
    if (*mode == WeightMode::Dynamic && !s.has("w_base")) w.w_base = w.w_inc;
    s.finish();
    try {
        w.validate();
    } catch (const Error& e) {
        bad(s.path(), e.what());
    }
    return w;
}

ModelSpec model_from(const Section& s) {
    ModelSpec m;
    const std::string kind_name = s.string("kind", "");
    if (kind_name.empty()) bad(s.field("kind"), "is required");
    auto kind = parse_model_kind(kind_name);
    if (!kind) bad(s.field("kind"), "unknown model kind '" + kind_name + "'");
    m.kind = *kind;
    m.name = s.string("name", kind_name);

    auto& r = m.regressor;
    if (m.kind == ModelKind::OlrWa) {
        auto& c = m.olr_wa;
        if (s.has("weights")) c.weights = weights_from(Section(s.at("weights"), s.field("weights")));
        c.base_fraction = s.number("base_fraction", c.base_fraction);
        if (s.has("base_count")) c.base_count = s.count("base_count", 0);
        c.user_batch = s.count("user_batch", c.user_batch);
        c.batch_multiplier = s.count("batch_multiplier", c.batch_multiplier);
        c.sample_size_factor = s.count("sample_size_factor", c.sample_size_factor);
        c.rng_seed = s.seed("rng_seed", c.rng_seed);
    } else if (m.kind != ModelKind::Batch) {
        r.learning_rate = s.number("learning_rate", r.learning_rate);
        r.epoch_multiplier = s.count("epoch_multiplier", r.epoch_multiplier);
        r.reg_lambda = s.number("reg_lambda", r.reg_lambda);
        r.batch_size = s.count("batch_size", r.batch_size);
        r.batch_multiplier = s.count("batch_multiplier", r.batch_multiplier);
        r.rls_forgetting = s.number("rls_forgetting", r.rls_forgetting);
        r.rls_delta = s.number("rls_delta", r.rls_delta);
        r.aggressiveness = s.number("aggressiveness", r.aggressiveness);
        r.epsilon = s.number("epsilon", r.epsilon);
        const std::string variant = s.string("pa_variant", std::string(baselines::to_string(r.pa_variant)));
        auto pv = baselines::parse_pa_variant(variant);
        if (!pv) bad(s.field("pa_variant"), "must be I, II or III");
        r.pa_variant = *pv;
        r.pa_norm_includes_bias = s.flag("pa_norm_includes_bias", r.pa_norm_includes_bias);
        r.replay = s.flag("replay", r.replay);
    }
    s.finish();
    try {
        r.validate();
        m.olr_wa.validate();
    } catch (const Error& e) {
        bad(s.path(), e.what());
    }
    return m;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) return base / path;
    return path;
}

} // namespace

void RunConfig::validate() const {
    if (generator.has_value() == csv.has_value()) {
        bad("dataset", "exactly one of 'generator' or 'csv' is required");
    }
    if (models.empty()) bad("models", "at least one model is required");
    std::set<std::string> names;
    for (const ModelSpec& m : models) {
        if (!names.insert(m.name).second) bad("models", "duplicate model name '" + m.name + "'");
    }
    protocol.validate();
    if (checkpoint_step < 1) bad("protocol.checkpoint_step", "must be at least 1");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

DatasetSpec parse_dataset_spec(const std::string& text) {
    const json root = parse_json(text);
    return dataset_spec_from(Section(root, ""));
}

DatasetSpec load_dataset_spec(const std::filesystem::path& path) { return parse_dataset_spec(read_text_file(path)); }

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
    const json root = parse_json(text);
    Section top(root, "");
    RunConfig cfg;

    if (!top.has("dataset")) bad("dataset", "is required");
    Section ds(top.at("dataset"), "dataset");
    if (ds.has("generator")) cfg.generator = dataset_spec_from(Section(ds.at("generator"), "dataset.generator"));
    if (ds.has("csv")) {
        Section c(ds.at("csv"), "dataset.csv");
        CsvSource src;
        const std::string path = c.string("path", "");
        if (path.empty()) bad("dataset.csv.path", "is required");
        src.path = resolve(base_dir, path);
        if (c.has("target_column")) {
            const json& t = c.at("target_column");
            if (t.is_string()) {
                src.schema.target_column = t.get<std::string>();
            } else if (t.is_number_unsigned()) {
                src.schema.target_column = std::to_string(t.get<std::size_t>());
            } else {
                bad("dataset.csv.target_column", "must be a column name or index");
            }
        }
        if (c.has("categorical_columns")) {
            const json& cols = c.at("categorical_columns");
            if (!cols.is_array()) bad("dataset.csv.categorical_columns", "must be a list of column names");
            for (const json& col : cols) {
                if (!col.is_string()) bad("dataset.csv.categorical_columns", "must be a list of column names");
                src.schema.categorical_columns.push_back(col.get<std::string>());
            }
        }
        src.schema.has_header = c.flag("has_header", true);
        c.finish();
        try {
            src.schema.validate();
        } catch (const Error& e) {
            bad("dataset.csv", e.what());
        }
        cfg.csv = std::move(src);
    }
    ds.finish();

    if (!top.has("models")) bad("models", "is required");
    const json& models = top.at("models");
    if (!models.is_array()) bad("models", "must be a list");
    for (std::size_t i = 0; i < models.size(); ++i) {
        cfg.models.push_back(model_from(Section(models[i], "models[" + std::to_string(i) + "]")));
    }

    if (top.has("protocol")) {
        Section p(top.at("protocol"), "protocol");
        if (p.has("seeds")) {
            const json& seeds = p.at("seeds");
            if (!seeds.is_array()) bad("protocol.seeds", "must be a list of integers");
            cfg.protocol.seeds.clear();
            for (const json& s : seeds) cfg.protocol.seeds.push_back(Section::as_seed(s, "protocol.seeds"));
        }
        cfg.protocol.folds = p.count("folds", cfg.protocol.folds);
        const std::string side = p.string("eval_side", std::string(evaluation::to_string(cfg.protocol.eval_side)));
        auto parsed = evaluation::parse_eval_side(side);
        if (!parsed) bad("protocol.eval_side", "must be all, new_trend or old_trend");
        cfg.protocol.eval_side = *parsed;
        cfg.protocol.standardize = p.flag("standardize", cfg.protocol.standardize);
        cfg.protocol.threads = p.count("threads", cfg.protocol.threads);
        cfg.checkpoint_step = p.count("checkpoint_step", cfg.checkpoint_step);
        cfg.curve_limit = p.count("curve_limit", cfg.curve_limit);
        p.finish();
    }

    cfg.output_dir = resolve(base_dir, top.string("output_dir", "out"));
    top.finish();
    try {
        cfg.protocol.validate();
    } catch (const Error& e) {
        bad("protocol", e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_text_file(path), path.parent_path());
}

Dataset load_dataset(const RunConfig& config) {
    if (config.generator) return generate(*config.generator);
    if (config.csv) return ingestion::load_csv(config.csv->path, config.csv->schema);
    throw Error(ErrorCode::InvalidConfig, "dataset: no source configured");
}

} // namespace olrwa
