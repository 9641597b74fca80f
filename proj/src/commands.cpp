#include "olrwa/commands.hpp"

#include <exception>
#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "olrwa/datagen.hpp"
#include "olrwa/evaluation.hpp"
#include "olrwa/ingestion.hpp"
#include "olrwa/report.hpp"
#include "olrwa/run_config.hpp"

namespace olrwa::cli {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
int guarded(std::ostream& err, Fn fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return IoError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return RuntimeError;
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<double> to_vec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

evaluation::BenchmarkReport run_config(const RunConfig& cfg, const fs::path& config_path) {
    const Dataset data = load_dataset(cfg);
    evaluation::BenchmarkReport rep = evaluation::run_benchmark(cfg.models, data, cfg.protocol);
    ensure_dir(cfg.output_dir);
    report::write_text(cfg.output_dir / "runs.csv", report::runs_csv(rep));
    report::write_text(cfg.output_dir / "summary.csv", report::summary_csv(rep));
    report::write_text(cfg.output_dir / "timings.csv", report::timings_csv(rep));
    report::write_text(cfg.output_dir / "report.txt", report::render_report(config_path.filename().string(), rep));
    return rep;
}

} // namespace

ExitCode exit_code_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownColumn: return ConfigError;
    case ErrorCode::MissingFile:
    case ErrorCode::Io:
    case ErrorCode::ParseError:
    case ErrorCode::NonNumericValue:
    case ErrorCode::EmptyData: return IoError;
    default: return RuntimeError;
    }
}

int cmd_generate(const fs::path& spec_path, const fs::path& out_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const DatasetSpec spec = load_dataset_spec(spec_path);
        const Dataset data = generate(spec);
        if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
        ingestion::write_csv(out_path, data);

        nlohmann::json meta;
        meta["seed"] = spec.seed;
        meta["scenario"] = std::string(to_string(spec.scenario));
        meta["n_points"] = spec.n_points;
        meta["n_dims"] = spec.n_dims;
        meta["noise_std"] = spec.noise_std;
        meta["true_weights"] = to_vec(data.true_weights_pre);
        meta["true_intercept"] = data.true_intercept_pre;
        if (data.drift_index) {
            meta["drift_index"] = *data.drift_index;
            meta["true_weights_post"] = to_vec(*data.true_weights_post);
            meta["true_intercept_post"] = *data.true_intercept_post;
        } else {
            meta["drift_index"] = nullptr;
        }
        fs::path meta_path = out_path;
        meta_path += ".meta.json";
        report::write_text(meta_path, meta.dump(2) + "\n");
        out << "wrote " << data.rows() << " rows to " << out_path.string() << '\n';
        return static_cast<int>(Ok);
    });
}

int cmd_run(const fs::path& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_run_config(config_path);
        const auto rep = run_config(cfg, config_path);
        out << report::render_report(config_path.filename().string(), rep);
        return static_cast<int>(Ok);
    });
}

int cmd_curve(const fs::path& config_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_run_config(config_path);
        const Dataset data = load_dataset(cfg);
        const auto curves =
            evaluation::curve_benchmark(cfg.models, data, cfg.protocol, cfg.checkpoint_step, cfg.curve_limit);
        ensure_dir(cfg.output_dir);
        for (std::size_t m = 0; m < cfg.models.size(); ++m) {
            const fs::path path = cfg.output_dir / ("curve_" + cfg.models[m].name + ".csv");
            report::write_text(path, report::curve_csv(curves[m]));
            const auto& last = curves[m].back();
            out << cfg.models[m].name << ": " << curves[m].size() << " checkpoints, first r2 "
                << report::format_r2(curves[m].front().r2) << ", final r2 " << report::format_r2(last.r2) << " -> "
                << path.string() << '\n';
        }
        return static_cast<int>(Ok);
    });
}

int cmd_compare(const std::vector<fs::path>& config_paths, const std::optional<fs::path>& merged_path,
                std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (config_paths.empty()) throw Error(ErrorCode::InvalidConfig, "compare needs at least one config");
        std::vector<report::TableRow> rows;
        for (const fs::path& path : config_paths) {
            const RunConfig cfg = load_run_config(path);
            const auto rep = run_config(cfg, path);
            for (const auto& s : rep.summary) rows.push_back({path.stem().string() + "/" + s.model, s});
        }
        const std::string table = report::render_table(rows) + "\nN/A: R-squared <= 0\n";
        if (merged_path) report::write_text(*merged_path, table);
        out << table;
        return static_cast<int>(Ok);
    });
}

} // namespace olrwa::cli
