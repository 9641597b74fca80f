#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "olrwa/evaluation.hpp"

namespace olrwa::report {

/// model,seed,fold,r2_final,mse with shortest round-trip floats. Runtimes
/// live in a separate file so this one is byte-deterministic.
std::string runs_csv(const evaluation::BenchmarkReport& report);
std::string summary_csv(const evaluation::BenchmarkReport& report);
std::string timings_csv(const evaluation::BenchmarkReport& report);
std::string curve_csv(const std::vector<evaluation::EvalRecord>& records);

/// "N/A" for R² <= 0, otherwise five decimals.
std::string format_r2(double r2);

struct TableRow {
    std::string label;
    evaluation::ModelSummary summary;
};

/// Fixed-width table of mean/std R² and mean MSE.
std::string render_table(const std::vector<TableRow>& rows);

/// Table plus hyperparameter echo.
std::string render_report(const std::string& title, const evaluation::BenchmarkReport& report);

std::vector<evaluation::RunResult> parse_runs_csv(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& content);

} // namespace olrwa::report
