#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "olrwa/error.hpp"

namespace olrwa::cli {

enum ExitCode : int { Ok = 0, ConfigError = 2, IoError = 3, RuntimeError = 4 };

ExitCode exit_code_for(ErrorCode code) noexcept;

/// Writes the CSV plus <out>.meta.json (true weights, drift index, seed).
int cmd_generate(const std::filesystem::path& spec_path, const std::filesystem::path& out_path, std::ostream& out,
                 std::ostream& err);

/// runs.csv, summary.csv, timings.csv and report.txt in the output directory.
int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

/// curve_<model>.csv per model in the output directory.
int cmd_curve(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

/// cmd_run over every config, then one merged table (also written to
/// merged_path when given).
int cmd_compare(const std::vector<std::filesystem::path>& config_paths,
                const std::optional<std::filesystem::path>& merged_path, std::ostream& out, std::ostream& err);

} // namespace olrwa::cli
