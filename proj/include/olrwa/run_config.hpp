#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "olrwa/datagen.hpp"
#include "olrwa/evaluation.hpp"
#include "olrwa/ingestion.hpp"
#include "olrwa/regressor.hpp"

namespace olrwa {

struct CsvSource {
    std::filesystem::path path;
    ingestion::CsvSchema schema;
};

struct RunConfig {
    std::optional<DatasetSpec> generator;
    std::optional<CsvSource> csv;
    std::vector<ModelSpec> models;
    evaluation::Protocol protocol;
    std::size_t checkpoint_step = 10;
    /// Training points per learning curve; 0 uses the whole training fold.
    std::size_t curve_limit = 0;
    std::filesystem::path output_dir = "out";

    void validate() const;
};

/// Parses a JSON dataset spec. Unknown keys and bad values throw
/// InvalidConfig naming the field.
DatasetSpec parse_dataset_spec(const std::string& text);
DatasetSpec load_dataset_spec(const std::filesystem::path& path);

/// Parses a run config. Relative paths are resolved against base_dir.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Materializes the configured dataset.
Dataset load_dataset(const RunConfig& config);

std::string read_text_file(const std::filesystem::path& path);

} // namespace olrwa
