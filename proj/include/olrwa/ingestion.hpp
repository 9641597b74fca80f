#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "olrwa/datagen.hpp"

namespace olrwa::ingestion {

struct CsvSchema {
    /// Column name, or a zero-based index written as digits. Empty selects
    /// the last column.
    std::string target_column;
    std::vector<std::string> categorical_columns;
    bool has_header = true;

    void validate() const;
};

/// Raw cells in file order. Files without a header get columns named
/// "0", "1", ...
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based file line of each row, for error messages.
    std::vector<std::size_t> lines;

    std::size_t find_column(const std::string& key) const;
};

Table read_table(const std::filesystem::path& path, bool has_header);

struct CategoryMapping {
    std::string column;
    std::vector<std::string> categories;  // sorted; indicator i <-> categories[i]
    std::size_t first_output_column = 0;
};

struct OneHotResult {
    Table table;
    std::vector<CategoryMapping> mapping;
};

/// Replaces each named column by one indicator column per distinct value,
/// ordered by value, in the position of the original column.
OneHotResult one_hot(const Table& table, const std::vector<std::string>& columns);

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Header x1..xM,y (or the dataset's names); shortest round-trip floats.
void write_csv(const std::filesystem::path& path, const Dataset& data);

struct StandardizationParams {
    VectorXd mean;
    VectorXd std_dev;
    std::vector<bool> constant;

    bool any_constant() const;
};

/// Population mean/std per feature column; fit on whatever rows it is given.
StandardizationParams fit_standardization(const MatrixXd& X);
MatrixXd apply_standardization(const StandardizationParams& params, const MatrixXd& X);

struct Standardized {
    Dataset data;
    StandardizationParams params;
};

/// Zero mean and unit population std per feature; constant columns pass
/// through unchanged and are flagged.
Standardized standardize(const Dataset& data);

} // namespace olrwa::ingestion
