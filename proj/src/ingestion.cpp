#include "olrwa/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "olrwa/error.hpp"
#include "olrwa/text_format.hpp"

namespace olrwa::ingestion {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    for (std::string_view f : text::split(line, ',')) out.push_back(trim(f));
    return out;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

} // namespace

void CsvSchema::validate() const {
    if (!target_column.empty() &&
        std::find(categorical_columns.begin(), categorical_columns.end(), target_column) != categorical_columns.end()) {
        throw Error(ErrorCode::InvalidConfig, "target column '" + target_column + "' is also listed as categorical");
    }
}

std::size_t Table::find_column(const std::string& key) const {
    auto it = std::find(header.begin(), header.end(), key);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    if (!key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        const std::size_t idx = std::stoul(key);
        if (idx < header.size()) return idx;
    }
    throw Error(ErrorCode::UnknownColumn, "no column named '" + key + "'");
}

Table read_table(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    }
    Table table;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (is_blank(line)) continue;
        std::vector<std::string> fields = split_fields(line);
        if (header_pending) {
            table.header = std::move(fields);
            width = table.header.size();
            header_pending = false;
            continue;
        }
        if (width == 0) {
            width = fields.size();
            for (std::size_t i = 0; i < width; ++i) table.header.push_back(std::to_string(i));
        }
        if (fields.size() != width) {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                                   std::to_string(width) + " fields, found " +
                                                   std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        table.lines.push_back(line_no);
    }
    if (table.rows.empty()) {
        throw Error(ErrorCode::EmptyData, path.string() + ": no data rows");
    }
    return table;
}

OneHotResult one_hot(const Table& table, const std::vector<std::string>& columns) {
    std::map<std::size_t, std::string> selected;
    for (const std::string& name : columns) selected.emplace(table.find_column(name), name);

    OneHotResult result;
    if (selected.empty()) {
        result.table = table;
        return result;
    }

    std::map<std::size_t, std::vector<std::string>> categories;
    for (const auto& [col, name] : selected) {
        std::set<std::string> values;
        for (const auto& row : table.rows) values.insert(row[col]);
        categories[col] = {values.begin(), values.end()};
    }

    Table& out = result.table;
    out.lines = table.lines;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        auto it = categories.find(c);
        if (it == categories.end()) {
            out.header.push_back(table.header[c]);
            continue;
        }
        result.mapping.push_back({table.header[c], it->second, out.header.size()});
        for (const std::string& value : it->second) out.header.push_back(table.header[c] + "=" + value);
    }
    out.rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        std::vector<std::string> expanded;
        expanded.reserve(out.header.size());
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto it = categories.find(c);
            if (it == categories.end()) {
                expanded.push_back(row[c]);
                continue;
            }
            for (const std::string& value : it->second) expanded.push_back(row[c] == value ? "1" : "0");
        }
        out.rows.push_back(std::move(expanded));
    }
    return result;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    schema.validate();
    const Table raw = read_table(path, schema.has_header);
    const std::size_t target_raw =
        schema.target_column.empty() ? raw.header.size() - 1 : raw.find_column(schema.target_column);
    for (const std::string& c : schema.categorical_columns) {
        if (raw.find_column(c) == target_raw) {
            throw Error(ErrorCode::InvalidConfig, "target column cannot be categorical");
        }
    }
    const std::string target_name = raw.header[target_raw];
    const OneHotResult encoded = one_hot(raw, schema.categorical_columns);
    const Table& table = encoded.table;
    const std::size_t target = table.find_column(target_name);
    if (table.header.size() < 2) {
        throw Error(ErrorCode::ParseError, path.string() + ": need at least one feature column and a target");
    }

    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto m = static_cast<Eigen::Index>(table.header.size() - 1);
    Dataset data;
    data.X.resize(n, m);
    data.y.resize(n);
    data.target_name = target_name;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c != target) data.feature_names.push_back(table.header[c]);
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = table.rows[static_cast<std::size_t>(r)];
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto value = text::parse_double(row[c]);
            if (!value || !std::isfinite(*value)) {
                throw Error(ErrorCode::NonNumericValue,
                            path.string() + ":" + std::to_string(table.lines[static_cast<std::size_t>(r)]) +
                                ": column '" + table.header[c] + "' holds '" + row[c] + "'");
            }
            if (c == target) {
                data.y(r) = *value;
            } else {
                data.X(r, out_col++) = *value;
            }
        }
    }
    data.true_weights_pre = VectorXd::Zero(m);
    return data;
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    const auto m = data.X.cols();
    for (Eigen::Index j = 0; j < m; ++j) {
        if (static_cast<std::size_t>(j) < data.feature_names.size()) {
            out << data.feature_names[static_cast<std::size_t>(j)];
        } else {
            out << 'x' << (j + 1);
        }
        out << ',';
    }
    out << (data.target_name.empty() ? "y" : data.target_name) << '\n';
    for (Eigen::Index r = 0; r < data.X.rows(); ++r) {
        for (Eigen::Index j = 0; j < m; ++j) out << text::format_double(data.X(r, j)) << ',';
        out << text::format_double(data.y(r)) << '\n';
    }
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

bool StandardizationParams::any_constant() const {
    return std::find(constant.begin(), constant.end(), true) != constant.end();
}

StandardizationParams fit_standardization(const MatrixXd& X) {
    if (X.rows() < 1) throw Error(ErrorCode::InvalidArgument, "standardize: no rows");
    StandardizationParams p;
    const double n = static_cast<double>(X.rows());
    p.mean = X.colwise().mean().transpose();
    p.std_dev.resize(X.cols());
    p.constant.assign(static_cast<std::size_t>(X.cols()), false);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - p.mean(j)).square().sum() / n;
        p.std_dev(j) = std::sqrt(var);
        const bool flat = X.col(j).maxCoeff() == X.col(j).minCoeff() || p.std_dev(j) == 0.0;
        p.constant[static_cast<std::size_t>(j)] = flat;
    }
    return p;
}

MatrixXd apply_standardization(const StandardizationParams& params, const MatrixXd& X) {
    if (X.cols() != params.mean.size()) {
        throw Error(ErrorCode::DimensionMismatch, "standardization parameters do not match column count");
    }
    MatrixXd out = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (params.constant[static_cast<std::size_t>(j)]) continue;
        out.col(j) = (X.col(j).array() - params.mean(j)) / params.std_dev(j);
    }
    return out;
}

Standardized standardize(const Dataset& data) {
    Standardized s;
    s.params = fit_standardization(data.X);
    s.data = data;
    s.data.X = apply_standardization(s.params, data.X);
    return s;
}

} // namespace olrwa::ingestion
