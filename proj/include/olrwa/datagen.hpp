#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>
#include <utility>

#include <Eigen/Dense>

namespace olrwa {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Scenario { Normal, TimeDrift, ConfidenceDrift, Convergence };

std::string_view to_string(Scenario s) noexcept;
std::optional<Scenario> parse_scenario(std::string_view s) noexcept;
bool is_drift(Scenario s) noexcept;

struct DatasetSpec {
    std::size_t n_points = 1000;
    std::size_t n_dims = 3;
    double noise_std = 10.0;
    Scenario scenario = Scenario::Normal;
    double drift_fraction = 0.5;
    std::uint64_t seed = 0;
    std::pair<double, double> feature_range{-10.0, 10.0};
    std::pair<double, double> weight_range{-5.0, 5.0};

    /// Throws InvalidConfig naming the offending field.
    void validate() const;
};

struct Dataset {
    MatrixXd X;
    VectorXd y;
    VectorXd true_weights_pre;
    double true_intercept_pre = 0.0;
    std::optional<VectorXd> true_weights_post;
    std::optional<double> true_intercept_post;
    std::optional<std::size_t> drift_index;
    /// Column names; empty means x1..xM and y.
    std::vector<std::string> feature_names;
    std::string target_name;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(X.rows()); }
    std::size_t dims() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

/// Stationary linear data (Normal and Convergence scenarios).
Dataset gen_linear(const DatasetSpec& spec);

/// Rows from drift_index on follow the negated model (-w, -b).
Dataset gen_drift(const DatasetSpec& spec);

/// Dispatches on the scenario.
Dataset generate(const DatasetSpec& spec);

} // namespace olrwa
