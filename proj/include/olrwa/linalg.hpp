#pragma once

#include <variant>

#include <Eigen/Dense>

#include "olrwa/error.hpp"

namespace olrwa::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Tolerances for the degenerate-geometry tests.
inline constexpr double kParallelTol = 1e-9;  // on 1 - |cos(angle)|
inline constexpr double kCoincideTol = 1e-9;  // plane-equation residual
inline constexpr double kVerticalTol = 1e-9;  // |target component of normal|
inline constexpr double kZeroNormalTol = 1e-15;
inline constexpr double kDegenerateAverageTol = 1e-12;

/// Regression coefficients: y = weights . x + intercept.
struct LinearModel {
    VectorXd weights;
    double intercept = 0.0;

    Eigen::Index dims() const noexcept { return weights.size(); }
    double predict(const VectorXd& x) const { return weights.dot(x) + intercept; }
    VectorXd predict(const MatrixXd& X) const;
};

/// Hyperplane normal . z + offset = 0 in (features, target) space. The
/// normal is unit length and its target component is non-positive.
struct AugmentedHyperplane {
    VectorXd normal;
    double offset = 0.0;

    Eigen::Index dims() const noexcept { return normal.size() - 1; }
    /// Signed residual normal . z + offset.
    double residual(const VectorXd& z) const { return normal.dot(z) + offset; }
};

/// A point in (features, target) space.
struct Point {
    VectorXd coords;
};

struct Parallel {};
struct Coincident {};

using Intersection = std::variant<Point, Parallel, Coincident>;

/// Minimum-norm least-squares fit of [X | 1] (w, b) ~= y. Rank-deficient
/// systems (including K < M + 1) get the minimum-norm solution.
LinearModel pinv_fit(const MatrixXd& X, const VectorXd& y);

AugmentedHyperplane model_to_hyperplane(const LinearModel& m);

/// Throws VerticalHyperplane when the target component of the normal is too
/// small for the plane to be a function of the features.
LinearModel hyperplane_to_model(const AugmentedHyperplane& h);

/// Normalizes and flips the normal so that its target component is <= 0.
AugmentedHyperplane canonicalize(VectorXd normal, double offset);

bool normals_parallel(const VectorXd& n1, const VectorXd& n2);

Intersection intersection_point(const AugmentedHyperplane& h1, const AugmentedHyperplane& h2);

/// Plane through p orthogonal to normal. Throws ZeroNormal.
AugmentedHyperplane define_hyperplane(const VectorXd& normal, const Point& p);

/// (w_base v_base + w_inc v_inc) / (w_base + w_inc), not renormalized.
/// Throws DegenerateAverage when the result vanishes.
VectorXd weighted_average_vector(const VectorXd& v_base, const VectorXd& v_inc, double w_base,
                                 double w_inc);

double mse(const LinearModel& m, const MatrixXd& X, const VectorXd& y);
double mse(const AugmentedHyperplane& h, const MatrixXd& X, const VectorXd& y);

/// Angle in radians between two normals, ignoring orientation.
double normal_angle(const VectorXd& n1, const VectorXd& n2);

void require_finite(const MatrixXd& m, const char* what);
void require_finite(const VectorXd& v, const char* what);

} // namespace olrwa::linalg
