#include "olrwa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace olrwa::linalg {

void require_finite(const MatrixXd& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorCode::NonFinite, std::string(what) + " contains non-finite values");
    }
}

void require_finite(const VectorXd& v, const char* what) {
    if (!v.allFinite()) {
        throw Error(ErrorCode::NonFinite, std::string(what) + " contains non-finite values");
    }
}

VectorXd LinearModel::predict(const MatrixXd& X) const {
    if (X.cols() != weights.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "predict: X has " + std::to_string(X.cols()) + " columns, model has " +
                        std::to_string(weights.size()) + " weights");
    }
    return (X * weights).array() + intercept;
}

LinearModel pinv_fit(const MatrixXd& X, const VectorXd& y) {
    if (X.rows() < 1 || X.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "pinv_fit: need at least one row and one feature");
    }
    if (X.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "pinv_fit: X has " + std::to_string(X.rows()) + " rows, y has " +
                        std::to_string(y.size()));
    }
    require_finite(X, "pinv_fit: X");
    require_finite(y, "pinv_fit: y");

    const Eigen::Index m = X.cols();
    MatrixXd A(X.rows(), m + 1);
    A.leftCols(m) = X;
    A.col(m).setOnes();

    // Complete orthogonal decomposition gives the minimum-norm solution for
    // rank-deficient systems without forming A^T A.
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(A);
    const VectorXd theta = cod.solve(y);
    return LinearModel{theta.head(m), theta(m)};
}

AugmentedHyperplane canonicalize(VectorXd normal, double offset) {
    const double norm = normal.norm();
    if (!(norm > kZeroNormalTol)) {
        throw Error(ErrorCode::ZeroNormal, "hyperplane normal has zero length");
    }
    normal /= norm;
    offset /= norm;
    if (normal(normal.size() - 1) > 0.0) {
        normal = -normal;
        offset = -offset;
    }
    return AugmentedHyperplane{std::move(normal), offset};
}

AugmentedHyperplane model_to_hyperplane(const LinearModel& m) {
    require_finite(m.weights, "model weights");
    if (!std::isfinite(m.intercept)) {
        throw Error(ErrorCode::NonFinite, "model intercept is not finite");
    }
    VectorXd normal(m.dims() + 1);
    normal.head(m.dims()) = m.weights;
    normal(m.dims()) = -1.0;
    return canonicalize(std::move(normal), m.intercept);
}

LinearModel hyperplane_to_model(const AugmentedHyperplane& h) {
    const Eigen::Index m = h.dims();
    const double target = h.normal(m);
    if (std::abs(target) <= kVerticalTol) {
        throw Error(ErrorCode::VerticalHyperplane,
                    "hyperplane is vertical along the target axis (n_target = " +
                        std::to_string(target) + ")");
    }
    return LinearModel{-h.normal.head(m) / target, -h.offset / target};
}

bool normals_parallel(const VectorXd& n1, const VectorXd& n2) {
    const double cosine = n1.dot(n2) / (n1.norm() * n2.norm());
    return 1.0 - std::abs(cosine) < kParallelTol;
}

Intersection intersection_point(const AugmentedHyperplane& h1, const AugmentedHyperplane& h2) {
    if (h1.normal.size() != h2.normal.size()) {
        throw Error(ErrorCode::DimensionMismatch, "intersection_point: dimension mismatch");
    }
    if (normals_parallel(h1.normal, h2.normal)) {
        // Foot point of h1 tested against h2.
        const VectorXd foot = -h1.offset * h1.normal;
        const double scale = std::max({1.0, std::abs(h1.offset), std::abs(h2.offset)});
        if (std::abs(h2.residual(foot)) <= kCoincideTol * scale) {
            return Coincident{};
        }
        return Parallel{};
    }

    // Minimum-norm solution of the 2 x (M+1) system A z = -d:
    // z = A^T (A A^T)^{-1} (-d). The Gram matrix is 2x2 and well conditioned
    // once the normals are known not to be parallel.
    MatrixXd A(2, h1.normal.size());
    A.row(0) = h1.normal.transpose();
    A.row(1) = h2.normal.transpose();
    const Eigen::Vector2d rhs(-h1.offset, -h2.offset);
    const Eigen::Matrix2d gram = A * A.transpose();
    const Eigen::Vector2d lambda = gram.ldlt().solve(rhs);
    VectorXd z = A.transpose() * lambda;
    // One refinement step pulls the residual back toward rounding level when
    // the planes are close to parallel.
    const Eigen::Vector2d r = rhs - A * z;
    z += A.transpose() * gram.ldlt().solve(r);
    return Point{std::move(z)};
}

AugmentedHyperplane define_hyperplane(const VectorXd& normal, const Point& p) {
    if (normal.size() != p.coords.size()) {
        throw Error(ErrorCode::DimensionMismatch, "define_hyperplane: normal and point differ in size");
    }
    const double norm = normal.norm();
    if (!(norm > kZeroNormalTol)) {
        throw Error(ErrorCode::ZeroNormal, "define_hyperplane: zero normal");
    }
    VectorXd unit = normal / norm;
    const double offset = -unit.dot(p.coords);
    if (unit(unit.size() - 1) > 0.0) {
        return AugmentedHyperplane{-unit, -offset};
    }
    return AugmentedHyperplane{std::move(unit), offset};
}

VectorXd weighted_average_vector(const VectorXd& v_base, const VectorXd& v_inc, double w_base,
                                 double w_inc) {
    if (v_base.size() != v_inc.size()) {
        throw Error(ErrorCode::DimensionMismatch, "weighted_average_vector: size mismatch");
    }
    if (!(w_base > 0.0) || !(w_inc > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "weighted_average_vector: weights must be positive");
    }
    // Normalize the pair first so that exact rescalings of (w_base, w_inc)
    // produce bit-identical results.
    const double total = w_base + w_inc;
    const double a = w_base / total;
    const double b = w_inc / total;
    VectorXd avg = a * v_base + b * v_inc;
    if (avg.norm() <= kDegenerateAverageTol) {
        throw Error(ErrorCode::DegenerateAverage, "weighted average of normals vanishes");
    }
    return avg;
}

double mse(const LinearModel& m, const MatrixXd& X, const VectorXd& y) {
    if (X.rows() < 1) {
        throw Error(ErrorCode::InvalidArgument, "mse: empty sample");
    }
    if (X.rows() != y.size()) {
        throw Error(ErrorCode::DimensionMismatch, "mse: X rows and y length differ");
    }
    return (y - m.predict(X)).squaredNorm() / static_cast<double>(y.size());
}

double mse(const AugmentedHyperplane& h, const MatrixXd& X, const VectorXd& y) {
    return mse(hyperplane_to_model(h), X, y);
}

double normal_angle(const VectorXd& n1, const VectorXd& n2) {
    const VectorXd u1 = n1.normalized();
    VectorXd u2 = n2.normalized();
    if (u1.dot(u2) < 0.0) {
        u2 = -u2;
    }
    // Chord form stays accurate for small angles where acos does not.
    return 2.0 * std::asin(std::min(1.0, (u1 - u2).norm() / 2.0));
}

} // namespace olrwa::linalg
