#pragma once

// GFD derivative weights. For a star around z_0, the five estimates
// (d/dx, d/dy, d2/dx2, d2/dy2, d2/dxdy) minimize the weighted Taylor
// residual
//
//   B(D) = sum_i w_i^2 (c_i . D - (U_i - U_0))^2,
//   c_i  = (h_i, k_i, h_i^2/2, k_i^2/2, h_i k_i),
//
// whose normal equations A D = b, A = sum_i w_i^2 c_i^T c_i, are solved via
// a Cholesky factorization. Writing D_r = -lambda_0r U_0 + sum_i lambda_ir U_i
// gives the finite-difference weights
//
//   lambda_ir = w_i^2 (A^-1 c_i)_r,   lambda_0r = sum_i lambda_ir,
//
// and the Laplacian combination lambda_i0 = lambda_i3 + lambda_i4,
// lambda_00 = lambda_03 + lambda_04.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <span>
#include <vector>

#include "gfd/errors.hpp"
#include "gfd/stars.hpp"

namespace gfd {

using Vector5 = Eigen::Matrix<double, 5, 1>;
using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Inverse-distance weights w_i = ||z_0 - z_i||^-alpha. The default alpha = 2
/// gives w_i = 1/(h_i^2 + k_i^2), the choice used in the reference
/// experiments.
struct WeightScheme {
    double alpha = 2.0;

    WeightScheme() = default;
    explicit WeightScheme(double a) : alpha(a) {
        if (!(alpha > 0.0)) throw Error("weight exponent alpha must be positive");
    }

    double weight(double h, double k) const {
        return std::pow(h * h + k * k, -alpha / 2.0);
    }
    double squared_weight(double h, double k) const {
        return std::pow(h * h + k * k, -alpha);
    }
};

/// Second-order Taylor coefficient vector c = (h, k, h^2/2, k^2/2, h*k).
inline Vector5 taylor_row(double h, double k) {
    Vector5 c;
    c << h, k, 0.5 * h * h, 0.5 * k * k, h * k;
    return c;
}

/// A = sum_i w_i^2 c_i^T c_i; symmetric, positive definite for
/// non-degenerate star geometry.
inline Matrix5 assemble_normal_matrix(const Star& star, const WeightScheme& weights) {
    Matrix5 a = Matrix5::Zero();
    for (const auto& off : star.offsets) {
        const Vector5 c = taylor_row(off[0], off[1]);
        a += weights.squared_weight(off[0], off[1]) * (c * c.transpose());
    }
    return a;
}

/// The five weight vectors of one node, plus the Laplacian combination and a
/// condition estimate of the normal matrix. Immutable once computed.
struct StencilRow {
    int center = -1;
    std::vector<int> neighbors;                           // star node indices
    Eigen::Matrix<double, Eigen::Dynamic, 5> lambda;      // lambda(i, r)
    Vector5 lambda_center = Vector5::Zero();              // lambda_0r = sum_i lambda_ir
    Eigen::VectorXd lambda_laplacian;                     // lambda_i0
    double lambda_laplacian_center = 0.0;                 // lambda_00
    double condition_estimate = 0.0;

    int size() const { return static_cast<int>(neighbors.size()); }
};

inline StencilRow compute_stencil(const Star& star, const WeightScheme& weights,
                                  double condition_limit = 1e12) {
    const Matrix5 a = assemble_normal_matrix(star, weights);
    Eigen::LLT<Matrix5> llt(a);
    if (llt.info() != Eigen::Success)
        throw DegenerateStarError("normal matrix is not positive definite", star.center);
    const Matrix5 a_inv = llt.solve(Matrix5::Identity());
    const double cond = a.cwiseAbs().rowwise().sum().maxCoeff() *
                        a_inv.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(cond < condition_limit))
        throw DegenerateStarError("normal matrix condition estimate " + std::to_string(cond) +
                                      " exceeds limit",
                                  star.center);

    StencilRow row;
    row.center = star.center;
    row.neighbors = star.neighbors;
    row.condition_estimate = cond;
    const int s = star.size();
    row.lambda.resize(s, 5);
    row.lambda_laplacian.resize(s);
    for (int i = 0; i < s; ++i) {
        const auto& off = star.offsets[static_cast<std::size_t>(i)];
        const Vector5 lam = weights.squared_weight(off[0], off[1]) *
                            (a_inv * taylor_row(off[0], off[1]));
        row.lambda.row(i) = lam.transpose();
        row.lambda_center += lam;
        row.lambda_laplacian(i) = row.lambda(i, 2) + row.lambda(i, 3);
    }
    row.lambda_laplacian_center = row.lambda_center(2) + row.lambda_center(3);
    return row;
}

/// Derivative estimates from field samples; values[0] is the center sample,
/// values[1..s] follow the star's neighbor order. Evaluated in difference
/// form sum_i lambda_ir (U_i - U_0), which equals -lambda_0r U_0 +
/// sum_i lambda_ir U_i and is exactly zero on constant fields.
inline Vector5 apply_stencil(const StencilRow& row, std::span<const double> values) {
    if (static_cast<int>(values.size()) != row.size() + 1)
        throw Error("apply_stencil: expected " + std::to_string(row.size() + 1) +
                    " values, got " + std::to_string(values.size()));
    Vector5 est = Vector5::Zero();
    for (int i = 0; i < row.size(); ++i)
        est += (values[static_cast<std::size_t>(i) + 1] - values[0]) *
               row.lambda.row(i).transpose();
    return est;
}

inline std::vector<StencilRow> compute_all_stencils(const std::vector<Star>& stars,
                                                    const WeightScheme& weights,
                                                    double condition_limit = 1e12) {
    std::vector<StencilRow> rows;
    rows.reserve(stars.size());
    for (const Star& star : stars) rows.push_back(compute_stencil(star, weights, condition_limit));
    return rows;
}

/// Debug dump: `center,neighbor,lam1,lam2,lam3,lam4,lam5`, one line per
/// (center, neighbor) pair.
inline void write_stencil_csv(std::ostream& out, const std::vector<StencilRow>& rows) {
    out << "center,neighbor,lam1,lam2,lam3,lam4,lam5\n";
    char buf[32];
    for (const StencilRow& row : rows) {
        for (int i = 0; i < row.size(); ++i) {
            out << row.center << ',' << row.neighbors[static_cast<std::size_t>(i)];
            for (int r = 0; r < 5; ++r) {
                std::snprintf(buf, sizeof buf, "%.17g", row.lambda(i, r));
                out << ',' << buf;
            }
            out << '\n';
        }
    }
}

}  // namespace gfd
