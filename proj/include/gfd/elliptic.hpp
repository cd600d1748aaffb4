#pragma once

// Discrete screened-Poisson system -Lap(v) + v = u with homogeneous Neumann
// boundary, assembled once per cloud/stencil set and factorized once; the
// factorization is reused across time steps since the operator does not
// depend on the step.
//
// Inner row j:    (1 + lambda_00) V_j - sum_i lambda_i0 V_i = U_j
// Boundary row b: n . grad V = 0, written with the GFD gradient weights of a
//                 star centered at b (default), or the first-order pairing
//                 row V_b - V_pair(b) = 0.
//
// The pairing row converges at first order only, which is why the normal-
// derivative row is the default.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <ostream>
#include <vector>

#include "gfd/errors.hpp"
#include "gfd/point_cloud.hpp"
#include "gfd/stars.hpp"
#include "gfd/stencil.hpp"

namespace gfd {

enum class BoundaryRule { NormalStencil, Pairing };

struct EllipticSystem {
    Eigen::SparseMatrix<double> matrix;  // m x m, row j has at most s+1 nonzeros
    std::vector<int> inner_rows;
    std::vector<int> boundary_rows;
    BoundaryRule boundary_rule = BoundaryRule::NormalStencil;
};

/// Builds the m x m system. `stencils` must hold one row per inner node (in
/// inner-node order). The weight scheme is reused for the boundary-node
/// gradient stars; `star_size` defaults to the size of the inner stencils.
inline EllipticSystem assemble_elliptic(const PointCloud& cloud,
                                        const std::vector<StencilRow>& stencils,
                                        const WeightScheme& weights = WeightScheme{},
                                        BoundaryRule rule = BoundaryRule::NormalStencil) {
    const int m = cloud.size();
    if (static_cast<int>(stencils.size()) != cloud.inner_count())
        throw Error("assemble_elliptic: need one stencil per inner node (" +
                    std::to_string(stencils.size()) + " given, " +
                    std::to_string(cloud.inner_count()) + " required)");
    std::vector<Eigen::Triplet<double>> trip;
    const int s = stencils.empty() ? 8 : stencils.front().size();
    trip.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(s + 1));

    EllipticSystem sys;
    sys.boundary_rule = rule;
    for (std::size_t k = 0; k < stencils.size(); ++k) {
        const StencilRow& row = stencils[k];
        const int j = row.center;
        if (!cloud.is_inner(j))
            throw Error("assemble_elliptic: stencil center " + std::to_string(j) +
                        " is not an inner node");
        trip.emplace_back(j, j, 1.0 + row.lambda_laplacian_center);
        for (int i = 0; i < row.size(); ++i)
            trip.emplace_back(j, row.neighbors[static_cast<std::size_t>(i)],
                              -row.lambda_laplacian(i));
        sys.inner_rows.push_back(j);
    }
    for (int b : cloud.boundary_indices()) {
        const Node& node = cloud.node(b);
        if (rule == BoundaryRule::Pairing) {
            trip.emplace_back(b, b, 1.0);
            trip.emplace_back(b, node.paired_inner, -1.0);
        } else {
            const StencilRow row = compute_stencil(build_star(cloud, b, s), weights);
            trip.emplace_back(b, b, -(node.normal_x * row.lambda_center(0) +
                                      node.normal_y * row.lambda_center(1)));
            for (int i = 0; i < row.size(); ++i)
                trip.emplace_back(b, row.neighbors[static_cast<std::size_t>(i)],
                                  node.normal_x * row.lambda(i, 0) +
                                      node.normal_y * row.lambda(i, 1));
        }
        sys.boundary_rows.push_back(b);
    }
    sys.matrix.resize(m, m);
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.matrix.makeCompressed();
    return sys;
}

inline Eigen::VectorXd elliptic_rhs(const EllipticSystem& sys, const Eigen::VectorXd& u) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.matrix.rows());
    for (int j : sys.inner_rows) rhs(j) = u(j);
    return rhs;
}

/// Owns a sparse LU factorization of an assembled system. solve() enforces
/// the residual contract ||A v - rhs||_inf <= 1e-10 (1 + ||rhs||_inf).
class EllipticSolver {
public:
    explicit EllipticSolver(EllipticSystem sys) : sys_(std::move(sys)) {
        lu_.compute(sys_.matrix);
        if (lu_.info() != Eigen::Success)
            throw SolveError("elliptic factorization failed (singular system?)");
    }

    const EllipticSystem& system() const { return sys_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& u) const {
        if (u.size() != sys_.matrix.rows())
            throw Error("solve_elliptic: field has " + std::to_string(u.size()) +
                        " values, system expects " + std::to_string(sys_.matrix.rows()));
        const Eigen::VectorXd rhs = elliptic_rhs(sys_, u);
        Eigen::VectorXd v = lu_.solve(rhs);
        if (lu_.info() != Eigen::Success) throw SolveError("elliptic solve failed");
        const double residual = (sys_.matrix * v - rhs).cwiseAbs().maxCoeff();
        const double limit = 1e-10 * (1.0 + rhs.cwiseAbs().maxCoeff());
        if (!(residual <= limit))
            throw SolveError("elliptic residual " + std::to_string(residual) +
                             " exceeds tolerance " + std::to_string(limit));
        return v;
    }

private:
    EllipticSystem sys_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

/// One-shot convenience: factorize and solve. Time stepping holds an
/// EllipticSolver instead so the factorization is reused.
inline Eigen::VectorXd solve_elliptic(const EllipticSystem& sys, const Eigen::VectorXd& u) {
    EllipticSystem copy = sys;
    return EllipticSolver(std::move(copy)).solve(u);
}

/// Debug dump in coordinate format: `row col value`, one entry per line.
inline void write_matrix_coordinate(std::ostream& out, const Eigen::SparseMatrix<double>& m) {
    char buf[32];
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            out << it.row() << ' ' << it.col() << ' ' << buf << '\n';
        }
    }
}

}  // namespace gfd
