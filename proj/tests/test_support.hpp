#pragma once

// Shared test fixtures and the independent oracles the suites check against:
// a dense QR-based least-squares route for the stencil weights, brute-force
// nearest-neighbor selection, dense system assembly/solves, and analytic
// quadratics. Everything here stays independent of the implementation paths
// it verifies.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "gfd/elliptic.hpp"
#include "gfd/point_cloud.hpp"
#include "gfd/stars.hpp"
#include "gfd/stencil.hpp"

namespace testsupport {

// Deterministic generator, independent of <random> distribution details.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    double uniform() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

// Non-degenerate random star: neighbors on a jittered ring around the
// center, radii within [0.6, 1.4] h.
inline gfd::Star random_star(Rng& rng, int s, double h = 0.08) {
    gfd::Star star;
    star.center = 0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < s; ++i) {
        const double angle = two_pi * (i + rng.uniform(-0.3, 0.3)) / s;
        const double radius = h * rng.uniform(0.6, 1.4);
        star.neighbors.push_back(i + 1);
        star.offsets.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
    return star;
}

// Dense least-squares oracle for the stencil weights: solve the
// overdetermined weighted system min || W C d - W e_i || by column-pivoted
// QR, entirely avoiding the normal equations and the Cholesky route.
inline Eigen::MatrixXd dense_lsq_lambda(const gfd::Star& star, const gfd::WeightScheme& weights) {
    const int s = star.size();
    Eigen::MatrixXd g(s, 5);
    Eigen::VectorXd w(s);
    for (int i = 0; i < s; ++i) {
        const auto& off = star.offsets[static_cast<std::size_t>(i)];
        w(i) = weights.weight(off[0], off[1]);
        g.row(i) = w(i) * gfd::taylor_row(off[0], off[1]).transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd lambda(s, 5);
    for (int i = 0; i < s; ++i) {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
        rhs(i) = w(i);
        lambda.row(i) = qr.solve(rhs).transpose();
    }
    return lambda;
}

// Brute-force k-nearest selection with the same (distance, index) ordering.
inline std::vector<int> brute_force_knn(const gfd::PointCloud& cloud, int center, int k) {
    std::vector<std::pair<double, int>> all;
    const gfd::Node& c = cloud.node(center);
    for (const gfd::Node& n : cloud.nodes()) {
        if (n.index == center) continue;
        const double dx = n.x - c.x, dy = n.y - c.y;
        all.emplace_back(dx * dx + dy * dy, n.index);
    }
    std::sort(all.begin(), all.end());
    std::vector<int> out;
    for (int i = 0; i < k; ++i) out.push_back(all[static_cast<std::size_t>(i)].second);
    return out;
}

// Independent dense assembly of the elliptic system (plain loops, dense
// storage) used to cross-check the sparse path.
inline Eigen::MatrixXd dense_elliptic_matrix(const gfd::PointCloud& cloud,
                                             const std::vector<gfd::StencilRow>& stencils,
                                             const gfd::WeightScheme& weights,
                                             gfd::BoundaryRule rule) {
    const int m = cloud.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (const gfd::StencilRow& row : stencils) {
        const int j = row.center;
        a(j, j) = 1.0 + row.lambda_laplacian_center;
        for (int i = 0; i < row.size(); ++i)
            a(j, row.neighbors[static_cast<std::size_t>(i)]) -= row.lambda_laplacian(i);
    }
    for (int b : cloud.boundary_indices()) {
        const gfd::Node& node = cloud.node(b);
        if (rule == gfd::BoundaryRule::Pairing) {
            a(b, b) = 1.0;
            a(b, node.paired_inner) = -1.0;
        } else {
            const int s = stencils.empty() ? 8 : stencils.front().size();
            const gfd::StencilRow row =
                gfd::compute_stencil(gfd::build_star(cloud, b, s), weights);
            a(b, b) = -(node.normal_x * row.lambda_center(0) +
                        node.normal_y * row.lambda_center(1));
            for (int i = 0; i < row.size(); ++i)
                a(b, row.neighbors[static_cast<std::size_t>(i)]) +=
                    node.normal_x * row.lambda(i, 0) + node.normal_y * row.lambda(i, 1);
        }
    }
    return a;
}

// Quadratic test field a0 + a1 x + a2 y + a3 x^2 + a4 y^2 + a5 x y with its
// exact derivatives.
struct Quadratic {
    std::array<double, 6> c{};

    static Quadratic random(Rng& rng, double scale = 5.0) {
        Quadratic q;
        for (double& v : q.c) v = rng.uniform(-scale, scale);
        return q;
    }
    double value(double x, double y) const {
        return c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * y * y + c[5] * x * y;
    }
    double dx(double x, double y) const { return c[1] + 2.0 * c[3] * x + c[5] * y; }
    double dy(double x, double y) const { return c[2] + 2.0 * c[4] * y + c[5] * x; }
    double dxx() const { return 2.0 * c[3]; }
    double dyy() const { return 2.0 * c[4]; }
    double dxy() const { return c[5]; }
    double max_coeff() const {
        double m = 0.0;
        for (double v : c) m = std::max(m, std::abs(v));
        return m;
    }
};

// Field samples ordered as apply_stencil expects: center first, then the
// star's neighbors.
template <typename F>
inline std::vector<double> sample_star(const gfd::PointCloud& cloud, const gfd::StencilRow& row,
                                       F&& f) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(row.size()) + 1);
    const gfd::Node& c = cloud.node(row.center);
    values.push_back(f(c.x, c.y));
    for (int idx : row.neighbors) {
        const gfd::Node& n = cloud.node(idx);
        values.push_back(f(n.x, n.y));
    }
    return values;
}

}  // namespace testsupport
