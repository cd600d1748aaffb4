#pragma once

// Time-step bound of the convergence theorem. Per inner node, with
// X = |1 - lambda_00| + sum_i |lambda_i0|, the admissible step satisfies
//
//   dt < (1 + X) / (X (A1' + A1'') + B1),
//
// where A1', A1'' and B1 (its dt-linear coefficient) are assembled from the
// current discrete state. Two approximations make the coefficients
// computable at runtime:
//   - continuous solution values are replaced by the discrete ones
//     (u0 + U0 -> 2 U0, gamma'(v0) -> gamma'(V0));
//   - mean-value points xi are replaced by the maximum absolute value of the
//     corresponding derivative over [min V, max V] on the node's star
//     (the sign hypotheses on gamma make these endpoint evaluations).
//
// The leading -lambda_00 term of A1' is implemented as printed; an optional
// switch multiplies it by gamma(V0) for experimentation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gfd/errors.hpp"
#include "gfd/fields.hpp"
#include "gfd/motility.hpp"
#include "gfd/stencil.hpp"

namespace gfd {

struct StabilityCoefficients {
    double a1_prime = 0.0;
    double a1_doubleprime = 0.0;
    double b1 = 0.0;  // dt-stripped coefficient
};

struct StabilityReport {
    std::vector<double> per_node_bound;            // one per inner node, stencil order
    std::vector<StabilityCoefficients> coefficients;
    std::vector<int> node_index;                   // center node per entry
    double global_bound = 0.0;                     // min over inner nodes
    int worst_node = -1;
};

namespace detail {

struct NodeDerivatives {
    double dx_u, dy_u, lap_u;
    double dx_v, dy_v;
    double v_min, v_max;
};

inline NodeDerivatives star_derivatives(const StencilRow& row, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& v) {
    NodeDerivatives d{};
    const int j = row.center;
    d.v_min = d.v_max = v(j);
    double dxx_u = 0.0, dyy_u = 0.0;
    for (int i = 0; i < row.size(); ++i) {
        const int idx = row.neighbors[static_cast<std::size_t>(i)];
        const double du = u(idx) - u(j);
        const double dv = v(idx) - v(j);
        d.dx_u += row.lambda(i, 0) * du;
        d.dy_u += row.lambda(i, 1) * du;
        dxx_u += row.lambda(i, 2) * du;
        dyy_u += row.lambda(i, 3) * du;
        d.dx_v += row.lambda(i, 0) * dv;
        d.dy_v += row.lambda(i, 1) * dv;
        d.v_min = std::min(d.v_min, v(idx));
        d.v_max = std::max(d.v_max, v(idx));
    }
    d.lap_u = dxx_u + dyy_u;
    return d;
}

inline double endpoint_max_abs(const std::function<double(double)>& f, double lo, double hi) {
    return std::max(std::abs(f(lo)), std::abs(f(hi)));
}

}  // namespace detail

/// Coefficients of one inner node from the current state.
inline StabilityCoefficients stability_coefficients(const StencilRow& row,
                                                    const Eigen::VectorXd& u,
                                                    const Eigen::VectorXd& v,
                                                    const MotilityFunction& gamma, double mu,
                                                    bool include_gamma_factor = false) {
    const auto d = detail::star_derivatives(row, u, v);
    const int j = row.center;
    const double u0 = u(j), v0 = v(j);
    const double g0 = gamma.gamma(v0), g1 = gamma.d1(v0), g2 = gamma.d2(v0);
    const double lam00 = row.lambda_laplacian_center;
    const double lam01 = row.lambda_center(0), lam02 = row.lambda_center(1);
    const double sum0 = row.lambda_laplacian.sum();
    const double sum1 = row.lambda.col(0).sum(), sum2 = row.lambda.col(1).sum();
    const double grad_v_sq = d.dx_v * d.dx_v + d.dy_v * d.dy_v;

    // xi replacements: max |derivative| over [min V, max V] on the star
    const double m1 = detail::endpoint_max_abs(gamma.d1, d.v_min, d.v_max);
    const double m2 = detail::endpoint_max_abs(gamma.d2, d.v_min, d.v_max);
    const double m3 = detail::endpoint_max_abs(gamma.d3, d.v_min, d.v_max);

    StabilityCoefficients c;
    // bracket of A1 = |1 + dt * bracket| + dt * A1''; A1' = -bracket
    const double bracket = -(include_gamma_factor ? g0 * lam00 : lam00)
                           - 2.0 * g1 * lam01 * d.dx_v - 2.0 * g1 * lam02 * d.dy_v
                           + g2 * grad_v_sq
                           + v0 * g1 + u0 * g1 - 2.0 * u0 * g1
                           + mu - 2.0 * mu * u0;
    c.a1_prime = -bracket;
    c.a1_doubleprime = std::abs(g1 * sum0) + 2.0 * std::abs(g2 * d.dx_v * sum1) +
                       2.0 * std::abs(g2 * d.dy_v * sum2);

    const double signed_part = m1 * d.lap_u
                               + 2.0 * m2 * d.dx_u * d.dx_v + 2.0 * m2 * d.dy_u * d.dy_v
                               - 2.0 * g1 * d.dx_u * lam01 - 2.0 * g1 * d.dy_u * lam02
                               + u0 * m3 * grad_v_sq
                               - u0 * g2 * 2.0 * d.dx_v * lam01 - u0 * g2 * 2.0 * d.dy_v * lam02
                               + u0 * v0 * m2 - u0 * u0 * m2;
    c.b1 = std::abs(signed_part)
           + 2.0 * std::abs(g1 * d.dx_u * sum1) + 2.0 * std::abs(g1 * d.dy_u * sum2)
           + std::abs(u0 * g2 * 2.0 * d.dx_v * sum1) + std::abs(u0 * g2 * 2.0 * d.dy_v * sum2);
    return c;
}

/// (A1', A1'') of the inner node at position `inner_index` in `stencils`.
inline std::pair<double, double> coefficient_A1(int inner_index, const FieldState& state,
                                                const std::vector<StencilRow>& stencils,
                                                const MotilityFunction& gamma, double mu,
                                                bool include_gamma_factor = false) {
    const auto c = stability_coefficients(stencils[static_cast<std::size_t>(inner_index)],
                                          state.u, state.v, gamma, mu, include_gamma_factor);
    return {c.a1_prime, c.a1_doubleprime};
}

/// dt-stripped B1 of the inner node at position `inner_index` in `stencils`.
inline double coefficient_B1(int inner_index, const FieldState& state,
                             const std::vector<StencilRow>& stencils,
                             const MotilityFunction& gamma) {
    // B1 does not involve mu; any positive value works for the shared path.
    return stability_coefficients(stencils[static_cast<std::size_t>(inner_index)], state.u,
                                  state.v, gamma, 1.0, false)
        .b1;
}

/// Per-node bounds and their minimum. Throws when a node's denominator is
/// not positive (formula breakdown for this state).
inline StabilityReport max_stable_dt(const FieldState& state,
                                     const std::vector<StencilRow>& stencils,
                                     const MotilityFunction& gamma, double mu,
                                     bool include_gamma_factor = false) {
    StabilityReport rep;
    rep.per_node_bound.reserve(stencils.size());
    rep.coefficients.reserve(stencils.size());
    rep.node_index.reserve(stencils.size());
    rep.global_bound = std::numeric_limits<double>::infinity();
    for (const StencilRow& row : stencils) {
        const auto c =
            stability_coefficients(row, state.u, state.v, gamma, mu, include_gamma_factor);
        const double x = std::abs(1.0 - row.lambda_laplacian_center) +
                         row.lambda_laplacian.cwiseAbs().sum();
        const double denom = x * (c.a1_prime + c.a1_doubleprime) + c.b1;
        if (!(denom > 0.0))
            throw Error("stability bound breakdown: non-positive denominator at node " +
                        std::to_string(row.center));
        const double bound = (1.0 + x) / denom;
        rep.per_node_bound.push_back(bound);
        rep.coefficients.push_back(c);
        rep.node_index.push_back(row.center);
        if (bound < rep.global_bound) {
            rep.global_bound = bound;
            rep.worst_node = row.center;
        }
    }
    if (rep.per_node_bound.empty()) throw Error("stability report needs at least one inner node");
    return rep;
}

/// Per-node CSV: `node,bound,a1_prime,a1_doubleprime,b1`.
inline void write_stability_csv(std::ostream& out, const StabilityReport& rep) {
    out << "node,bound,a1_prime,a1_doubleprime,b1\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (std::size_t k = 0; k < rep.per_node_bound.size(); ++k) {
        out << rep.node_index[k];
        put(rep.per_node_bound[k]);
        put(rep.coefficients[k].a1_prime);
        put(rep.coefficients[k].a1_doubleprime);
        put(rep.coefficients[k].b1);
        out << '\n';
    }
}

}  // namespace gfd
