#pragma once

// Explicit-implicit time loop. Each step advances the cell density U at
// inner nodes by forward Euler with the GFD right-hand side
//
//   gamma(V0) L_h U
//   + 2 gamma'(V0) (D_x U D_x V + D_y U D_y V)
//   + U0 gamma''(V0) ((D_x V)^2 + (D_y V)^2)
//   + U0 gamma'(V0) (V0 - U0)
//   + mu U0 (1 - U0),
//
// copies each boundary value from its paired inner node (first-order
// Neumann), then solves the elliptic system for the new V. Derivative
// estimates use the difference form, so constant fields reproduce the scalar
// logistic iteration exactly.

#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "gfd/elliptic.hpp"
#include "gfd/errors.hpp"
#include "gfd/fields.hpp"
#include "gfd/motility.hpp"
#include "gfd/point_cloud.hpp"
#include "gfd/stability.hpp"
#include "gfd/stars.hpp"
#include "gfd/stencil.hpp"

namespace gfd {

struct SimulationConfig {
    double dt = 1e-3;
    double t_final = 5.0;
    MotilityFunction gamma = gamma_exp();
    ModelParameters params{3.0};
    int star_size = 8;
    WeightScheme weights{};
    std::vector<double> snapshot_times;
    bool enforce_stability_bound = false;
    long stability_check_interval = 0;  // 0: evaluate the bound at t = 0 only
    bool strict_hypotheses = true;      // false: warn instead of failing validation
    bool stability_gamma_factor = false;
    double hypothesis_s_max = 50.0;
    int hypothesis_samples = 100000;
};

inline void validate_config(const SimulationConfig& config) {
    if (!(config.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(config.dt <= config.t_final)) throw ConfigError("dt must not exceed t_final");
    if (config.star_size < 5) throw ConfigError("star size must be at least 5");
    double prev = 0.0;
    for (double t : config.snapshot_times) {
        if (t < prev) throw ConfigError("snapshot times must be sorted ascending");
        if (t < 0.0 || t > config.t_final)
            throw ConfigError("snapshot times must lie in [0, t_final]");
        prev = t;
    }
}

/// (max_j |U_j - 1|, max_j |V_j - 1|) over all nodes.
inline std::pair<double, double> norms(const FieldState& state) {
    return {(state.u.array() - 1.0).abs().maxCoeff(), (state.v.array() - 1.0).abs().maxCoeff()};
}

/// Right-hand side of the explicit update at the inner node in position
/// `inner_index` of `stencils`.
inline double parabolic_rhs(const FieldState& state, const std::vector<StencilRow>& stencils,
                            const MotilityFunction& gamma, double mu, int inner_index) {
    const StencilRow& row = stencils[static_cast<std::size_t>(inner_index)];
    const int j = row.center;
    const double u0 = state.u(j), v0 = state.v(j);
    double dx_u = 0.0, dy_u = 0.0, lap_u = 0.0, dx_v = 0.0, dy_v = 0.0;
    for (int i = 0; i < row.size(); ++i) {
        const int idx = row.neighbors[static_cast<std::size_t>(i)];
        const double du = state.u(idx) - u0;
        const double dv = state.v(idx) - v0;
        dx_u += row.lambda(i, 0) * du;
        dy_u += row.lambda(i, 1) * du;
        lap_u += row.lambda_laplacian(i) * du;
        dx_v += row.lambda(i, 0) * dv;
        dy_v += row.lambda(i, 1) * dv;
    }
    return gamma.gamma(v0) * lap_u
           + 2.0 * gamma.d1(v0) * (dx_u * dx_v + dy_u * dy_v)
           + u0 * gamma.d2(v0) * (dx_v * dx_v + dy_v * dy_v)
           + u0 * gamma.d1(v0) * (v0 - u0)
           + mu * u0 * (1.0 - u0);
}

/// Samples u0 at the nodes, validates the hypotheses and the initial datum
/// (hard error unless `strict_hypotheses` is off, which downgrades the
/// failure to a warning on stderr), and solves for the initial V.
inline FieldState initialize(const PointCloud& cloud, const SimulationConfig& config,
                             const std::function<double(double, double)>& u0,
                             const EllipticSolver& solver) {
    validate_config(config);
    FieldState state;
    state.u.resize(cloud.size());
    for (const Node& n : cloud.nodes()) state.u(n.index) = u0(n.x, n.y);

    const auto hyp = validate_hypotheses(config.gamma, config.params, config.hypothesis_s_max,
                                         config.hypothesis_samples);
    const auto init = validate_initial_condition(
        std::span<const double>(state.u.data(), static_cast<std::size_t>(state.u.size())));
    if (!hyp.pass || !init.pass) {
        std::string what;
        if (!hyp.pass)
            what += "motility hypotheses fail (mu0 = " + std::to_string(hyp.mu0) +
                    " vs mu = " + std::to_string(config.params.mu) + ")";
        if (!init.pass) {
            if (!what.empty()) what += "; ";
            what += "initial condition is not strictly positive (min = " +
                    std::to_string(init.min) + ")";
        }
        if (config.strict_hypotheses) throw HypothesisError(what);
        std::clog << "warning: " << what << "; proceeding\n";
    }
    state.v = solver.solve(state.u);
    state.time = 0.0;
    state.step = 0;
    for (int j = 0; j < cloud.size(); ++j)
        if (!std::isfinite(state.u(j)) || !std::isfinite(state.v(j)))
            throw DivergenceError(0, j);
    return state;
}

/// One explicit-implicit step: explicit inner update, boundary copy from the
/// paired inner node, elliptic solve for V.
inline FieldState step(const FieldState& state, const PointCloud& cloud,
                       const std::vector<StencilRow>& stencils, const EllipticSolver& solver,
                       const SimulationConfig& config) {
    FieldState next;
    next.u = state.u;
    for (std::size_t k = 0; k < stencils.size(); ++k) {
        const int j = stencils[k].center;
        next.u(j) = state.u(j) + config.dt * parabolic_rhs(state, stencils, config.gamma,
                                                           config.params.mu,
                                                           static_cast<int>(k));
    }
    for (int b : cloud.boundary_indices()) next.u(b) = next.u(cloud.node(b).paired_inner);
    next.step = state.step + 1;
    next.time = config.dt * static_cast<double>(next.step);
    for (int j = 0; j < cloud.size(); ++j)
        if (!std::isfinite(next.u(j))) throw DivergenceError(next.step, j);
    next.v = solver.solve(next.u);
    for (int j = 0; j < cloud.size(); ++j)
        if (!std::isfinite(next.v(j))) throw DivergenceError(next.step, j);
    return next;
}

struct NormSample {
    double t = 0.0;
    double norm_u = 0.0;
    double norm_v = 0.0;
};

struct Snapshot {
    double t = 0.0;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
};

struct SimulationResult {
    std::vector<NormSample> norm_series;  // one row per step, plus t = 0
    std::vector<Snapshot> snapshots;
    FieldState final_state;
    StabilityReport initial_stability;
};

/// Full run: star/stencil construction, assembly, initialization, and the
/// time loop until t >= t_final. Records the norm pair every step and full
/// field snapshots at the configured times. With enforcement on, the run
/// aborts when dt does not satisfy the latest stability bound.
inline SimulationResult run(const PointCloud& cloud, const SimulationConfig& config,
                            const std::function<double(double, double)>& u0) {
    validate_config(config);
    const auto stars = build_all_stars(cloud, config.star_size);
    const auto stencils = compute_all_stencils(stars, config.weights);
    EllipticSolver solver(assemble_elliptic(cloud, stencils, config.weights));

    SimulationResult result;
    FieldState state = initialize(cloud, config, u0, solver);
    result.initial_stability = max_stable_dt(state, stencils, config.gamma, config.params.mu,
                                             config.stability_gamma_factor);
    auto enforce = [&](const StabilityReport& rep, long at_step) {
        if (config.dt >= rep.global_bound)
            throw StabilityViolationError(
                "dt = " + std::to_string(config.dt) + " violates the stability bound " +
                std::to_string(rep.global_bound) + " (worst node " +
                std::to_string(rep.worst_node) + ") at step " + std::to_string(at_step));
    };
    if (config.enforce_stability_bound) enforce(result.initial_stability, 0);

    const long n_steps = static_cast<long>(std::ceil(config.t_final / config.dt - 1e-9));
    std::vector<long> snapshot_steps;
    snapshot_steps.reserve(config.snapshot_times.size());
    for (double t : config.snapshot_times)
        snapshot_steps.push_back(std::lround(t / config.dt));

    auto record = [&](const FieldState& s) {
        const auto [nu, nv] = norms(s);
        result.norm_series.push_back({s.time, nu, nv});
        for (std::size_t k = 0; k < snapshot_steps.size(); ++k)
            if (snapshot_steps[k] == s.step)
                result.snapshots.push_back({config.snapshot_times[k], s.u, s.v});
    };
    record(state);
    for (long n = 0; n < n_steps; ++n) {
        state = step(state, cloud, stencils, solver, config);
        record(state);
        if (config.enforce_stability_bound && config.stability_check_interval > 0 &&
            state.step % config.stability_check_interval == 0 && state.step < n_steps) {
            enforce(max_stable_dt(state, stencils, config.gamma, config.params.mu,
                                  config.stability_gamma_factor),
                    state.step);
        }
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace gfd
