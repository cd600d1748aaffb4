#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "gfd/experiment.hpp"
#include "gfd/time_stepper.hpp"
#include "test_support.hpp"

using namespace gfd;
using testsupport::Quadratic;
using testsupport::Rng;

namespace {

struct Pipeline {
    PointCloud cloud;
    std::vector<StencilRow> stencils;
    EllipticSolver solver;

    explicit Pipeline(int n, const SimulationConfig& config)
        : cloud(generate_regular_cloud(n, n)),
          stencils(compute_all_stencils(build_all_stars(cloud, config.star_size),
                                        config.weights)),
          solver(assemble_elliptic(cloud, stencils, config.weights)) {}
};

SimulationConfig example1_config() {
    SimulationConfig config;
    config.gamma = gamma_exp();
    config.params = ModelParameters{3.0};
    config.dt = 0.001;
    config.t_final = 5.0;
    return config;
}

FieldState constant_state(const PointCloud& cloud, double value) {
    FieldState s;
    s.u = Eigen::VectorXd::Constant(cloud.size(), value);
    s.v = Eigen::VectorXd::Constant(cloud.size(), value);
    return s;
}

}  // namespace

TEST_CASE("parabolic right-hand side at constant states", "[time_stepper]") {
    const SimulationConfig config = example1_config();
    const Pipeline p(5, config);

    const FieldState eq = constant_state(p.cloud, 1.0);
    for (std::size_t k = 0; k < p.stencils.size(); ++k)
        CHECK(parabolic_rhs(eq, p.stencils, config.gamma, 3.0, static_cast<int>(k)) == 0.0);

    const FieldState half = constant_state(p.cloud, 0.5);
    for (std::size_t k = 0; k < p.stencils.size(); ++k)
        CHECK(parabolic_rhs(half, p.stencils, config.gamma, 3.0, static_cast<int>(k)) == 0.75);
}

TEST_CASE("parabolic right-hand side matches a term-by-term oracle", "[time_stepper]") {
    // Quadratic fields are differentiated exactly by the stencils, so the
    // right-hand side must equal the expression assembled from analytic
    // derivatives.
    const SimulationConfig config = example1_config();
    const Pipeline p(7, config);
    Rng rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        Quadratic qu = Quadratic::random(rng, 0.4);
        Quadratic qv = Quadratic::random(rng, 0.4);
        qu.c[0] += 2.0;  // keep u, v positive-ish
        qv.c[0] += 2.0;
        FieldState state;
        state.u.resize(p.cloud.size());
        state.v.resize(p.cloud.size());
        for (const Node& n : p.cloud.nodes()) {
            state.u(n.index) = qu.value(n.x, n.y);
            state.v(n.index) = qv.value(n.x, n.y);
        }
        for (std::size_t k = 0; k < p.stencils.size(); ++k) {
            const Node& n = p.cloud.node(p.stencils[k].center);
            const double u0 = qu.value(n.x, n.y), v0 = qv.value(n.x, n.y);
            const double lap_u = qu.dxx() + qu.dyy();
            const double grad_dot = qu.dx(n.x, n.y) * qv.dx(n.x, n.y) +
                                    qu.dy(n.x, n.y) * qv.dy(n.x, n.y);
            const double grad_v_sq = qv.dx(n.x, n.y) * qv.dx(n.x, n.y) +
                                     qv.dy(n.x, n.y) * qv.dy(n.x, n.y);
            const MotilityFunction& g = config.gamma;
            const double expected = g.gamma(v0) * lap_u + 2.0 * g.d1(v0) * grad_dot +
                                    u0 * g.d2(v0) * grad_v_sq +
                                    u0 * g.d1(v0) * (v0 - u0) + 3.0 * u0 * (1.0 - u0);
            const double got = parabolic_rhs(state, p.stencils, g, 3.0, static_cast<int>(k));
            CHECK(got == Catch::Approx(expected).margin(1e-7));
        }
    }
}

TEST_CASE("equilibrium is a fixed point of the step", "[time_stepper]") {
    const SimulationConfig config = example1_config();
    const Pipeline p(9, config);
    FieldState state = constant_state(p.cloud, 1.0);
    for (int n = 0; n < 10; ++n) state = step(state, p.cloud, p.stencils, p.solver, config);
    const auto [nu, nv] = norms(state);
    CHECK(nu <= 1e-12);
    CHECK(nv <= 1e-12);
}

TEST_CASE("spatially constant data reduces to the scalar logistic step", "[time_stepper]") {
    SimulationConfig config = example1_config();
    const Pipeline p(11, config);
    FieldState state = constant_state(p.cloud, 0.5);
    state.v = p.solver.solve(state.u);

    state = step(state, p.cloud, p.stencils, p.solver, config);
    for (int j = 0; j < p.cloud.size(); ++j)
        CHECK(state.u(j) == Catch::Approx(0.50075).margin(1e-12));

    // 50 more steps against the scalar forward-Euler iterate
    double scalar = 0.50075;
    for (int n = 0; n < 50; ++n) {
        state = step(state, p.cloud, p.stencils, p.solver, config);
        scalar += config.dt * 3.0 * scalar * (1.0 - scalar);
        for (int j = 0; j < p.cloud.size(); ++j)
            CHECK(std::abs(state.u(j) - scalar) <= 1e-13);
    }
}

TEST_CASE("one thousand steps hold the fixed point", "[time_stepper]") {
    const SimulationConfig config = example1_config();
    const Pipeline p(11, config);
    FieldState state = constant_state(p.cloud, 1.0);
    for (int n = 0; n < 1000; ++n) state = step(state, p.cloud, p.stencils, p.solver, config);
    CHECK(norms(state).first <= 1e-9);
}

TEST_CASE("initialization samples, validates, and solves", "[time_stepper]") {
    SimulationConfig config = example1_config();
    const Pipeline p(9, config);

    SECTION("constant one gives the equilibrium state") {
        const FieldState state =
            initialize(p.cloud, config, [](double, double) { return 1.0; }, p.solver);
        CHECK(norms(state).first == 0.0);
        CHECK(norms(state).second <= 1e-10);
        CHECK(state.time == 0.0);
        CHECK(state.step == 0);
    }
    SECTION("first experiment datum at the origin") {
        const ExperimentPreset preset = preset_example1();
        const FieldState state = initialize(p.cloud, config, preset.u0, p.solver);
        CHECK(state.u(0) == 7.0);  // node 0 sits at (0, 0): 4 + 1 + 2
    }
    SECTION("nonpositive datum: hard error by default, warning when relaxed") {
        const ExperimentPreset preset = preset_example2();
        SimulationConfig strict = config;
        strict.gamma = gamma_rational();
        strict.params = ModelParameters{4.5};
        // 9x9 grid contains y = 0.5, where the datum vanishes
        CHECK_THROWS_AS(initialize(p.cloud, strict, preset.u0, p.solver), HypothesisError);
        strict.strict_hypotheses = false;
        const FieldState state = initialize(p.cloud, strict, preset.u0, p.solver);
        CHECK(state.u.minCoeff() == 0.0);
    }
    SECTION("gamma hypothesis failure is also gated") {
        SimulationConfig bad = config;
        bad.params = ModelParameters{1.0};  // mu too small for gamma_exp
        CHECK_THROWS_AS(initialize(p.cloud, bad, [](double, double) { return 1.0; }, p.solver),
                        HypothesisError);
    }
}

TEST_CASE("config validation", "[time_stepper]") {
    SimulationConfig config = example1_config();
    config.dt = 0.0;
    CHECK_THROWS_AS(validate_config(config), ConfigError);
    config.dt = 10.0;
    config.t_final = 5.0;
    CHECK_THROWS_AS(validate_config(config), ConfigError);
    config = example1_config();
    config.snapshot_times = {0.5, 0.1};
    CHECK_THROWS_AS(validate_config(config), ConfigError);
    config.snapshot_times = {0.5, 6.0};
    CHECK_THROWS_AS(validate_config(config), ConfigError);
}

TEST_CASE("norms are sup distances to one", "[time_stepper]") {
    FieldState state;
    state.u = Eigen::VectorXd::Ones(4);
    state.v = Eigen::VectorXd::Ones(4);
    CHECK(norms(state) == std::pair{0.0, 0.0});
    state.u(2) = 1.5;
    CHECK(norms(state).first == 0.5);
}

TEST_CASE("run records norms, snapshots, and is deterministic", "[time_stepper]") {
    SimulationConfig config = example1_config();
    config.t_final = 0.05;
    config.snapshot_times = {0.0, 0.02, 0.05};
    const ExperimentPreset preset = preset_example1();
    const PointCloud cloud = generate_regular_cloud(9, 9);

    const SimulationResult r1 = run(cloud, config, preset.u0);
    REQUIRE(r1.norm_series.size() == 51);
    CHECK(r1.norm_series.front().t == 0.0);
    CHECK(r1.norm_series.back().t == Catch::Approx(0.05));
    REQUIRE(r1.snapshots.size() == 3);
    CHECK(r1.snapshots[0].t == 0.0);
    CHECK(r1.snapshots[2].t == 0.05);
    CHECK(r1.snapshots[0].u.size() == cloud.size());
    CHECK(r1.initial_stability.global_bound > 0.0);

    const SimulationResult r2 = run(cloud, config, preset.u0);
    REQUIRE(r2.norm_series.size() == r1.norm_series.size());
    for (std::size_t i = 0; i < r1.norm_series.size(); ++i) {
        CHECK(r1.norm_series[i].norm_u == r2.norm_series[i].norm_u);
        CHECK(r1.norm_series[i].norm_v == r2.norm_series[i].norm_v);
    }
}

TEST_CASE("norm decay is strictly monotone past the transient", "[time_stepper]") {
    SimulationConfig config = example1_config();
    config.t_final = 1.2;
    const PointCloud cloud = generate_regular_cloud(11, 11);
    const SimulationResult r = run(cloud, config, preset_example1().u0);
    for (std::size_t i = 500; i + 1 < r.norm_series.size(); ++i)
        CHECK(r.norm_series[i + 1].norm_u < r.norm_series[i].norm_u);
}

TEST_CASE("oversized steps diverge detectably", "[time_stepper]") {
    SimulationConfig config = example1_config();
    config.dt = 1.0;
    config.t_final = 100.0;
    const PointCloud cloud = generate_regular_cloud(11, 11);
    bool diverged = false;
    try {
        const SimulationResult r = run(cloud, config, preset_example1().u0);
        for (std::size_t i = 0; i < std::min<std::size_t>(101, r.norm_series.size()); ++i)
            if (r.norm_series[i].norm_u > 1e3) diverged = true;
    } catch (const DivergenceError&) {
        diverged = true;
    }
    CHECK(diverged);
}

TEST_CASE("stability enforcement gates the run", "[time_stepper]") {
    SimulationConfig config = example1_config();
    config.enforce_stability_bound = true;
    config.t_final = 0.01;
    const ExperimentPreset preset = preset_example1();

    // On 11x11 the bound at t = 0 is ~2.9e-3, so dt = 1e-3 passes.
    const PointCloud coarse = generate_regular_cloud(11, 11);
    CHECK_NOTHROW(run(coarse, config, preset.u0));

    // On 21x21 the bound at t = 0 is ~8e-4, below dt = 1e-3.
    const PointCloud fine = generate_regular_cloud(21, 21);
    CHECK_THROWS_AS(run(fine, config, preset.u0), StabilityViolationError);
}
