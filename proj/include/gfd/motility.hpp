#pragma once

// Motility regulation function gamma with its first three derivatives, the
// built-in choices gamma(s) = e^-s and gamma(s) = (1+s)^-2, and numeric
// validation of the sign/growth hypotheses the model requires:
//   gamma >= 0, gamma' <= 0, gamma'' >= 0, gamma''' <= 0,
//   -2 gamma'(s) + gamma''(s) s <= mu_0 < mu,
//   |gamma'(s)|^2 / gamma(s) <= c_gamma.

#include <cmath>
#include <functional>
#include <span>
#include <string>

#include "gfd/errors.hpp"

namespace gfd {

/// Evaluators must be pure; they are called concurrently.
struct MotilityFunction {
    std::string name;
    std::function<double(double)> gamma;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
    std::function<double(double)> d3;
};

struct ModelParameters {
    double mu = 1.0;  // logistic growth rate, > 0

    explicit ModelParameters(double mu_) : mu(mu_) {
        if (!(mu > 0.0)) throw Error("mu must be positive");
    }
};

/// gamma(s) = e^-s.
inline MotilityFunction gamma_exp() {
    return {"exp",
            [](double s) { return std::exp(-s); },
            [](double s) { return -std::exp(-s); },
            [](double s) { return std::exp(-s); },
            [](double s) { return -std::exp(-s); }};
}

/// gamma(s) = (1+s)^-2, defined for s > -1.
inline MotilityFunction gamma_rational() {
    auto check = [](double s) {
        if (s <= -1.0) throw Error("gamma_rational: argument must exceed -1");
    };
    return {"rational",
            [check](double s) { check(s); return std::pow(1.0 + s, -2.0); },
            [check](double s) { check(s); return -2.0 * std::pow(1.0 + s, -3.0); },
            [check](double s) { check(s); return 6.0 * std::pow(1.0 + s, -4.0); },
            [check](double s) { check(s); return -24.0 * std::pow(1.0 + s, -5.0); }};
}

struct HypothesisReport {
    bool pass = false;
    bool signs_ok = false;         // gamma>=0, gamma'<=0, gamma''>=0, gamma'''<=0 at all samples
    double mu0 = 0.0;              // max sampled -2 gamma' + gamma'' s
    double c_gamma = 0.0;          // max sampled |gamma'|^2 / gamma
    bool c_gamma_unbounded = false;  // gamma = 0 with gamma' != 0 at a sample
    double mu = 0.0;
    double s_max = 0.0;
    int n_samples = 0;
};

/// Dense sampling of the hypotheses on [0, s_max]. Fails when a sign
/// condition breaks, when mu0 >= mu, or when c_gamma is unbounded (division
/// by zero with nonzero gamma'). The sampled c_gamma maximum is reported
/// either way.
inline HypothesisReport validate_hypotheses(const MotilityFunction& g,
                                            const ModelParameters& params,
                                            double s_max = 50.0, int n_samples = 100000) {
    if (!(s_max > 0.0)) throw Error("s_max must be positive");
    if (n_samples < 100) throw Error("need at least 100 samples");
    HypothesisReport rep;
    rep.mu = params.mu;
    rep.s_max = s_max;
    rep.n_samples = n_samples;
    rep.signs_ok = true;
    for (int i = 0; i < n_samples; ++i) {
        const double s = s_max * static_cast<double>(i) / (n_samples - 1);
        const double g0 = g.gamma(s), g1 = g.d1(s), g2 = g.d2(s), g3 = g.d3(s);
        if (g0 < 0.0 || g1 > 0.0 || g2 < 0.0 || g3 > 0.0) rep.signs_ok = false;
        rep.mu0 = std::max(rep.mu0, -2.0 * g1 + g2 * s);
        if (g0 == 0.0) {
            if (g1 != 0.0) rep.c_gamma_unbounded = true;
        } else {
            rep.c_gamma = std::max(rep.c_gamma, g1 * g1 / g0);
        }
    }
    rep.pass = rep.signs_ok && !rep.c_gamma_unbounded && rep.mu0 < params.mu;
    return rep;
}

struct InitialConditionReport {
    bool pass = false;
    double min = 0.0;
    double max = 0.0;
};

/// The initial datum must be strictly positive at every node.
inline InitialConditionReport validate_initial_condition(std::span<const double> u0) {
    if (u0.empty()) throw Error("initial condition has no values");
    InitialConditionReport rep;
    rep.min = rep.max = u0[0];
    for (double v : u0) {
        rep.min = std::min(rep.min, v);
        rep.max = std::max(rep.max, v);
    }
    rep.pass = rep.min > 0.0;
    return rep;
}

}  // namespace gfd
