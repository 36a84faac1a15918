#pragma once

#include <functional>

#include "afrelay/model.hpp"

namespace afrelay {

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_evaluations = 1'000'000;
};

// Adaptive Gauss-Kronrod 7-15 on [a, b]. Throws NumericalError if the
// evaluation cap is hit before the error estimate meets the tolerance.
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

// Integral of f over [a, inf) via the substitution z = a + t/(1-t), t in [0, 1).
// f must decay to 0 at infinity and be finite on (a, inf).
double integrate_semi_infinite(const std::function<double(double)>& f, double a,
                               const QuadratureOptions& opts = {});

// Bisection on a sign change. Stops when |g(mid)| <= tol or the bracket
// width falls to tol; after 200 halvings the midpoint is returned (the
// bracket is then far below double resolution for any sane input).
double find_root_bracketed(const std::function<double(double)>& g, double lo, double hi,
                           double tol);

struct CutoffSolution {
    double cutoff = 0.0;
    double achieved = 0.0;   // forward-map value at cutoff, re-evaluated post-hoc
    int iterations = 0;
    double residual = 0.0;   // |achieved - requested constraint value|
};

// Cutoff for the average-power constraint: avg_relay_power(rho) = p_avg,
// solved to |achieved - p_avg| <= tol * p_avg. Bracket expands geometrically
// from [1e-6, 1]; bisection afterwards.
CutoffSolution solve_rho(const SystemParams& params, double p_avg, double tol = 1e-8);

// Cutoff for the outage target: outage_probability(mu) = p_out_target,
// solved to |achieved - target| <= tol (absolute). Targets at or below the
// outage floor are infeasible.
CutoffSolution solve_mu(const SystemParams& params, double p_out_target, double tol = 1e-10);

} // namespace afrelay
