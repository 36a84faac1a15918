#include "afrelay/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "afrelay/analytic.hpp"
#include "afrelay/errors.hpp"

namespace afrelay {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK qk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Segment {
    double a, b, integral, error;
};

struct Gk15Result {
    double integral, error;
};

Gk15Result gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    return {resk * h, std::abs((resk - resg) * h)};
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                const QuadratureOptions& opts) {
    auto cmp = [](const Segment& l, const Segment& r) { return l.error < r.error; };

    int evals = 0;
    auto eval_segment = [&](double lo, double hi) -> Segment {
        const Gk15Result r = gk15(f, lo, hi);
        evals += 15;
        if (!std::isfinite(r.integral)) {
            std::ostringstream msg;
            msg << "quadrature: integrand non-finite on [" << lo << ", " << hi << "]";
            throw NumericalError(msg.str());
        }
        return {lo, hi, r.integral, r.error};
    };

    std::vector<Segment> heap;
    std::vector<Segment> frozen;  // segments at roundoff-limited width
    heap.push_back(eval_segment(a, b));
    double total = heap.front().integral;
    double err = heap.front().error;
    double frozen_err = 0.0;

    while (err + frozen_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (heap.empty() || evals + 30 > opts.max_evaluations) {
            std::ostringstream msg;
            msg << "quadrature on [" << a << ", " << b << "] did not converge: "
                << (heap.empty() ? "all segments at roundoff width" : "evaluation cap reached")
                << " (evals=" << evals << ", error=" << err + frozen_err
                << ", target=" << std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) << ")";
            throw NumericalError(msg.str());
        }
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const Segment s = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (s.a + s.b);
        if (!(s.a < mid && mid < s.b)) {
            frozen.push_back(s);
            err -= s.error;
            frozen_err += s.error;
            continue;
        }
        err -= s.error;
        total -= s.integral;
        const Segment left = eval_segment(s.a, mid);
        const Segment right = eval_segment(mid, s.b);
        total += left.integral + right.integral;
        err += left.error + right.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), cmp);
    }

    // Re-sum in storage order so the result does not carry incremental drift.
    double sum = 0.0;
    for (const Segment& s : frozen) sum += s.integral;
    for (const Segment& s : heap) sum += s.integral;
    return sum;
}

void require_finite_bounds(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw std::invalid_argument("integration bounds must be finite with a <= b");
    }
}

} // namespace

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts) {
    require_finite_bounds(a, b);
    if (a == b) return 0.0;
    return adaptive(f, a, b, opts);
}

double integrate_semi_infinite(const std::function<double(double)>& f, double a,
                               const QuadratureOptions& opts) {
    if (!std::isfinite(a)) throw std::invalid_argument("lower limit must be finite");
    auto g = [&f, a](double t) {
        const double u = 1.0 - t;
        if (u <= 0.0) return 0.0;
        const double fz = f(a + t / u);
        if (fz == 0.0) return 0.0;  // also covers underflowed tails where u*u == 0
        const double den = u * u;
        if (den == 0.0) return 0.0;
        return fz / den;
    };
    return adaptive(g, 0.0, 1.0, opts);
}

double find_root_bracketed(const std::function<double(double)>& g, double lo, double hi,
                           double tol) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi) {
        throw std::invalid_argument("bracket must satisfy lo < hi with finite endpoints");
    }
    if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0)) {
        std::ostringstream msg;
        msg << "root not bracketed: g(" << lo << ")=" << glo << ", g(" << hi << ")=" << ghi;
        throw std::invalid_argument(msg.str());
    }
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= tol || (hi - lo) <= tol) return mid;
        if ((gm > 0.0) == (ghi > 0.0)) {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
        }
    }
    return mid;
}

namespace {

struct MonotoneSolve {
    double cutoff = 0.0;
    double achieved = 0.0;
    int iterations = 0;
};

// Shared bracket-expand-then-bisect driver for a strictly increasing map.
// Stops once the bracket is relatively tight or the value matches; the
// caller enforces its own residual contract afterwards.
MonotoneSolve solve_increasing(const std::function<double(double)>& map, double target,
                               double value_tol, const char* what) {
    double lo = 1e-6;
    double hi = 1.0;
    int iters = 0;
    double flo = map(lo);
    double fhi = map(hi);
    while (flo > target) {
        hi = lo;
        fhi = flo;
        lo *= 0.5;
        if (++iters > 200 || lo < 1e-300) {
            std::ostringstream msg;
            msg << what << ": bracket underflow searching below " << lo
                << " (map=" << flo << ", target=" << target << ")";
            throw NumericalError(msg.str());
        }
        flo = map(lo);
    }
    while (fhi < target) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (++iters > 200 || hi > 1e12) {
            std::ostringstream msg;
            msg << what << ": bracket exceeded 1e12 (map(" << lo << ")=" << flo
                << ", target=" << target << ")";
            throw NumericalError(msg.str());
        }
        fhi = map(hi);
    }

    double mid = hi;
    double fmid = fhi;
    while (iters < 200) {
        mid = 0.5 * (lo + hi);
        fmid = map(mid);
        ++iters;
        if (std::abs(fmid - target) <= value_tol && (hi - lo) <= 1e-9 * mid) break;
        if ((hi - lo) <= 4.0 * 2.2e-16 * mid) break;  // roundoff floor
        if (fmid < target) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    return {mid, fmid, iters};
}

} // namespace

CutoffSolution solve_rho(const SystemParams& params, double p_avg, double tol) {
    if (!params.balanced) {
        throw UnbalancedParamsError("solve_rho requires p_s1/delta1 == p_s2/delta2");
    }
    if (!(p_avg > 0.0) || !std::isfinite(p_avg)) {
        throw std::invalid_argument("p_avg must be positive and finite");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    auto map = [&params](double rho) { return avg_relay_power(params, rho); };
    const MonotoneSolve s = solve_increasing(map, p_avg, tol * p_avg, "solve_rho");

    CutoffSolution sol;
    sol.cutoff = s.cutoff;
    sol.achieved = avg_relay_power(params, s.cutoff);
    sol.iterations = s.iterations;
    sol.residual = std::abs(sol.achieved - p_avg);
    if (sol.residual > tol * p_avg) {
        std::ostringstream msg;
        msg << "solve_rho: residual " << sol.residual << " exceeds tolerance " << tol * p_avg
            << " after " << sol.iterations << " iterations (cutoff=" << sol.cutoff << ")";
        throw NumericalError(msg.str());
    }
    return sol;
}

CutoffSolution solve_mu(const SystemParams& params, double p_out_target, double tol) {
    if (!params.balanced) {
        throw UnbalancedParamsError("solve_mu requires p_s1/delta1 == p_s2/delta2");
    }
    if (!(p_out_target > 0.0) || !(p_out_target < 1.0)) {
        throw std::invalid_argument("outage target must lie in (0, 1)");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const double floor = outage_floor(params);
    if (p_out_target <= floor) {
        std::ostringstream msg;
        msg << "outage target " << p_out_target << " is at or below the floor " << floor
            << " reachable at unbounded relay power";
        throw InfeasibleTargetError(msg.str());
    }

    // Bisect on the complement so the map is increasing.
    auto map = [&params](double mu) { return 1.0 - outage_probability(params, mu); };
    const MonotoneSolve s = solve_increasing(map, 1.0 - p_out_target, tol, "solve_mu");

    CutoffSolution sol;
    sol.cutoff = s.cutoff;
    sol.achieved = outage_probability(params, s.cutoff);
    sol.iterations = s.iterations;
    sol.residual = std::abs(sol.achieved - p_out_target);
    if (sol.residual > tol) {
        std::ostringstream msg;
        msg << "solve_mu: residual " << sol.residual << " exceeds tolerance " << tol << " after "
            << sol.iterations << " iterations (cutoff=" << sol.cutoff << ")";
        throw NumericalError(msg.str());
    }
    return sol;
}

} // namespace afrelay
