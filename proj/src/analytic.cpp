#include "afrelay/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "afrelay/errors.hpp"
#include "afrelay/numerics.hpp"
#include "afrelay/policies.hpp"

namespace afrelay {

namespace {

void require_balanced(const SystemParams& params, const char* who) {
    if (!params.balanced) {
        std::ostringstream msg;
        msg << who << " requires p_s1/delta1 == p_s2/delta2, got " << params.p_s1 / params.delta1
            << " vs " << params.p_s2 / params.delta2;
        throw UnbalancedParamsError(msg.str());
    }
}

void require_positive_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw std::invalid_argument("cutoff must be positive and finite");
    }
}

} // namespace

double lambda_cutoff(const SystemParams& params, double rho) {
    require_balanced(params, "lambda_cutoff");
    require_positive_rho(rho);
    // Positive root of p_s2*rho*z^2 - delta2*(p_s1+p_s2+rho)*z - delta2 = 0;
    // all terms of this form are positive, so no cancellation.
    const double s = params.p_s1 + params.p_s2 + rho;
    const double disc = 1.0 + 4.0 * params.p_s2 * rho / (params.delta2 * s * s);
    return params.delta2 * s * (1.0 + std::sqrt(disc)) / (2.0 * params.p_s2 * rho);
}

double boundary_m1(const SystemParams& params, double rho, double y) {
    require_balanced(params, "boundary_m1");
    require_positive_rho(rho);
    const double den = rho * y - params.delta1;
    if (!(den > 0.0)) {
        std::ostringstream msg;
        msg << "boundary_m1 needs y > delta1/rho = " << params.delta1 / rho << ", got y = " << y;
        throw std::domain_error(msg.str());
    }
    return params.delta1 * (1.0 + (params.p_s2 + rho) * y) / (params.p_s1 * den);
}

double boundary_m2(const SystemParams& params, double rho, double x) {
    require_balanced(params, "boundary_m2");
    require_positive_rho(rho);
    const double den = rho * x - params.delta2;
    if (!(den > 0.0)) {
        std::ostringstream msg;
        msg << "boundary_m2 needs x > delta2/rho = " << params.delta2 / rho << ", got x = " << x;
        throw std::domain_error(msg.str());
    }
    return params.delta2 * (1.0 + (params.p_s1 + rho) * x) / (params.p_s2 * den);
}

NonOutageRegion::NonOutageRegion(const SystemParams& params, double rho)
    : params_(params), rho_(rho), lambda_(lambda_cutoff(params, rho)) {}

double NonOutageRegion::min_x_at(double y) const { return boundary_m1(params_, rho_, y); }

double NonOutageRegion::min_y_at(double x) const { return boundary_m2(params_, rho_, x); }

bool NonOutageRegion::contains(const ChannelState& s) const {
    const ShortTermPower st = min_short_term_power(params_, s);
    return st.feasible && st.power <= rho_;
}

double avg_relay_power(const SystemParams& params, double rho) {
    require_balanced(params, "avg_relay_power");
    require_positive_rho(rho);
    const double lambda = lambda_cutoff(params, rho);

    // The inner tolerance is far below the outer one so that the inner
    // quadrature's own error does not read as roughness of the outer
    // integrand.
    const QuadratureOptions inner_opts{1e-12, 0.0, 200'000};
    const QuadratureOptions outer_opts{1e-9, 0.0, 1'000'000};

    // One wedge of the served region: outer variable t >= lambda with mean
    // gain om_out, inner variable u between the boundary and t with mean
    // gain om_in. d_in/p_in belong to the session whose constraint binds
    // on this wedge.
    // The inner variable is the distance v = u - d_in/p_in from the wedge
    // tip. In u the factor p_in*u - d_in cancels catastrophically once the
    // truncation boundary sits within ~1e-9 of the tip (large rho); in v
    // both the integrand and the lower limit are sums of positive terms.
    auto wedge = [&](double d_in, double p_in, double om_in, double p_out, double om_out) {
        const double tip = d_in / p_in;
        auto outer = [&](double t) {
            const double w = std::exp(-t / om_out) / om_out;
            if (w == 0.0) return 0.0;
            const double v_lo = d_in * (1.0 + d_in + p_out * t) / (p_in * (rho * t - d_in));
            const double v_hi = t - tip;
            if (!(v_lo < v_hi)) return 0.0;
            auto inner = [&](double v) {
                return d_in * (1.0 + d_in + p_in * v + p_out * t) / (t * p_in * v) *
                       std::exp(-(v + tip) / om_in) / om_in;
            };
            return integrate_interval(inner, v_lo, v_hi, inner_opts) * w;
        };
        return integrate_semi_infinite(outer, lambda, outer_opts);
    };

    return wedge(params.delta1, params.p_s1, params.omega_x, params.p_s2, params.omega_y) +
           wedge(params.delta2, params.p_s2, params.omega_y, params.p_s1, params.omega_x);
}

double outage_probability(const SystemParams& params, double rho) {
    require_balanced(params, "outage_probability");
    require_positive_rho(rho);
    const double lambda = lambda_cutoff(params, rho);
    const double ox = params.omega_x;
    const double oy = params.omega_y;
    const QuadratureOptions opts{1e-11, 0.0, 1'000'000};

    // Probability mass of one wedge, integrated along its outer axis
    // (mean gain om_self); the boundary enters through the complementary
    // channel's CDF, hence om_cross.
    auto wedge_mass = [&](double d_bind, double p_bind, double om_cross, double p_other,
                          double om_self) {
        auto f = [&](double z) {
            const double boundary = d_bind * (1.0 + (p_other + rho) * z) / (rho * z - d_bind);
            return std::exp(-(z / om_self + boundary / (om_cross * p_bind)));
        };
        return integrate_semi_infinite(f, lambda, opts) / om_self;
    };

    const double p = 1.0 + std::exp(-lambda * (1.0 / ox + 1.0 / oy)) -
                     wedge_mass(params.delta1, params.p_s1, ox, params.p_s2, oy) -
                     wedge_mass(params.delta2, params.p_s2, oy, params.p_s1, ox);
    return std::clamp(p, 0.0, 1.0);
}

double outage_floor(const SystemParams& params) {
    require_balanced(params, "outage_floor");
    const double theta =
        (params.delta1 / params.p_s1) * (1.0 / params.omega_x + 1.0 / params.omega_y);
    return -std::expm1(-theta);
}

double exp_integral_e1(double z) {
    if (!(z > 0.0)) throw std::invalid_argument("E1 requires z > 0");
    constexpr double kEulerGamma = 0.57721566490153286060651209;

    if (z <= 1.0) {
        // Alternating series around the log singularity.
        double power_term = 1.0;  // z^k / k!
        double sum = 0.0;
        for (int k = 1; k <= 100; ++k) {
            power_term *= z / k;
            const double term = ((k & 1) ? power_term : -power_term) / k;
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return -kEulerGamma - std::log(z) + sum;
    }

    // Modified Lentz evaluation of the continued fraction
    // E1(z) = exp(-z) / (z + 1 - 1^2 / (z + 3 - 2^2 / (z + 5 - ...))).
    constexpr double kFpMin = 1e-300;
    double b = z + 1.0;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 300; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + a / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-z);
}

double p2p_truncation_gain(double p_out_target) {
    if (!(p_out_target > 0.0) || !(p_out_target < 1.0)) {
        throw std::invalid_argument("outage target must lie in (0, 1)");
    }
    const double cutoff = -std::log1p(-p_out_target);
    return 1.0 / (cutoff * exp_integral_e1(cutoff));
}

} // namespace afrelay
