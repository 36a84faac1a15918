#pragma once

#include "afrelay/model.hpp"

namespace afrelay {

// All closed-form routines in this header require params.balanced
// (p_s1/delta1 == p_s2/delta2) and throw UnbalancedParamsError otherwise.
// The general case is served by the Monte Carlo evaluator.

/// Diagonal corner of the served region: the channel gain z at which the
/// minimum short-term power at state (z, z) equals rho. Decreases from
/// +inf toward delta2/p_s2 as rho grows.
double lambda_cutoff(const SystemParams& params, double rho);

/// Lower x-boundary of the served sub-region with x <= y, at height y.
/// Defined for y > delta1/rho.
double boundary_m1(const SystemParams& params, double rho, double y);

/// Lower y-boundary of the served sub-region with y <= x, at abscissa x.
/// Defined for x > delta2/rho.
double boundary_m2(const SystemParams& params, double rho, double x);

/// Geometry of the set of channel states the truncated-inversion policy
/// serves at cutoff rho: the wedge between the two hyperbola-like
/// boundaries, starting at the diagonal corner (lambda, lambda).
class NonOutageRegion {
public:
    NonOutageRegion(const SystemParams& params, double rho);

    double lambda() const { return lambda_; }
    double rho() const { return rho_; }

    /// Smallest served x at height y (y >= lambda).
    double min_x_at(double y) const;
    /// Smallest served y at abscissa x (x >= lambda).
    double min_y_at(double x) const;

    /// True iff the state is feasible and its required power is <= rho.
    bool contains(const ChannelState& s) const;

private:
    SystemParams params_;
    double rho_;
    double lambda_;
};

/// Mean relay transmit power of the truncated-inversion policy at cutoff
/// rho (silent states contribute zero). Strictly increasing in rho.
double avg_relay_power(const SystemParams& params, double rho);

/// Outage probability of the truncated-inversion policy at cutoff rho;
/// also the outage of a relay transmitting the constant power rho.
/// Strictly decreasing in rho toward outage_floor.
double outage_probability(const SystemParams& params, double rho);

/// Outage limit as the cutoff grows without bound; set by source-relay
/// links too weak for their rate at any relay power.
double outage_floor(const SystemParams& params);

/// Exponential integral E1(z) = integral of exp(-t)/t over [z, inf).
/// Relative error <= 1e-10 on [1e-8, 700]; underflows to 0 for large z.
double exp_integral_e1(double z);

/// Ratio of the mean power of an always-inverting point-to-point system
/// to that of one truncating at the given outage target. Grows without
/// bound at both ends of (0, 1).
double p2p_truncation_gain(double p_out_target);

} // namespace afrelay
