#pragma once

#include "afrelay/model.hpp"

namespace afrelay {

/// Which rate constraint fixes the minimum relay power at a channel state.
enum class Binding {
    FirstHopRate,   ///< the S1 -> S2 session is the binding one
    SecondHopRate,  ///< the S2 -> S1 session is the binding one
    Both,           ///< the two requirements coincide (within 1e-12 relative)
};

/// Minimum relay power that keeps both sessions out of outage at one
/// channel state, or the finding that no finite power can.
struct ShortTermPower {
    bool feasible = false;
    double power = 0.0;               ///< required power; 0 when infeasible
    Binding binding = Binding::Both;  ///< meaningful only when feasible
};

/// Solves the per-state minimum-power problem. Infeasible whenever either
/// source-relay link is too weak for its own rate regardless of relay
/// power (p_s1*x <= delta1 or p_s2*y <= delta2, boundary included: the
/// required power diverges there).
ShortTermPower min_short_term_power(const SystemParams& params, const ChannelState& s);

/// Truncated inversion: the minimum short-term power when it does not
/// exceed `cutoff`, silence otherwise.
double opa_power(const SystemParams& params, const ChannelState& s, double cutoff);

/// Same truncation rule with the cutoff chosen for an outage target
/// instead of a power budget.
double dual_opa_power(const SystemParams& params, const ChannelState& s, double mu);

/// A deterministic map from channel state to relay transmit power.
class RelayPolicy {
public:
    static RelayPolicy opa(double rho);
    static RelayPolicy dual_opa(double mu);
    static RelayPolicy fixed(double p);
    static RelayPolicy zero();

    double operator()(const SystemParams& params, const ChannelState& s) const;

    /// Truncation level for the adaptive variants, constant power for
    /// fixed, 0 for zero.
    double level() const { return level_; }
    const char* name() const;

private:
    enum class Kind { Opa, DualOpa, Fixed, Zero };
    RelayPolicy(Kind kind, double level) : kind_(kind), level_(level) {}
    Kind kind_;
    double level_;
};

/// Per-realization split of one total power budget across S1, S2 and the
/// relay used by the short-term baseline scheme.
struct ThreeNodeAllocation {
    double p_s1 = 0.0;
    double p_s2 = 0.0;
    double p_r = 0.0;
};

/// Baseline split: the relay takes half the budget, the end nodes share
/// the other half in proportion sqrt(y) : sqrt(x).
ThreeNodeAllocation short_term_opa_allocation(double p_total, const ChannelState& s);

} // namespace afrelay
