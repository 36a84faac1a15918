#include "afrelay/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace afrelay {

ShortTermPower min_short_term_power(const SystemParams& params, const ChannelState& s) {
    const double margin1 = params.p_s1 * s.x - params.delta1;
    const double margin2 = params.p_s2 * s.y - params.delta2;
    if (margin1 <= 0.0 || margin2 <= 0.0) {
        return {};  // no finite relay power can serve this state
    }

    const double load = 1.0 + params.p_s1 * s.x + params.p_s2 * s.y;
    const double need1 = params.delta1 * load / (s.y * margin1);
    const double need2 = params.delta2 * load / (s.x * margin2);

    ShortTermPower result;
    result.feasible = true;
    result.power = std::max(need1, need2);
    if (std::abs(need1 - need2) <= 1e-12 * result.power) {
        result.binding = Binding::Both;
    } else {
        result.binding = need1 > need2 ? Binding::FirstHopRate : Binding::SecondHopRate;
    }

    // The closed form lands exactly on the success boundary; round-off can
    // leave an SNR one ulp short of its threshold. Nudge up until the
    // returned power actually clears both constraints.
    constexpr double step = 1.0 + 0x1p-50;
    for (int i = 0; i < 200 && is_outage(params, s, result.power); ++i) {
        result.power *= step;
    }
    return result;
}

double opa_power(const SystemParams& params, const ChannelState& s, double cutoff) {
    if (!(cutoff > 0.0)) throw std::invalid_argument("cutoff must be positive");
    const ShortTermPower st = min_short_term_power(params, s);
    return (st.feasible && st.power <= cutoff) ? st.power : 0.0;
}

double dual_opa_power(const SystemParams& params, const ChannelState& s, double mu) {
    return opa_power(params, s, mu);
}

RelayPolicy RelayPolicy::opa(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("cutoff must be positive");
    return {Kind::Opa, rho};
}

RelayPolicy RelayPolicy::dual_opa(double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("cutoff must be positive");
    return {Kind::DualOpa, mu};
}

RelayPolicy RelayPolicy::fixed(double p) {
    if (!(p >= 0.0)) throw std::invalid_argument("fixed power must be nonnegative");
    return {Kind::Fixed, p};
}

RelayPolicy RelayPolicy::zero() { return {Kind::Zero, 0.0}; }

double RelayPolicy::operator()(const SystemParams& params, const ChannelState& s) const {
    switch (kind_) {
        case Kind::Opa:
        case Kind::DualOpa:
            return opa_power(params, s, level_);
        case Kind::Fixed:
            return level_;
        case Kind::Zero:
            return 0.0;
    }
    return 0.0;
}

const char* RelayPolicy::name() const {
    switch (kind_) {
        case Kind::Opa: return "opa";
        case Kind::DualOpa: return "dual_opa";
        case Kind::Fixed: return "fixed";
        case Kind::Zero: return "zero";
    }
    return "?";
}

ThreeNodeAllocation short_term_opa_allocation(double p_total, const ChannelState& s) {
    if (!(p_total > 0.0)) throw std::invalid_argument("total power must be positive");
    const double sx = std::sqrt(s.x);
    const double sy = std::sqrt(s.y);
    if (sx + sy == 0.0) {
        throw std::domain_error("degenerate channel state: x = y = 0 leaves the split undefined");
    }
    ThreeNodeAllocation alloc;
    const double half = 0.5 * p_total;
    alloc.p_s1 = half * (sy / (sx + sy));
    alloc.p_s2 = half - alloc.p_s1;  // keeps p_s1 + p_s2 == 0.5 * p_total exact
    alloc.p_r = half;
    return alloc;
}

} // namespace afrelay
