#include "afrelay/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace afrelay {

namespace {

void require_positive_finite(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

} // namespace

SystemParams::SystemParams(double p_s1, double p_s2, double r01, double r02,
                           double omega_x, double omega_y)
    : p_s1(p_s1), p_s2(p_s2), r01(r01), r02(r02), omega_x(omega_x), omega_y(omega_y) {
    require_positive_finite(p_s1, "p_s1");
    require_positive_finite(p_s2, "p_s2");
    require_positive_finite(omega_x, "omega_x");
    require_positive_finite(omega_y, "omega_y");
    delta1 = snr_threshold(r01);
    delta2 = snr_threshold(r02);
    const double inv1 = p_s1 / delta1;
    const double inv2 = p_s2 / delta2;
    balanced = std::abs(inv1 - inv2) <= 1e-12 * std::max(inv1, inv2);
}

ChannelState::ChannelState(double x, double y) : x(x), y(y) {
    if (!(x >= 0.0) || !(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
        throw std::invalid_argument("channel gains must be nonnegative and finite");
    }
}

double snr_threshold(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("rate must be positive and finite");
    }
    return std::exp2(2.0 * rate) - 1.0;
}

double relay_gain_sq(const SystemParams& params, const ChannelState& s, double p_r) {
    if (!(p_r >= 0.0)) throw std::invalid_argument("relay power must be nonnegative");
    return p_r / (params.p_s1 * s.x + params.p_s2 * s.y + 1.0);
}

double snr_at_s2(double p_s1, double p_s2, double x, double y, double p_r) {
    return (p_s1 * x) * (p_r * y) / (p_s1 * x + (p_s2 + p_r) * y + 1.0);
}

double snr_at_s1(double p_s1, double p_s2, double x, double y, double p_r) {
    return (p_s2 * x) * (p_r * y) / ((p_s1 + p_r) * x + p_s2 * y + 1.0);
}

double snr_at_s2(const SystemParams& params, const ChannelState& s, double p_r) {
    if (!(p_r >= 0.0)) throw std::invalid_argument("relay power must be nonnegative");
    return snr_at_s2(params.p_s1, params.p_s2, s.x, s.y, p_r);
}

double snr_at_s1(const SystemParams& params, const ChannelState& s, double p_r) {
    if (!(p_r >= 0.0)) throw std::invalid_argument("relay power must be nonnegative");
    return snr_at_s1(params.p_s1, params.p_s2, s.x, s.y, p_r);
}

bool is_outage(const SystemParams& params, const ChannelState& s, double p_r) {
    if (!(p_r >= 0.0)) throw std::invalid_argument("relay power must be nonnegative");
    return snr_at_s2(params.p_s1, params.p_s2, s.x, s.y, p_r) < params.delta1 ||
           snr_at_s1(params.p_s1, params.p_s2, s.x, s.y, p_r) < params.delta2;
}

} // namespace afrelay
