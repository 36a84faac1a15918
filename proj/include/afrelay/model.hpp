#pragma once

#include <cstdint>

namespace afrelay {

/// Fixed configuration of the two-way relaying system: end-node transmit
/// powers, the two session rates, and the mean channel gains of the two
/// hops. Powers are linear and normalized to the unit noise variance;
/// rates are in bits/s/Hz over the two-phase cycle.
///
/// The decoding thresholds delta1/delta2 are derived once at construction:
/// a session at rate r survives iff its end-to-end SNR reaches 2^(2r) - 1.
struct SystemParams {
    double p_s1;     ///< S1 transmit power (linear)
    double p_s2;     ///< S2 transmit power (linear)
    double r01;      ///< rate of the S1 -> S2 session
    double r02;      ///< rate of the S2 -> S1 session
    double omega_x;  ///< mean squared gain of the S1-R channel
    double omega_y;  ///< mean squared gain of the S2-R channel

    double delta1;   ///< SNR threshold for the S1 -> S2 session
    double delta2;   ///< SNR threshold for the S2 -> S1 session

    /// True iff p_s1/delta1 == p_s2/delta2 (relative tolerance 1e-12),
    /// the regime in which the closed-form region geometry applies.
    bool balanced;

    SystemParams(double p_s1, double p_s2, double r01, double r02,
                 double omega_x = 1.0, double omega_y = 1.0);
};

/// One block-fading realization: squared amplitudes of the S1-R and S2-R
/// channel coefficients. Only these magnitudes enter the SNR expressions.
struct ChannelState {
    double x = 0.0;
    double y = 0.0;

    ChannelState() = default;
    ChannelState(double x, double y);
};

/// Minimum linear SNR that supports `rate` over the two-phase cycle.
double snr_threshold(double rate);

/// Squared amplification gain the relay applies to the composite receive
/// signal so that its output power equals p_r.
double relay_gain_sq(const SystemParams& params, const ChannelState& s, double p_r);

/// End-to-end SNR of the S1 -> R -> S2 session after self-interference
/// removal at S2, for relay output power p_r.
double snr_at_s2(const SystemParams& params, const ChannelState& s, double p_r);
double snr_at_s2(double p_s1, double p_s2, double x, double y, double p_r);

/// End-to-end SNR of the S2 -> R -> S1 session at S1.
double snr_at_s1(const SystemParams& params, const ChannelState& s, double p_r);
double snr_at_s1(double p_s1, double p_s2, double x, double y, double p_r);

/// True iff at least one session fails its rate at relay power p_r.
/// Meeting a threshold exactly counts as success.
bool is_outage(const SystemParams& params, const ChannelState& s, double p_r);

} // namespace afrelay
