#pragma once

#include <cstdint>

#include "afrelay/model.hpp"
#include "afrelay/numerics.hpp"
#include "afrelay/policies.hpp"

namespace afrelay {

/// Estimates from one simulated batch of channel states.
struct EvalResult {
    double outage_estimate = 0.0;
    double outage_stderr = 0.0;
    double avg_power_estimate = 0.0;
    double avg_power_stderr = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Counter-based exponential sampler: sample i is a pure function of
/// (seed, i), so any sharding of the index range reproduces the same
/// stream. x uses counter 2i, y uses 2i+1.
class ChannelSampler {
public:
    ChannelSampler(double omega_x, double omega_y, std::uint64_t seed);
    ChannelState at(std::uint64_t index) const;

private:
    double omega_x_;
    double omega_y_;
    std::uint64_t seed_;
};

/// Single draw from the sampler's stream, for callers that do not want to
/// hold a sampler.
ChannelState sample_channel(double omega_x, double omega_y, std::uint64_t seed,
                            std::uint64_t index);

/// Runs the policy over n sampled states and reports outage and relay
/// power statistics. Identical (params, policy, n, seed) give identical
/// results regardless of worker count.
EvalResult evaluate_policy(const SystemParams& params, const RelayPolicy& policy, std::uint64_t n,
                           std::uint64_t seed);

/// Baseline that re-splits the total budget p_total across the three nodes
/// every realization. Relay power is 0.5 * p_total by construction, so the
/// power columns of the result are exact.
EvalResult evaluate_short_term_baseline(double p_total, double r01, double r02, double omega_x,
                                        double omega_y, std::uint64_t n, std::uint64_t seed);

/// Empirical stand-in for solve_rho on parameter sets the closed forms do
/// not cover: inverts the average-power curve of one fixed sample set.
/// Throws NumericalError when even serving every feasible state cannot
/// spend p_avg on that set.
CutoffSolution solve_rho_empirical(const SystemParams& params, double p_avg, std::uint64_t n,
                                   std::uint64_t seed);

} // namespace afrelay
