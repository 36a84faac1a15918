#include "afrelay/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "afrelay/errors.hpp"

namespace afrelay {

namespace {

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in (0, 1]: never 0, so -log stays finite.
double uniform01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1p-53;
}

struct BlockStat {
    std::uint64_t outages = 0;
    double sum_p = 0.0;
    double sum_p2 = 0.0;
};

constexpr std::uint64_t kBlock = 65536;

// Runs eval over the sample index range in fixed blocks and merges the
// per-block partials in block order, which keeps the result independent
// of how many workers processed them.
template <typename Eval>
EvalResult run_blocked(double omega_x, double omega_y, std::uint64_t n, std::uint64_t seed,
                       Eval&& eval) {
    if (n < 1) throw std::invalid_argument("sample count must be at least 1");
    const ChannelSampler sampler(omega_x, omega_y, seed);
    const std::uint64_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<BlockStat> stats(nblocks);

    auto run_block = [&](std::uint64_t b) {
        BlockStat st;
        const std::uint64_t begin = b * kBlock;
        const std::uint64_t end = std::min(n, begin + kBlock);
        for (std::uint64_t i = begin; i < end; ++i) {
            const ChannelState s = sampler.at(i);
            const auto [power, outage] = eval(s);
            if (outage) ++st.outages;
            st.sum_p += power;
            st.sum_p2 += power * power;
        }
        stats[b] = st;
    };

    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, std::thread::hardware_concurrency()), nblocks));
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) {
                    run_block(b);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    std::uint64_t outages = 0;
    double sum_p = 0.0;
    double sum_p2 = 0.0;
    for (const BlockStat& st : stats) {
        outages += st.outages;
        sum_p += st.sum_p;
        sum_p2 += st.sum_p2;
    }

    EvalResult r;
    r.n_samples = n;
    r.seed = seed;
    const double nd = static_cast<double>(n);
    r.outage_estimate = static_cast<double>(outages) / nd;
    r.outage_stderr = std::sqrt(r.outage_estimate * (1.0 - r.outage_estimate) / nd);
    r.avg_power_estimate = sum_p / nd;
    const double var = std::max(0.0, sum_p2 / nd - r.avg_power_estimate * r.avg_power_estimate);
    r.avg_power_stderr = std::sqrt(var / nd);
    return r;
}

} // namespace

ChannelSampler::ChannelSampler(double omega_x, double omega_y, std::uint64_t seed)
    : omega_x_(omega_x), omega_y_(omega_y), seed_(seed) {
    if (!(omega_x > 0.0) || !(omega_y > 0.0)) {
        throw std::invalid_argument("mean channel gains must be positive");
    }
}

ChannelState ChannelSampler::at(std::uint64_t index) const {
    const double ux = uniform01(splitmix64_at(seed_, 2 * index));
    const double uy = uniform01(splitmix64_at(seed_, 2 * index + 1));
    return {-omega_x_ * std::log(ux), -omega_y_ * std::log(uy)};
}

ChannelState sample_channel(double omega_x, double omega_y, std::uint64_t seed,
                            std::uint64_t index) {
    return ChannelSampler(omega_x, omega_y, seed).at(index);
}

EvalResult evaluate_policy(const SystemParams& params, const RelayPolicy& policy, std::uint64_t n,
                           std::uint64_t seed) {
    return run_blocked(params.omega_x, params.omega_y, n, seed,
                       [&](const ChannelState& s) -> std::pair<double, bool> {
                           const double p = policy(params, s);
                           return {p, is_outage(params, s, p)};
                       });
}

EvalResult evaluate_short_term_baseline(double p_total, double r01, double r02, double omega_x,
                                        double omega_y, std::uint64_t n, std::uint64_t seed) {
    if (!(p_total > 0.0) || !std::isfinite(p_total)) {
        throw std::invalid_argument("total power must be positive and finite");
    }
    const double delta1 = snr_threshold(r01);
    const double delta2 = snr_threshold(r02);
    const double p_r = 0.5 * p_total;
    return run_blocked(omega_x, omega_y, n, seed,
                       [&](const ChannelState& s) -> std::pair<double, bool> {
                           if (s.x == 0.0 && s.y == 0.0) return {p_r, true};
                           const ThreeNodeAllocation a = short_term_opa_allocation(p_total, s);
                           const bool out = snr_at_s2(a.p_s1, a.p_s2, s.x, s.y, a.p_r) < delta1 ||
                                            snr_at_s1(a.p_s1, a.p_s2, s.x, s.y, a.p_r) < delta2;
                           return {a.p_r, out};
                       });
}

CutoffSolution solve_rho_empirical(const SystemParams& params, double p_avg, std::uint64_t n,
                                   std::uint64_t seed) {
    if (!(p_avg > 0.0) || !std::isfinite(p_avg)) {
        throw std::invalid_argument("p_avg must be positive and finite");
    }
    if (n < 2) throw std::invalid_argument("sample count must be at least 2");

    const ChannelSampler sampler(params.omega_x, params.omega_y, seed);
    std::vector<double> required;
    required.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const ShortTermPower st = min_short_term_power(params, sampler.at(i));
        if (st.feasible) required.push_back(st.power);
    }
    std::sort(required.begin(), required.end());

    // Empirical mean power as a function of the cutoff is the normalized
    // prefix sum over the sorted requirements; invert it by binary search.
    const double nd = static_cast<double>(n);
    std::vector<double> prefix(required.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < required.size(); ++i) {
        acc += required[i];
        prefix[i] = acc;
    }
    if (required.empty() || prefix.back() / nd < p_avg) {
        std::ostringstream msg;
        msg << "empirical cutoff search: budget " << p_avg
            << " exceeds the serve-all average "
            << (required.empty() ? 0.0 : prefix.back() / nd) << " of this sample set";
        throw NumericalError(msg.str());
    }

    std::size_t lo = 0;
    std::size_t hi = required.size() - 1;
    int iters = 0;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        ++iters;
        if (prefix[mid] / nd < p_avg) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    // lo is the first index reaching the budget; its predecessor may be closer.
    std::size_t pick = lo;
    if (lo > 0 &&
        std::abs(prefix[lo - 1] / nd - p_avg) < std::abs(prefix[lo] / nd - p_avg)) {
        pick = lo - 1;
    }
    // Ties in the sorted requirements are served together or not at all.
    while (pick + 1 < required.size() && required[pick + 1] == required[pick]) ++pick;

    CutoffSolution sol;
    sol.cutoff = required[pick];
    sol.achieved = prefix[pick] / nd;
    sol.iterations = iters;
    sol.residual = std::abs(sol.achieved - p_avg);
    return sol;
}

} // namespace afrelay
