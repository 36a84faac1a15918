#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "afrelay/analytic.hpp"
#include "afrelay/model.hpp"
#include "afrelay/montecarlo.hpp"
#include "afrelay/policies.hpp"

using namespace afrelay;

namespace {
const SystemParams params_a(1.0, 1.0, 0.5, 0.5);
}

TEST_CASE("minimum short-term power: hand-checked states") {
    SUBCASE("both constraints coincide on the diagonal") {
        const ShortTermPower st = min_short_term_power(params_a, {2.0, 2.0});
        REQUIRE(st.feasible);
        CHECK(st.power == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(st.binding == Binding::Both);
    }
    SUBCASE("second session binds") {
        const SystemParams p(2.0, 1.0, 0.5, 0.5);
        const ShortTermPower st = min_short_term_power(p, {1.0, 3.0});
        REQUIRE(st.feasible);
        CHECK(st.power == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(st.binding == Binding::SecondHopRate);
    }
    SUBCASE("weak first hop is infeasible at any relay power") {
        const ShortTermPower st = min_short_term_power(params_a, {0.5, 5.0});
        CHECK_FALSE(st.feasible);
        CHECK(st.power == 0.0);
    }
    SUBCASE("boundary x = delta1/p_s1 counts as infeasible") {
        CHECK_FALSE(min_short_term_power(params_a, {1.0, 5.0}).feasible);
        CHECK_FALSE(min_short_term_power(params_a, {5.0, 1.0}).feasible);
    }
}

TEST_CASE("minimum short-term power is tight and sufficient") {
    const ChannelSampler sampler(1.0, 1.0, 42);
    int feasible_seen = 0;
    for (std::uint64_t i = 0; feasible_seen < 2000; ++i) {
        const ChannelState s = sampler.at(i);
        const ShortTermPower st = min_short_term_power(params_a, s);
        if (!st.feasible) {
            CHECK(is_outage(params_a, s, 1e9));
            continue;
        }
        ++feasible_seen;
        CHECK_FALSE(is_outage(params_a, s, st.power));
        CHECK(is_outage(params_a, s, st.power * (1.0 - 1e-6)));
        CHECK_FALSE(is_outage(params_a, s, st.power * 2.0));
        const double slack =
            std::min(snr_at_s2(params_a, s, st.power) - params_a.delta1,
                     snr_at_s1(params_a, s, st.power) - params_a.delta2);
        CHECK(slack >= 0.0);
        CHECK(slack <= 1e-9);
    }
}

TEST_CASE("swap symmetry with symmetric parameters") {
    const ChannelSampler sampler(1.0, 1.0, 5);
    for (std::uint64_t i = 0; i < 500; ++i) {
        const ChannelState s = sampler.at(i);
        const ShortTermPower a = min_short_term_power(params_a, {s.x, s.y});
        const ShortTermPower b = min_short_term_power(params_a, {s.y, s.x});
        CHECK(a.feasible == b.feasible);
        if (a.feasible) CHECK(a.power == doctest::Approx(b.power).epsilon(1e-12));
    }
}

TEST_CASE("corner identity: diagonal state at the region corner needs exactly the cutoff") {
    for (double rho : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0}) {
        const double corner = lambda_cutoff(params_a, rho);
        const ShortTermPower st = min_short_term_power(params_a, {corner, corner});
        REQUIRE(st.feasible);
        CHECK(std::abs(st.power - rho) <= 1e-9 * rho);
    }
}

TEST_CASE("truncated inversion") {
    CHECK(opa_power(params_a, {2.0, 2.0}, 3.0) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(opa_power(params_a, {2.0, 2.0}, 2.0) == 0.0);
    CHECK(opa_power(params_a, {0.5, 5.0}, 100.0) == 0.0);
    CHECK(dual_opa_power(params_a, {2.0, 2.0}, 2.5) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(dual_opa_power(params_a, {2.0, 2.0}, 0.1) == 0.0);
    CHECK_THROWS_AS(opa_power(params_a, {1.0, 1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(opa_power(params_a, {1.0, 1.0}, -2.0), std::invalid_argument);
}

TEST_CASE("truncation properties on sampled states") {
    const ChannelSampler sampler(1.0, 1.0, 13);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const ChannelState s = sampler.at(i);
        double prev = 0.0;
        for (double rho : {0.5, 1.0, 2.0, 4.0, 16.0}) {
            const double p = opa_power(params_a, s, rho);
            CHECK(p <= rho);
            CHECK(p >= prev);  // pointwise non-decreasing in the cutoff
            prev = p;
        }
    }
}

TEST_CASE("relay policy objects") {
    const ChannelState s(2.0, 2.0);
    CHECK(RelayPolicy::opa(3.0)(params_a, s) == doctest::Approx(2.5));
    CHECK(RelayPolicy::dual_opa(2.5)(params_a, s) == doctest::Approx(2.5));
    CHECK(RelayPolicy::fixed(1.25)(params_a, s) == 1.25);
    CHECK(RelayPolicy::zero()(params_a, s) == 0.0);
    CHECK(RelayPolicy::opa(3.0).level() == 3.0);
    CHECK_THROWS_AS(RelayPolicy::opa(0.0), std::invalid_argument);
    CHECK_THROWS_AS(RelayPolicy::dual_opa(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(RelayPolicy::fixed(-0.1), std::invalid_argument);
}

TEST_CASE("three-node split of the short-term baseline") {
    SUBCASE("equal gains split the end-node half evenly") {
        const ThreeNodeAllocation a = short_term_opa_allocation(12.0, {3.7, 3.7});
        CHECK(a.p_s1 == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(a.p_s2 == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(a.p_r == 6.0);
    }
    SUBCASE("stronger own hop shifts power to the other node") {
        const ThreeNodeAllocation a = short_term_opa_allocation(12.0, {4.0, 1.0});
        CHECK(a.p_s1 == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(a.p_s2 == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(a.p_r == 6.0);
    }
    SUBCASE("dead link x=0 is the limit of the sharing rule") {
        const ThreeNodeAllocation a = short_term_opa_allocation(12.0, {0.0, 1.0});
        CHECK(a.p_s1 == 6.0);
        CHECK(a.p_s2 == 0.0);
        CHECK(a.p_r == 6.0);
    }
    SUBCASE("budget is conserved exactly") {
        const ChannelSampler sampler(1.0, 1.0, 3);
        for (std::uint64_t i = 0; i < 200; ++i) {
            const ChannelState s = sampler.at(i);
            const ThreeNodeAllocation a = short_term_opa_allocation(7.3, s);
            CHECK(a.p_s1 >= 0.0);
            CHECK(a.p_s2 >= 0.0);
            CHECK(a.p_s1 + a.p_s2 + a.p_r == doctest::Approx(7.3).epsilon(1e-12));
        }
    }
    SUBCASE("degenerate state rejected") {
        CHECK_THROWS_AS(short_term_opa_allocation(12.0, {0.0, 0.0}), std::domain_error);
        CHECK_THROWS_AS(short_term_opa_allocation(0.0, {1.0, 1.0}), std::invalid_argument);
    }
}
