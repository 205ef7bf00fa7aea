#include "fogbench/gated.hpp"

#include <doctest.h>

#include <cmath>

using namespace fogbench;
using namespace fogbench::gated;
using fogbench::atmosphere::FogCondition;
using fogbench::atmosphere::FogType;

namespace {

// Independent oracle: closed-form integral of (a + b r) exp(-2 beta r).
double linear_exp_segment(double a, double b, double beta, double lo, double hi) {
    const double c2 = b / (2.0 * beta);
    const double c1 = (a + c2) / (2.0 * beta);
    auto F = [&](double r) { return -std::exp(-2.0 * beta * r) * (c1 + c2 * r); };
    return F(hi) - F(lo);
}

double backscatter_oracle(const GateProfile& profile, double beta) {
    const double d0 = profile.slice_start_m();
    const double d1 = profile.slice_peak_m();
    const double d2 = profile.plateau_end_m();
    const double d3 = profile.slice_end_m();
    double total = 0.0;
    const double rise = 1.0 / (d1 - d0);
    total += linear_exp_segment(-d0 * rise * beta, rise * beta, beta, d0, d1);
    if (d2 > d1) total += linear_exp_segment(beta, 0.0, beta, d1, d2);
    const double fall = 1.0 / (d3 - d2);
    total += linear_exp_segment(d3 * fall * beta, -fall * beta, beta, d2, d3);
    return total;
}

FogCondition fog_with_beta(double beta) {
    FogCondition fog;
    fog.fog_type = FogType::radiation;
    fog.beta_per_m = beta;
    fog.visibility_m = -std::log(0.05) / beta;
    return fog;
}

} // namespace

TEST_SUITE("gated") {

TEST_CASE("slice start") {
    GatingScheme table1; // 160/90/160 ns, m=2000 defaults
    CHECK(slice_start(table1) == doctest::Approx(13.4906606).epsilon(1e-7));
    CHECK(std::abs(slice_start(table1) - 13.5) < 0.02); // c = 3e8 rounding

    GatingScheme no_delay = table1;
    no_delay.t_delay_ns = 0.0;
    CHECK(slice_start(no_delay) == 0.0);

    GatingScheme doubled = table1;
    doubled.t_delay_ns = 180.0;
    CHECK(slice_start(doubled) == doctest::Approx(26.9813212).epsilon(1e-7));

    SUBCASE("monotone increasing in t_delay") {
        double prev = -1.0;
        for (double delay = 0.0; delay <= 300.0; delay += 30.0) {
            GatingScheme s = table1;
            s.t_delay_ns = delay;
            CHECK(slice_start(s) > prev);
            prev = slice_start(s);
        }
    }

    SUBCASE("validation") {
        GatingScheme bad = table1;
        bad.t_laser_ns = 0.0;
        CHECK_THROWS_AS(slice_start(bad), std::invalid_argument);
        bad = table1;
        bad.micro_exposures = 0;
        CHECK_THROWS_AS(slice_start(bad), std::invalid_argument);
    }
}

TEST_CASE("gate profile") {
    GatingScheme table1;
    const GateProfile profile(table1);

    // t_laser == t_gate: triangular profile
    CHECK(profile.slice_peak_m() == doctest::Approx(37.4740572).epsilon(1e-7));
    CHECK(profile.plateau_end_m() == doctest::Approx(profile.slice_peak_m()));
    CHECK(profile.slice_end_m() == doctest::Approx(61.4574539).epsilon(1e-7));

    CHECK(profile.gain(13.49) == 0.0);   // at/below the ramp start
    CHECK(profile.gain(5.0) == 0.0);
    CHECK(profile.gain(profile.slice_peak_m()) == doctest::Approx(1.0));
    CHECK(profile.gain(70.0) == 0.0);
    // round-trip time 170 ns -> half way up the ramp
    CHECK(profile.gain(25.4823589) == doctest::Approx(0.5).epsilon(1e-6));

    SUBCASE("gain within [0,1] everywhere, zero outside the support") {
        for (double d = 0.1; d < 80.0; d += 0.05) {
            const double g = profile.gain(d);
            CHECK(g >= 0.0);
            CHECK(g <= 1.0);
            if (d < profile.slice_start_m() || d > profile.slice_end_m()) CHECK(g == 0.0);
        }
    }

    SUBCASE("sampled curve integrates to the analytic trapezoid area") {
        // trapezoid rule on a fine grid vs closed form
        const double step = 0.002;
        double sum = 0.0;
        for (double d = profile.slice_start_m(); d < profile.slice_end_m(); d += step)
            sum += 0.5 * (profile.gain(d) + profile.gain(d + step)) * step;
        CHECK(sum == doctest::Approx(profile.area()).epsilon(1e-6));
    }

    SUBCASE("support width grows with t_laser and t_gate") {
        GatingScheme longer = table1;
        longer.t_laser_ns = 240.0;
        CHECK(GateProfile(longer).slice_width_m() > profile.slice_width_m());
        longer = table1;
        longer.t_gate_ns = 240.0;
        CHECK(GateProfile(longer).slice_width_m() > profile.slice_width_m());
    }

    SUBCASE("trapezoid when t_laser != t_gate") {
        GatingScheme wide = table1;
        wide.t_gate_ns = 320.0;
        const GateProfile p(wide);
        CHECK(p.plateau_end_m() > p.slice_peak_m());
        CHECK(p.gain(0.5 * (p.slice_peak_m() + p.plateau_end_m())) == doctest::Approx(1.0));
    }

    SUBCASE("sample grid covers the kinks") {
        const auto points = profile.sample(1.0);
        REQUIRE(!points.empty());
        bool has_peak = false;
        for (const auto& [d, g] : points)
            if (d == profile.slice_peak_m()) has_peak = g == doctest::Approx(1.0);
        CHECK(has_peak);
    }
}

TEST_CASE("gated target response") {
    GatingScheme table1;
    const auto fog = fog_with_beta(0.05);

    SUBCASE("gate closed below slice start") {
        CHECK(gated_target_response(table1, fog, 0.9, 1.0, 5.0).intensity == 0.0);
        CHECK(gated_target_response(table1, fog, 0.9, 1.0, 13.0).intensity == 0.0);
    }
    SUBCASE("black target") {
        CHECK(gated_target_response(table1, fog, 0.0, 1.0, 20.0).intensity == 0.0);
    }
    SUBCASE("linear in rho: 0.9 vs 0.05 gives exactly 18x") {
        const double hi = gated_target_response(table1, fog, 0.90, 1.0, 20.0).intensity;
        const double lo = gated_target_response(table1, fog, 0.05, 1.0, 20.0).intensity;
        CHECK(hi / lo == doctest::Approx(18.0).epsilon(1e-12));
    }
    SUBCASE("linear in laser intensity below saturation") {
        const double one = gated_target_response(table1, fog, 0.5, 1.0, 20.0).intensity;
        const double three = gated_target_response(table1, fog, 0.5, 3.0, 20.0).intensity;
        CHECK(three == doctest::Approx(3.0 * one).epsilon(1e-12));
    }
    SUBCASE("saturation clamps and flags") {
        const auto r = gated_target_response(table1, fog, 0.9, 1e6, 20.0);
        CHECK(r.intensity == 1.0);
        CHECK(r.saturated);
        CHECK_FALSE(gated_target_response(table1, fog, 0.9, 1.0, 20.0).saturated);
    }
    SUBCASE("micro exposures cancel against the default full-well scale") {
        GatingScheme more = table1;
        more.micro_exposures = 4000;
        CHECK(gated_target_response(more, fog, 0.5, 1.0, 20.0).intensity ==
              doctest::Approx(gated_target_response(table1, fog, 0.5, 1.0, 20.0).intensity));
        // explicit full-well scale: response scales with m
        CHECK(gated_target_response(more, fog, 0.5, 1e-4, 20.0, 2000.0).intensity ==
              doctest::Approx(2.0 * gated_target_response(table1, fog, 0.5, 1e-4, 20.0, 2000.0)
                                        .intensity));
    }
    CHECK_THROWS_AS(gated_target_response(table1, fog, 0.5, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(gated_target_response(table1, fog, 1.5, 1.0, 1.0), std::domain_error);
}

TEST_CASE("backscatter integral") {
    GatingScheme table1;

    SUBCASE("ungated analytic value is exactly 1/2") {
        CHECK(backscatter_integral_ungated(fog_with_beta(0.1)) == 0.5);
        CHECK(backscatter_integral_ungated(fog_with_beta(0.02)) == 0.5);
        CHECK(backscatter_integral_ungated(fog_with_beta(0.1), 2.0) == 1.0);
    }

    SUBCASE("table-1 scheme at beta=0.1 matches the quadrature oracle") {
        const auto fog = fog_with_beta(0.1);
        const double val = backscatter_integral(table1, fog);
        // frozen from the independent closed-form evaluation
        CHECK(val == doctest::Approx(0.00690309115911654).epsilon(1e-9));
        CHECK(val < backscatter_integral_ungated(fog));
    }

    SUBCASE("quadrature agrees with the closed form across beta") {
        const GateProfile profile(table1);
        for (double beta : {0.01, 0.03, 0.0599146454710798, 0.1, 0.15, 0.2, 0.3}) {
            const double numeric = backscatter_integral(table1, fog_with_beta(beta));
            const double exact = backscatter_oracle(profile, beta);
            CHECK(numeric == doctest::Approx(exact).epsilon(1e-7));
            CHECK(std::abs(numeric - exact) < 1e-9);
        }
    }

    SUBCASE("strict suppression for every delayed scheme") {
        for (double delay : {10.0, 50.0, 90.0, 200.0}) {
            GatingScheme s = table1;
            s.t_delay_ns = delay;
            for (double beta : {0.02, 0.1, 0.25}) {
                const double ratio = backscatter_suppression(s, fog_with_beta(beta));
                CHECK(ratio > 0.0);
                CHECK(ratio < 1.0);
            }
        }
    }

    SUBCASE("clear air gives zero backscatter") {
        FogCondition clear;
        clear.beta_per_m = 0.0;
        clear.visibility_m = 1e12;
        CHECK(backscatter_integral(table1, clear) == 0.0);
        CHECK(backscatter_integral_ungated(clear) == 0.0);
    }
}

} // TEST_SUITE
