#include "fogbench/atmosphere.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fogbench::atmosphere;

TEST_SUITE("atmosphere") {

TEST_CASE("beta from visibility") {
    // -ln(0.05)/50, frozen from a high-precision evaluation
    CHECK(beta_from_visibility(50.0, 0.05) == doctest::Approx(0.0599146454710798).epsilon(1e-12));

    SUBCASE("3/V shorthand stays within 0.2 % of the exact value") {
        for (double v = 10.0; v <= 100.0; v += 2.5) {
            const double exact = beta_from_visibility(v, 0.05);
            const double approx = 3.0 / v;
            CHECK(std::abs(approx - exact) / exact < 0.002);
        }
        CHECK(beta_from_visibility(30.0, 0.05) == doctest::Approx(0.0998577).epsilon(1e-6));
    }

    SUBCASE("clear-air limit") {
        CHECK(beta_from_visibility(1e12, 0.05) == doctest::Approx(0.0).epsilon(1e-9));
    }

    SUBCASE("domain errors") {
        CHECK_THROWS_AS(beta_from_visibility(0.0, 0.05), std::domain_error);
        CHECK_THROWS_AS(beta_from_visibility(-5.0, 0.05), std::domain_error);
        CHECK_THROWS_AS(beta_from_visibility(50.0, 0.0), std::domain_error);
        CHECK_THROWS_AS(beta_from_visibility(50.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(beta_from_visibility(50.0, 1.5), std::domain_error);
    }

    SUBCASE("round trip with visibility_from_beta is exact") {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> vis(1.0, 500.0);
        for (int i = 0; i < 200; ++i) {
            const double v = vis(gen);
            const double beta = beta_from_visibility(v, 0.05);
            CHECK(visibility_from_beta(beta, 0.05) == doctest::Approx(v).epsilon(1e-14));
        }
    }

    SUBCASE("strictly decreasing in visibility") {
        double prev = beta_from_visibility(5.0, 0.05);
        for (double v = 10.0; v <= 200.0; v += 5.0) {
            const double b = beta_from_visibility(v, 0.05);
            CHECK(b < prev);
            prev = b;
        }
    }
}

TEST_CASE("scene radiance") {
    CHECK(scene_radiance(1.0, 1.0) == 1.0);
    CHECK(scene_radiance(1.0, 2.0) == 0.25);
    CHECK(scene_radiance(0.0, 17.3) == 0.0);
    CHECK_THROWS_AS(scene_radiance(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(scene_radiance(1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(scene_radiance(-1.0, 1.0), std::domain_error);
}

TEST_CASE("attenuated intensity") {
    // 0.01 * exp(-1), frozen closed-form value
    CHECK(attenuated_intensity(1.0, 0.1, 10.0) ==
          doctest::Approx(0.00367879441171442).epsilon(1e-12));

    SUBCASE("beta = 0 reduces to scene radiance") {
        for (double d : {0.5, 1.0, 7.0, 30.0})
            CHECK(attenuated_intensity(1.0, 0.0, d) == scene_radiance(1.0, d));
    }
    SUBCASE("opaque limit") {
        CHECK(attenuated_intensity(1.0, 1e9, 1.0) == doctest::Approx(0.0));
    }
    SUBCASE("monotone decreasing in beta") {
        double prev = attenuated_intensity(1.0, 0.0, 10.0);
        for (double beta = 0.02; beta < 0.5; beta += 0.02) {
            const double v = attenuated_intensity(1.0, beta, 10.0);
            CHECK(v < prev);
            prev = v;
        }
    }
    CHECK_THROWS_AS(attenuated_intensity(1.0, -0.1, 10.0), std::domain_error);
}

TEST_CASE("airlight") {
    CHECK(airlight(0.5, 0.1, 0.0) == 0.0);
    CHECK(airlight(0.5, 0.1, 10.0) == doctest::Approx(0.316060279414279).epsilon(1e-12));
    CHECK(airlight(0.5, 0.1, 1e9) == doctest::Approx(0.5));

    SUBCASE("monotone increasing in d, bounded by i_inf") {
        double prev = -1.0;
        for (double d = 0.0; d <= 100.0; d += 2.0) {
            const double v = airlight(0.5, 0.1, d);
            CHECK(v > prev);
            CHECK(v <= 0.5);
            prev = v;
        }
    }

    CHECK_THROWS_AS(airlight(0.5, 0.1, -1.0), std::domain_error);
    CHECK_THROWS_AS(airlight(-0.5, 0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(airlight(0.5, -0.1, 1.0), std::domain_error);
}

TEST_CASE("observed intensity") {
    ScatterParams p;
    p.i0 = 1.0;
    p.i_inf = 0.5;
    p.beta_per_m = 0.1;
    // sum of the two component examples
    CHECK(observed_intensity(p, 10.0) == doctest::Approx(0.319739073825993).epsilon(1e-12));

    SUBCASE("beta = 0 gives pure inverse-square") {
        ScatterParams clear = p;
        clear.beta_per_m = 0.0;
        for (double d : {1.0, 3.0, 10.0})
            CHECK(observed_intensity(clear, d) == doctest::Approx(1.0 / (d * d)));
    }
    SUBCASE("asymptote: within 1e-9 of i_inf for beta*d > 25") {
        CHECK(std::abs(observed_intensity(p, 260.0) - p.i_inf) < 1e-9);
    }
    SUBCASE("observed - airlight >= 0 and decreasing in d") {
        double prev = 1e300;
        for (double d = 1.0; d <= 60.0; d += 1.0) {
            const double diff = observed_intensity(p, d) - airlight(p.i_inf, p.beta_per_m, d);
            CHECK(diff >= 0.0);
            CHECK(diff < prev);
            prev = diff;
        }
    }
    SUBCASE("monotone in i0 and i_inf at fixed d") {
        ScatterParams hi = p;
        hi.i0 = 2.0;
        CHECK(observed_intensity(hi, 10.0) > observed_intensity(p, 10.0));
        hi = p;
        hi.i_inf = 0.9;
        CHECK(observed_intensity(hi, 10.0) > observed_intensity(p, 10.0));
    }
    SUBCASE("invalid params") {
        ScatterParams bad = p;
        bad.epsilon = 1.0;
        CHECK_THROWS_AS(observed_intensity(bad, 1.0), std::domain_error);
        bad = p;
        bad.i0 = -1.0;
        CHECK_THROWS_AS(observed_intensity(bad, 1.0), std::domain_error);
    }
}

TEST_CASE("adapted intensity") {
    CHECK(adapted_intensity(0.4, 0.2, 5.0, 0.06, 0.03, 5.0) == 0.4); // both exponents zero
    CHECK(adapted_intensity(0.4, 0.2, 5.0, 0.06, 0.03, 15.0) ==
          doctest::Approx(0.271361010301267).epsilon(1e-12));
    CHECK(adapted_intensity(0.4, 0.2, 5.0, 0.06, 0.03, 1e9) == doctest::Approx(0.2));

    SUBCASE("clamp below d0") {
        CHECK(adapted_intensity(0.4, 0.2, 5.0, 0.06, 0.03, 1.0) == 0.4);
        CHECK(adapted_intensity(0.4, 0.2, 5.0, 0.06, 0.03, 4.999) == 0.4);
    }
    SUBCASE("reproduces the point-source model with d0=0, beta_a=beta, i0/d^2") {
        ScatterParams p;
        p.i0 = 0.7;
        p.i_inf = 0.3;
        p.beta_per_m = 0.08;
        for (double d : {0.5, 2.0, 9.0, 25.0}) {
            const double via_adapted =
                adapted_intensity(p.i0 / (d * d), p.i_inf, 0.0, p.beta_per_m, p.beta_per_m, d);
            CHECK(via_adapted == doctest::Approx(observed_intensity(p, d)).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(adapted_intensity(0.4, 0.2, 5.0, -0.06, 0.03, 10.0), std::domain_error);
    CHECK_THROWS_AS(adapted_intensity(0.4, 0.2, 5.0, 0.06, -0.03, 10.0), std::domain_error);
}

TEST_CASE("fog condition") {
    const auto rad = FogCondition::from_visibility(FogType::radiation, 50.0);
    CHECK(rad.droplet_mean_diameter_um == 2.0);
    CHECK(rad.beta_per_m == doctest::Approx(0.0599146454710798));
    CHECK(rad.consistent());

    const auto adv = FogCondition::from_visibility(FogType::advection, 20.0);
    CHECK(adv.droplet_mean_diameter_um == 6.0);

    const auto custom = FogCondition::from_visibility(FogType::advection, 20.0, 0.05, 4.5);
    CHECK(custom.droplet_mean_diameter_um == 4.5);

    FogCondition broken = rad;
    broken.beta_per_m *= 1.5;
    CHECK_FALSE(broken.consistent());
}

} // TEST_SUITE
