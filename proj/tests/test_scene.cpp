#include "fogbench/scene.hpp"

#include "fogbench/metrics.hpp"

#include <doctest.h>

#include <cmath>

using namespace fogbench;
using namespace fogbench::scene;
using fogbench::atmosphere::FogCondition;
using fogbench::atmosphere::FogType;

namespace {

FogCondition fog_v(double visibility) {
    return FogCondition::from_visibility(FogType::radiation, visibility);
}

SensorModel quiet_standard() {
    SensorModel s = SensorModel::standard_camera();
    s.noise.read_sigma = 0.0;
    s.noise.shot_scale = 0.0;
    return s;
}

SensorModel quiet_gated() {
    SensorModel s = SensorModel::gated_camera();
    s.noise.read_sigma = 0.0;
    s.noise.shot_scale = 0.0;
    return s;
}

} // namespace

TEST_SUITE("scene") {

TEST_CASE("bin by depth") {
    SUBCASE("two-point bin") {
        const TraceSample samples[] = {{10.1, 0.2, 0.0}, {10.4, 0.4, 0.0}};
        const auto bins = bin_by_depth(samples, 1.0);
        REQUIRE(bins.size() == 1);
        CHECK(bins[0].center_m == doctest::Approx(10.5));
        CHECK(bins[0].mean == doctest::Approx(0.3));
        CHECK(bins[0].std == doctest::Approx(std::sqrt(0.02)).epsilon(1e-9));
        CHECK(bins[0].count == 2);
    }
    SUBCASE("singleton bins have zero std") {
        const TraceSample samples[] = {{1.5, 0.7, 0.0}, {4.5, 0.1, 0.0}};
        const auto bins = bin_by_depth(samples, 1.0);
        REQUIRE(bins.size() == 2);
        CHECK(bins[0].mean == 0.7);
        CHECK(bins[0].std == 0.0);
        CHECK(bins[1].mean == 0.1);
    }
    SUBCASE("identical samples give zero std everywhere") {
        std::vector<TraceSample> samples;
        for (double d = 0.2; d < 12.0; d += 0.3) samples.push_back({d, 0.25, 0.0});
        for (const auto& bin : bin_by_depth(samples, 2.0)) CHECK(bin.std == 0.0);
    }
    SUBCASE("bins sorted, non-overlapping, empty bins omitted") {
        const TraceSample samples[] = {{25.0, 0.1, 0.0}, {2.0, 0.3, 0.0}, {2.1, 0.2, 0.0}};
        const auto bins = bin_by_depth(samples, 1.0);
        REQUIRE(bins.size() == 2);
        CHECK(bins[0].center_m < bins[1].center_m);
        CHECK(bins[0].count == 2);
        CHECK(bins[1].count == 1);
    }
    SUBCASE("mass conservation: weighted bin means recombine to the global mean") {
        std::vector<TraceSample> samples;
        double global = 0.0;
        int n = 0;
        for (double d = 0.1; d < 30.0; d += 0.37) {
            const double v = 0.5 + 0.4 * std::sin(d);
            samples.push_back({d, v, 0.0});
            global += v;
            ++n;
        }
        global /= n;
        double weighted = 0.0;
        int total = 0;
        for (const auto& bin : bin_by_depth(samples, 1.0)) {
            weighted += bin.mean * bin.count;
            total += bin.count;
        }
        CHECK(total == n);
        CHECK(weighted / total == doctest::Approx(global).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bin_by_depth(std::span<const TraceSample>{}, 0.0), std::invalid_argument);
}

TEST_CASE("simulate sweep: standard sensor") {
    const Scenario scenario = Scenario::passive();
    SweepParams params;
    const auto targets = standard_targets();

    SUBCASE("no fog, no air-light: clamped rho-proportional constant") {
        // beta = 0 is the clear-air limit of the model chain
        FogCondition clear;
        clear.beta_per_m = 0.0;
        clear.visibility_m = 1e12;
        const auto traces = simulate_sweep(scenario, clear, quiet_standard(), targets, params);
        REQUIRE(traces.size() == 3);
        for (const auto& trace : traces) {
            const double expect = params.illumination.headlight_scale * trace.rho;
            for (const auto& s : trace.samples)
                CHECK(s.intensity == doctest::Approx(std::min(expect, 1.0)).epsilon(1e-12));
        }
    }

    SUBCASE("rho ordering holds at every depth beyond the onset") {
        const auto traces =
            simulate_sweep(scenario, fog_v(50.0), quiet_standard(), targets, params);
        REQUIRE(traces.size() == 3);
        for (std::size_t i = 0; i < traces[0].samples.size(); ++i) {
            const double d = traces[0].samples[i].depth_m;
            if (d <= params.illumination.onset_m) continue;
            CHECK(traces[2].samples[i].intensity > traces[1].samples[i].intensity);
            CHECK(traces[1].samples[i].intensity > traces[0].samples[i].intensity);
        }
    }

    SUBCASE("trace approaches the ambient brightness at depth") {
        SweepParams far = params;
        Scenario long_chamber = scenario;
        long_chamber.chamber_length_m = 400.0;
        const auto traces =
            simulate_sweep(long_chamber, fog_v(20.0), quiet_standard(), targets, far);
        const double tail = traces[2].samples.back().intensity;
        CHECK(tail == doctest::Approx(params.illumination.ambient_i_inf).epsilon(1e-6));
    }

    SUBCASE("monotone in rho also with noise enabled") {
        SensorModel noisy = SensorModel::standard_camera();
        const auto traces = simulate_sweep(scenario, fog_v(30.0), noisy, targets, params);
        // binned means average the noise down; check ordering on bins
        for (std::size_t b = 6; b < traces[0].binned.size(); ++b)
            CHECK(traces[2].binned[b].mean > traces[0].binned[b].mean);
    }

    SUBCASE("deterministic per seed") {
        SensorModel noisy = SensorModel::standard_camera();
        SweepParams a = params;
        a.seed = 99;
        const auto t1 = simulate_sweep(scenario, fog_v(30.0), noisy, targets, a);
        const auto t2 = simulate_sweep(scenario, fog_v(30.0), noisy, targets, a);
        REQUIRE(t1.size() == t2.size());
        for (std::size_t i = 0; i < t1.size(); ++i)
            for (std::size_t k = 0; k < t1[i].samples.size(); ++k)
                CHECK(t1[i].samples[k].intensity == t2[i].samples[k].intensity);
    }

    SUBCASE("empty target list rejected") {
        CHECK_THROWS_AS(simulate_sweep(scenario, fog_v(30.0), quiet_standard(), {}, params),
                        std::invalid_argument);
    }
}

TEST_CASE("simulate sweep: gated sensor") {
    const Scenario scenario = Scenario::passive();
    SweepParams params;
    const auto targets = standard_targets();
    const auto fog = fog_v(30.0);

    const auto traces = simulate_sweep(scenario, fog, quiet_gated(), targets, params);
    REQUIRE(traces.size() == 3);
    const double start = gated::slice_start(gated::GatingScheme{});

    SUBCASE("gate closed below the slice start") {
        for (const auto& trace : traces)
            for (const auto& s : trace.samples)
                if (s.depth_m < start) CHECK(s.intensity == 0.0);
    }
    SUBCASE("steep rise right after the slice start") {
        const auto& bright = traces[2];
        double before = 0.0, after = 0.0;
        for (const auto& s : bright.samples) {
            if (s.depth_m < start) before = std::max(before, s.intensity);
            if (s.depth_m > start + 2.0 && s.depth_m < start + 6.0)
                after = std::max(after, s.intensity);
        }
        CHECK(before == 0.0);
        CHECK(after > 0.05);
    }
    SUBCASE("short-visibility chamber still yields usable levels (auto exposure)") {
        const auto dense = simulate_sweep(scenario, fog_v(15.0), quiet_gated(), targets, params);
        double peak = 0.0;
        for (const auto& s : dense[2].samples) peak = std::max(peak, s.intensity);
        CHECK(peak > 0.3);
        CHECK(peak <= 1.0);
    }
}

TEST_CASE("corona") {
    const Scenario s2 = Scenario::oncoming_car();
    const auto fog = fog_v(55.0);

    SUBCASE("no scattering, no corona") {
        FogCondition clear;
        clear.beta_per_m = 0.0;
        clear.visibility_m = 1e12;
        CHECK(corona_intensity_at_depth(s2, clear, 10.0) == 0.0);
        CHECK(corona_intensity_at_angle(s2, clear, 0.0) == 0.0);
    }
    SUBCASE("angular peak at zero") {
        const double at0 = corona_intensity_at_angle(s2, fog, 0.0);
        for (double theta : {0.02, 0.1, 0.3, 1.0})
            CHECK(corona_intensity_at_angle(s2, fog, theta) < at0);
    }
    SUBCASE("grows with depth until the source, then saturates") {
        const double pos = s2.oncoming->position_m;
        CHECK(corona_intensity_at_depth(s2, fog, 5.0) < corona_intensity_at_depth(s2, fog, 15.0));
        CHECK(corona_intensity_at_depth(s2, fog, pos) ==
              doctest::Approx(corona_intensity_at_depth(s2, fog, pos + 4.0)));
    }
    SUBCASE("grows with fog density") {
        CHECK(corona_intensity_at_depth(s2, fog_v(20.0), 20.0) >
              corona_intensity_at_depth(s2, fog_v(60.0), 20.0));
    }
    SUBCASE("passive scenario rejected") {
        CHECK_THROWS_AS(corona_intensity_at_depth(Scenario::passive(), fog, 10.0),
                        std::invalid_argument);
    }
    SUBCASE("sweep adds suppressed corona for the gated sensor") {
        SweepParams params;
        const auto targets = standard_targets();
        const auto std_traces = simulate_sweep(s2, fog, quiet_standard(), targets, params);
        const auto gat_traces = simulate_sweep(s2, fog, quiet_gated(), targets, params);
        // below the slice start the gated trace is pure (suppressed) corona
        const double start = gated::slice_start(gated::GatingScheme{});
        for (std::size_t k = 0; k < gat_traces[0].samples.size(); ++k) {
            const auto& sample = gat_traces[0].samples[k];
            if (sample.depth_m >= start) break;
            const double corona_std = corona_intensity_at_depth(s2, fog, sample.depth_m);
            CHECK(sample.intensity < corona_std);
        }
        (void)std_traces;
    }
}

TEST_CASE("render frame") {
    Scenario scenario = Scenario::passive();
    const SceneLayout layout = SceneLayout::standard_targets_layout();
    SensorModel sensor = quiet_standard();
    sensor.width = 320;
    sensor.height = 240;

    SUBCASE("deterministic for a fixed seed") {
        SensorModel noisy = sensor;
        noisy.noise.read_sigma = 0.002;
        noisy.noise.shot_scale = 0.0005;
        const auto a = render_frame(scenario, fog_v(30.0), noisy, layout, 42);
        const auto b = render_frame(scenario, fog_v(30.0), noisy, layout, 42);
        CHECK((a.pixels() == b.pixels()).all());
        const auto c = render_frame(scenario, fog_v(30.0), noisy, layout, 43);
        CHECK_FALSE((a.pixels() == c.pixels()).all());
    }

    SUBCASE("pixels stay within the representable range") {
        const auto frame = render_frame(scenario, fog_v(20.0), sensor, layout, 1);
        CHECK(frame.pixels().maxCoeff() <= frame.max_value());
    }

    SUBCASE("opaque fog washes the noise-free frame to uniform i_inf") {
        FogCondition dense;
        dense.beta_per_m = 50.0;
        dense.visibility_m = atmosphere::visibility_from_beta(50.0);
        Illumination illum;
        const auto frame = render_frame(scenario, dense, sensor, layout, 1, illum);
        const std::uint16_t expect = static_cast<std::uint16_t>(
            std::round(illum.ambient_i_inf * frame.max_value()));
        CHECK((frame.pixels() == expect).all());
    }

    SUBCASE("layout outside the chamber rejected") {
        SceneLayout bad = layout;
        bad.objects[0].depth_m = 99.0;
        CHECK_THROWS_AS(render_frame(scenario, fog_v(30.0), sensor, bad, 1),
                        std::invalid_argument);
        bad = layout;
        bad.objects[0].lateral_m = 12.0;
        CHECK_THROWS_AS(render_frame(scenario, fog_v(30.0), sensor, bad, 1),
                        std::invalid_argument);
    }

    SUBCASE("gated frame is dark outside the slice band") {
        SensorModel g = quiet_gated();
        g.width = 320;
        g.height = 240;
        const auto frame = render_frame(scenario, fog_v(30.0), g, layout, 1);
        const auto geom = camera_geometry(g, layout);
        // a floor pixel well in front of the slice start carries only the veil
        const int y_near = geom.floor_row(6.0);
        const int y_in = geom.floor_row(20.0);
        REQUIRE(y_near < g.height);
        CHECK(frame.at(g.width / 2, y_near) < frame.at(g.width / 2, y_in));
    }
}

TEST_CASE("entropy rises with visibility in rendered frames") {
    // simulation property feeding the acceptance harness
    const Scenario scenario = Scenario::passive();
    const SceneLayout layout = SceneLayout::standard_targets_layout();
    SensorModel sensor = SensorModel::standard_camera();
    sensor.width = 320;
    sensor.height = 240;
    const gated::GatingScheme scheme;
    const auto roi_of = [&](const SensorModel& s) {
        const auto r = jointly_illuminated_region(scenario, s, layout, scheme);
        return metrics::Rect{r.x, r.y, r.width, r.height};
    };

    const auto frame_lo = render_frame(scenario, fog_v(20.0), sensor, layout, 5);
    const auto frame_hi = render_frame(scenario, fog_v(60.0), sensor, layout, 5);
    const double h_lo = metrics::entropy(frame_lo, roi_of(sensor)).bits;
    const double h_hi = metrics::entropy(frame_hi, roi_of(sensor)).bits;
    CHECK(h_hi > h_lo);
}

} // TEST_SUITE
