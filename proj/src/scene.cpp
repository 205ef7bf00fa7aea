#include "fogbench/scene.hpp"

#include "fogbench/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fogbench::scene {

std::vector<ReflectanceTarget> standard_targets() {
    return {{0.05}, {0.50}, {0.90}};
}

Scenario Scenario::passive() {
    return {};
}

Scenario Scenario::oncoming_car(OncomingSource source) {
    Scenario s;
    s.kind = ScenarioKind::oncoming_car;
    s.oncoming = source;
    return s;
}

void Scenario::validate() const {
    if (!(chamber_length_m > 0.0) || !(chamber_width_m > 0.0) || !(chamber_height_m > 0.0))
        throw std::invalid_argument("Scenario: chamber dimensions must be > 0");
    if ((kind == ScenarioKind::oncoming_car) != oncoming.has_value())
        throw std::invalid_argument(
            "Scenario: oncoming source must be present iff kind is oncoming_car");
    if (oncoming) {
        if (!(oncoming->position_m > 0.0) || oncoming->position_m > chamber_length_m)
            throw std::invalid_argument("Scenario: oncoming position must lie in the chamber");
        if (!(oncoming->angular_sigma_rad > 0.0))
            throw std::invalid_argument("Scenario: oncoming angular sigma must be > 0");
        if (oncoming->intensity < 0.0)
            throw std::invalid_argument("Scenario: oncoming intensity must be >= 0");
    }
}

const char* to_string(ScenarioKind kind) {
    return kind == ScenarioKind::passive ? "passive" : "oncoming_car";
}

double NoiseModel::sigma(double intensity) const {
    const double i = std::clamp(intensity, 0.0, 1.0);
    return std::sqrt(read_sigma * read_sigma + shot_scale * i);
}

SensorModel SensorModel::standard_camera() {
    SensorModel s;
    s.kind = SensorKind::standard;
    s.bit_depth = 12;
    s.width = 1980;
    s.height = 1088;
    return s;
}

SensorModel SensorModel::gated_camera() {
    SensorModel s;
    s.kind = SensorKind::gated;
    s.bit_depth = 10;
    s.width = 1280;
    s.height = 960;
    s.gating = gated::GatingScheme{};
    return s;
}

void SensorModel::validate() const {
    if ((kind == SensorKind::gated) != gating.has_value())
        throw std::invalid_argument("SensorModel: gating must be present iff kind is gated");
    if (bit_depth < 8 || bit_depth > 16)
        throw std::invalid_argument("SensorModel: bit_depth must be in [8, 16]");
    if (width < 1 || height < 1)
        throw std::invalid_argument("SensorModel: resolution must be positive");
    if (laser_intensity < 0.0)
        throw std::invalid_argument("SensorModel: laser_intensity must be >= 0");
    if (gating) gating->validate();
}

const char* to_string(SensorKind kind) {
    return kind == SensorKind::standard ? "standard" : "gated";
}

std::vector<DepthBin> bin_by_depth(std::span<const TraceSample> samples, double bin_width_m) {
    if (!(bin_width_m > 0.0))
        throw std::invalid_argument("bin_by_depth: bin_width_m must be > 0");
    std::vector<DepthBin> bins;
    if (samples.empty()) return bins;

    std::vector<TraceSample> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const TraceSample& a, const TraceSample& b) { return a.depth_m < b.depth_m; });

    auto bin_index = [bin_width_m](double depth) {
        return static_cast<long>(std::floor(depth / bin_width_m));
    };

    std::size_t i = 0;
    while (i < sorted.size()) {
        const long k = bin_index(sorted[i].depth_m);
        double sum = 0.0;
        double sum_sq = 0.0;
        int n = 0;
        while (i < sorted.size() && bin_index(sorted[i].depth_m) == k) {
            sum += sorted[i].intensity;
            sum_sq += sorted[i].intensity * sorted[i].intensity;
            ++n;
            ++i;
        }
        DepthBin bin;
        bin.center_m = (static_cast<double>(k) + 0.5) * bin_width_m;
        bin.mean = sum / n;
        bin.count = n;
        if (n > 1) {
            const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
            bin.std = std::sqrt(var);
        }
        bins.push_back(bin);
    }
    return bins;
}

double standard_intensity(const Illumination& illum, const FogCondition& fog,
                          double rho, double d) {
    const double beta = fog.beta_per_m;
    const double i0 = illum.headlight_scale * rho * std::exp(-2.0 * beta * illum.onset_m);
    return atmosphere::adapted_intensity(i0, illum.ambient_i_inf, illum.onset_m, beta,
                                         illum.beta_a_ratio * beta, d);
}

double auto_laser_intensity(const gated::GatingScheme& scheme, const FogCondition& fog,
                            double chamber_length_m) {
    const gated::GateProfile profile(scheme);
    const double beta = fog.beta_per_m;
    const double veil_unit = kBackscatterCoupling * gated::backscatter_integral(scheme, fog);
    // brightest in-slice unit response of a 90 % target within the chamber
    double peak_unit = 0.0;
    const double lo = profile.slice_start_m();
    const double hi = std::min(profile.slice_end_m(), chamber_length_m);
    const int steps = 512;
    for (int i = 0; i <= steps; ++i) {
        const double d = lo + (hi - lo) * i / steps;
        peak_unit = std::max(peak_unit, profile.gain(d) * 0.9 * std::exp(-2.0 * beta * d));
    }
    const double denom = veil_unit + peak_unit;
    if (!(denom > 0.0)) return 1.0;
    return 0.85 / denom;
}

namespace {

const OncomingSource& require_oncoming(const Scenario& scenario) {
    if (scenario.kind != ScenarioKind::oncoming_car || !scenario.oncoming)
        throw std::invalid_argument("corona_intensity: scenario has no oncoming source");
    return *scenario.oncoming;
}

double gaussian_glare(const OncomingSource& src, double angle_rad) {
    const double t = angle_rad / src.angular_sigma_rad;
    return src.intensity * std::exp(-0.5 * t * t);
}

double source_angle(const OncomingSource& src) {
    return std::atan2(src.lateral_offset_m, src.position_m);
}

} // namespace

double corona_intensity_at_depth(const Scenario& scenario, const FogCondition& fog,
                                 double depth_m) {
    const OncomingSource& src = require_oncoming(scenario);
    if (!(depth_m > 0.0))
        throw std::domain_error("corona_intensity_at_depth: depth must be > 0");
    const double path = std::min(depth_m, src.position_m);
    return gaussian_glare(src, source_angle(src)) * (-std::expm1(-fog.beta_per_m * path));
}

double corona_intensity_at_angle(const Scenario& scenario, const FogCondition& fog,
                                 double angle_rad) {
    const OncomingSource& src = require_oncoming(scenario);
    return gaussian_glare(src, angle_rad) * (-std::expm1(-fog.beta_per_m * src.position_m));
}

std::vector<TargetTrace> simulate_sweep(const Scenario& scenario, const FogCondition& fog,
                                        const SensorModel& sensor,
                                        std::span<const ReflectanceTarget> targets,
                                        const SweepParams& params) {
    scenario.validate();
    sensor.validate();
    if (targets.empty())
        throw std::invalid_argument("simulate_sweep: target list must not be empty");
    if (!(params.step_m > 0.0))
        throw std::invalid_argument("simulate_sweep: step_m must be > 0");

    const bool gated_sensor = sensor.kind == SensorKind::gated;
    const double suppression =
        (gated_sensor && scenario.kind == ScenarioKind::oncoming_car)
            ? gated::backscatter_suppression(*sensor.gating, fog)
            : 1.0;
    const double laser = gated_sensor
                             ? (sensor.laser_intensity > 0.0
                                    ? sensor.laser_intensity
                                    : auto_laser_intensity(*sensor.gating, fog,
                                                           scenario.chamber_length_m))
                             : 0.0;

    std::vector<TargetTrace> traces;
    traces.reserve(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const ReflectanceTarget& target = targets[t];
        TargetTrace trace;
        trace.rho = target.rho;
        Rng rng(Rng::derive(params.seed, sensor.noise.seed * 1000003ull + t));
        for (double d = 0.5 * params.step_m; d <= scenario.chamber_length_m;
             d += params.step_m) {
            double clean = 0.0;
            if (gated_sensor) {
                clean = gated::gated_target_response(*sensor.gating, fog, target.rho, laser, d)
                            .intensity;
            } else {
                clean = standard_intensity(params.illumination, fog, target.rho, d);
            }
            if (scenario.kind == ScenarioKind::oncoming_car)
                clean += suppression * corona_intensity_at_depth(scenario, fog, d);
            TraceSample sample;
            sample.depth_m = d;
            sample.std = sensor.noise.sigma(clean);
            double value = clean;
            if (sensor.noise.enabled()) value += rng.gaussian(sample.std);
            sample.intensity = std::clamp(value, 0.0, 1.0);
            trace.samples.push_back(sample);
        }
        trace.binned = bin_by_depth(trace.samples, params.bin_width_m);
        traces.push_back(std::move(trace));
    }
    return traces;
}

FrameBuffer::FrameBuffer(int width, int height, int bit_depth) : bit_depth_(bit_depth) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("FrameBuffer: dimensions must be positive");
    if (bit_depth < 8 || bit_depth > 16)
        throw std::invalid_argument("FrameBuffer: bit_depth must be in [8, 16]");
    pixels_ = Pixels::Zero(height, width);
}

SceneLayout SceneLayout::standard_targets_layout() {
    SceneLayout layout;
    layout.objects = {
        {16.0, -1.2, 0.90},
        {20.0, 0.0, 0.50},
        {24.0, 1.2, 0.05},
    };
    return layout;
}

int CameraGeometry::floor_row(double depth_m) const {
    return static_cast<int>(std::lround(cy + f_px * camera_height_m / depth_m));
}

int CameraGeometry::row_of_height(double height_m, double depth_m) const {
    return static_cast<int>(std::lround(cy - f_px * (height_m - camera_height_m) / depth_m));
}

int CameraGeometry::col_of_lateral(double lateral_m, double depth_m) const {
    return static_cast<int>(std::lround(cx + f_px * lateral_m / depth_m));
}

CameraGeometry camera_geometry(const SensorModel& sensor, const SceneLayout& layout) {
    CameraGeometry geom;
    geom.width = sensor.width;
    geom.height = sensor.height;
    geom.cx = 0.5 * sensor.width;
    geom.cy = 0.5 * sensor.height;
    geom.f_px = 0.5 * sensor.width / std::tan(0.5 * layout.hfov_rad);
    geom.camera_height_m = layout.camera_height_m;
    return geom;
}

namespace {

struct SurfaceHit {
    double depth_m = 0.0;
    double rho = 0.0;
};

// Intersect the pixel ray with the chamber interior (floor, side walls,
// ceiling, back wall) and return hit depth and surface reflectivity.
SurfaceHit chamber_surface(const Scenario& scenario, const SceneLayout& layout,
                           const CameraGeometry& geom, int x, int y) {
    const double dir_x = (x - geom.cx) / geom.f_px;  // lateral per meter depth
    const double dir_y = (geom.cy - y) / geom.f_px;  // up per meter depth

    double depth = scenario.chamber_length_m; // back wall
    enum { floor, wall } surface = wall;

    if (dir_y < 0.0) {
        const double d_floor = geom.camera_height_m / -dir_y;
        if (d_floor < depth) {
            depth = d_floor;
            surface = floor;
        }
    } else if (dir_y > 0.0) {
        const double headroom = scenario.chamber_height_m - geom.camera_height_m;
        const double d_ceiling = headroom / dir_y;
        if (d_ceiling < depth) depth = d_ceiling;
    }
    if (dir_x != 0.0) {
        const double d_side = 0.5 * scenario.chamber_width_m / std::abs(dir_x);
        if (d_side < depth) {
            depth = d_side;
            surface = wall;
        }
    }

    SurfaceHit hit;
    hit.depth_m = std::max(depth, 0.5);
    if (surface == floor) {
        hit.rho = layout.floor_rho;
        const double lateral = dir_x * hit.depth_m;
        // dashed center marking plus continuous edge lines
        const bool dash_band = (static_cast<long>(std::floor(hit.depth_m / 2.0)) % 2) == 0;
        if (dash_band && std::abs(lateral) < 0.15) hit.rho = layout.marking_rho;
        if (std::abs(std::abs(lateral) - 2.0) < 0.15) hit.rho = layout.marking_rho;
    } else {
        hit.rho = layout.wall_rho;
    }
    return hit;
}

// Standard-camera shading for rendered surfaces: headlight term with the
// illumination onset clamp plus air-light accumulated over the full viewing
// path (the veil grows from the camera on, not from the onset).
double standard_surface_value(const Illumination& illum, const FogCondition& fog,
                              double rho, double d) {
    const double beta = fog.beta_per_m;
    const double i0 = illum.headlight_scale * rho * std::exp(-2.0 * beta * illum.onset_m);
    const double dd = std::max(d - illum.onset_m, 0.0);
    return i0 * std::exp(-beta * dd) +
           illum.ambient_i_inf * (-std::expm1(-illum.beta_a_ratio * beta * d));
}

} // namespace

FrameBuffer render_frame(const Scenario& scenario, const FogCondition& fog,
                         const SensorModel& sensor, const SceneLayout& layout,
                         std::uint64_t rng_seed, const Illumination& illum) {
    scenario.validate();
    sensor.validate();
    for (const ObjectPlacement& obj : layout.objects) {
        if (!(obj.depth_m > 0.0) || obj.depth_m > scenario.chamber_length_m ||
            std::abs(obj.lateral_m) > 0.5 * scenario.chamber_width_m)
            throw std::invalid_argument("render_frame: object layout outside chamber");
    }

    const CameraGeometry geom = camera_geometry(sensor, layout);
    const bool gated_sensor = sensor.kind == SensorKind::gated;

    double laser = 0.0;
    double veil = 0.0;
    double suppression = 1.0;
    std::optional<gated::GateProfile> profile;
    if (gated_sensor) {
        profile.emplace(*sensor.gating);
        laser = sensor.laser_intensity > 0.0
                    ? sensor.laser_intensity
                    : auto_laser_intensity(*sensor.gating, fog, scenario.chamber_length_m);
        veil = laser * kBackscatterCoupling * gated::backscatter_integral(*sensor.gating, fog);
        suppression = gated::backscatter_suppression(*sensor.gating, fog);
    }

    auto shade = [&](double rho, double d) {
        if (gated_sensor)
            return laser * profile->gain(d) * rho * std::exp(-2.0 * fog.beta_per_m * d) + veil;
        return standard_surface_value(illum, fog, rho, d);
    };

    FrameBuffer frame(sensor.width, sensor.height, sensor.bit_depth);
    Eigen::ArrayXXd values(sensor.height, sensor.width);

    for (int y = 0; y < sensor.height; ++y) {
        for (int x = 0; x < sensor.width; ++x) {
            const SurfaceHit hit = chamber_surface(scenario, layout, geom, x, y);
            values(y, x) = shade(hit.rho, hit.depth_m);
        }
    }

    // objects (drawn nearest last so they overwrite the chamber shell)
    std::vector<ObjectPlacement> objects(layout.objects);
    std::sort(objects.begin(), objects.end(),
              [](const ObjectPlacement& a, const ObjectPlacement& b) {
                  return a.depth_m > b.depth_m;
              });
    for (const ObjectPlacement& obj : objects) {
        const double value = shade(obj.rho, obj.depth_m);
        const int x0 = geom.col_of_lateral(obj.lateral_m - obj.half_size_m, obj.depth_m);
        const int x1 = geom.col_of_lateral(obj.lateral_m + obj.half_size_m, obj.depth_m);
        const int y0 = geom.row_of_height(obj.center_height_m + obj.half_size_m, obj.depth_m);
        const int y1 = geom.row_of_height(obj.center_height_m - obj.half_size_m, obj.depth_m);
        for (int y = std::max(y0, 0); y <= std::min(y1, sensor.height - 1); ++y)
            for (int x = std::max(x0, 0); x <= std::min(x1, sensor.width - 1); ++x)
                values(y, x) = value;
    }

    if (scenario.kind == ScenarioKind::oncoming_car) {
        const OncomingSource& src = *scenario.oncoming;
        const double sx = geom.col_of_lateral(src.lateral_offset_m, src.position_m);
        const double sy = geom.row_of_height(0.7, src.position_m); // headlight height
        for (int y = 0; y < sensor.height; ++y) {
            for (int x = 0; x < sensor.width; ++x) {
                const double ax = (x - sx) / geom.f_px;
                const double ay = (y - sy) / geom.f_px;
                const double angle = std::sqrt(ax * ax + ay * ay);
                values(y, x) +=
                    suppression * corona_intensity_at_angle(scenario, fog, angle);
            }
        }
    }

    Rng rng(Rng::derive(rng_seed, Rng::hash_key(to_string(sensor.kind))));
    const double maxv = static_cast<double>(frame.max_value());
    const bool noisy = sensor.noise.enabled();
    for (int y = 0; y < sensor.height; ++y) {
        for (int x = 0; x < sensor.width; ++x) {
            double v = values(y, x);
            if (noisy) v += rng.gaussian(sensor.noise.sigma(v));
            // round half away from zero, then clamp to the representable range
            const double q = std::round(v * maxv);
            frame.at(x, y) = static_cast<std::uint16_t>(std::clamp(q, 0.0, maxv));
        }
    }
    return frame;
}

RegionOfInterest jointly_illuminated_region(const Scenario& scenario, const SensorModel& sensor,
                                            const SceneLayout& layout,
                                            const gated::GatingScheme& scheme,
                                            const Illumination& illum) {
    const CameraGeometry geom = camera_geometry(sensor, layout);
    const double near = std::max(gated::slice_start(scheme), illum.onset_m);
    const int bottom = std::min(geom.floor_row(near), sensor.height - 1);
    // top of the farthest object (fall back to slightly above the horizon)
    double top_height = layout.camera_height_m + 0.7;
    double top_depth = scenario.chamber_length_m;
    for (const ObjectPlacement& obj : layout.objects) {
        top_height = std::max(top_height, obj.center_height_m + obj.half_size_m);
        top_depth = std::min(top_depth, obj.depth_m);
    }
    const int top = std::max(geom.row_of_height(top_height, top_depth), 0);
    RegionOfInterest roi;
    roi.x = 0;
    roi.width = sensor.width;
    roi.y = top;
    roi.height = std::max(bottom - top + 1, 1);
    return roi;
}

} // namespace fogbench::scene
