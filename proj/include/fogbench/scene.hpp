#pragma once
// Synthetic fog-chamber experiment.
//
// Reproduces the measurement procedure: reflectance targets swept along the
// viewing axis, per-target intensity traces with depth binning, and rendered
// frames of the chamber interior (floor with road markings, walls, targets)
// for information-content evaluation.

#include "fogbench/atmosphere.hpp"
#include "fogbench/gated.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fogbench::scene {

using atmosphere::FogCondition;

struct ReflectanceTarget {
    double rho = 0.0;
    double mount_height_m = 1.6;
};

/// The standard calibrated target set (5 %, 50 %, 90 %).
std::vector<ReflectanceTarget> standard_targets();

enum class ScenarioKind { passive, oncoming_car };

struct OncomingSource {
    double position_m = 25.0;        // depth of the oncoming car
    double lateral_offset_m = 1.8;   // opposite lane
    double intensity = 0.5;          // corona peak scale
    double angular_sigma_rad = 0.1;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::passive;
    double chamber_length_m = 30.0;
    double chamber_width_m = 5.5;
    double chamber_height_m = 2.0;
    std::optional<OncomingSource> oncoming;

    static Scenario passive();
    static Scenario oncoming_car(OncomingSource source = {});
    void validate() const;
};

const char* to_string(ScenarioKind kind);

struct NoiseModel {
    double read_sigma = 0.002;
    double shot_scale = 0.0005;
    std::uint64_t seed = 0;

    /// Noise std at clean intensity i: sqrt(read^2 + shot * i).
    double sigma(double intensity) const;
    bool enabled() const { return read_sigma > 0.0 || shot_scale > 0.0; }
};

enum class SensorKind { standard, gated };

struct SensorModel {
    SensorKind kind = SensorKind::standard;
    int bit_depth = 12;
    int width = 1980;
    int height = 1088;
    NoiseModel noise;
    std::optional<gated::GatingScheme> gating;
    double laser_intensity = 0.0; // 0 = auto exposure per fog condition

    static SensorModel standard_camera();
    static SensorModel gated_camera();
    void validate() const;
};

const char* to_string(SensorKind kind);

/// Headlight illumination model of the chamber (standard camera).
/// The effective source term is fully developed from onset_m on and has
/// already crossed onset_m of fog twice, so
///   i0(rho) = headlight_scale * rho * exp(-2 beta onset_m).
struct Illumination {
    double headlight_scale = 0.8;
    double ambient_i_inf = 0.12; // horizon brightness of the fog-lit chamber
    double onset_m = 5.0;        // full-illumination onset (d0 of the model)
    double beta_a_ratio = 1.0;   // air-light coefficient = ratio * beta
};

struct TraceSample {
    double depth_m = 0.0;
    double intensity = 0.0;
    double std = 0.0;
};

struct DepthBin {
    double center_m = 0.0;
    double mean = 0.0;
    double std = 0.0;
    int count = 0;
};

struct TargetTrace {
    double rho = 0.0;
    std::vector<TraceSample> samples;
    std::vector<DepthBin> binned;
};

/// Bin samples into [k*w, (k+1)*w) slices; per-bin arithmetic mean and sample
/// standard deviation (0 for singleton bins); empty bins omitted.
std::vector<DepthBin> bin_by_depth(std::span<const TraceSample> samples, double bin_width_m);

/// Chip intensity of a reflectance target at depth d for the standard camera.
double standard_intensity(const Illumination& illum, const FogCondition& fog,
                          double rho, double d);

/// Laser level chosen per fog so the brightest expected pixel (90 % target at
/// its best in-slice depth plus the backscatter veil) sits at 85 % full well.
/// Mirrors the manual illumination adaption of the physical system.
double auto_laser_intensity(const gated::GatingScheme& scheme, const FogCondition& fog,
                            double chamber_length_m);

/// Fraction of the relative backscatter integral that couples into a pixel.
inline constexpr double kBackscatterCoupling = 0.05;

/// Corona veil (scattered oncoming-car glare) at the pixel of an on-axis
/// target at depth d. Grows with the path shared with the illuminated fog
/// and with fog density; zero in clear air.
double corona_intensity_at_depth(const Scenario& scenario, const FogCondition& fog,
                                 double depth_m);

/// Corona veil at angular offset theta from the source direction
/// (full saturated path).
double corona_intensity_at_angle(const Scenario& scenario, const FogCondition& fog,
                                 double angle_rad);

struct SweepParams {
    double step_m = 0.25;
    double bin_width_m = 1.0;
    Illumination illumination;
    std::uint64_t seed = 0;
};

/// Sweep every target along the viewing axis and record its chip intensity.
/// Standard sensors follow the adapted headlight model; gated sensors the
/// in-gate target response. The oncoming-car scenario adds the corona veil
/// (suppressed by the gating ratio for gated sensors). Samples are clamped
/// to chip range [0, 1]; noise comes from the sensor's noise model.
std::vector<TargetTrace> simulate_sweep(const Scenario& scenario, const FogCondition& fog,
                                        const SensorModel& sensor,
                                        std::span<const ReflectanceTarget> targets,
                                        const SweepParams& params);

/// Single-channel integer image with an explicit bit depth.
class FrameBuffer {
public:
    using Pixels = Eigen::Array<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    FrameBuffer(int width, int height, int bit_depth);

    int width() const { return static_cast<int>(pixels_.cols()); }
    int height() const { return static_cast<int>(pixels_.rows()); }
    int bit_depth() const { return bit_depth_; }
    std::uint16_t max_value() const {
        return static_cast<std::uint16_t>((1u << bit_depth_) - 1u);
    }

    std::uint16_t at(int x, int y) const { return pixels_(y, x); }
    std::uint16_t& at(int x, int y) { return pixels_(y, x); }

    const Pixels& pixels() const { return pixels_; }
    Pixels& pixels() { return pixels_; }

private:
    Pixels pixels_;
    int bit_depth_;
};

struct ObjectPlacement {
    double depth_m = 0.0;
    double lateral_m = 0.0;
    double rho = 0.0;
    double half_size_m = 0.3;
    double center_height_m = 1.6;
};

/// Static scene content rendered into frames.
struct SceneLayout {
    std::vector<ObjectPlacement> objects;
    double floor_rho = 0.15;
    double marking_rho = 0.45; // road markings
    double wall_rho = 0.20;
    double camera_height_m = 1.2;
    double hfov_rad = 0.9;

    /// The three reflectance targets staggered across the chamber.
    static SceneLayout standard_targets_layout();
};

/// Pinhole projection of the rendered scene.
struct CameraGeometry {
    double f_px = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double camera_height_m = 0.0;
    int width = 0;
    int height = 0;

    int floor_row(double depth_m) const;          // image row of the floor at depth
    int row_of_height(double height_m, double depth_m) const;
    int col_of_lateral(double lateral_m, double depth_m) const;
};

CameraGeometry camera_geometry(const SensorModel& sensor, const SceneLayout& layout);

/// Render one frame: per-pixel chamber surface (floor/walls/objects) shaded
/// by the sensor's intensity model, plus corona and noise, quantized to the
/// sensor bit depth (round half away from zero, then clamp).
/// Deterministic for a fixed rng_seed.
FrameBuffer render_frame(const Scenario& scenario, const FogCondition& fog,
                         const SensorModel& sensor, const SceneLayout& layout,
                         std::uint64_t rng_seed, const Illumination& illum = {});

/// Image region lit by both the headlights and the laser slice, used for
/// fair sensor-to-sensor information-content comparison.
struct RegionOfInterest {
    int x = 0, y = 0, width = 0, height = 0;
};

RegionOfInterest jointly_illuminated_region(const Scenario& scenario, const SensorModel& sensor,
                                            const SceneLayout& layout,
                                            const gated::GatingScheme& scheme,
                                            const Illumination& illum = {});

} // namespace fogbench::scene
