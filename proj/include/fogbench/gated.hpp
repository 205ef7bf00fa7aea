#pragma once
// Range-gated camera timing model.
//
// A pulsed laser illuminates the scene for t_laser; the gate opens t_delay
// after the END of the pulse and integrates for t_gate. Only photons whose
// round-trip time falls into the gate are captured, which selects a distance
// band (the slice). m micro exposures are accumulated on the chip per readout.
//
// The per-distance sensitivity is the temporal overlap between the returned
// pulse window and the gate window: a trapezoid over distance, triangular
// when t_laser == t_gate.

#include "fogbench/atmosphere.hpp"

#include <utility>
#include <vector>

namespace fogbench::gated {

inline constexpr double kSpeedOfLightMps = 299792458.0;

struct GatingScheme {
    double t_laser_ns = 160.0;
    double t_delay_ns = 90.0;
    double t_gate_ns = 160.0;
    int micro_exposures = 2000;

    void validate() const;
};

/// First distance with nonzero sensitivity: c * t_delay / 2.
double slice_start(const GatingScheme& scheme);

/// Piecewise-linear gate sensitivity over distance, normalized to peak 1.
class GateProfile {
public:
    explicit GateProfile(const GatingScheme& scheme);

    /// Gain in [0, 1]; zero outside [slice_start_m, slice_end_m].
    double gain(double distance_m) const;

    double slice_start_m() const { return start_m_; }
    double slice_peak_m() const { return peak_m_; }        // first distance at gain 1
    double plateau_end_m() const { return plateau_end_m_; } // last distance at gain 1
    double slice_end_m() const { return end_m_; }
    double slice_width_m() const { return end_m_ - start_m_; }

    /// Analytic area under the gain curve (trapezoid).
    double area() const;

    /// Sampled (distance, gain) pairs on a regular grid plus the kink points.
    std::vector<std::pair<double, double>> sample(double step_m) const;

private:
    double start_m_;
    double peak_m_;
    double plateau_end_m_;
    double end_m_;
};

struct GatedResponse {
    double intensity = 0.0;
    bool saturated = false;
};

/// Accumulated in-gate return of a diffuse target at distance d:
///   laser_intensity * gain(d) * rho * exp(-2 beta d)
/// summed over micro_exposures and normalized by full_well_scale
/// (defaults to micro_exposures, making the default response per-pulse).
/// Output clamps at 1.0 with the saturation flag set.
GatedResponse gated_target_response(const GatingScheme& scheme,
                                    const atmosphere::FogCondition& fog,
                                    double rho, double laser_intensity, double d,
                                    double full_well_scale = 0.0);

/// Relative in-gate fog backscatter: integral of gain(r) beta exp(-2 beta r)
/// over r in (0, inf), by adaptive quadrature (abs tol 1e-9, truncated where
/// the two-way transmittance falls below 1e-12).
double backscatter_integral(const GatingScheme& scheme,
                            const atmosphere::FogCondition& fog,
                            double laser_intensity = 1.0);

/// Same integral for an ungated exposure (gain == 1): exactly 1/2.
double backscatter_integral_ungated(const atmosphere::FogCondition& fog,
                                    double laser_intensity = 1.0);

/// Gated/ungated backscatter ratio, in (0, 1) whenever t_delay > 0.
double backscatter_suppression(const GatingScheme& scheme,
                               const atmosphere::FogCondition& fog);

} // namespace fogbench::gated
