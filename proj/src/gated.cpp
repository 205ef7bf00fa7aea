#include "fogbench/gated.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fogbench::gated {

namespace {

constexpr double kNsToS = 1e-9;

double distance_for_roundtrip_ns(double tau_ns) {
    return kSpeedOfLightMps * tau_ns * kNsToS / 2.0;
}

// Adaptive Simpson quadrature with absolute tolerance.
double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson(a, b, fa, fm, fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

void GatingScheme::validate() const {
    if (!(t_laser_ns > 0.0) || !std::isfinite(t_laser_ns))
        throw std::invalid_argument("GatingScheme: t_laser_ns must be finite and > 0");
    if (!(t_delay_ns >= 0.0) || !std::isfinite(t_delay_ns))
        throw std::invalid_argument("GatingScheme: t_delay_ns must be finite and >= 0");
    if (!(t_gate_ns > 0.0) || !std::isfinite(t_gate_ns))
        throw std::invalid_argument("GatingScheme: t_gate_ns must be finite and > 0");
    if (micro_exposures < 1)
        throw std::invalid_argument("GatingScheme: micro_exposures must be >= 1");
}

double slice_start(const GatingScheme& scheme) {
    scheme.validate();
    return distance_for_roundtrip_ns(scheme.t_delay_ns);
}

GateProfile::GateProfile(const GatingScheme& scheme) {
    scheme.validate();
    // Gate opens at absolute time t_laser + t_delay (delay counted from the
    // end of the pulse). A return from distance d arrives over the round-trip
    // window [2d/c, 2d/c + t_laser]; the overlap with the gate window is a
    // trapezoid in round-trip time with these kinks:
    const double open_ns = scheme.t_laser_ns + scheme.t_delay_ns;
    const double shorter_ns = std::min(scheme.t_laser_ns, scheme.t_gate_ns);
    start_m_ = distance_for_roundtrip_ns(open_ns - scheme.t_laser_ns);
    peak_m_ = distance_for_roundtrip_ns(open_ns - scheme.t_laser_ns + shorter_ns);
    plateau_end_m_ = distance_for_roundtrip_ns(open_ns + scheme.t_gate_ns - shorter_ns);
    end_m_ = distance_for_roundtrip_ns(open_ns + scheme.t_gate_ns);
}

double GateProfile::gain(double distance_m) const {
    if (distance_m <= start_m_ || distance_m >= end_m_) return 0.0;
    if (distance_m < peak_m_) return (distance_m - start_m_) / (peak_m_ - start_m_);
    if (distance_m <= plateau_end_m_) return 1.0;
    return (end_m_ - distance_m) / (end_m_ - plateau_end_m_);
}

double GateProfile::area() const {
    return 0.5 * (peak_m_ - start_m_) + (plateau_end_m_ - peak_m_) +
           0.5 * (end_m_ - plateau_end_m_);
}

std::vector<std::pair<double, double>> GateProfile::sample(double step_m) const {
    if (!(step_m > 0.0)) throw std::invalid_argument("GateProfile::sample: step_m must be > 0");
    std::vector<std::pair<double, double>> points;
    for (double d = start_m_; d < end_m_; d += step_m)
        points.emplace_back(d, gain(d));
    for (double kink : {start_m_, peak_m_, plateau_end_m_, end_m_})
        points.emplace_back(kink, gain(kink));
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

GatedResponse gated_target_response(const GatingScheme& scheme,
                                    const atmosphere::FogCondition& fog,
                                    double rho, double laser_intensity, double d,
                                    double full_well_scale) {
    if (!(d > 0.0)) throw std::domain_error("gated_target_response: d must be > 0");
    if (rho < 0.0 || rho > 1.0)
        throw std::domain_error("gated_target_response: rho must be in [0, 1]");
    if (laser_intensity < 0.0)
        throw std::domain_error("gated_target_response: laser_intensity must be >= 0");
    if (fog.beta_per_m < 0.0)
        throw std::domain_error("gated_target_response: beta must be >= 0");
    const GateProfile profile(scheme);
    // two-way attenuation: the pulse travels out and back
    const double per_pulse =
        laser_intensity * profile.gain(d) * rho * std::exp(-2.0 * fog.beta_per_m * d);
    const double scale =
        full_well_scale > 0.0 ? full_well_scale : static_cast<double>(scheme.micro_exposures);
    const double accumulated = static_cast<double>(scheme.micro_exposures) * per_pulse;
    GatedResponse out;
    out.intensity = accumulated / scale;
    if (out.intensity > 1.0) {
        out.intensity = 1.0;
        out.saturated = true;
    }
    return out;
}

double backscatter_integral(const GatingScheme& scheme,
                            const atmosphere::FogCondition& fog,
                            double laser_intensity) {
    const GateProfile profile(scheme);
    const double beta = fog.beta_per_m;
    if (!(beta > 0.0)) return 0.0;
    // truncate where exp(-2 beta r) < 1e-12
    const double r_max = std::log(1e12) / (2.0 * beta);
    const auto integrand = [&](double r) { return profile.gain(r) * beta * std::exp(-2.0 * beta * r); };
    constexpr double tol = 1e-9;
    double total = 0.0;
    // integrate each linear piece separately so the quadrature never
    // straddles a kink
    const double edges[4] = {profile.slice_start_m(), profile.slice_peak_m(),
                             profile.plateau_end_m(), profile.slice_end_m()};
    for (int i = 0; i + 1 < 4; ++i) {
        const double a = std::min(edges[i], r_max);
        const double b = std::min(edges[i + 1], r_max);
        total += integrate(integrand, a, b, tol / 3.0);
    }
    return laser_intensity * total;
}

double backscatter_integral_ungated(const atmosphere::FogCondition& fog,
                                    double laser_intensity) {
    if (!(fog.beta_per_m > 0.0)) return 0.0;
    // gain == 1: integral of beta exp(-2 beta r) over (0, inf) is exactly 1/2
    return 0.5 * laser_intensity;
}

double backscatter_suppression(const GatingScheme& scheme,
                               const atmosphere::FogCondition& fog) {
    const double ungated = backscatter_integral_ungated(fog);
    if (!(ungated > 0.0)) return 1.0;
    return backscatter_integral(scheme, fog) / ungated;
}

} // namespace fogbench::gated
