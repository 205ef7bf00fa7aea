#pragma once
// Closed-form fog optics.
//
// Models the intensity observed on the chip through a scattering medium:
//  - scene radiance of a point source (inverse-square falloff)
//  - exponential attenuation along the path
//  - air-light building up toward the horizon brightness
//  - the visibility <-> attenuation relation (Koschmieder)
//  - the adapted model with illumination onset d0 and a separate
//    air-light decay rate, used for curve fitting of measured traces
//
// All intensities are normalized chip fractions in [0, 1]; distances in
// meters; attenuation coefficients in 1/m. Natural logarithm throughout.

#include <cmath>
#include <stdexcept>

namespace fogbench::atmosphere {

/// Contrast threshold of the meteorological visual range (commonly 5 %).
inline constexpr double kDefaultEpsilon = 0.05;

enum class FogType { radiation, advection };

// Droplet mean diameters per fog type [um]. Reporting metadata only;
// droplet size never enters the intensity equations.
inline constexpr double kRadiationDropletUm = 2.0;
inline constexpr double kAdvectionDropletUm = 6.0;

/// Attenuation coefficient from visibility: beta = -ln(epsilon) / V.
/// Strictly decreasing in V; the common shorthand 3/V is within 0.2 %.
template <typename Scalar>
Scalar beta_from_visibility(Scalar visibility_m, Scalar epsilon = Scalar(kDefaultEpsilon)) {
    if (!(visibility_m > Scalar(0)))
        throw std::domain_error("beta_from_visibility: visibility_m must be > 0");
    if (!(epsilon > Scalar(0)) || !(epsilon < Scalar(1)))
        throw std::domain_error("beta_from_visibility: epsilon must be in (0, 1)");
    using std::log;
    return -log(epsilon) / visibility_m;
}

/// Inverse of beta_from_visibility: V = -ln(epsilon) / beta.
template <typename Scalar>
Scalar visibility_from_beta(Scalar beta_per_m, Scalar epsilon = Scalar(kDefaultEpsilon)) {
    if (!(beta_per_m > Scalar(0)))
        throw std::domain_error("visibility_from_beta: beta_per_m must be > 0");
    if (!(epsilon > Scalar(0)) || !(epsilon < Scalar(1)))
        throw std::domain_error("visibility_from_beta: epsilon must be in (0, 1)");
    using std::log;
    return -log(epsilon) / beta_per_m;
}

/// Radiance of a point source at distance d: J(d) = i0 / d^2.
template <typename Scalar>
Scalar scene_radiance(Scalar i0, Scalar d) {
    if (!(d > Scalar(0)))
        throw std::domain_error("scene_radiance: d must be > 0");
    if (i0 < Scalar(0))
        throw std::domain_error("scene_radiance: i0 must be >= 0");
    return i0 / (d * d);
}

/// Attenuated radiance: (i0 / d^2) * exp(-beta * d).
template <typename Scalar>
Scalar attenuated_intensity(Scalar i0, Scalar beta_per_m, Scalar d) {
    if (beta_per_m < Scalar(0))
        throw std::domain_error("attenuated_intensity: beta_per_m must be >= 0");
    using std::exp;
    return scene_radiance(i0, d) * exp(-beta_per_m * d);
}

/// Air-light along a path of length d: i_inf * (1 - exp(-beta * d)).
/// Monotone increasing in d, bounded by i_inf.
template <typename Scalar>
Scalar airlight(Scalar i_inf, Scalar beta_per_m, Scalar d) {
    if (d < Scalar(0))
        throw std::domain_error("airlight: d must be >= 0");
    if (beta_per_m < Scalar(0))
        throw std::domain_error("airlight: beta_per_m must be >= 0");
    if (i_inf < Scalar(0))
        throw std::domain_error("airlight: i_inf must be >= 0");
    using std::expm1;
    return i_inf * (-expm1(-beta_per_m * d));
}

/// Adapted model for headlight-lit scenes: illumination is constant from the
/// onset distance d0 on, air-light decays with its own coefficient beta_a.
///   I(d) = i0 * exp(-beta (d - d0)) + i_inf * (1 - exp(-beta_a (d - d0)))
/// For d < d0 both exponents are clamped at zero, so the model returns i0.
template <typename Scalar>
Scalar adapted_intensity(Scalar i0, Scalar i_inf, Scalar d0_m, Scalar beta_per_m,
                         Scalar beta_a_per_m, Scalar d) {
    if (beta_per_m < Scalar(0) || beta_a_per_m < Scalar(0))
        throw std::domain_error("adapted_intensity: beta and beta_a must be >= 0");
    if (i0 < Scalar(0) || i_inf < Scalar(0))
        throw std::domain_error("adapted_intensity: intensities must be >= 0");
    using std::exp;
    using std::expm1;
    const Scalar dd = d > d0_m ? d - d0_m : Scalar(0);
    return i0 * exp(-beta_per_m * dd) + i_inf * (-expm1(-beta_a_per_m * dd));
}

/// Point-source model parameters (normalized chip units).
struct ScatterParams {
    double i0 = 0.0;
    double i_inf = 0.0;
    double beta_per_m = 0.0;
    double epsilon = kDefaultEpsilon;

    void validate() const {
        if (!(epsilon > 0.0) || !(epsilon < 1.0))
            throw std::domain_error("ScatterParams: epsilon must be in (0, 1)");
        if (!(i0 >= 0.0) || !(i_inf >= 0.0) || !std::isfinite(i0) || !std::isfinite(i_inf))
            throw std::domain_error("ScatterParams: intensities must be finite and >= 0");
        if (!(beta_per_m >= 0.0))
            throw std::domain_error("ScatterParams: beta_per_m must be >= 0");
    }
};

/// Observed intensity: attenuated radiance plus air-light.
/// Converges to i_inf as d grows.
inline double observed_intensity(const ScatterParams& p, double d) {
    p.validate();
    return attenuated_intensity(p.i0, p.beta_per_m, d) + airlight(p.i_inf, p.beta_per_m, d);
}

/// Atmospheric state of one experiment.
struct FogCondition {
    FogType fog_type = FogType::radiation;
    double visibility_m = 0.0;
    double droplet_mean_diameter_um = kRadiationDropletUm;
    double beta_per_m = 0.0; // derived from visibility_m

    static FogCondition from_visibility(FogType type, double visibility_m,
                                        double epsilon = kDefaultEpsilon,
                                        double droplet_um = 0.0) {
        FogCondition fog;
        fog.fog_type = type;
        fog.visibility_m = visibility_m;
        fog.beta_per_m = beta_from_visibility(visibility_m, epsilon);
        fog.droplet_mean_diameter_um =
            droplet_um > 0.0 ? droplet_um
                             : (type == FogType::radiation ? kRadiationDropletUm
                                                           : kAdvectionDropletUm);
        return fog;
    }

    /// Check beta == -ln(epsilon)/V to within a relative tolerance.
    bool consistent(double epsilon = kDefaultEpsilon, double rel_tol = 1e-12) const {
        const double expect = beta_from_visibility(visibility_m, epsilon);
        return std::abs(beta_per_m - expect) <= rel_tol * expect;
    }
};

inline const char* to_string(FogType type) {
    return type == FogType::radiation ? "radiation" : "advection";
}

} // namespace fogbench::atmosphere
