#pragma once
// Nonlinear least-squares estimation of the adapted scattering model from a
// binned intensity-vs-depth trace. The attenuation coefficient beta is fixed
// from the visibility; free parameters are (i0, i_inf, d0, beta_a).
//
// Solver: damped Gauss-Newton with multiplicative damping adaptation.
// Deterministic: identical problems yield bit-identical results.

#include "fogbench/scene.hpp"

#include <Eigen/Core>

#include <optional>

namespace fogbench::fitting {

/// Parameter vector order: (i0, i_inf, d0, beta_a).
using Params = Eigen::Vector4d;

struct FitProblem {
    scene::TargetTrace trace; // binned data is fitted
    double beta_per_m = 0.0;
    std::optional<Eigen::VectorXd> weights; // default: 1/std where std > 0, else 1
    double weight_floor = 1e-6;             // floor on std before inversion

    void validate() const;
    Eigen::VectorXd effective_weights() const;
};

struct FitResult {
    double i0 = 0.0;
    double i_inf = 0.0;
    double d0_m = 0.0;
    double beta_a_per_m = 0.0;
    double rms_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::optional<Eigen::Vector4d> covariance_diag;
};

/// Model value at one depth (clamped below d0).
double model_value(const Params& params, double beta_per_m, double d);

/// Weighted residuals r_k = w_k (mean_k - model(d_k)); their sum of squares
/// is the fit objective.
Eigen::VectorXd residuals(const Params& params, const FitProblem& problem);

/// Analytic partials of the model w.r.t. (i0, i_inf, d0, beta_a), one row per
/// bin. For clamped bins (d < d0) the model equals i0, so the row is
/// (1, 0, 0, 0).
Eigen::MatrixXd jacobian(const Params& params, const FitProblem& problem);

/// Minimize the weighted sum of squared residuals subject to
/// i0, i_inf, beta_a >= 0 and d0 within the trace's depth span.
FitResult fit_adapted_model(const FitProblem& problem);

} // namespace fogbench::fitting
