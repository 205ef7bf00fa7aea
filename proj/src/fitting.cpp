#include "fogbench/fitting.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fogbench::fitting {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kInitialDamping = 1e-3;
constexpr double kRelObjectiveTol = 1e-10;
constexpr double kStepTol = 1e-12;

Eigen::VectorXd bin_depths(const scene::TargetTrace& trace) {
    Eigen::VectorXd d(trace.binned.size());
    for (std::size_t i = 0; i < trace.binned.size(); ++i) d[i] = trace.binned[i].center_m;
    return d;
}

Eigen::VectorXd bin_means(const scene::TargetTrace& trace) {
    Eigen::VectorXd y(trace.binned.size());
    for (std::size_t i = 0; i < trace.binned.size(); ++i) y[i] = trace.binned[i].mean;
    return y;
}

} // namespace

void FitProblem::validate() const {
    if (trace.binned.size() < 4)
        throw std::invalid_argument("FitProblem: need at least 4 bins (4 free parameters)");
    if (!(beta_per_m > 0.0))
        throw std::invalid_argument("FitProblem: beta_per_m must be > 0");
    if (weights) {
        if (static_cast<std::size_t>(weights->size()) != trace.binned.size())
            throw std::invalid_argument("FitProblem: weight count must match bin count");
        if ((weights->array() < 0.0).any())
            throw std::invalid_argument("FitProblem: weights must be >= 0");
        if ((weights->array() == 0.0).all())
            throw std::invalid_argument("FitProblem: weights must not all be zero");
    }
}

Eigen::VectorXd FitProblem::effective_weights() const {
    if (weights) return *weights;
    Eigen::VectorXd w(trace.binned.size());
    for (std::size_t i = 0; i < trace.binned.size(); ++i) {
        const double s = trace.binned[i].std;
        w[i] = s > 0.0 ? 1.0 / std::max(s, weight_floor) : 1.0;
    }
    return w;
}

double model_value(const Params& params, double beta_per_m, double d) {
    return atmosphere::adapted_intensity(params[0], params[1], params[2], beta_per_m,
                                         params[3], d);
}

Eigen::VectorXd residuals(const Params& params, const FitProblem& problem) {
    problem.validate();
    const Eigen::VectorXd d = bin_depths(problem.trace);
    const Eigen::VectorXd y = bin_means(problem.trace);
    const Eigen::VectorXd w = problem.effective_weights();
    Eigen::VectorXd r(d.size());
    for (Eigen::Index k = 0; k < d.size(); ++k)
        r[k] = w[k] * (y[k] - model_value(params, problem.beta_per_m, d[k]));
    return r;
}

Eigen::MatrixXd jacobian(const Params& params, const FitProblem& problem) {
    problem.validate();
    const Eigen::VectorXd d = bin_depths(problem.trace);
    const double beta = problem.beta_per_m;
    const double i0 = params[0];
    const double i_inf = params[1];
    const double d0 = params[2];
    const double beta_a = params[3];

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d.size(), 4);
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        if (d[k] < d0) {
            J(k, 0) = 1.0; // clamped: model == i0
            continue;
        }
        const double dd = d[k] - d0;
        const double eb = std::exp(-beta * dd);
        const double ea = std::exp(-beta_a * dd);
        J(k, 0) = eb;
        J(k, 1) = 1.0 - ea;
        J(k, 2) = beta * i0 * eb - beta_a * i_inf * ea;
        J(k, 3) = i_inf * dd * ea;
    }
    return J;
}

namespace {

struct SolverRun {
    Params params = Params::Zero();
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

double objective_at(const Params& p, const Eigen::VectorXd& d, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& w, double beta) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        const double r = w[k] * (y[k] - model_value(p, beta, d[k]));
        sum += r * r;
    }
    return sum;
}

Params project(Params p, double d_lo, double d_hi) {
    p[0] = std::max(p[0], 0.0);
    p[1] = std::max(p[1], 0.0);
    p[2] = std::clamp(p[2], d_lo, d_hi);
    p[3] = std::max(p[3], 0.0);
    return p;
}

SolverRun run_from(const FitProblem& problem, const Eigen::VectorXd& d,
                   const Eigen::VectorXd& y, const Eigen::VectorXd& w, Params init) {
    const double beta = problem.beta_per_m;
    const double d_lo = d.minCoeff();
    const double d_hi = d.maxCoeff();

    SolverRun run;
    run.params = project(std::move(init), d_lo, d_hi);
    run.objective = objective_at(run.params, d, y, w, beta);

    double damping = kInitialDamping;
    for (run.iterations = 1; run.iterations <= kMaxIterations; ++run.iterations) {
        const Eigen::MatrixXd Jm = jacobian(run.params, problem);
        Eigen::VectorXd r(d.size());
        for (Eigen::Index k = 0; k < d.size(); ++k)
            r[k] = w[k] * (y[k] - model_value(run.params, beta, d[k]));
        // residual jacobian is -W * Jm
        const Eigen::MatrixXd Jr = -(w.asDiagonal() * Jm);
        const Eigen::Vector4d g = Jr.transpose() * r;
        const Eigen::Matrix4d H = Jr.transpose() * Jr;

        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            const Eigen::Matrix4d damped = H + damping * Eigen::Matrix4d::Identity();
            const Eigen::LDLT<Eigen::Matrix4d> ldlt(damped);
            if (ldlt.info() != Eigen::Success) {
                damping *= 10.0;
                continue;
            }
            const Eigen::Vector4d step = ldlt.solve(-g);
            const Params candidate = project(run.params + step, d_lo, d_hi);
            const double candidate_obj = objective_at(candidate, d, y, w, beta);
            if (candidate_obj < run.objective) {
                const double rel = (run.objective - candidate_obj) /
                                   std::max(run.objective, 1e-300);
                const double step_norm = (candidate - run.params).cwiseAbs().maxCoeff();
                run.params = candidate;
                run.objective = candidate_obj;
                damping = std::max(damping / 10.0, 1e-12);
                accepted = true;
                if (rel < kRelObjectiveTol || step_norm < kStepTol) run.converged = true;
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) {
            // damping exhausted without any decrease: stationary point
            run.converged = true;
            break;
        }
        if (run.converged) break;
    }
    return run;
}

} // namespace

FitResult fit_adapted_model(const FitProblem& problem) {
    problem.validate();
    const Eigen::VectorXd d = bin_depths(problem.trace);
    const Eigen::VectorXd y = bin_means(problem.trace);
    const Eigen::VectorXd w = problem.effective_weights();

    // shared starting values
    const double y_max = y.maxCoeff();
    const int n_tail = std::max<int>(1, static_cast<int>(y.size()) / 10);
    const double tail_mean = y.tail(n_tail).mean();
    const double i0_init = std::max(y_max - tail_mean, 0.0);
    const double i_inf_init = std::max(tail_mean, 0.0);

    // d0 candidates: the largest depth attaining the maximum (the clamp
    // boundary for a flat-topped trace), plus fixed span quantiles; the
    // run with the lowest final objective wins. A single start frequently
    // lands in a shallow secondary minimum of the clamped model.
    double d0_argmax = d[0];
    for (Eigen::Index k = 0; k < y.size(); ++k)
        if (y[k] >= y_max) d0_argmax = d[k];
    const double span = d[d.size() - 1] - d[0];
    const double candidates[] = {d0_argmax, d[0] + 0.1 * span, d[0] + 0.2 * span,
                                 d[0] + 0.3 * span, d[0] + 0.4 * span};

    std::optional<SolverRun> best;
    for (double d0_init : candidates) {
        Params init;
        init << i0_init, i_inf_init, d0_init, problem.beta_per_m;
        SolverRun run = run_from(problem, d, y, w, init);
        if (!best || run.objective < best->objective) best = run;
    }

    FitResult result;
    result.i0 = best->params[0];
    result.i_inf = best->params[1];
    result.d0_m = best->params[2];
    result.beta_a_per_m = best->params[3];
    result.iterations = best->iterations;
    result.converged = best->converged;
    result.rms_residual = std::sqrt(best->objective / static_cast<double>(d.size()));

    if (d.size() > 4) {
        const Eigen::MatrixXd Jm = jacobian(best->params, problem);
        const Eigen::MatrixXd Jr = -(w.asDiagonal() * Jm);
        const Eigen::Matrix4d H = Jr.transpose() * Jr;
        const Eigen::LDLT<Eigen::Matrix4d> ldlt(H);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
            const double s2 = best->objective / static_cast<double>(d.size() - 4);
            const Eigen::Matrix4d cov = ldlt.solve(Eigen::Matrix4d::Identity()) * s2;
            result.covariance_diag = cov.diagonal();
        }
    }
    return result;
}

} // namespace fogbench::fitting
