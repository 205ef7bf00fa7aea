#pragma once
// Benchmark harness commands. Each CLI subcommand is a thin wrapper around
// one of these functions so the whole pipeline is testable in-process.

#include "fogbench/config.hpp"
#include "fogbench/fitting.hpp"
#include "fogbench/metrics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fogbench::commands {

struct SimulateSummary {
    std::filesystem::path out_dir;
    int trace_files = 0;
    int frame_files = 0;
    std::filesystem::path manifest_path;
};

/// Run the experiment grid: one trace CSV per (scenario, fog, sensor,
/// target), optional frame series per condition, and a manifest listing every
/// output with its parameters (written last). Deterministic per seed.
SimulateSummary run_simulate(const cfg::ExperimentConfig& config);

struct FitRow {
    double rho = 0.0;
    fitting::FitResult result;
};

struct FitSummary {
    std::vector<FitRow> rows;
    std::filesystem::path results_path;
    std::filesystem::path curves_path;
};

/// Fit the adapted model to every rho group of a trace CSV, with beta fixed
/// from the visibility. Writes <stem>_fit.csv (parameters) and
/// <stem>_fitcurve.csv (sampled fitted curves for plotting).
/// With strict set, a non-convergent fit raises numerical_error.
FitSummary run_fit(const std::filesystem::path& trace_csv, double visibility_m,
                   double bin_width_m = 1.0, bool strict = false,
                   double epsilon = atmosphere::kDefaultEpsilon);

struct MetricsSummary {
    std::filesystem::path entropy_csv;  // empty if no frames were present
    std::filesystem::path contrast_csv;
    std::filesystem::path peaks_csv;
    int entropy_rows = 0;
    int contrast_rows = 0;
    int peak_rows = 0;
};

/// Evaluate a simulation run directory: entropy mean/std per frame series
/// (frames reduced to common resolution and bit depth across sensors),
/// contrast over the 5-10 m window per condition, and per-trace peak
/// intensities.
MetricsSummary run_metrics(const std::filesystem::path& run_dir,
                           metrics::DepthWindow window = {});

struct ReportSummary {
    std::filesystem::path report_dir;
    std::vector<std::string> plots;
    std::vector<std::string> gaps;
};

/// Emit summary plots (SVG) with their data as CSV: intensity vs depth per
/// condition (with fit overlays when fit curves exist), peak intensity vs
/// visibility, contrast vs visibility, and entropy vs visibility when frames
/// were rendered. Missing inputs are listed as gaps, not errors.
ReportSummary run_report(const std::filesystem::path& run_dir);

} // namespace fogbench::commands
