// fogbench - fog-chamber sensor benchmark harness
//
// Subcommands:
//   simulate   run the experiment grid, write trace CSVs / frames / manifest
//   fit        fit the adapted scattering model to a trace CSV
//   metrics    entropy, contrast and peak-intensity tables for a run
//   report     SVG plots plus plot-data CSVs for a run
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numerical failure.

#include "fogbench/commands.hpp"
#include "fogbench/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double bin_width = 0.0;
    double step = 0.0;
    bool strict = false;
};

fogbench::cfg::ExperimentConfig resolve_config(const GlobalFlags& flags) {
    using namespace fogbench;
    cfg::ExperimentConfig config = flags.config_path.empty()
                                       ? cfg::default_experiment()
                                       : cfg::load_experiment(flags.config_path);
    // precedence: flags > config > defaults (> environment for the out dir)
    if (flags.seed_set) config.seed = flags.seed;
    if (flags.bin_width > 0.0) config.bin_width_m = flags.bin_width;
    if (flags.step > 0.0) config.step_m = flags.step;
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (config.out_dir.empty()) {
        if (const char* env = std::getenv("FOGBENCH_OUT")) config.out_dir = env;
    }
    return config;
}

std::string resolve_run_dir(const GlobalFlags& flags) {
    if (!flags.out_dir.empty()) return flags.out_dir;
    if (!flags.config_path.empty()) {
        const auto config = fogbench::cfg::load_experiment(flags.config_path);
        if (!config.out_dir.empty()) return config.out_dir;
    }
    if (const char* env = std::getenv("FOGBENCH_OUT")) return env;
    throw std::invalid_argument("no run directory (flag --out, config experiment.out, or "
                                "FOGBENCH_OUT)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fog-chamber sensor benchmark harness"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "experiment config file")
        ->envname("FOGBENCH_CONFIG");
    app.add_option("--out", flags.out_dir, "output directory (fallback: FOGBENCH_OUT)");
    auto* seed_opt = app.add_option("--seed", flags.seed, "experiment seed (u64)");
    app.add_option("--bin-width", flags.bin_width, "depth bin width [m]");
    app.add_option("--step", flags.step, "target sweep step [m]");
    app.add_flag("--strict", flags.strict, "non-convergent fits fail with exit code 3");

    auto* simulate = app.add_subcommand("simulate", "run the experiment grid");

    auto* fit = app.add_subcommand("fit", "fit the adapted model to a trace csv");
    std::string fit_trace;
    double fit_visibility = 0.0;
    fit->add_option("trace", fit_trace, "trace csv (long or wide layout)")->required();
    fit->add_option("--visibility", fit_visibility, "visibility V [m] fixing beta")
        ->required();

    auto* metrics_cmd = app.add_subcommand("metrics", "metric tables for a simulation run");
    auto* report = app.add_subcommand("report", "plots and summary tables for a run");

    try {
        app.parse(argc, argv);
        flags.seed_set = seed_opt->count() > 0;

        if (simulate->parsed()) {
            const auto summary = fogbench::commands::run_simulate(resolve_config(flags));
            std::cout << "wrote " << summary.trace_files << " trace files, "
                      << summary.frame_files << " frames\nmanifest: "
                      << summary.manifest_path.string() << "\n";
        } else if (fit->parsed()) {
            const double bin_width = flags.bin_width > 0.0 ? flags.bin_width : 1.0;
            const auto summary = fogbench::commands::run_fit(fit_trace, fit_visibility,
                                                             bin_width, flags.strict);
            std::cout << "target_rho,i0,i_inf,d0_m,beta_a_per_m,rms_residual,converged\n";
            for (const auto& row : summary.rows)
                std::cout << row.rho << ',' << row.result.i0 << ',' << row.result.i_inf << ','
                          << row.result.d0_m << ',' << row.result.beta_a_per_m << ','
                          << row.result.rms_residual << ','
                          << (row.result.converged ? "true" : "false") << "\n";
            std::cout << "results: " << summary.results_path.string() << "\n";
        } else if (metrics_cmd->parsed()) {
            const auto summary = fogbench::commands::run_metrics(resolve_run_dir(flags));
            std::cout << "entropy rows: " << summary.entropy_rows
                      << ", contrast rows: " << summary.contrast_rows
                      << ", peak rows: " << summary.peak_rows << "\n";
        } else if (report->parsed()) {
            const auto summary = fogbench::commands::run_report(resolve_run_dir(flags));
            std::cout << "report: " << summary.report_dir.string() << " (" << summary.plots.size()
                      << " plots)\n";
            for (const auto& gap : summary.gaps) std::cout << "gap: " << gap << "\n";
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const fogbench::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const fogbench::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
