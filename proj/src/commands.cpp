#include "fogbench/commands.hpp"

#include "fogbench/errors.hpp"
#include "fogbench/pgm.hpp"
#include "fogbench/rng.hpp"
#include "fogbench/svg.hpp"
#include "fogbench/trace_csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fogbench::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) { return io::format_value(v); }

std::string rho_tag(double rho) {
    const double pct = rho * 100.0;
    char buf[32];
    if (std::abs(pct - std::round(pct)) < 1e-9)
        std::snprintf(buf, sizeof(buf), "%02d", static_cast<int>(std::lround(pct)));
    else
        std::snprintf(buf, sizeof(buf), "%g", pct);
    return buf;
}

std::string condition_tag(const scene::Scenario& scenario, const cfg::FogGridEntry& fog) {
    return std::string(scene::to_string(scenario.kind)) + "_" +
           atmosphere::to_string(fog.type) + "_v" + fmt(fog.midpoint_m());
}

json roi_to_json(const scene::RegionOfInterest& roi) {
    return json{{"x", roi.x}, {"y", roi.y}, {"width", roi.width}, {"height", roi.height}};
}

metrics::Rect roi_from_json(const json& j) {
    return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("width").get<int>(),
            j.at("height").get<int>()};
}

} // namespace

SimulateSummary run_simulate(const cfg::ExperimentConfig& config) {
    config.validate();
    if (config.out_dir.empty())
        throw std::invalid_argument("simulate: no output directory (flag --out, config "
                                    "experiment.out, or FOGBENCH_OUT)");

    const fs::path out_dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir / "traces", ec);
    if (ec) throw io_error("cannot create output directory: " + out_dir.string());

    SimulateSummary summary;
    summary.out_dir = out_dir;

    json manifest;
    manifest["seed"] = config.seed;
    manifest["epsilon"] = config.epsilon;
    manifest["step_m"] = config.step_m;
    manifest["bin_width_m"] = config.bin_width_m;
    manifest["traces"] = json::array();
    manifest["frames"] = json::array();

    for (const scene::Scenario& scenario : config.scenarios) {
        for (const cfg::FogGridEntry& grid : config.fog_grid) {
            const auto fog = atmosphere::FogCondition::from_visibility(
                grid.type, grid.midpoint_m(), config.epsilon);
            for (const scene::SensorModel& sensor : config.sensors) {
                const std::string cond = condition_tag(scenario, grid);
                const std::string job =
                    cond + "_" + scene::to_string(sensor.kind);

                scene::SweepParams params;
                params.step_m = config.step_m;
                params.bin_width_m = config.bin_width_m;
                params.illumination = config.illumination;
                params.seed = Rng::derive(config.seed, Rng::hash_key(job));

                const auto traces = scene::simulate_sweep(scenario, fog, sensor,
                                                          config.targets, params);
                for (const scene::TargetTrace& trace : traces) {
                    const std::string name = "trace_" + job + "_rho" + rho_tag(trace.rho) + ".csv";
                    const fs::path rel = fs::path("traces") / name;
                    io::write_trace_csv(out_dir / rel, io::rows_from_trace(trace));
                    ++summary.trace_files;
                    manifest["traces"].push_back(
                        {{"path", rel.generic_string()},
                         {"scenario", scene::to_string(scenario.kind)},
                         {"fog_type", atmosphere::to_string(grid.type)},
                         {"visibility_lo_m", grid.visibility_lo_m},
                         {"visibility_hi_m", grid.visibility_hi_m},
                         {"visibility_m", grid.midpoint_m()},
                         {"sensor", scene::to_string(sensor.kind)},
                         {"rho", trace.rho}});
                }

                if (config.frames_per_condition > 0) {
                    fs::create_directories(out_dir / "frames", ec);
                    const gated::GatingScheme scheme =
                        sensor.gating.value_or(gated::GatingScheme{});
                    const auto roi = scene::jointly_illuminated_region(
                        scenario, sensor, config.layout, scheme, config.illumination);
                    for (int i = 0; i < config.frames_per_condition; ++i) {
                        const std::string name =
                            "frame_" + job + "_" + std::to_string(i) + ".pgm";
                        const fs::path rel = fs::path("frames") / name;
                        const auto frame = scene::render_frame(
                            scenario, fog, sensor, config.layout,
                            Rng::derive(config.seed, Rng::hash_key(name)),
                            config.illumination);
                        io::write_pgm(out_dir / rel, frame);
                        ++summary.frame_files;
                        manifest["frames"].push_back(
                            {{"path", rel.generic_string()},
                             {"scenario", scene::to_string(scenario.kind)},
                             {"fog_type", atmosphere::to_string(grid.type)},
                             {"visibility_m", grid.midpoint_m()},
                             {"sensor", scene::to_string(sensor.kind)},
                             {"index", i},
                             {"roi", roi_to_json(roi)}});
                    }
                }
            }
        }
    }

    summary.manifest_path = out_dir / "manifest.json";
    io::write_file_atomic(summary.manifest_path, manifest.dump(2) + "\n");
    return summary;
}

FitSummary run_fit(const fs::path& trace_csv, double visibility_m, double bin_width_m,
                   bool strict, double epsilon) {
    const auto rows = io::read_trace_csv(trace_csv);
    const auto traces = io::traces_from_rows(rows, bin_width_m);
    const double beta = atmosphere::beta_from_visibility(visibility_m, epsilon);

    FitSummary summary;
    std::string results = "target_rho,i0,i_inf,d0_m,beta_a_per_m,rms_residual,iterations,"
                          "converged\n";
    std::string curves = "target_rho,depth_m,intensity\n";

    for (const scene::TargetTrace& trace : traces) {
        fitting::FitProblem problem;
        problem.trace = trace;
        problem.beta_per_m = beta;
        const fitting::FitResult result = fitting::fit_adapted_model(problem);
        if (strict && !result.converged)
            throw numerical_error("fit did not converge for rho " + fmt(trace.rho) + " in " +
                                  trace_csv.string());
        summary.rows.push_back({trace.rho, result});

        results += fmt(trace.rho) + ',' + fmt(result.i0) + ',' + fmt(result.i_inf) + ',' +
                   fmt(result.d0_m) + ',' + fmt(result.beta_a_per_m) + ',' +
                   fmt(result.rms_residual) + ',' + std::to_string(result.iterations) + ',' +
                   (result.converged ? "true" : "false") + '\n';

        const fitting::Params params(result.i0, result.i_inf, result.d0_m,
                                     result.beta_a_per_m);
        const double lo = trace.binned.front().center_m;
        const double hi = trace.binned.back().center_m;
        const int steps = 120;
        for (int i = 0; i <= steps; ++i) {
            const double d = lo + (hi - lo) * i / steps;
            curves += fmt(trace.rho) + ',' + fmt(d) + ',' +
                      fmt(fitting::model_value(params, beta, d)) + '\n';
        }
    }

    fs::path base = trace_csv;
    base.replace_extension();
    summary.results_path = base.string() + "_fit.csv";
    summary.curves_path = base.string() + "_fitcurve.csv";
    io::write_file_atomic(summary.results_path, results);
    io::write_file_atomic(summary.curves_path, curves);
    return summary;
}

namespace {

struct ManifestData {
    json root;
    fs::path run_dir;
};

ManifestData load_manifest(const fs::path& run_dir) {
    const fs::path path = run_dir / "manifest.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("no manifest at " + path.string() + " (run simulate first)");
    ManifestData data;
    data.run_dir = run_dir;
    try {
        in >> data.root;
    } catch (const json::exception& e) {
        throw io_error("manifest parse failure: " + path.string() + ": " + e.what());
    }
    return data;
}

// condition key: scenario | fog_type | visibility
using ConditionKey = std::tuple<std::string, std::string, double>;

ConditionKey key_of(const json& entry) {
    return {entry.at("scenario").get<std::string>(), entry.at("fog_type").get<std::string>(),
            entry.at("visibility_m").get<double>()};
}

struct EntropyRow {
    ConditionKey condition;
    std::string sensor;
    int frames = 0;
    double mean_bits = 0.0;
    double std_bits = 0.0;
};

std::vector<EntropyRow> entropy_rows_for(const ManifestData& manifest) {
    // group frame entries by condition, then by sensor
    std::map<ConditionKey, std::map<std::string, std::vector<const json*>>> groups;
    for (const json& entry : manifest.root.at("frames"))
        groups[key_of(entry)][entry.at("sensor").get<std::string>()].push_back(&entry);

    std::vector<EntropyRow> rows;
    for (const auto& [condition, by_sensor] : groups) {
        // common comparison format across the sensors of this condition
        int common_w = 1 << 20, common_h = 1 << 20, common_depth = 16;
        for (const auto& [sensor, entries] : by_sensor) {
            const auto frame =
                io::read_pgm(manifest.run_dir / entries.front()->at("path").get<std::string>());
            common_w = std::min(common_w, frame.width());
            common_h = std::min(common_h, frame.height());
            common_depth = std::min(common_depth, frame.bit_depth());
        }
        for (const auto& [sensor, entries] : by_sensor) {
            std::vector<double> bits;
            for (const json* entry : entries) {
                auto frame = io::read_pgm(manifest.run_dir / entry->at("path").get<std::string>());
                const double sx = static_cast<double>(common_w) / frame.width();
                const double sy = static_cast<double>(common_h) / frame.height();
                auto reduced = metrics::reduce_frame(frame, common_w, common_h, common_depth);
                std::optional<metrics::Rect> roi;
                if (entry->contains("roi")) {
                    metrics::Rect r = roi_from_json(entry->at("roi"));
                    r.x = static_cast<int>(r.x * sx);
                    r.width = std::max(1, static_cast<int>(r.width * sx));
                    r.y = static_cast<int>(r.y * sy);
                    r.height = std::max(1, static_cast<int>(r.height * sy));
                    r.width = std::min(r.width, common_w - r.x);
                    r.height = std::min(r.height, common_h - r.y);
                    roi = r;
                }
                bits.push_back(metrics::entropy(reduced, roi).bits);
            }
            EntropyRow row;
            row.condition = condition;
            row.sensor = sensor;
            row.frames = static_cast<int>(bits.size());
            double sum = 0.0;
            for (double b : bits) sum += b;
            row.mean_bits = sum / bits.size();
            double var = 0.0;
            for (double b : bits) var += (b - row.mean_bits) * (b - row.mean_bits);
            row.std_bits = bits.size() > 1 ? std::sqrt(var / (bits.size() - 1)) : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

struct TraceRef {
    ConditionKey condition;
    std::string sensor;
    double rho = 0.0;
    fs::path path;
};

std::vector<TraceRef> trace_refs(const ManifestData& manifest) {
    std::vector<TraceRef> refs;
    for (const json& entry : manifest.root.at("traces"))
        refs.push_back({key_of(entry), entry.at("sensor").get<std::string>(),
                        entry.at("rho").get<double>(),
                        manifest.run_dir / entry.at("path").get<std::string>()});
    return refs;
}

scene::TargetTrace load_trace(const TraceRef& ref, double bin_width_m) {
    auto traces = io::traces_from_rows(io::read_trace_csv(ref.path), bin_width_m);
    if (traces.size() != 1)
        throw io_error("expected a single rho group in " + ref.path.string());
    return std::move(traces.front());
}

std::string condition_csv(const ConditionKey& condition) {
    return std::get<0>(condition) + ',' + std::get<1>(condition) + ',' +
           fmt(std::get<2>(condition));
}

} // namespace

MetricsSummary run_metrics(const fs::path& run_dir, metrics::DepthWindow window) {
    const ManifestData manifest = load_manifest(run_dir);
    const double bin_width = manifest.root.value("bin_width_m", 1.0);

    MetricsSummary summary;

    // ---- entropy per frame series ----
    const auto entropy_rows = entropy_rows_for(manifest);
    if (!entropy_rows.empty()) {
        std::string csv = "scenario,fog_type,visibility_m,sensor,frames,entropy_mean_bits,"
                          "entropy_std_bits\n";
        for (const EntropyRow& row : entropy_rows)
            csv += condition_csv(row.condition) + ',' + row.sensor + ',' +
                   std::to_string(row.frames) + ',' + fmt(row.mean_bits) + ',' +
                   fmt(row.std_bits) + '\n';
        summary.entropy_csv = run_dir / "metrics_entropy.csv";
        io::write_file_atomic(summary.entropy_csv, csv);
        summary.entropy_rows = static_cast<int>(entropy_rows.size());
    }

    // ---- contrast and peaks from traces ----
    const auto refs = trace_refs(manifest);
    std::map<ConditionKey, std::map<std::string, std::vector<const TraceRef*>>> by_condition;
    for (const TraceRef& ref : refs) by_condition[ref.condition][ref.sensor].push_back(&ref);

    std::string contrast_csv = "scenario,fog_type,visibility_m,sensor,window_lo_m,window_hi_m,"
                               "i5,i50,i90,michelson,rms\n";
    std::string peaks_csv = "scenario,fog_type,visibility_m,sensor,target_rho,peak_intensity,"
                            "peak_depth_m\n";

    for (const auto& [condition, by_sensor] : by_condition) {
        for (const auto& [sensor, trace_list] : by_sensor) {
            std::vector<scene::TargetTrace> traces;
            for (const TraceRef* ref : trace_list) traces.push_back(load_trace(*ref, bin_width));

            for (const scene::TargetTrace& trace : traces) {
                const auto peak = metrics::peak_intensity(trace);
                peaks_csv += condition_csv(condition) + ',' + sensor + ',' + fmt(trace.rho) +
                             ',' + fmt(peak.intensity) + ',' + fmt(peak.depth_m) + '\n';
                ++summary.peak_rows;
            }

            const bool has_triple = [&] {
                std::set<int> pcts;
                for (const auto& t : traces) pcts.insert(static_cast<int>(std::lround(t.rho * 100)));
                return pcts.count(5) && pcts.count(50) && pcts.count(90);
            }();
            if (has_triple) {
                const auto report = metrics::contrast_window(traces, window);
                contrast_csv += condition_csv(condition) + ',' + sensor + ',' +
                                fmt(window.lo_m) + ',' + fmt(window.hi_m) + ',' +
                                fmt(report.i5) + ',' + fmt(report.i50) + ',' + fmt(report.i90) +
                                ',' + fmt(report.michelson) + ',' + fmt(report.rms) + '\n';
                ++summary.contrast_rows;
            }
        }
    }

    summary.contrast_csv = run_dir / "metrics_contrast.csv";
    io::write_file_atomic(summary.contrast_csv, contrast_csv);
    summary.peaks_csv = run_dir / "metrics_peaks.csv";
    io::write_file_atomic(summary.peaks_csv, peaks_csv);
    return summary;
}

namespace {

svg::Series series_from_trace(const scene::TargetTrace& trace, const std::string& label) {
    svg::Series series;
    series.label = label;
    for (const scene::DepthBin& bin : trace.binned)
        series.points.emplace_back(bin.center_m, bin.mean);
    return series;
}

} // namespace

ReportSummary run_report(const fs::path& run_dir) {
    const ManifestData manifest = load_manifest(run_dir);
    const double bin_width = manifest.root.value("bin_width_m", 1.0);

    ReportSummary summary;
    summary.report_dir = run_dir / "report";
    std::error_code ec;
    fs::create_directories(summary.report_dir, ec);
    if (ec) throw io_error("cannot create report directory: " + summary.report_dir.string());

    auto emit = [&](const svg::LinePlot& plot, const std::string& stem,
                    const std::string& data_csv) {
        plot.write(summary.report_dir / (stem + ".svg"));
        io::write_file_atomic(summary.report_dir / (stem + ".csv"), data_csv);
        summary.plots.push_back(stem);
    };

    const auto refs = trace_refs(manifest);
    if (refs.empty()) summary.gaps.push_back("no traces in manifest");

    // ---- intensity vs depth per (scenario, fog, visibility, sensor) ----
    std::map<std::tuple<std::string, std::string, double, std::string>,
             std::vector<const TraceRef*>>
        conditions;
    for (const TraceRef& ref : refs)
        conditions[{std::get<0>(ref.condition), std::get<1>(ref.condition),
                    std::get<2>(ref.condition), ref.sensor}]
            .push_back(&ref);

    for (const auto& [key, trace_list] : conditions) {
        const auto& [scenario, fog_type, visibility, sensor] = key;
        const std::string stem = "intensity_depth_" + scenario + "_" + fog_type + "_v" +
                                 fmt(visibility) + "_" + sensor;
        svg::LinePlot plot;
        plot.title = sensor + " camera, " + scenario + ", " + fog_type + " fog, V=" +
                     fmt(visibility) + " m";
        plot.x_label = "depth d / m";
        plot.y_label = "intensity I";
        std::string csv = "target_rho,depth_m,intensity\n";

        std::vector<const TraceRef*> ordered(trace_list);
        std::sort(ordered.begin(), ordered.end(),
                  [](const TraceRef* a, const TraceRef* b) { return a->rho < b->rho; });
        for (const TraceRef* ref : ordered) {
            const auto trace = load_trace(*ref, bin_width);
            plot.series.push_back(
                series_from_trace(trace, rho_tag(trace.rho) + " % target"));
            for (const scene::DepthBin& bin : trace.binned)
                csv += fmt(trace.rho) + ',' + fmt(bin.center_m) + ',' + fmt(bin.mean) + '\n';

            // fit overlay when a fitted curve exists next to the trace
            fs::path curve = ref->path;
            curve.replace_extension();
            curve = curve.string() + "_fitcurve.csv";
            if (fs::exists(curve)) {
                std::ifstream in(curve);
                std::string line;
                std::getline(in, line); // header
                svg::Series fit_series;
                fit_series.label = rho_tag(ref->rho) + " % fit";
                fit_series.dashed = true;
                while (std::getline(in, line)) {
                    std::stringstream ss(line);
                    std::string rho_s, d_s, i_s;
                    if (!std::getline(ss, rho_s, ',') || !std::getline(ss, d_s, ',') ||
                        !std::getline(ss, i_s, ','))
                        continue;
                    if (std::abs(std::stod(rho_s) - ref->rho) > 1e-9) continue;
                    fit_series.points.emplace_back(std::stod(d_s), std::stod(i_s));
                }
                if (!fit_series.points.empty()) plot.series.push_back(std::move(fit_series));
            }
        }
        emit(plot, stem, csv);
    }
    if (!refs.empty()) {
        bool any_fit = false;
        for (const TraceRef& ref : refs) {
            fs::path curve = ref.path;
            curve.replace_extension();
            if (fs::exists(curve.string() + "_fitcurve.csv")) any_fit = true;
        }
        if (!any_fit) summary.gaps.push_back("no fit curves found; intensity plots have no fit overlays");
    }

    // ---- peak intensity and contrast vs visibility ----
    std::map<std::tuple<std::string, std::string, std::string>,
             std::map<double, std::vector<const TraceRef*>>>
        families; // (scenario, fog, sensor) -> visibility -> traces
    for (const TraceRef& ref : refs)
        families[{std::get<0>(ref.condition), std::get<1>(ref.condition), ref.sensor}]
                [std::get<2>(ref.condition)]
                    .push_back(&ref);

    for (const auto& [key, by_visibility] : families) {
        const auto& [scenario, fog_type, sensor] = key;
        if (by_visibility.size() < 2) continue; // a trend needs at least two points

        svg::LinePlot peak_plot;
        peak_plot.title = "peak intensity vs visibility, " + sensor + ", " + fog_type + " fog";
        peak_plot.x_label = "visibility V / m";
        peak_plot.y_label = "peak intensity";
        std::string peak_csv = "visibility_m,target_rho,peak_intensity,peak_depth_m\n";
        std::map<double, svg::Series> per_rho;

        svg::LinePlot contrast_plot;
        contrast_plot.title = "contrast vs visibility, " + sensor + ", " + fog_type + " fog";
        contrast_plot.x_label = "visibility V / m";
        contrast_plot.y_label = "contrast";
        std::string contrast_csv = "visibility_m,michelson,rms\n";
        svg::Series michelson_series{"Michelson", {}, false};
        svg::Series rms_series{"RMS", {}, true};

        for (const auto& [visibility, trace_list] : by_visibility) {
            std::vector<scene::TargetTrace> traces;
            for (const TraceRef* ref : trace_list) traces.push_back(load_trace(*ref, bin_width));
            for (const scene::TargetTrace& trace : traces) {
                const auto peak = metrics::peak_intensity(trace);
                auto& series = per_rho[trace.rho];
                if (series.label.empty()) series.label = rho_tag(trace.rho) + " % target";
                series.points.emplace_back(visibility, peak.intensity);
                peak_csv += fmt(visibility) + ',' + fmt(trace.rho) + ',' +
                            fmt(peak.intensity) + ',' + fmt(peak.depth_m) + '\n';
            }
            try {
                const auto report = metrics::contrast_window(traces);
                michelson_series.points.emplace_back(visibility, report.michelson);
                rms_series.points.emplace_back(visibility, report.rms);
                contrast_csv += fmt(visibility) + ',' + fmt(report.michelson) + ',' +
                                fmt(report.rms) + '\n';
            } catch (const std::invalid_argument&) {
                // rho triple incomplete for this condition
            }
        }

        for (auto& [rho, series] : per_rho) peak_plot.series.push_back(std::move(series));
        emit(peak_plot, "peak_vs_visibility_" + scenario + "_" + fog_type + "_" + sensor,
             peak_csv);

        if (!michelson_series.points.empty()) {
            contrast_plot.series = {michelson_series, rms_series};
            emit(contrast_plot,
                 "contrast_vs_visibility_" + scenario + "_" + fog_type + "_" + sensor,
                 contrast_csv);
        }
    }

    // ---- entropy vs visibility ----
    const auto entropy_rows = entropy_rows_for(manifest);
    if (entropy_rows.empty()) {
        summary.gaps.push_back("no frames in manifest; entropy plots omitted");
    } else {
        std::map<std::string, std::map<std::string, svg::Series>> per_scenario;
        std::map<std::string, std::string> csv_per_scenario;
        for (const EntropyRow& row : entropy_rows) {
            const std::string scenario = std::get<0>(row.condition);
            auto& series = per_scenario[scenario][row.sensor + " (" +
                                                  std::get<1>(row.condition) + ")"];
            if (series.label.empty())
                series.label = row.sensor + ", " + std::get<1>(row.condition) + " fog";
            series.points.emplace_back(std::get<2>(row.condition), row.mean_bits);
            auto& csv = csv_per_scenario[scenario];
            if (csv.empty())
                csv = "fog_type,visibility_m,sensor,entropy_mean_bits,entropy_std_bits\n";
            csv += std::get<1>(row.condition) + ',' + fmt(std::get<2>(row.condition)) + ',' +
                   row.sensor + ',' + fmt(row.mean_bits) + ',' + fmt(row.std_bits) + '\n';
        }
        for (auto& [scenario, by_sensor] : per_scenario) {
            svg::LinePlot plot;
            plot.title = "entropy vs visibility, scenario " + scenario;
            plot.x_label = "visibility V / m";
            plot.y_label = "entropy H / bit";
            for (auto& [label, series] : by_sensor) {
                std::sort(series.points.begin(), series.points.end());
                plot.series.push_back(std::move(series));
            }
            emit(plot, "entropy_vs_visibility_" + scenario, csv_per_scenario[scenario]);
        }
    }

    // index with explicit gaps
    std::string index = "# report index\n\nplots:\n";
    for (const std::string& plot : summary.plots) index += "  " + plot + "\n";
    index += "\ngaps:\n";
    if (summary.gaps.empty()) index += "  none\n";
    for (const std::string& gap : summary.gaps) index += "  " + gap + "\n";
    io::write_file_atomic(summary.report_dir / "report_index.txt", index);

    return summary;
}

} // namespace fogbench::commands
