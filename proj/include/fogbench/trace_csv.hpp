#pragma once
// Trace CSV ingestion and emission.
//
// Long format (the native schema), header exactly:
//   depth_m,intensity_mean,intensity_std,target_rho
// Values are serialized with 9 significant digits; write -> read -> write is
// byte-stable.
//
// The reader also accepts the wide per-target layout of measured data files
// (x_5,mean_5,std_5,x_50,mean_50,std_50,x_90,mean_90,std_90) and converts it,
// preserving the per-target depth columns.

#include "fogbench/scene.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fogbench::io {

struct TraceRow {
    double depth_m = 0.0;
    double intensity_mean = 0.0;
    double intensity_std = 0.0;
    double target_rho = 0.0;
};

inline constexpr const char* kTraceCsvHeader = "depth_m,intensity_mean,intensity_std,target_rho";

/// Serialize a double with 9 significant digits (the trace CSV convention).
std::string format_value(double value);

std::string to_csv(const std::vector<TraceRow>& rows);

/// Parse long- or wide-format trace CSV. Throws io_error naming the line
/// number for malformed rows, and a schema error for unknown headers or
/// out-of-range values.
std::vector<TraceRow> parse_trace_csv(const std::string& text);

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

/// Atomic write (temp file + rename).
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);

/// Group rows by target_rho (ascending rho, order of first appearance within
/// a group preserved) into traces, binning with the given width.
std::vector<scene::TargetTrace> traces_from_rows(const std::vector<TraceRow>& rows,
                                                 double bin_width_m);

std::vector<TraceRow> rows_from_trace(const scene::TargetTrace& trace);

/// Write text to path atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace fogbench::io
