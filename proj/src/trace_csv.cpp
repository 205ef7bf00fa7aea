#include "fogbench/trace_csv.hpp"

#include "fogbench/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fogbench::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, sep)) fields.push_back(field);
    if (!line.empty() && line.back() == sep) fields.emplace_back();
    return fields;
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& field, int line_no, const char* column) {
    const std::string text = strip(field);
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw io_error("trace csv: line " + std::to_string(line_no) + ": column '" + column +
                       "' is not a number: '" + text + "'");
    }
    if (pos != text.size())
        throw io_error("trace csv: line " + std::to_string(line_no) + ": column '" + column +
                       "' has trailing characters: '" + text + "'");
    return value;
}

void check_row(const TraceRow& row, int line_no) {
    if (!(row.depth_m > 0.0))
        throw io_error("trace csv: line " + std::to_string(line_no) +
                       ": depth_m must be > 0");
    if (row.intensity_mean < 0.0 || row.intensity_mean > 1.0)
        throw io_error("trace csv: line " + std::to_string(line_no) +
                       ": intensity_mean must be in [0, 1]");
    if (row.intensity_std < 0.0 || row.intensity_std > 1.0)
        throw io_error("trace csv: line " + std::to_string(line_no) +
                       ": intensity_std must be in [0, 1]");
    if (row.target_rho < 0.0 || row.target_rho > 1.0)
        throw io_error("trace csv: line " + std::to_string(line_no) +
                       ": target_rho must be in [0, 1]");
}

std::vector<TraceRow> parse_long(const std::vector<std::string>& lines) {
    std::vector<TraceRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string line = strip(lines[i]);
        if (line.empty()) continue;
        const int line_no = static_cast<int>(i) + 1;
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw io_error("trace csv: line " + std::to_string(line_no) + ": expected 4 fields, got " +
                           std::to_string(fields.size()));
        TraceRow row;
        row.depth_m = parse_double(fields[0], line_no, "depth_m");
        row.intensity_mean = parse_double(fields[1], line_no, "intensity_mean");
        row.intensity_std = parse_double(fields[2], line_no, "intensity_std");
        row.target_rho = parse_double(fields[3], line_no, "target_rho");
        check_row(row, line_no);
        rows.push_back(row);
    }
    if (rows.empty()) throw io_error("trace csv: no data rows");
    return rows;
}

const std::vector<std::string> kWideColumns = {"x_5",  "mean_5",  "std_5",
                                               "x_50", "mean_50", "std_50",
                                               "x_90", "mean_90", "std_90"};

std::vector<TraceRow> parse_wide(const std::vector<std::string>& lines,
                                 const std::vector<std::string>& header) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[strip(header[i])] = i;
    for (const std::string& col : kWideColumns)
        if (!index.count(col))
            throw io_error("trace csv: wide layout is missing column '" + col + "'");

    struct Group {
        double rho;
        std::size_t x, mean, std;
    };
    const Group groups[] = {
        {0.05, index["x_5"], index["mean_5"], index["std_5"]},
        {0.50, index["x_50"], index["mean_50"], index["std_50"]},
        {0.90, index["x_90"], index["mean_90"], index["std_90"]},
    };

    std::vector<TraceRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string line = strip(lines[i]);
        if (line.empty()) continue;
        const int line_no = static_cast<int>(i) + 1;
        const auto fields = split(line, ',');
        if (fields.size() < header.size())
            throw io_error("trace csv: line " + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        for (const Group& g : groups) {
            // empty cells mean the target was not tracked in this frame
            if (strip(fields[g.x]).empty()) continue;
            TraceRow row;
            row.depth_m = parse_double(fields[g.x], line_no, "x");
            row.intensity_mean = parse_double(fields[g.mean], line_no, "mean");
            row.intensity_std = parse_double(fields[g.std], line_no, "std");
            row.target_rho = g.rho;
            check_row(row, line_no);
            rows.push_back(row);
        }
    }
    if (rows.empty()) throw io_error("trace csv: no data rows");
    return rows;
}

} // namespace

std::string format_value(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

std::string to_csv(const std::vector<TraceRow>& rows) {
    std::string out = kTraceCsvHeader;
    out += '\n';
    for (const TraceRow& row : rows) {
        out += format_value(row.depth_m);
        out += ',';
        out += format_value(row.intensity_mean);
        out += ',';
        out += format_value(row.intensity_std);
        out += ',';
        out += format_value(row.target_rho);
        out += '\n';
    }
    return out;
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    if (lines.empty()) throw io_error("trace csv: empty file");

    const auto header = split(strip(lines[0]), ',');
    std::vector<std::string> names;
    for (const std::string& h : header) names.push_back(strip(h));

    if (names == std::vector<std::string>{"depth_m", "intensity_mean", "intensity_std",
                                          "target_rho"})
        return parse_long(lines);
    if (std::find(names.begin(), names.end(), "x_5") != names.end())
        return parse_wide(lines, header);
    throw io_error("trace csv: unknown header '" + strip(lines[0]) + "'");
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open trace csv: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_trace_csv(buffer.str());
    } catch (const io_error& e) {
        throw io_error(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write: " + tmp.string());
        out << content;
        if (!out) throw io_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("rename failed: " + path.string() + ": " + ec.message());
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
    write_file_atomic(path, to_csv(rows));
}

std::vector<scene::TargetTrace> traces_from_rows(const std::vector<TraceRow>& rows,
                                                 double bin_width_m) {
    std::map<double, scene::TargetTrace> by_rho;
    for (const TraceRow& row : rows) {
        scene::TargetTrace& trace = by_rho[row.target_rho];
        trace.rho = row.target_rho;
        trace.samples.push_back({row.depth_m, row.intensity_mean, row.intensity_std});
    }
    std::vector<scene::TargetTrace> traces;
    for (auto& [rho, trace] : by_rho) {
        trace.binned = scene::bin_by_depth(trace.samples, bin_width_m);
        traces.push_back(std::move(trace));
    }
    return traces;
}

std::vector<TraceRow> rows_from_trace(const scene::TargetTrace& trace) {
    std::vector<TraceRow> rows;
    rows.reserve(trace.samples.size());
    for (const scene::TraceSample& s : trace.samples)
        rows.push_back({s.depth_m, s.intensity, s.std, trace.rho});
    return rows;
}

} // namespace fogbench::io
