#pragma once
// Minimal deterministic SVG line plots for the report command. Output is
// plain text with fixed formatting so regenerated reports diff cleanly.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fogbench::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool dashed = false;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int width = 640;
    int height = 420;

    std::string render() const;
    void write(const std::filesystem::path& path) const;
};

} // namespace fogbench::svg
