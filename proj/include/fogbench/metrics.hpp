#pragma once
// Image and trace metrics: Shannon entropy of the pixel-value histogram,
// Michelson and RMS contrast between the calibrated targets, and
// peak-intensity extraction from binned traces.

#include "fogbench/scene.hpp"

#include <optional>
#include <span>
#include <utility>

namespace fogbench::metrics {

struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
};

struct EntropyReport {
    double bits = 0.0;
    int histogram_bins = 0;
    long pixel_count = 0;
    std::optional<Rect> region;
};

/// Shannon entropy H = -sum p_i log2 p_i over the histogram of pixel values
/// (one bin per representable value; 0 log 0 := 0). Bounded by the bit depth.
EntropyReport entropy(const scene::FrameBuffer& frame, std::optional<Rect> region = {});

/// Per-channel entropy averaged over a multi-channel image.
double mean_channel_entropy(std::span<const scene::FrameBuffer> channels,
                            std::optional<Rect> region = {});

/// (i90 - i5) / (i90 + i5)
double michelson_contrast(double i90, double i5);

/// sqrt((i90 - i50)^2 / 2 + (i5 - i50)^2 / 2)
double rms_contrast(double i5, double i50, double i90);

struct PeakIntensity {
    double intensity = 0.0;
    double depth_m = 0.0;
};

/// Maximum binned mean intensity and its bin center; ties go to the
/// smaller depth.
PeakIntensity peak_intensity(const scene::TargetTrace& trace);

struct ContrastReport {
    double michelson = 0.0;
    double rms = 0.0;
    double i5 = 0.0;
    double i50 = 0.0;
    double i90 = 0.0;
};

struct DepthWindow {
    double lo_m = 5.0;
    double hi_m = 10.0;
};

/// Average the 5 % / 50 % / 90 % traces over the depth window, then apply
/// both contrast measures. Traces are matched by rho; all three must be
/// present and intersect the window.
ContrastReport contrast_window(std::span<const scene::TargetTrace> traces,
                               DepthWindow window = {});

/// Reduce a frame to the given resolution (box downsampling) and bit depth
/// (right shift). Target dimensions must not exceed the source.
scene::FrameBuffer reduce_frame(const scene::FrameBuffer& frame, int width, int height,
                                int bit_depth);

/// Reduce two frames to a common resolution (box downsampling) and common
/// bit depth (right shift) for fair comparison.
std::pair<scene::FrameBuffer, scene::FrameBuffer>
normalize_for_comparison(const scene::FrameBuffer& a, const scene::FrameBuffer& b);

} // namespace fogbench::metrics
