#include "fogbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fogbench::metrics {

namespace {

Rect full_frame(const scene::FrameBuffer& frame) {
    return {0, 0, frame.width(), frame.height()};
}

void check_region(const scene::FrameBuffer& frame, const Rect& r) {
    if (r.width <= 0 || r.height <= 0)
        throw std::invalid_argument("entropy: region must be nonempty");
    if (r.x < 0 || r.y < 0 || r.x + r.width > frame.width() || r.y + r.height > frame.height())
        throw std::invalid_argument("entropy: region outside frame bounds");
}

} // namespace

EntropyReport entropy(const scene::FrameBuffer& frame, std::optional<Rect> region) {
    const Rect r = region.value_or(full_frame(frame));
    check_region(frame, r);

    const int bins = 1 << frame.bit_depth();
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (int y = r.y; y < r.y + r.height; ++y)
        for (int x = r.x; x < r.x + r.width; ++x)
            ++counts[frame.at(x, y)];

    const double total = static_cast<double>(r.width) * r.height;
    double bits = 0.0;
    for (long c : counts) {
        if (c == 0) continue;
        const double p = c / total;
        bits -= p * std::log2(p);
    }

    EntropyReport report;
    report.bits = bits;
    report.histogram_bins = bins;
    report.pixel_count = static_cast<long>(total);
    report.region = region;
    return report;
}

double mean_channel_entropy(std::span<const scene::FrameBuffer> channels,
                            std::optional<Rect> region) {
    if (channels.empty())
        throw std::invalid_argument("mean_channel_entropy: no channels");
    double sum = 0.0;
    for (const scene::FrameBuffer& ch : channels) sum += entropy(ch, region).bits;
    return sum / static_cast<double>(channels.size());
}

double michelson_contrast(double i90, double i5) {
    const double denom = i90 + i5;
    if (!(denom > 0.0))
        throw std::domain_error("michelson_contrast: i90 + i5 must be > 0");
    return (i90 - i5) / denom;
}

double rms_contrast(double i5, double i50, double i90) {
    const double a = i90 - i50;
    const double b = i5 - i50;
    return std::sqrt(0.5 * a * a + 0.5 * b * b);
}

PeakIntensity peak_intensity(const scene::TargetTrace& trace) {
    if (trace.binned.empty())
        throw std::invalid_argument("peak_intensity: trace has no binned data");
    PeakIntensity peak{trace.binned.front().mean, trace.binned.front().center_m};
    for (const scene::DepthBin& bin : trace.binned) {
        if (bin.mean > peak.intensity) { // strict: ties keep the smaller depth
            peak.intensity = bin.mean;
            peak.depth_m = bin.center_m;
        }
    }
    return peak;
}

namespace {

double window_mean(const scene::TargetTrace& trace, DepthWindow window) {
    double sum = 0.0;
    int n = 0;
    for (const scene::DepthBin& bin : trace.binned) {
        if (bin.center_m < window.lo_m || bin.center_m > window.hi_m) continue;
        sum += bin.mean;
        ++n;
    }
    if (n == 0)
        throw std::invalid_argument("contrast_window: window contains no bins");
    return sum / n;
}

const scene::TargetTrace& find_trace(std::span<const scene::TargetTrace> traces, double rho) {
    for (const scene::TargetTrace& t : traces)
        if (std::abs(t.rho - rho) < 1e-9) return t;
    throw std::invalid_argument("contrast_window: missing trace for rho " + std::to_string(rho));
}

} // namespace

ContrastReport contrast_window(std::span<const scene::TargetTrace> traces, DepthWindow window) {
    ContrastReport report;
    report.i5 = window_mean(find_trace(traces, 0.05), window);
    report.i50 = window_mean(find_trace(traces, 0.50), window);
    report.i90 = window_mean(find_trace(traces, 0.90), window);
    report.michelson = michelson_contrast(report.i90, report.i5);
    report.rms = rms_contrast(report.i5, report.i50, report.i90);
    return report;
}

scene::FrameBuffer reduce_frame(const scene::FrameBuffer& src, int dst_w, int dst_h,
                                int dst_depth) {
    if (dst_w > src.width() || dst_h > src.height() || dst_depth > src.bit_depth())
        throw std::invalid_argument("reduce_frame: target must not exceed the source");
    const int shift = src.bit_depth() - dst_depth;
    if (src.width() == dst_w && src.height() == dst_h && shift == 0) return src;

    scene::FrameBuffer dst(dst_w, dst_h, dst_depth);
    Eigen::ArrayXXd sums = Eigen::ArrayXXd::Zero(dst_h, dst_w);
    Eigen::ArrayXXi counts = Eigen::ArrayXXi::Zero(dst_h, dst_w);
    for (int y = 0; y < src.height(); ++y) {
        const int dy = static_cast<int>(static_cast<long>(y) * dst_h / src.height());
        for (int x = 0; x < src.width(); ++x) {
            const int dx = static_cast<int>(static_cast<long>(x) * dst_w / src.width());
            sums(dy, dx) += src.at(x, y);
            counts(dy, dx) += 1;
        }
    }
    for (int y = 0; y < dst_h; ++y) {
        for (int x = 0; x < dst_w; ++x) {
            const long mean = std::lround(sums(y, x) / std::max(counts(y, x), 1));
            dst.at(x, y) = static_cast<std::uint16_t>(mean >> shift);
        }
    }
    return dst;
}

std::pair<scene::FrameBuffer, scene::FrameBuffer>
normalize_for_comparison(const scene::FrameBuffer& a, const scene::FrameBuffer& b) {
    const int w = std::min(a.width(), b.width());
    const int h = std::min(a.height(), b.height());
    const int depth = std::min(a.bit_depth(), b.bit_depth());
    return {reduce_frame(a, w, h, depth), reduce_frame(b, w, h, depth)};
}

} // namespace fogbench::metrics
