#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace burstsched {

/// Planar RGB image in linear radiance units, row-major, values >= 0.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> r, g, b;

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h),
          r(static_cast<std::size_t>(w) * h, 0.0),
          g(static_cast<std::size_t>(w) * h, 0.0),
          b(static_cast<std::size_t>(w) * h, 0.0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t idx(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }

    std::vector<double>& plane(int c) { return c == 0 ? r : (c == 1 ? g : b); }
    const std::vector<double>& plane(int c) const { return c == 0 ? r : (c == 1 ? g : b); }

    bool same_size(const RgbImage& o) const { return width == o.width && height == o.height; }
};

struct CaptureMeta {
    double exposure_s = 0.0;
    double gain = 0.0;
    double t_start_s = 0.0;
    double t_end_s = 0.0;
};

/// Single-plane RGGB mosaic image, values in [0,1].
/// Layout convention (row, col): R at (even, even), G at (even, odd) and
/// (odd, even), B at (odd, odd).
struct BayerFrame {
    int width = 0;
    int height = 0;
    std::vector<double> plane;
    CaptureMeta meta;

    BayerFrame() = default;
    BayerFrame(int w, int h)
        : width(w), height(h), plane(static_cast<std::size_t>(w) * h, 0.0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    std::size_t idx(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
};

/// Ordered high-FPS radiance frames; frame tau covers the time interval
/// [tau, tau+1) * e_s on the radiance clock.
struct RadianceSequence {
    double e_s = 0.0;
    std::vector<RgbImage> frames;

    int width() const { return frames.empty() ? 0 : frames.front().width; }
    int height() const { return frames.empty() ? 0 : frames.front().height; }
    std::size_t frame_count() const { return frames.size(); }
    double duration_s() const { return e_s * static_cast<double>(frames.size()); }
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace burstsched
