#include "burstsched/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "burstsched/fusion.hpp"

namespace burstsched {

namespace {

std::vector<double> downsampled_luminance(const BayerFrame& frame, int factor, int& dw, int& dh) {
    const RgbImage rgb = demosaic_bilinear(frame);
    dw = frame.width / factor;
    dh = frame.height / factor;
    std::vector<double> out(static_cast<std::size_t>(dw) * dh, 0.0);
    const double norm = 1.0 / (factor * factor);
    for (int oy = 0; oy < dh; ++oy)
        for (int ox = 0; ox < dw; ++ox) {
            double s = 0.0;
            for (int yy = 0; yy < factor; ++yy)
                for (int xx = 0; xx < factor; ++xx) {
                    const std::size_t i = rgb.idx(oy * factor + yy, ox * factor + xx);
                    s += 0.299 * rgb.r[i] + 0.587 * rgb.g[i] + 0.114 * rgb.b[i];
                }
            out[static_cast<std::size_t>(oy) * dw + ox] = s * norm;
        }
    return out;
}

// MAD between cur and prev shifted by (u, v): cur(y, x) vs prev(y - v, x - u)
// over the valid overlap.
double shift_cost(const std::vector<double>& cur, const std::vector<double>& prev, int w, int h,
                  int u, int v) {
    const int y0 = std::max(0, v), y1 = std::min(h, h + v);
    const int x0 = std::max(0, u), x1 = std::min(w, w + u);
    double s = 0.0;
    long n = 0;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
            s += std::abs(cur[static_cast<std::size_t>(y) * w + x] -
                          prev[static_cast<std::size_t>(y - v) * w + (x - u)]);
            ++n;
        }
    return n > 0 ? s / static_cast<double>(n) : std::numeric_limits<double>::infinity();
}

double parabolic_offset(double left, double center, double right) {
    const double denom = left - 2.0 * center + right;
    if (denom <= 0.0) return 0.0;
    return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

MotionEstimate estimate_translation(const BayerFrame& current, const BayerFrame& previous,
                                    int downsample, int max_shift) {
    require(current.width == previous.width && current.height == previous.height,
            "estimate_translation: dimension mismatch");
    require(downsample >= 1, "estimate_translation: downsample must be >= 1");
    require(max_shift >= 1, "estimate_translation: max_shift must be >= 1");

    int dw = 0, dh = 0;
    const std::vector<double> cur = downsampled_luminance(current, downsample, dw, dh);
    int pw = 0, ph = 0;
    const std::vector<double> prev = downsampled_luminance(previous, downsample, pw, ph);
    require(dw >= 4 && dh >= 4, "estimate_translation: image too small after downsampling");

    // Keep at least a quarter of each axis overlapping.
    const int sx = std::min(max_shift, dw - std::max(2, dw / 4));
    const int sy = std::min(max_shift, dh - std::max(2, dh / 4));
    const int cols = 2 * sx + 1, rows = 2 * sy + 1;

    std::vector<double> cost(static_cast<std::size_t>(rows) * cols);
    int best_u = 0, best_v = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int v = -sy; v <= sy; ++v)
        for (int u = -sx; u <= sx; ++u) {
            const double c = shift_cost(cur, prev, dw, dh, u, v);
            cost[static_cast<std::size_t>(v + sy) * cols + (u + sx)] = c;
            if (c < best) {
                best = c;
                best_u = u;
                best_v = v;
            }
        }

    auto at = [&](int u, int v) {
        return cost[static_cast<std::size_t>(v + sy) * cols + (u + sx)];
    };
    double fu = best_u, fv = best_v;
    if (best_u > -sx && best_u < sx)
        fu += parabolic_offset(at(best_u - 1, best_v), best, at(best_u + 1, best_v));
    if (best_v > -sy && best_v < sy)
        fv += parabolic_offset(at(best_u, best_v - 1), best, at(best_u, best_v + 1));

    MotionEstimate est;
    est.dx = fu * downsample;
    est.dy = fv * downsample;
    est.magnitude = std::hypot(est.dx, est.dy);
    return est;
}

double motion_magnitude(const BayerFrame& current, const BayerFrame& previous, int downsample,
                        int max_shift) {
    return estimate_translation(current, previous, downsample, max_shift).magnitude;
}

}  // namespace burstsched
