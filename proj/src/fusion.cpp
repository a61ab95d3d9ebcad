#include "burstsched/fusion.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace burstsched {

namespace {

// Neighbor index with one-step reflection; y-dy has the same parity as y+dy,
// so reflected taps never sample the wrong Bayer channel.
inline int tap(int i, int d, int n) {
    const int t = i + d;
    return (t < 0 || t >= n) ? i - d : t;
}

struct Taps {
    std::array<std::size_t, 4> idx;
    int count;
};

inline Taps cross_taps(const BayerFrame& f, int y, int x) {
    return {{f.idx(tap(y, -1, f.height), x), f.idx(tap(y, 1, f.height), x),
             f.idx(y, tap(x, -1, f.width)), f.idx(y, tap(x, 1, f.width))},
            4};
}

inline Taps diag_taps(const BayerFrame& f, int y, int x) {
    const int yu = tap(y, -1, f.height), yd = tap(y, 1, f.height);
    const int xl = tap(x, -1, f.width), xr = tap(x, 1, f.width);
    return {{f.idx(yu, xl), f.idx(yu, xr), f.idx(yd, xl), f.idx(yd, xr)}, 4};
}

inline Taps horiz_taps(const BayerFrame& f, int y, int x) {
    return {{f.idx(y, tap(x, -1, f.width)), f.idx(y, tap(x, 1, f.width)), 0, 0}, 2};
}

inline Taps vert_taps(const BayerFrame& f, int y, int x) {
    return {{f.idx(tap(y, -1, f.height), x), f.idx(tap(y, 1, f.height), x), 0, 0}, 2};
}

inline double gather(const std::vector<double>& p, const Taps& t) {
    double s = 0.0;
    for (int k = 0; k < t.count; ++k) s += p[t.idx[k]];
    return s / t.count;
}

inline void scatter(std::vector<double>& p, const Taps& t, double v) {
    const double share = v / t.count;
    for (int k = 0; k < t.count; ++k) p[t.idx[k]] += share;
}

constexpr double kLumaR = 0.299, kLumaG = 0.587, kLumaB = 0.114;

std::vector<double> gaussian_kernel11() {
    std::vector<double> k(11);
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double d = i - 5;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

}  // namespace

RgbImage demosaic_bilinear(const BayerFrame& frame) {
    require(frame.width % 2 == 0 && frame.height % 2 == 0,
            "demosaic_bilinear: dimensions must be even");
    RgbImage out(frame.width, frame.height);
    const auto& p = frame.plane;
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const std::size_t i = frame.idx(y, x);
            const int py = y & 1, px = x & 1;
            if (py == 0 && px == 0) {  // R site
                out.r[i] = p[i];
                out.g[i] = gather(p, cross_taps(frame, y, x));
                out.b[i] = gather(p, diag_taps(frame, y, x));
            } else if (py == 0 && px == 1) {  // G site, R row
                out.g[i] = p[i];
                out.r[i] = gather(p, horiz_taps(frame, y, x));
                out.b[i] = gather(p, vert_taps(frame, y, x));
            } else if (py == 1 && px == 0) {  // G site, B row
                out.g[i] = p[i];
                out.r[i] = gather(p, vert_taps(frame, y, x));
                out.b[i] = gather(p, horiz_taps(frame, y, x));
            } else {  // B site
                out.b[i] = p[i];
                out.g[i] = gather(p, cross_taps(frame, y, x));
                out.r[i] = gather(p, diag_taps(frame, y, x));
            }
        }
    }
    return out;
}

std::vector<double> demosaic_adjoint(const RgbImage& adj) {
    require(adj.width % 2 == 0 && adj.height % 2 == 0,
            "demosaic_adjoint: dimensions must be even");
    BayerFrame shape(adj.width, adj.height);  // reused for idx/tap geometry
    std::vector<double> out(adj.pixel_count(), 0.0);
    for (int y = 0; y < adj.height; ++y) {
        for (int x = 0; x < adj.width; ++x) {
            const std::size_t i = adj.idx(y, x);
            const int py = y & 1, px = x & 1;
            if (py == 0 && px == 0) {
                out[i] += adj.r[i];
                scatter(out, cross_taps(shape, y, x), adj.g[i]);
                scatter(out, diag_taps(shape, y, x), adj.b[i]);
            } else if (py == 0 && px == 1) {
                out[i] += adj.g[i];
                scatter(out, horiz_taps(shape, y, x), adj.r[i]);
                scatter(out, vert_taps(shape, y, x), adj.b[i]);
            } else if (py == 1 && px == 0) {
                out[i] += adj.g[i];
                scatter(out, vert_taps(shape, y, x), adj.r[i]);
                scatter(out, horiz_taps(shape, y, x), adj.b[i]);
            } else {
                out[i] += adj.b[i];
                scatter(out, cross_taps(shape, y, x), adj.g[i]);
                scatter(out, diag_taps(shape, y, x), adj.r[i]);
            }
        }
    }
    return out;
}

std::vector<double> fuse_weights(const std::vector<double>& gains,
                                 const std::vector<NoiseParams>& noise,
                                 const std::vector<double>& frame_means) {
    require(!gains.empty() && gains.size() == noise.size() && gains.size() == frame_means.size(),
            "fuse_weights: inconsistent per-frame inputs");
    std::vector<double> w(gains.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        const double var = gains[i] * gains[i] *
                           (noise[i].lambda_read + noise[i].lambda_shot * frame_means[i]);
        w[i] = 1.0 / var;
        sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
}

RgbImage fuse_burst(const std::vector<BayerFrame>& frames, const std::vector<double>& gains,
                    const std::vector<NoiseParams>& noise) {
    require(!frames.empty(), "fuse_burst: need at least one frame");
    const int w = frames.front().width, h = frames.front().height;
    std::vector<double> means(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        require(frames[i].width == w && frames[i].height == h,
                "fuse_burst: frame dimensions differ");
        double s = 0.0;
        for (double v : frames[i].plane) s += v;
        means[i] = s / static_cast<double>(frames[i].pixel_count());
    }
    const std::vector<double> weights = fuse_weights(gains, noise, means);

    RgbImage fused(w, h);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const RgbImage rgb = demosaic_bilinear(frames[i]);
        for (int c = 0; c < 3; ++c) {
            const auto& src = rgb.plane(c);
            auto& dst = fused.plane(c);
            for (std::size_t k = 0; k < src.size(); ++k) dst[k] += weights[i] * src[k];
        }
    }
    return fused;
}

double restoration_loss(const RgbImage& fused, const BayerFrame& gt) {
    require(fused.width == gt.width && fused.height == gt.height,
            "restoration_loss: dimension mismatch");
    const RgbImage ref = demosaic_bilinear(gt);
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        const auto& a = fused.plane(c);
        const auto& b = ref.plane(c);
        for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    }
    return sum / (3.0 * static_cast<double>(fused.pixel_count()));
}

double mse(const RgbImage& a, const RgbImage& b) {
    require(a.same_size(b), "mse: dimension mismatch");
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) {
        const auto& x = a.plane(c);
        const auto& y = b.plane(c);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            sum += d * d;
        }
    }
    return sum / (3.0 * static_cast<double>(a.pixel_count()));
}

double psnr(const RgbImage& a, const RgbImage& b) {
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / m);
}

double ssim(const RgbImage& a, const RgbImage& b) {
    require(a.same_size(b), "ssim: dimension mismatch");
    require(a.width >= 11 && a.height >= 11, "ssim: images must be at least 11x11");

    const std::size_t n = a.pixel_count();
    std::vector<double> la(n), lb(n);
    for (std::size_t i = 0; i < n; ++i) {
        la[i] = kLumaR * a.r[i] + kLumaG * a.g[i] + kLumaB * a.b[i];
        lb[i] = kLumaR * b.r[i] + kLumaG * b.g[i] + kLumaB * b.b[i];
    }

    const std::vector<double> kern = gaussian_kernel11();
    const int w = a.width, h = a.height;
    const int vw = w - 10, vh = h - 10;  // valid output size

    // Separable filtering restricted to the valid interior.
    auto filt = [&](const std::vector<double>& x) {
        std::vector<double> tmp(static_cast<std::size_t>(vw) * h, 0.0);
        for (int y = 0; y < h; ++y)
            for (int ox = 0; ox < vw; ++ox) {
                double s = 0.0;
                for (int k = 0; k < 11; ++k) s += kern[k] * x[static_cast<std::size_t>(y) * w + ox + k];
                tmp[static_cast<std::size_t>(y) * vw + ox] = s;
            }
        std::vector<double> out(static_cast<std::size_t>(vw) * vh, 0.0);
        for (int oy = 0; oy < vh; ++oy)
            for (int ox = 0; ox < vw; ++ox) {
                double s = 0.0;
                for (int k = 0; k < 11; ++k) s += kern[k] * tmp[static_cast<std::size_t>(oy + k) * vw + ox];
                out[static_cast<std::size_t>(oy) * vw + ox] = s;
            }
        return out;
    };

    std::vector<double> laa(n), lbb(n), lab(n);
    for (std::size_t i = 0; i < n; ++i) {
        laa[i] = la[i] * la[i];
        lbb[i] = lb[i] * lb[i];
        lab[i] = la[i] * lb[i];
    }
    const auto mu_a = filt(la), mu_b = filt(lb);
    const auto m_aa = filt(laa), m_bb = filt(lbb), m_ab = filt(lab);

    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double va = m_aa[i] - ma * ma;
        const double vb = m_bb[i] - mb * mb;
        const double cov = m_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return total / static_cast<double>(mu_a.size());
}

}  // namespace burstsched
