#include "burstsched/rawconv.hpp"

#include <algorithm>
#include <cmath>

#include "burstsched/fusion.hpp"

namespace burstsched {

namespace {

// Diagonally dominant matrices with unit row sums, in the style of published
// DSLR color matrices under daylight / tungsten illuminants.
const Ccm kBankIdentity = {1, 0, 0, 0, 1, 0, 0, 0, 1};
const Ccm kBankDaylight = {1.6530, -0.4125, -0.2405,
                           -0.1782, 1.4940, -0.3158,
                           0.0132, -0.5471, 1.5339};
const Ccm kBankTungsten = {1.9434, -0.6549, -0.2885,
                           -0.2925, 1.7462, -0.4537,
                           0.0325, -0.6607, 1.6282};
const std::array<Ccm, 3> kDefaultBank = {kBankIdentity, kBankDaylight, kBankTungsten};

Ccm invert3x3(const Ccm& m) {
    const double a = m[0], b = m[1], c = m[2];
    const double d = m[3], e = m[4], f = m[5];
    const double g = m[6], h = m[7], i = m[8];
    const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    require(std::abs(det) > 1e-12, "invert3x3: singular color matrix");
    const double inv = 1.0 / det;
    Ccm r;
    r[0] = (e * i - f * h) * inv;
    r[1] = (c * h - b * i) * inv;
    r[2] = (b * f - c * e) * inv;
    r[3] = (f * g - d * i) * inv;
    r[4] = (a * i - c * g) * inv;
    r[5] = (c * d - a * f) * inv;
    r[6] = (d * h - e * g) * inv;
    r[7] = (b * g - a * h) * inv;
    r[8] = (a * e - b * d) * inv;
    return r;
}

double matrix_inf_norm(const Ccm& m) {
    double best = 0.0;
    for (int r = 0; r < 3; ++r)
        best = std::max(best, std::abs(m[3 * r]) + std::abs(m[3 * r + 1]) + std::abs(m[3 * r + 2]));
    return best;
}

RgbImage apply_matrix(const RgbImage& img, const Ccm& m, bool clamp_negative) {
    RgbImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double r = img.r[i], g = img.g[i], b = img.b[i];
        double rr = m[0] * r + m[1] * g + m[2] * b;
        double gg = m[3] * r + m[4] * g + m[5] * b;
        double bb = m[6] * r + m[7] * g + m[8] * b;
        if (clamp_negative) {
            rr = std::max(rr, 0.0);
            gg = std::max(gg, 0.0);
            bb = std::max(bb, 0.0);
        }
        out.r[i] = rr;
        out.g[i] = gg;
        out.b[i] = bb;
    }
    return out;
}

double srgb_expand(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double srgb_compress(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

}  // namespace

std::span<const Ccm> default_ccm_bank() { return kDefaultBank; }

RgbImage gamma_expand(const RgbImage& img) {
    RgbImage out(img.width, img.height);
    for (int c = 0; c < 3; ++c) {
        const auto& in = img.plane(c);
        auto& dst = out.plane(c);
        for (std::size_t i = 0; i < in.size(); ++i) {
            require(in[i] >= -1e-6 && in[i] <= 1.0 + 1e-6,
                    "gamma_expand: sRGB values must lie in [0,1]");
            dst[i] = srgb_expand(std::clamp(in[i], 0.0, 1.0));
        }
    }
    return out;
}

RgbImage gamma_compress(const RgbImage& img) {
    RgbImage out(img.width, img.height);
    for (int c = 0; c < 3; ++c) {
        const auto& in = img.plane(c);
        auto& dst = out.plane(c);
        for (std::size_t i = 0; i < in.size(); ++i) dst[i] = srgb_compress(in[i]);
    }
    return out;
}

RgbImage apply_inverse_ccm(const RgbImage& img, const ColorPipelineParams& params) {
    const Ccm inv = invert3x3(params.ccm);
    require(matrix_inf_norm(params.ccm) * matrix_inf_norm(inv) < 1e6,
            "apply_inverse_ccm: ill-conditioned color matrix");
    return apply_matrix(img, inv, /*clamp_negative=*/true);
}

RgbImage apply_ccm(const RgbImage& img, const ColorPipelineParams& params) {
    return apply_matrix(img, params.ccm, /*clamp_negative=*/false);
}

RgbImage inverse_white_balance(const RgbImage& img, const ColorPipelineParams& params) {
    require(params.g_rgb > 0.0 && params.g_r > 0.0 && params.g_b > 0.0,
            "inverse_white_balance: gains must be positive");
    RgbImage out(img.width, img.height);
    const double fr = params.g_rgb / params.g_r;
    const double fg = params.g_rgb;
    const double fb = params.g_rgb / params.g_b;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        out.r[i] = img.r[i] * fr;
        out.g[i] = img.g[i] * fg;
        out.b[i] = img.b[i] * fb;
    }
    return out;
}

RgbImage forward_white_balance(const RgbImage& img, const ColorPipelineParams& params) {
    require(params.g_rgb > 0.0 && params.g_r > 0.0 && params.g_b > 0.0,
            "forward_white_balance: gains must be positive");
    RgbImage out(img.width, img.height);
    const double fr = params.g_r / params.g_rgb;
    const double fg = 1.0 / params.g_rgb;
    const double fb = params.g_b / params.g_rgb;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        out.r[i] = img.r[i] * fr;
        out.g[i] = img.g[i] * fg;
        out.b[i] = img.b[i] * fb;
    }
    return out;
}

ColorPipelineParams sample_pipeline_params(std::mt19937_64& rng, std::span<const Ccm> bank) {
    require(!bank.empty(), "sample_pipeline_params: empty ccm bank");
    ColorPipelineParams p;
    std::uniform_int_distribution<std::size_t> pick(0, bank.size() - 1);
    p.ccm = bank[pick(rng)];

    std::normal_distribution<double> total_gain(0.8, 0.1);
    do {
        p.g_rgb = total_gain(rng);
    } while (p.g_rgb <= 0.0);

    std::uniform_real_distribution<double> red_gain(1.9, 2.4);
    std::uniform_real_distribution<double> blue_gain(1.5, 1.9);
    p.g_r = red_gain(rng);
    p.g_b = blue_gain(rng);
    return p;
}

BayerFrame mosaic_rggb(const RgbImage& img) {
    require(img.width % 2 == 0 && img.height % 2 == 0, "mosaic_rggb: dimensions must be even");
    BayerFrame frame(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::size_t i = img.idx(y, x);
            const int py = y & 1, px = x & 1;
            if (py == 0 && px == 0)
                frame.plane[i] = img.r[i];
            else if (py == 1 && px == 1)
                frame.plane[i] = img.b[i];
            else
                frame.plane[i] = img.g[i];
        }
    }
    return frame;
}

RgbImage forward_isp(const BayerFrame& frame, const ColorPipelineParams& params, bool gamma) {
    return forward_isp(demosaic_bilinear(frame), params, gamma);
}

RgbImage forward_isp(const RgbImage& img, const ColorPipelineParams& params, bool gamma) {
    RgbImage out = apply_ccm(forward_white_balance(img, params), params);
    if (gamma) {
        out = gamma_compress(out);
    } else {
        for (int c = 0; c < 3; ++c)
            for (double& v : out.plane(c)) v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

RadianceSequence convert_sequence(const std::vector<RgbImage>& frames,
                                  const ColorPipelineParams& params, const CameraConfig& cfg,
                                  bool expand_gamma) {
    require(!frames.empty(), "convert_sequence: empty frame list");
    const int w = frames.front().width, h = frames.front().height;
    RadianceSequence seq;
    seq.e_s = cfg.e_s;
    seq.frames.reserve(frames.size());
    for (const RgbImage& f : frames) {
        require(f.width == w && f.height == h, "convert_sequence: frame dimensions differ");
        RgbImage linear = expand_gamma ? gamma_expand(f) : f;
        seq.frames.push_back(inverse_white_balance(apply_inverse_ccm(linear, params), params));
    }
    return seq;
}

}  // namespace burstsched
