#pragma once

#include <array>
#include <random>
#include <span>
#include <vector>

#include "burstsched/core.hpp"
#include "burstsched/image.hpp"

namespace burstsched {

using Ccm = std::array<double, 9>;  // row-major 3x3, RAW -> sRGB

/// Color processing parameters shared by the inverse (sRGB->RAW) and forward
/// (RAW->sRGB) pipelines.
struct ColorPipelineParams {
    Ccm ccm = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    double g_rgb = 1.0;  // global gain
    double g_r = 1.0;    // red white-balance gain (green implicitly 1)
    double g_b = 1.0;    // blue white-balance gain

    static ColorPipelineParams identity() { return {}; }
};

/// Identity plus two plausible camera matrices (rows sum to 1, diagonally
/// dominant). The target camera's calibrated matrices are not published.
std::span<const Ccm> default_ccm_bank();

/// sRGB electro-optical transfer per channel: v <= 0.04045 ? v/12.92
/// : ((v+0.055)/1.055)^2.4. Rejects values outside [0,1] beyond 1e-6.
RgbImage gamma_expand(const RgbImage& img);

/// Inverse of gamma_expand (values clamped to [0,1] first).
RgbImage gamma_compress(const RgbImage& img);

/// Per pixel, RAW = ccm^{-1} * sRGB; negatives clamped to 0.
RgbImage apply_inverse_ccm(const RgbImage& img, const ColorPipelineParams& params);

/// Forward color correction sRGB = ccm * RAW (no clamping of negatives).
RgbImage apply_ccm(const RgbImage& img, const ColorPipelineParams& params);

/// R <- R' * g_rgb/g_r;  G <- G' * g_rgb;  B <- B' * g_rgb/g_b.
RgbImage inverse_white_balance(const RgbImage& img, const ColorPipelineParams& params);

/// Inverse of the above.
RgbImage forward_white_balance(const RgbImage& img, const ColorPipelineParams& params);

/// ccm uniform over the bank; g_rgb ~ N(0.8, 0.1) truncated to (0, inf);
/// g_r ~ U(1.9, 2.4); g_b ~ U(1.5, 1.9).
ColorPipelineParams sample_pipeline_params(std::mt19937_64& rng, std::span<const Ccm> bank);

/// 2x2 RGGB tiling; requires even dimensions.
BayerFrame mosaic_rggb(const RgbImage& img);

/// Simple display pipeline: demosaic (for the Bayer overload), forward white
/// balance, CCM, then optional sRGB gamma compression; output clamped to [0,1].
RgbImage forward_isp(const BayerFrame& frame, const ColorPipelineParams& params,
                     bool gamma = true);
RgbImage forward_isp(const RgbImage& img, const ColorPipelineParams& params,
                     bool gamma = true);

/// Full sRGB -> RAW-radiance conversion of a frame list: gamma expansion
/// (skippable for already-linear synthetic sources), inverse CCM, inverse
/// white balance. The result is tagged with cfg.e_s.
RadianceSequence convert_sequence(const std::vector<RgbImage>& frames,
                                  const ColorPipelineParams& params, const CameraConfig& cfg,
                                  bool expand_gamma = true);

}  // namespace burstsched
