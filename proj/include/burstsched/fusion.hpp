#pragma once

#include <vector>

#include "burstsched/image.hpp"
#include "burstsched/noisemodel.hpp"

namespace burstsched {

/// Bilinear interpolation of the missing channel samples; edge neighbors are
/// reflected by one step so every tap keeps the right Bayer parity. Fully
/// linear in the input plane.
RgbImage demosaic_bilinear(const BayerFrame& frame);

/// Adjoint of demosaic_bilinear as a linear operator: scatters an RGB adjoint
/// field back onto the Bayer plane with the same tap weights, so that
/// <adj, demosaic(x)> == <demosaic_adjoint(adj), x> for all x.
std::vector<double> demosaic_adjoint(const RgbImage& adj);

/// Inverse-variance weights w_i proportional to
/// 1 / (g_i^2 * (lambda_read_i + lambda_shot_i * mean_i)), normalized to sum 1.
std::vector<double> fuse_weights(const std::vector<double>& gains,
                                 const std::vector<NoiseParams>& noise,
                                 const std::vector<double>& frame_means);

/// Differentiable restoration proxy: inverse-variance-weighted average of the
/// demosaicked burst frames. No alignment stage, so long-exposure blur raises
/// the L1 loss directly.
RgbImage fuse_burst(const std::vector<BayerFrame>& frames, const std::vector<double>& gains,
                    const std::vector<NoiseParams>& noise);

/// Mean absolute difference between the fused image and demosaic(gt).
double restoration_loss(const RgbImage& fused, const BayerFrame& gt);

double mse(const RgbImage& a, const RgbImage& b);

/// 10*log10(1/MSE) for values in [0,1]; +inf when the images are identical.
double psnr(const RgbImage& a, const RgbImage& b);

/// Mean local SSIM on Rec.601 luminance, 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, averaged over the valid interior.
double ssim(const RgbImage& a, const RgbImage& b);

}  // namespace burstsched
