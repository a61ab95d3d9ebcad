#pragma once

#include <cstdint>
#include <vector>

#include "burstsched/core.hpp"
#include "burstsched/image.hpp"
#include "burstsched/noisemodel.hpp"

namespace burstsched {

/// Noise-field sub-stream ids, combined with the user seed via mix_seed.
/// Burst frame i uses stream i; the previews use these two.
inline constexpr std::uint64_t kPreviewStream = 1u << 20;
inline constexpr std::uint64_t kPrevPreviewStream = (1u << 20) + 1;

/// Exact average of the piecewise-constant radiance over [t_s, t_e]: frame tau
/// covers [tau, tau+1)*e_s and contributes proportionally to its overlap with
/// the interval. A constant scene integrates to itself for any interval.
RgbImage integrate_radiance(const RadianceSequence& seq, double t_s, double t_e);

struct RadianceGradient {
    RgbImage d_start;  // dS/dt_s = (S - S_floor(ts)) / (delta * e_s)
    RgbImage d_end;    // dS/dt_e = (S_floor(te) - S) / (delta * e_s)
    bool near_breakpoint = false;  // endpoint within 1e-9 of a frame boundary
};

/// Analytic derivative of integrate_radiance with respect to the interval
/// endpoints; right-sided at frame boundaries.
RadianceGradient integrate_radiance_grad(const RadianceSequence& seq, double t_s, double t_e);

/// clip([0,1], mosaic(S_{s,e}) + g*sqrt(lambda_read + lambda_shot*mosaic(S)) .* Z).
/// The CFA is applied to the signal and noise is added per photosite.
BayerFrame synthesize_frame(const RadianceSequence& seq, double t_s, double t_e, double gain,
                            const NoiseParams& np, const NoiseField& z);

enum class NoiseMode { enabled, disabled };

struct BurstResult {
    std::vector<BayerFrame> frames;
    std::vector<double> gains;
    std::vector<NoiseParams> noise;
    CaptureTimeline timeline;
};

/// Timeline from build_timeline, gains g_i = g_p*t_p/t_i, per-frame noise
/// parameters from the gains, one noise field per frame derived from the seed.
BurstResult synthesize_burst(const RadianceSequence& seq, const ExposureSchedule& sched,
                             double gain_p, const CameraConfig& cfg, std::uint64_t seed,
                             NoiseMode mode = NoiseMode::enabled,
                             const NoiseCalibration& calib = {});

struct PreviewPair {
    BayerFrame current;   // I_p,  over [t0 - delta - t_p, t0 - delta]
    BayerFrame previous;  // I'_p, one preview exposure and delta_p earlier
};

PreviewPair synthesize_previews(const RadianceSequence& seq, double gain_p,
                                const CameraConfig& cfg, std::uint64_t seed,
                                NoiseMode mode = NoiseMode::enabled,
                                const NoiseCalibration& calib = {});

/// Noise-free mosaic of the radiance frame at t0 (the first frame the burst
/// exposes), clamped to [0,1]; independent of the schedule.
BayerFrame ground_truth(const RadianceSequence& seq, const CameraConfig& cfg);

/// round(v * (2^b - 1)) / (2^b - 1); supported depths: 8, 10, 12, 14, 16.
BayerFrame quantize_frame(const BayerFrame& frame, int bit_depth);

/// Inference-mode synthesis: the burst plus quantization. Non-differentiable
/// by construction and kept out of the training path.
std::vector<BayerFrame> capture_emulation(const RadianceSequence& seq,
                                          const ExposureSchedule& sched, double gain_p,
                                          const CameraConfig& cfg, std::uint64_t seed,
                                          int bit_depth, const NoiseCalibration& calib = {});

/// Frames needed to expose [0, t_e]: ceil(t_e / e_s).
std::size_t required_frame_count(const RadianceSequence& seq, double t_e);

}  // namespace burstsched
