#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "burstsched/core.hpp"
#include "burstsched/image.hpp"
#include "burstsched/noisemodel.hpp"
#include "burstsched/simulator.hpp"

namespace burstsched {

/// Predefined exposure combinations for the warm-up search; the default set is
/// {(8,8,8,8), (16,16,16,16), (24,24,24,24), (32,32,32,32), (8,16,24,32)}
/// in units of e_s.
struct CandidateSet {
    std::vector<ExposureSchedule> schedules;

    static CandidateSet default_set(const CameraConfig& cfg);
};

struct GradOptions {
    /// When false, gains are treated as constants with respect to the
    /// exposure times (drops dg_i/dt_i and the lambda(g) chain). Exists for
    /// the deliberate-defect mode of the gradient-check harness.
    bool gain_chain = true;
};

/// End-to-end restoration objective under fixed noise fields:
/// restoration_loss(fuse_burst(synthesize_burst(seq, bounded_softmax(f))),
/// ground_truth). Deterministic given the seed.
double objective(const ScheduleLogits& logits, const RadianceSequence& seq, double gain_p,
                 const CameraConfig& cfg, std::uint64_t seed,
                 const NoiseCalibration& calib = {}, NoiseMode mode = NoiseMode::enabled);

/// Analytic dL/df via the full chain: bounded-softmax jacobian, timeline
/// shifts, radiance-integration endpoint gradients, the gain path
/// dg_i/dt_i = -g_p*t_p/t_i^2 with its noise-parameter dependencies, the
/// per-pixel noise reparameterization, clip masking, and the fusion-weight
/// path through the frame means.
std::vector<double> objective_grad(const ScheduleLogits& logits, const RadianceSequence& seq,
                                   double gain_p, const CameraConfig& cfg, std::uint64_t seed,
                                   const NoiseCalibration& calib = {}, const GradOptions& opts = {},
                                   NoiseMode mode = NoiseMode::enabled);

/// Central differences of `objective` around the logits, same seed on both
/// sides of every probe.
std::vector<double> finite_diff_grad(const ScheduleLogits& logits, const RadianceSequence& seq,
                                     double gain_p, const CameraConfig& cfg, std::uint64_t seed,
                                     double h = 1e-4, const NoiseCalibration& calib = {},
                                     NoiseMode mode = NoiseMode::enabled);

/// Central-difference oracle for an arbitrary scalar function; exact to O(h^2).
std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& fn,
                                       const std::vector<double>& x, double h);

enum class SeedPolicy {
    fixed,     // common random numbers: one Z realization for the whole run
    per_step,  // fresh noise every step
};

struct OptimStep {
    int step = 0;
    std::vector<double> logits;
    std::vector<double> t_seconds;
    double loss = 0.0;
    double grad_norm = 0.0;
};

struct OptimTrajectory {
    std::vector<OptimStep> steps;  // steps+1 records unless aborted
    bool aborted = false;
};

/// Gradient descent with momentum 0.9 on the logits. The bounded softmax
/// keeps every iterate feasible; bounds are asserted each step anyway.
OptimTrajectory optimize_schedule(const ScheduleLogits& init, const RadianceSequence& seq,
                                  double gain_p, const CameraConfig& cfg, SeedPolicy policy,
                                  int steps, double lr, std::uint64_t seed,
                                  const NoiseCalibration& calib = {});

struct CandidateScore {
    ExposureSchedule schedule;
    double psnr_db = 0.0;
    double loss = 0.0;
    bool best = false;
};

struct SearchResult {
    int best_index = -1;
    std::vector<CandidateScore> scores;
};

/// Brute-force pseudo-ground-truth search: every candidate is simulated with
/// the same noise realization (common random numbers), fused, and ranked by
/// PSNR against the ground truth; ties break toward the lower index.
SearchResult pseudo_gt_search(const RadianceSequence& seq, double gain_p,
                              const CameraConfig& cfg, const CandidateSet& candidates,
                              std::uint64_t seed, const NoiseCalibration& calib = {});

}  // namespace burstsched
