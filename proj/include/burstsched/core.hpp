#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "burstsched/image.hpp"

namespace burstsched {

/// Camera and timing constants. Times are seconds; gains are ISO-scale.
struct CameraConfig {
    double e_s = 1.0 / 1920.0;      // atomic radiance-frame exposure
    double delta = 7.0 / 1920.0;    // gap between consecutive burst frames
    double delta_p = 39.0 / 1920.0; // gap between the two previews
    double t_p = 16.0 / 1920.0;     // preview exposure (1/120 s)
    double t_min = 8.0 / 1920.0;    // shortest supported exposure (1/240 s)
    double t0 = 80.0 / 1920.0;      // burst start on the radiance clock
    double k = 1.0;                 // exposure constant in e = t*g/k
    double g_min = 51200.0;
    double g_max = 102400.0;
    double m_thr = 20.0;            // motion magnitude saturation, pixels
    int bit_depth = 12;             // used by capture emulation only

    void validate() const;
};

/// n+1 unconstrained reals mapped to n exposure times via the bounded softmax.
struct ScheduleLogits {
    std::vector<double> f;  // size n+1
    double t_u = 128.0 / 1920.0;
    double epsilon = 1.0 / 16.0;  // t_min / t_u

    int burst_size() const { return static_cast<int>(f.size()) - 1; }
    void validate() const;

    static ScheduleLogits uniform(int n, double t_u, double t_min);
};

struct ExposureSchedule {
    std::vector<double> t;  // seconds, one per burst frame

    int burst_size() const { return static_cast<int>(t.size()); }
    double total() const;
};

/// Exposure start/end instants t^s_i, t^e_i on the radiance clock.
struct CaptureTimeline {
    std::vector<double> starts;
    std::vector<double> ends;
};

/// Per-shot context derived from the previews: raw and normalized gain and
/// motion magnitude.
struct ShotContext {
    double gain = 0.0;
    double t_p = 0.0;
    double motion_px = 0.0;
    double gain_norm = 0.0;
    double motion_norm = 0.0;
};

/// Row-major dense matrix, just large enough for the jacobians used here.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
};

/// Maps n+1 logits onto exposure fractions p_i = eps + (1-(n+1)eps)*softmax(f)_i
/// and returns t_i = t_u * p_i for i = 1..n. Every t_i lands in
/// (t_min, t_u*(1-n*eps)) and the n exposures sum to less than t_u.
ExposureSchedule bounded_softmax(const ScheduleLogits& logits);

/// d t_i / d f_j = t_u*(1-(n+1)eps)*sigma_i*(delta_ij - sigma_j), an n x (n+1)
/// matrix whose rows each sum to zero.
Mat bounded_softmax_jacobian(const ScheduleLogits& logits);

/// t^s_1 = t0; t^s_i = t^e_{i-1} + delta; t^e_i = t^s_i + t_i.
/// Derivatives for the chain rule: d t^s_i/d t_j = [j<i], d t^e_i/d t_j = [j<=i].
CaptureTimeline build_timeline(const ExposureSchedule& sched, const CameraConfig& cfg);

/// Equal-brightness coupling g_i = g_p * t_p / t_i (equivalently k*e/t_i with
/// e = t_p*g_p/k).
std::vector<double> gains_from_schedule(const ExposureSchedule& sched, double gain_p,
                                        double t_p, double k = 1.0);

/// Scheduler input scaling: gain mapped affinely onto [0,1] (clamped),
/// motion saturated at m_thr.
std::pair<double, double> normalize_inputs(double gain_hat, double motion_hat,
                                           const CameraConfig& cfg);

ShotContext make_shot_context(double gain_hat, double motion_hat, const CameraConfig& cfg);

}  // namespace burstsched
