#include "burstsched/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace burstsched {

void CameraConfig::validate() const {
    require(e_s > 0.0, "CameraConfig: e_s must be positive");
    require(t_min > 0.0, "CameraConfig: t_min must be positive");
    require(t_p > 0.0, "CameraConfig: t_p must be positive");
    require(delta >= 0.0 && delta_p >= 0.0, "CameraConfig: gaps must be non-negative");
    require(k > 0.0, "CameraConfig: k must be positive");
    require(g_min > 0.0 && g_max > g_min, "CameraConfig: need 0 < g_min < g_max");
    require(m_thr > 0.0, "CameraConfig: m_thr must be positive");
    const double mult = t0 / e_s;
    require(std::abs(mult - std::round(mult)) < 1e-9, "CameraConfig: t0 must be a multiple of e_s");
    require(t0 > 2.0 * t_p + delta_p + delta, "CameraConfig: t0 leaves no room for previews");
}

void ScheduleLogits::validate() const {
    require(f.size() >= 2, "ScheduleLogits: need at least 2 entries (n >= 1)");
    for (double x : f) require(std::isfinite(x), "ScheduleLogits: logits must be finite");
    require(t_u > 0.0, "ScheduleLogits: t_u must be positive");
    require(epsilon > 0.0, "ScheduleLogits: epsilon must be positive");
    require(static_cast<double>(f.size()) * epsilon < 1.0,
            "ScheduleLogits: (n+1)*epsilon must be < 1");
}

ScheduleLogits ScheduleLogits::uniform(int n, double t_u, double t_min) {
    ScheduleLogits l;
    l.f.assign(static_cast<std::size_t>(n) + 1, 0.0);
    l.t_u = t_u;
    l.epsilon = t_min / t_u;
    return l;
}

double ExposureSchedule::total() const {
    return std::accumulate(t.begin(), t.end(), 0.0);
}

namespace {

std::vector<double> softmax(const std::vector<double>& f) {
    const double m = *std::max_element(f.begin(), f.end());
    std::vector<double> s(f.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s[i] = std::exp(f[i] - m);
        sum += s[i];
    }
    for (double& x : s) x /= sum;
    return s;
}

}  // namespace

ExposureSchedule bounded_softmax(const ScheduleLogits& logits) {
    logits.validate();
    const int n = logits.burst_size();
    const double eps = logits.epsilon;
    const double scale = 1.0 - (n + 1) * eps;
    const std::vector<double> sigma = softmax(logits.f);

    ExposureSchedule sched;
    sched.t.resize(n);
    for (int i = 0; i < n; ++i) sched.t[i] = logits.t_u * (eps + scale * sigma[i]);
    return sched;
}

Mat bounded_softmax_jacobian(const ScheduleLogits& logits) {
    logits.validate();
    const int n = logits.burst_size();
    const double c = logits.t_u * (1.0 - (n + 1) * logits.epsilon);
    const std::vector<double> sigma = softmax(logits.f);

    Mat j(n, n + 1);
    for (int i = 0; i < n; ++i)
        for (int col = 0; col <= n; ++col)
            j.at(i, col) = c * sigma[i] * ((i == col ? 1.0 : 0.0) - sigma[col]);
    return j;
}

CaptureTimeline build_timeline(const ExposureSchedule& sched, const CameraConfig& cfg) {
    require(!sched.t.empty(), "build_timeline: empty schedule");
    for (double t : sched.t)
        require(std::isfinite(t) && t > 0.0, "build_timeline: exposures must be positive");

    CaptureTimeline tl;
    tl.starts.resize(sched.t.size());
    tl.ends.resize(sched.t.size());
    double start = cfg.t0;
    for (std::size_t i = 0; i < sched.t.size(); ++i) {
        tl.starts[i] = start;
        tl.ends[i] = start + sched.t[i];
        start = tl.ends[i] + cfg.delta;
    }
    return tl;
}

std::vector<double> gains_from_schedule(const ExposureSchedule& sched, double gain_p,
                                        double t_p, double k) {
    require(gain_p > 0.0, "gains_from_schedule: gain_p must be positive");
    require(t_p > 0.0, "gains_from_schedule: t_p must be positive");
    require(k > 0.0, "gains_from_schedule: k must be positive");
    std::vector<double> gains(sched.t.size());
    // e = t_p * g_p / k, so g_i = k*e/t_i collapses to g_p * t_p / t_i.
    for (std::size_t i = 0; i < sched.t.size(); ++i) {
        require(sched.t[i] > 0.0, "gains_from_schedule: exposures must be positive");
        gains[i] = gain_p * t_p / sched.t[i];
    }
    return gains;
}

std::pair<double, double> normalize_inputs(double gain_hat, double motion_hat,
                                           const CameraConfig& cfg) {
    require(std::isfinite(gain_hat), "normalize_inputs: gain must be finite");
    require(motion_hat >= 0.0, "normalize_inputs: motion must be non-negative");
    const double g_norm =
        std::clamp((gain_hat - cfg.g_min) / (cfg.g_max - cfg.g_min), 0.0, 1.0);
    const double m_norm = std::min(motion_hat / cfg.m_thr, 1.0);
    return {g_norm, m_norm};
}

ShotContext make_shot_context(double gain_hat, double motion_hat, const CameraConfig& cfg) {
    auto [g_norm, m_norm] = normalize_inputs(gain_hat, motion_hat, cfg);
    ShotContext ctx;
    ctx.gain = gain_hat;
    ctx.t_p = cfg.t_p;
    ctx.motion_px = motion_hat;
    ctx.gain_norm = g_norm;
    ctx.motion_norm = m_norm;
    return ctx;
}

}  // namespace burstsched
