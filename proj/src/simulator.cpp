#include "burstsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "burstsched/rawconv.hpp"
#include "burstsched/rng.hpp"

namespace burstsched {

namespace {

constexpr double kBreakpointTol = 1e-9;

void check_interval(const RadianceSequence& seq, double t_s, double t_e) {
    require(seq.e_s > 0.0 && !seq.frames.empty(), "integrate_radiance: empty sequence");
    require(std::isfinite(t_s) && std::isfinite(t_e), "integrate_radiance: non-finite interval");
    require(t_e > t_s, "integrate_radiance: need t_s < t_e");
    require(t_s >= 0.0, "integrate_radiance: interval starts before the sequence");
    require(t_e / seq.e_s <= static_cast<double>(seq.frames.size()) + 1e-9,
            "integrate_radiance: interval runs past the sequence (have " +
                std::to_string(seq.frames.size()) + " frames)");
}

// Frame index holding the instant at frame position f, right-sided at
// boundaries, clamped to the last frame at the sequence end.
std::size_t frame_at(const RadianceSequence& seq, double f) {
    const auto idx = static_cast<long long>(std::floor(f));
    const long long last = static_cast<long long>(seq.frames.size()) - 1;
    return static_cast<std::size_t>(std::clamp(idx, 0ll, last));
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

BayerFrame degrade(const RgbImage& signal, double t_s, double t_e, double gain,
                   const NoiseParams& np, const NoiseField* z) {
    BayerFrame frame = mosaic_rggb(signal);
    if (z != nullptr) {
        require(z->width == frame.width && z->height == frame.height,
                "synthesize_frame: noise field shape mismatch");
        frame.plane = apply_noise(frame.plane, gain, np, z->z);
    }
    for (double& v : frame.plane) v = clip01(v);
    frame.meta.exposure_s = t_e - t_s;
    frame.meta.gain = gain;
    frame.meta.t_start_s = t_s;
    frame.meta.t_end_s = t_e;
    return frame;
}

}  // namespace

std::size_t required_frame_count(const RadianceSequence& seq, double t_e) {
    return static_cast<std::size_t>(std::ceil(t_e / seq.e_s - 1e-9));
}

RgbImage integrate_radiance(const RadianceSequence& seq, double t_s, double t_e) {
    check_interval(seq, t_s, t_e);
    const double fs = t_s / seq.e_s;
    const double fe = t_e / seq.e_s;
    const double span = fe - fs;

    // Accumulate weighted deviations from the first covered frame: the base
    // frame carries weight exactly 1, so a time-constant scene integrates to
    // itself bit-for-bit regardless of the interval.
    const auto first = static_cast<std::size_t>(std::floor(fs));
    const auto last = std::min(required_frame_count(seq, t_e), seq.frames.size());
    RgbImage acc = seq.frames[std::min(first, seq.frames.size() - 1)];
    const RgbImage& base = seq.frames[std::min(first, seq.frames.size() - 1)];
    for (std::size_t tau = first + 1; tau < last; ++tau) {
        const double lo = std::max(static_cast<double>(tau), fs);
        const double hi = std::min(static_cast<double>(tau) + 1.0, fe);
        const double weight = (hi - lo) / span;
        if (weight <= 0.0) continue;
        const RgbImage& f = seq.frames[tau];
        for (int c = 0; c < 3; ++c) {
            const auto& src = f.plane(c);
            const auto& ref = base.plane(c);
            auto& dst = acc.plane(c);
            for (std::size_t i = 0; i < src.size(); ++i) dst[i] += weight * (src[i] - ref[i]);
        }
    }
    return acc;
}

RadianceGradient integrate_radiance_grad(const RadianceSequence& seq, double t_s, double t_e) {
    check_interval(seq, t_s, t_e);
    const double fs = t_s / seq.e_s;
    const double fe = t_e / seq.e_s;
    const double inv = 1.0 / ((fe - fs) * seq.e_s);

    RadianceGradient grad;
    grad.near_breakpoint = std::abs(fs - std::round(fs)) < kBreakpointTol ||
                           std::abs(fe - std::round(fe)) < kBreakpointTol;

    const RgbImage mean = integrate_radiance(seq, t_s, t_e);
    const RgbImage& at_start = seq.frames[frame_at(seq, fs)];
    const RgbImage& at_end = seq.frames[frame_at(seq, fe)];

    grad.d_start = RgbImage(seq.width(), seq.height());
    grad.d_end = RgbImage(seq.width(), seq.height());
    for (int c = 0; c < 3; ++c) {
        const auto& m = mean.plane(c);
        const auto& s0 = at_start.plane(c);
        const auto& s1 = at_end.plane(c);
        auto& ds = grad.d_start.plane(c);
        auto& de = grad.d_end.plane(c);
        for (std::size_t i = 0; i < m.size(); ++i) {
            ds[i] = (m[i] - s0[i]) * inv;
            de[i] = (s1[i] - m[i]) * inv;
        }
    }
    return grad;
}

BayerFrame synthesize_frame(const RadianceSequence& seq, double t_s, double t_e, double gain,
                            const NoiseParams& np, const NoiseField& z) {
    return degrade(integrate_radiance(seq, t_s, t_e), t_s, t_e, gain, np, &z);
}

BurstResult synthesize_burst(const RadianceSequence& seq, const ExposureSchedule& sched,
                             double gain_p, const CameraConfig& cfg, std::uint64_t seed,
                             NoiseMode mode, const NoiseCalibration& calib) {
    BurstResult out;
    out.timeline = build_timeline(sched, cfg);
    out.gains = gains_from_schedule(sched, gain_p, cfg.t_p, cfg.k);

    const double t_end = out.timeline.ends.back();
    const std::size_t needed = required_frame_count(seq, t_end);
    require(seq.frames.size() >= needed,
            "synthesize_burst: sequence too short, need " + std::to_string(needed) +
                " frames but have " + std::to_string(seq.frames.size()));

    out.noise.reserve(sched.t.size());
    out.frames.reserve(sched.t.size());
    for (std::size_t i = 0; i < sched.t.size(); ++i) {
        out.noise.push_back(noise_params_for_gain(out.gains[i], calib));
        const RgbImage signal =
            integrate_radiance(seq, out.timeline.starts[i], out.timeline.ends[i]);
        if (mode == NoiseMode::enabled) {
            const NoiseField z = sample_noise_field(seq.width(), seq.height(), mix_seed(seed, i));
            out.frames.push_back(degrade(signal, out.timeline.starts[i], out.timeline.ends[i],
                                         out.gains[i], out.noise[i], &z));
        } else {
            out.frames.push_back(degrade(signal, out.timeline.starts[i], out.timeline.ends[i],
                                         out.gains[i], out.noise[i], nullptr));
        }
    }
    return out;
}

PreviewPair synthesize_previews(const RadianceSequence& seq, double gain_p,
                                const CameraConfig& cfg, std::uint64_t seed, NoiseMode mode,
                                const NoiseCalibration& calib) {
    require(gain_p > 0.0, "synthesize_previews: gain must be positive");
    const double cur_end = cfg.t0 - cfg.delta;
    const double cur_start = cur_end - cfg.t_p;
    const double prev_end = cur_start - cfg.delta_p;
    const double prev_start = prev_end - cfg.t_p;
    require(prev_start >= 0.0,
            "synthesize_previews: t0 too small, need t0 >= 2*t_p + delta_p + delta");

    const NoiseParams np = noise_params_for_gain(gain_p, calib);
    PreviewPair out;
    auto synth = [&](double s, double e, std::uint64_t stream) {
        const RgbImage signal = integrate_radiance(seq, s, e);
        if (mode == NoiseMode::enabled) {
            const NoiseField z =
                sample_noise_field(seq.width(), seq.height(), mix_seed(seed, stream));
            return degrade(signal, s, e, gain_p, np, &z);
        }
        return degrade(signal, s, e, gain_p, np, nullptr);
    };
    out.current = synth(cur_start, cur_end, kPreviewStream);
    out.previous = synth(prev_start, prev_end, kPrevPreviewStream);
    return out;
}

BayerFrame ground_truth(const RadianceSequence& seq, const CameraConfig& cfg) {
    const double pos = cfg.t0 / seq.e_s;
    const auto idx = static_cast<std::size_t>(std::llround(pos));
    require(std::abs(pos - std::round(pos)) < 1e-6, "ground_truth: t0 must align with a frame");
    require(idx < seq.frames.size(), "ground_truth: t0 frame index out of range");

    BayerFrame gt = mosaic_rggb(seq.frames[idx]);
    for (double& v : gt.plane) v = clip01(v);
    gt.meta.exposure_s = seq.e_s;
    gt.meta.gain = 0.0;
    gt.meta.t_start_s = cfg.t0;
    gt.meta.t_end_s = cfg.t0 + seq.e_s;
    return gt;
}

BayerFrame quantize_frame(const BayerFrame& frame, int bit_depth) {
    require(bit_depth == 8 || bit_depth == 10 || bit_depth == 12 || bit_depth == 14 ||
                bit_depth == 16,
            "quantize_frame: unsupported bit depth");
    const double levels = static_cast<double>((1 << bit_depth) - 1);
    BayerFrame out = frame;
    for (double& v : out.plane) v = std::round(v * levels) / levels;
    return out;
}

std::vector<BayerFrame> capture_emulation(const RadianceSequence& seq,
                                          const ExposureSchedule& sched, double gain_p,
                                          const CameraConfig& cfg, std::uint64_t seed,
                                          int bit_depth, const NoiseCalibration& calib) {
    BurstResult burst = synthesize_burst(seq, sched, gain_p, cfg, seed, NoiseMode::enabled, calib);
    std::vector<BayerFrame> out;
    out.reserve(burst.frames.size());
    for (const BayerFrame& f : burst.frames) out.push_back(quantize_frame(f, bit_depth));
    return out;
}

}  // namespace burstsched
