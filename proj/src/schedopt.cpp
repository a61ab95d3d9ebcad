#include "burstsched/schedopt.hpp"

#include <algorithm>
#include <cmath>

#include "burstsched/fusion.hpp"
#include "burstsched/parallel.hpp"
#include "burstsched/rawconv.hpp"
#include "burstsched/rng.hpp"
#include "burstsched/simulator.hpp"

namespace burstsched {

CandidateSet CandidateSet::default_set(const CameraConfig& cfg) {
    CandidateSet set;
    const double u = cfg.e_s;
    set.schedules = {
        {{8 * u, 8 * u, 8 * u, 8 * u}},
        {{16 * u, 16 * u, 16 * u, 16 * u}},
        {{24 * u, 24 * u, 24 * u, 24 * u}},
        {{32 * u, 32 * u, 32 * u, 32 * u}},
        {{8 * u, 16 * u, 24 * u, 32 * u}},
    };
    return set;
}

double objective(const ScheduleLogits& logits, const RadianceSequence& seq, double gain_p,
                 const CameraConfig& cfg, std::uint64_t seed, const NoiseCalibration& calib,
                 NoiseMode mode) {
    const ExposureSchedule sched = bounded_softmax(logits);
    const BurstResult burst = synthesize_burst(seq, sched, gain_p, cfg, seed, mode, calib);
    const RgbImage fused = fuse_burst(burst.frames, burst.gains, burst.noise);
    return restoration_loss(fused, ground_truth(seq, cfg));
}

namespace {

inline double sign_of(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

// Everything the backward pass needs about one synthesized frame.
struct FrameTrace {
    std::vector<double> signal;     // clean mosaicked radiance x0
    std::vector<double> sqrt_var;   // sqrt(max(lr + ls*x0, floor))
    std::vector<unsigned char> floored;
    std::vector<double> z;
    std::vector<double> clipped;    // frame values after clip
    std::vector<unsigned char> unclipped;
    std::vector<double> d_ts;       // mosaicked dS/dt_s
    std::vector<double> d_te;       // mosaicked dS/dt_e
    NoiseParams np;
    double mean = 0.0;
};

}  // namespace

std::vector<double> objective_grad(const ScheduleLogits& logits, const RadianceSequence& seq,
                                   double gain_p, const CameraConfig& cfg, std::uint64_t seed,
                                   const NoiseCalibration& calib, const GradOptions& opts,
                                   NoiseMode mode) {
    const ExposureSchedule sched = bounded_softmax(logits);
    const Mat jac = bounded_softmax_jacobian(logits);
    const int n = sched.burst_size();
    const CaptureTimeline tl = build_timeline(sched, cfg);
    const std::vector<double> gains = gains_from_schedule(sched, gain_p, cfg.t_p, cfg.k);

    const double t_end = tl.ends.back();
    require(seq.frames.size() >= required_frame_count(seq, t_end),
            "objective_grad: sequence too short for the schedule");

    const int w = seq.width(), h = seq.height();
    const std::size_t hw = static_cast<std::size_t>(w) * h;

    // Forward pass, mirroring synthesize_burst + fuse_burst exactly.
    std::vector<FrameTrace> traces(n);
    std::vector<RgbImage> rgb(n);
    std::vector<double> means(n);
    for (int i = 0; i < n; ++i) {
        FrameTrace& tr = traces[i];
        tr.np = noise_params_for_gain(gains[i], calib);

        tr.signal = mosaic_rggb(integrate_radiance(seq, tl.starts[i], tl.ends[i])).plane;
        tr.z = mode == NoiseMode::enabled
                   ? sample_noise_field(w, h, mix_seed(seed, static_cast<std::uint64_t>(i))).z
                   : std::vector<double>(hw, 0.0);

        tr.sqrt_var.resize(hw);
        tr.floored.resize(hw);
        tr.clipped.resize(hw);
        tr.unclipped.resize(hw);
        double sum = 0.0;
        for (std::size_t p = 0; p < hw; ++p) {
            const double raw_var = tr.np.lambda_read + tr.np.lambda_shot * tr.signal[p];
            tr.floored[p] = raw_var < kVarianceFloor;
            tr.sqrt_var[p] = std::sqrt(std::max(raw_var, kVarianceFloor));
            const double y = tr.signal[p] + gains[i] * tr.sqrt_var[p] * tr.z[p];
            tr.unclipped[p] = y > 0.0 && y < 1.0;
            tr.clipped[p] = std::clamp(y, 0.0, 1.0);
            sum += tr.clipped[p];
        }
        tr.mean = sum / static_cast<double>(hw);
        means[i] = tr.mean;

        const RadianceGradient ig = integrate_radiance_grad(seq, tl.starts[i], tl.ends[i]);
        tr.d_ts = mosaic_rggb(ig.d_start).plane;
        tr.d_te = mosaic_rggb(ig.d_end).plane;

        BayerFrame frame(w, h);
        frame.plane = tr.clipped;
        rgb[i] = demosaic_bilinear(frame);
    }

    const std::vector<NoiseParams> nps = [&] {
        std::vector<NoiseParams> v(n);
        for (int i = 0; i < n; ++i) v[i] = traces[i].np;
        return v;
    }();
    const std::vector<double> weights = fuse_weights(gains, nps, means);

    // Inverse-variance scores behind the weights: w_i = u_i / U.
    std::vector<double> u(n);
    double u_total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = gains[i] * gains[i] *
                         (nps[i].lambda_read + nps[i].lambda_shot * means[i]);
        u[i] = 1.0 / q;
        u_total += u[i];
    }

    RgbImage fused(w, h);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            const auto& src = rgb[i].plane(c);
            auto& dst = fused.plane(c);
            for (std::size_t p = 0; p < hw; ++p) dst[p] += weights[i] * src[p];
        }

    const BayerFrame gt = ground_truth(seq, cfg);
    const RgbImage ref = demosaic_bilinear(gt);

    // dL/dfused: sign of the residual, scaled by the L1 normalization.
    const double scale = 1.0 / (3.0 * static_cast<double>(hw));
    RgbImage residual_adj(w, h);
    for (int c = 0; c < 3; ++c) {
        const auto& a = fused.plane(c);
        const auto& b = ref.plane(c);
        auto& dst = residual_adj.plane(c);
        for (std::size_t p = 0; p < hw; ++p) dst[p] = sign_of(a[p] - b[p]) * scale;
    }

    // Shared across frames: the residual adjoint pulled back through demosaic.
    const std::vector<double> demosaic_adj = demosaic_adjoint(residual_adj);

    // dL/dw_i = <residual_adj, demosaic(frame_i)>.
    std::vector<double> rho(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c) {
            const auto& a = residual_adj.plane(c);
            const auto& src = rgb[i].plane(c);
            for (std::size_t p = 0; p < hw; ++p) rho[i] += a[p] * src[p];
        }
    double rho_mean = 0.0;
    for (int i = 0; i < n; ++i) rho_mean += rho[i] * weights[i];

    std::vector<double> grad_t(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const FrameTrace& tr = traces[i];
        const double g = gains[i];
        const double ls = tr.np.lambda_shot, lr = tr.np.lambda_read;

        // Fusion-weight path: dL/dq_i with q_i the per-frame noise score.
        const double dl_dq = -u[i] * u[i] * (rho[i] - rho_mean) / u_total;
        const double dl_dmean = dl_dq * g * g * ls;

        double a_start = 0.0, a_end = 0.0;
        double dl_dls = 0.0, dl_dlr = 0.0, dl_dg_direct = 0.0;
        for (std::size_t p = 0; p < hw; ++p) {
            const double adj_x = weights[i] * demosaic_adj[p] + dl_dmean / static_cast<double>(hw);
            if (!tr.unclipped[p]) continue;
            const double adj_y = adj_x;
            const double adj_var =
                tr.floored[p] ? 0.0 : adj_y * g * tr.z[p] / (2.0 * tr.sqrt_var[p]);
            dl_dls += adj_var * tr.signal[p];
            dl_dlr += adj_var;
            dl_dg_direct += adj_y * tr.sqrt_var[p] * tr.z[p];
            const double adj_signal = adj_y + adj_var * ls;
            a_start += adj_signal * tr.d_ts[p];
            a_end += adj_signal * tr.d_te[p];
        }

        // Timeline chain: t^s_i moves with t_j for j < i, t^e_i for j <= i.
        for (int j = 0; j < i; ++j) grad_t[j] += a_start + a_end;
        grad_t[i] += a_end;

        if (opts.gain_chain) {
            dl_dls += dl_dq * g * g * means[i];
            dl_dlr += dl_dq * g * g;
            dl_dg_direct += dl_dq * 2.0 * g * (lr + ls * means[i]);
            // lambda chain: d lr/d ls = read_slope * lr / ls, d ls/d g = shot_slope.
            const double dl_dls_total = dl_dls + dl_dlr * calib.read_slope * lr / ls;
            const double dl_dg = dl_dg_direct + dl_dls_total * calib.shot_slope;
            grad_t[i] += dl_dg * (-g / sched.t[i]);
        }
    }

    std::vector<double> grad_f(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) grad_f[j] += grad_t[i] * jac.at(i, j);
    return grad_f;
}

std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& fn,
                                       const std::vector<double>& x, double h) {
    require(h > 0.0, "central_difference: h must be positive");
    std::vector<double> grad(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        std::vector<double> hi = x, lo = x;
        hi[j] += h;
        lo[j] -= h;
        grad[j] = (fn(hi) - fn(lo)) / (2.0 * h);
    }
    return grad;
}

std::vector<double> finite_diff_grad(const ScheduleLogits& logits, const RadianceSequence& seq,
                                     double gain_p, const CameraConfig& cfg, std::uint64_t seed,
                                     double h, const NoiseCalibration& calib, NoiseMode mode) {
    auto fn = [&](const std::vector<double>& f) {
        ScheduleLogits probe = logits;
        probe.f = f;
        return objective(probe, seq, gain_p, cfg, seed, calib, mode);
    };
    return central_difference(fn, logits.f, h);
}

OptimTrajectory optimize_schedule(const ScheduleLogits& init, const RadianceSequence& seq,
                                  double gain_p, const CameraConfig& cfg, SeedPolicy policy,
                                  int steps, double lr, std::uint64_t seed,
                                  const NoiseCalibration& calib) {
    require(steps >= 1, "optimize_schedule: steps must be >= 1");
    require(lr >= 0.0, "optimize_schedule: lr must be non-negative");
    init.validate();

    constexpr double kMomentum = 0.9;
    ScheduleLogits logits = init;
    std::vector<double> velocity(logits.f.size(), 0.0);

    OptimTrajectory traj;
    traj.steps.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
        const std::uint64_t step_seed =
            policy == SeedPolicy::fixed ? seed : mix_seed(seed, static_cast<std::uint64_t>(k));
        const double loss = objective(logits, seq, gain_p, cfg, step_seed, calib);
        if (!std::isfinite(loss)) {
            traj.aborted = true;
            return traj;
        }
        const std::vector<double> grad =
            objective_grad(logits, seq, gain_p, cfg, step_seed, calib);

        const ExposureSchedule sched = bounded_softmax(logits);
        for (double t : sched.t)
            require(t >= logits.t_u * logits.epsilon * (1.0 - 1e-12),
                    "optimize_schedule: exposure fell below t_min");
        require(sched.total() <= logits.t_u, "optimize_schedule: schedule exceeds t_u");

        OptimStep rec;
        rec.step = k;
        rec.logits = logits.f;
        rec.t_seconds = sched.t;
        rec.loss = loss;
        double norm_sq = 0.0;
        for (double gcomp : grad) norm_sq += gcomp * gcomp;
        rec.grad_norm = std::sqrt(norm_sq);
        traj.steps.push_back(std::move(rec));

        if (k == steps) break;
        for (std::size_t j = 0; j < logits.f.size(); ++j) {
            velocity[j] = kMomentum * velocity[j] + grad[j];
            logits.f[j] -= lr * velocity[j];
        }
    }
    return traj;
}

SearchResult pseudo_gt_search(const RadianceSequence& seq, double gain_p,
                              const CameraConfig& cfg, const CandidateSet& candidates,
                              std::uint64_t seed, const NoiseCalibration& calib) {
    require(!candidates.schedules.empty(), "pseudo_gt_search: empty candidate set");

    const BayerFrame gt = ground_truth(seq, cfg);
    const RgbImage ref = demosaic_bilinear(gt);

    SearchResult result;
    result.scores.resize(candidates.schedules.size());
    parallel_for_each(candidates.schedules.size(), [&](std::size_t c) {
        const ExposureSchedule& sched = candidates.schedules[c];
        const BurstResult burst =
            synthesize_burst(seq, sched, gain_p, cfg, seed, NoiseMode::enabled, calib);
        const RgbImage fused = fuse_burst(burst.frames, burst.gains, burst.noise);
        CandidateScore& score = result.scores[c];
        score.schedule = sched;
        score.psnr_db = psnr(fused, ref);
        score.loss = restoration_loss(fused, gt);
    });

    result.best_index = 0;
    for (std::size_t c = 1; c < result.scores.size(); ++c)
        if (result.scores[c].psnr_db > result.scores[result.best_index].psnr_db)
            result.best_index = static_cast<int>(c);
    result.scores[result.best_index].best = true;
    return result;
}

}  // namespace burstsched
