// Command-line front end: scene conversion, burst simulation, schedule
// search/optimization, gradient checking, and metric evaluation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "burstsched/core.hpp"
#include "burstsched/fusion.hpp"
#include "burstsched/io.hpp"
#include "burstsched/motion.hpp"
#include "burstsched/parallel.hpp"
#include "burstsched/rawconv.hpp"
#include "burstsched/rng.hpp"
#include "burstsched/schedopt.hpp"
#include "burstsched/simulator.hpp"

namespace fs = std::filesystem;
using namespace burstsched;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CameraConfig load_config(const std::string& path) {
    CameraConfig cfg;
    if (!path.empty()) cfg = read_camera_config_json(path, cfg);
    cfg.validate();
    return cfg;
}

NoiseCalibration load_calibration(const std::string& path) {
    NoiseCalibration calib;
    if (!path.empty()) calib = read_noise_calibration_json(path, calib);
    return calib;
}

// The radiance clock is baked into the sequence file; timing constants only
// make sense against the same clock.
RadianceSequence load_sequence(const std::string& path, const CameraConfig& cfg) {
    RadianceSequence seq = read_radseq(path);
    require(std::abs(seq.e_s - cfg.e_s) <= 1e-12 * cfg.e_s,
            "sequence e_S (" + std::to_string(seq.e_s) + " s) does not match the camera config (" +
                std::to_string(cfg.e_s) + " s); pass the --config used when converting");
    return seq;
}

std::vector<double> parse_number_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::string token;
    std::stringstream stream(csv);
    while (std::getline(stream, token, ',')) {
        try {
            out.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("cannot parse ") + what + ": " + token);
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string("empty ") + what);
    return out;
}

ExposureSchedule schedule_from_flag(const std::string& csv, const CameraConfig& cfg,
                                    bool in_seconds, double t_u) {
    ExposureSchedule sched;
    sched.t = parse_number_list(csv, "schedule");
    if (!in_seconds)
        for (double& t : sched.t) t *= cfg.e_s;
    for (double t : sched.t)
        require(t >= cfg.t_min * (1.0 - 1e-12), "schedule entry below t_min");
    require(sched.total() <= t_u * (1.0 + 1e-12), "schedule sum exceeds t_u");
    return sched;
}

ScheduleLogits logits_from_flag(const std::string& csv, double t_u, const CameraConfig& cfg) {
    ScheduleLogits logits;
    logits.f = parse_number_list(csv, "logits");
    logits.t_u = t_u;
    logits.epsilon = cfg.t_min / t_u;
    logits.validate();
    return logits;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(IoError::Kind::io_failure, "cannot write " + path.string());
    out << text;
}

// Shared CSV schema for the search/optimize result tables.
std::string result_csv_header(int n) {
    std::string header = "candidate_or_step";
    for (int i = 1; i <= n; ++i) header += ",t" + std::to_string(i) + "_s";
    for (int i = 1; i <= n; ++i) header += ",t" + std::to_string(i) + "_1920";
    header += ",loss,psnr_db,grad_norm,seed,best\n";
    return header;
}

std::string result_csv_row(const std::string& tag, const std::vector<double>& t_seconds,
                           double loss, double psnr_db, double grad_norm, std::uint64_t seed,
                           bool best) {
    std::string row = tag;
    for (double t : t_seconds) row += "," + fmt(t);
    for (double t : t_seconds) row += "," + fmt(t * 1920.0);
    row += "," + fmt(loss) + "," + fmt(psnr_db) + "," + fmt(grad_norm) + "," +
           std::to_string(seed) + "," + (best ? "1" : "0") + "\n";
    return row;
}

RgbImage load_image_any(const fs::path& path) {
    if (path.extension() == ".bayer") return demosaic_bilinear(read_bayer(path));
    return import_png(path);
}

int cmd_convert(const std::string& in_dir, const std::string& out_path,
                const std::string& pattern, int ccm_index, std::uint64_t wb_seed,
                bool linear_input, const std::string& config_path) {
    const CameraConfig cfg = load_config(config_path);
    const std::vector<RgbImage> frames = import_png_sequence(in_dir, pattern);

    std::mt19937_64 rng(wb_seed);
    ColorPipelineParams params = sample_pipeline_params(rng, default_ccm_bank());
    if (ccm_index >= 0) {
        require(ccm_index < static_cast<int>(default_ccm_bank().size()),
                "--ccm index out of range");
        params.ccm = default_ccm_bank()[static_cast<std::size_t>(ccm_index)];
    }

    const RadianceSequence seq = convert_sequence(frames, params, cfg, !linear_input);
    write_radseq(out_path, seq);
    std::cout << "wrote " << out_path << ": " << seq.frames.size() << " frames " << seq.width()
              << "x" << seq.height() << ", e_S = " << fmt(seq.e_s) << " s\n";
    return 0;
}

int cmd_simulate(const std::string& radseq_path, const std::string& out_dir,
                 const std::string& schedule_csv, const std::string& logits_csv, bool in_seconds,
                 double t_u_units, double gain_p, std::uint64_t seed, bool emit_png,
                 bool no_noise, int capture_depth, const std::string& config_path,
                 const std::string& noise_path) {
    const CameraConfig cfg = load_config(config_path);
    const NoiseCalibration calib = load_calibration(noise_path);
    const RadianceSequence seq = load_sequence(radseq_path, cfg);
    const double t_u = t_u_units * cfg.e_s;
    const NoiseMode mode = no_noise ? NoiseMode::disabled : NoiseMode::enabled;

    ExposureSchedule sched;
    std::optional<std::vector<double>> logit_values;
    if (!logits_csv.empty()) {
        const ScheduleLogits logits = logits_from_flag(logits_csv, t_u, cfg);
        sched = bounded_softmax(logits);
        logit_values = logits.f;
    } else {
        require(!schedule_csv.empty(), "need --schedule or --logits");
        sched = schedule_from_flag(schedule_csv, cfg, in_seconds, t_u);
    }

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    const BurstResult burst = synthesize_burst(seq, sched, gain_p, cfg, seed, mode, calib);
    const PreviewPair previews = synthesize_previews(seq, gain_p, cfg, seed, mode, calib);
    const BayerFrame gt = ground_truth(seq, cfg);

    const double m_hat = motion_magnitude(previews.current, previews.previous, 4,
                                          static_cast<int>(std::lround(cfg.m_thr)));
    const ShotContext shot = make_shot_context(gain_p, m_hat, cfg);

    nlohmann::json manifest;
    manifest["seed"] = seed;
    manifest["gain_p"] = gain_p;
    manifest["noise"] = !no_noise;
    manifest["schedule_seconds"] = sched.t;
    {
        std::vector<double> units;
        for (double t : sched.t) units.push_back(t * 1920.0);
        manifest["schedule_1920"] = units;
    }
    if (logit_values) manifest["logits"] = *logit_values;
    manifest["shot_context"] = {{"motion_px", shot.motion_px},
                                {"motion_norm", shot.motion_norm},
                                {"gain_norm", shot.gain_norm}};

    nlohmann::json frame_records = nlohmann::json::array();
    for (std::size_t i = 0; i < burst.frames.size(); ++i) {
        const std::string name = "burst_" + std::to_string(i) + ".bayer";
        write_bayer(dir / name, burst.frames[i]);
        frame_records.push_back({{"file", name},
                                 {"exposure_s", burst.frames[i].meta.exposure_s},
                                 {"gain", burst.gains[i]},
                                 {"t_start_s", burst.timeline.starts[i]},
                                 {"t_end_s", burst.timeline.ends[i]},
                                 {"lambda_shot", burst.noise[i].lambda_shot},
                                 {"lambda_read", burst.noise[i].lambda_read}});
        if (emit_png)
            export_png(forward_isp(burst.frames[i], ColorPipelineParams::identity()),
                       dir / ("burst_" + std::to_string(i) + ".png"), 8);
    }
    manifest["frames"] = frame_records;

    write_bayer(dir / "preview.bayer", previews.current);
    write_bayer(dir / "preview_prev.bayer", previews.previous);
    write_bayer(dir / "gt.bayer", gt);
    if (emit_png) {
        export_png(forward_isp(previews.current, ColorPipelineParams::identity()),
                   dir / "preview.png", 8);
        export_png(forward_isp(gt, ColorPipelineParams::identity()), dir / "gt.png", 8);
    }
    if (capture_depth > 0) {
        const auto quantized =
            capture_emulation(seq, sched, gain_p, cfg, seed, capture_depth, calib);
        for (std::size_t i = 0; i < quantized.size(); ++i)
            write_bayer(dir / ("capture_" + std::to_string(i) + ".bayer"), quantized[i]);
        manifest["capture_bit_depth"] = capture_depth;
    }

    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "wrote " << burst.frames.size() << " burst frames to " << out_dir
              << " (m_p = " << fmt(shot.motion_px) << " px, normalized "
              << fmt(shot.motion_norm) << ")\n";
    return 0;
}

int cmd_search(const std::string& radseq_path, const std::string& out_csv,
               const std::string& candidates_path, double gain_p, std::uint64_t seed,
               const std::string& config_path, const std::string& noise_path) {
    const CameraConfig cfg = load_config(config_path);
    const NoiseCalibration calib = load_calibration(noise_path);
    const RadianceSequence seq = load_sequence(radseq_path, cfg);

    CandidateSet set = CandidateSet::default_set(cfg);
    if (!candidates_path.empty()) set.schedules = read_candidate_schedules(candidates_path);
    const int n = set.schedules.front().burst_size();
    for (const ExposureSchedule& s : set.schedules)
        require(s.burst_size() == n, "candidates must share one burst size");

    const SearchResult result = pseudo_gt_search(seq, gain_p, cfg, set, seed, calib);

    std::string csv = result_csv_header(n);
    for (std::size_t c = 0; c < result.scores.size(); ++c) {
        const CandidateScore& sc = result.scores[c];
        csv += result_csv_row(std::to_string(c), sc.schedule.t, sc.loss, sc.psnr_db, 0.0, seed,
                              sc.best);
    }
    write_text(out_csv, csv);

    const CandidateScore& best = result.scores[static_cast<std::size_t>(result.best_index)];
    std::cout << "best candidate " << result.best_index << ":";
    for (double t : best.schedule.t) std::cout << " " << fmt(t * 1920.0);
    std::cout << " (units of 1/1920 s), psnr " << fmt(best.psnr_db) << " dB\n";
    return 0;
}

int cmd_optimize(const std::string& radseq_path, const std::string& out_csv,
                 const std::string& out_schedule, const std::string& init_csv, double t_u_units,
                 double gain_p, int steps, double lr, const std::string& seed_policy,
                 std::uint64_t seed, const std::string& config_path,
                 const std::string& noise_path) {
    const CameraConfig cfg = load_config(config_path);
    const NoiseCalibration calib = load_calibration(noise_path);
    const RadianceSequence seq = load_sequence(radseq_path, cfg);
    const double t_u = t_u_units * cfg.e_s;

    ScheduleLogits init;
    if (init_csv.empty())
        init = ScheduleLogits::uniform(4, t_u, cfg.t_min);
    else
        init = logits_from_flag(init_csv, t_u, cfg);

    SeedPolicy policy;
    if (seed_policy == "fixed")
        policy = SeedPolicy::fixed;
    else if (seed_policy == "per-step")
        policy = SeedPolicy::per_step;
    else
        throw std::invalid_argument("--seed-policy must be fixed or per-step");

    const OptimTrajectory traj =
        optimize_schedule(init, seq, gain_p, cfg, policy, steps, lr, seed, calib);
    require(!traj.steps.empty(), "optimizer recorded no steps");

    // psnr per recorded step, re-simulated with the step's noise realization
    const BayerFrame gt = ground_truth(seq, cfg);
    const RgbImage ref = demosaic_bilinear(gt);
    std::string csv = result_csv_header(init.burst_size());
    for (const OptimStep& step : traj.steps) {
        ScheduleLogits logits = init;
        logits.f = step.logits;
        const std::uint64_t step_seed =
            policy == SeedPolicy::fixed ? seed
                                        : mix_seed(seed, static_cast<std::uint64_t>(step.step));
        const BurstResult burst = synthesize_burst(seq, bounded_softmax(logits), gain_p, cfg,
                                                   step_seed, NoiseMode::enabled, calib);
        const double step_psnr = psnr(fuse_burst(burst.frames, burst.gains, burst.noise), ref);
        csv += result_csv_row(std::to_string(step.step), step.t_seconds, step.loss, step_psnr,
                              step.grad_norm, step_seed, false);
    }
    write_text(out_csv, csv);

    ScheduleLogits final_logits = init;
    final_logits.f = traj.steps.back().logits;
    const ExposureSchedule final_sched = bounded_softmax(final_logits);
    write_schedule_json(out_schedule, final_sched, t_u, &final_logits.f);

    if (traj.aborted) {
        std::cerr << "optimization aborted on non-finite loss after " << traj.steps.size()
                  << " recorded steps\n";
        return 1;
    }
    std::cout << "loss " << fmt(traj.steps.front().loss) << " -> "
              << fmt(traj.steps.back().loss) << " over " << steps << " steps; schedule";
    for (double t : final_sched.t) std::cout << " " << fmt(t * 1920.0);
    std::cout << " (units of 1/1920 s)\n";
    return 0;
}

int cmd_gradcheck(const std::string& radseq_path, const std::string& report_path, int trials,
                  std::uint64_t seed, double h, double gain_lo, double gain_hi, bool no_noise,
                  bool disable_gain_chain, const std::string& config_path,
                  const std::string& noise_path) {
    const CameraConfig cfg = load_config(config_path);
    const NoiseCalibration calib = load_calibration(noise_path);
    const RadianceSequence seq = load_sequence(radseq_path, cfg);
    const NoiseMode mode = no_noise ? NoiseMode::disabled : NoiseMode::enabled;
    GradOptions opts;
    opts.gain_chain = !disable_gain_chain;
    require(trials >= 1, "--trials must be >= 1");

    // Sample configurations up front so parallel evaluation stays deterministic.
    std::vector<ScheduleLogits> logit_configs;
    std::vector<double> gains;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> gain_dist(gain_lo, gain_hi);
    while (logit_configs.size() < static_cast<std::size_t>(trials)) {
        ScheduleLogits l = ScheduleLogits::uniform(4, 128.0 * cfg.e_s, cfg.t_min);
        for (double& f : l.f) f = gauss(rng);
        const double g = gain_dist(rng);
        // keep moving exposure endpoints away from frame boundaries, where the
        // gradient is one-sided; the burst start t0 itself never moves
        const CaptureTimeline tl = build_timeline(bounded_softmax(l), cfg);
        bool ok = true;
        for (std::size_t i = 0; i < tl.starts.size(); ++i) {
            const double fe = tl.ends[i] / cfg.e_s;
            if (std::abs(fe - std::round(fe)) < 0.02) ok = false;
            if (i > 0) {
                const double fsv = tl.starts[i] / cfg.e_s;
                if (std::abs(fsv - std::round(fsv)) < 0.02) ok = false;
            }
        }
        if (!ok) continue;
        logit_configs.push_back(std::move(l));
        gains.push_back(g);
    }

    struct Trial {
        double max_rel = 0.0;
        bool degenerate = true;
    };
    std::vector<Trial> results(static_cast<std::size_t>(trials));
    parallel_for_each(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const std::uint64_t trial_seed = mix_seed(seed, 1000 + t);
        const auto analytic =
            objective_grad(logit_configs[t], seq, gains[t], cfg, trial_seed, calib, opts, mode);
        const auto fd =
            finite_diff_grad(logit_configs[t], seq, gains[t], cfg, trial_seed, h, calib, mode);
        for (std::size_t j = 0; j < analytic.size(); ++j) {
            if (std::max(std::abs(analytic[j]), std::abs(fd[j])) <= 1e-8) continue;
            results[t].degenerate = false;
            double rel = std::abs(analytic[j] - fd[j]) /
                         std::max(std::abs(analytic[j]), std::abs(fd[j]));
            // A probe straddling a clip or L1 kink contaminates the estimate;
            // shrink the step and keep the converged value. A genuinely wrong
            // gradient stays wrong at every step size.
            for (double shrink : {0.1, 0.01, 0.001}) {
                if (rel < 1e-3) break;
                std::vector<double> hi = logit_configs[t].f, lo = logit_configs[t].f;
                hi[j] += h * shrink;
                lo[j] -= h * shrink;
                ScheduleLogits up = logit_configs[t], dn = logit_configs[t];
                up.f = hi;
                dn.f = lo;
                const double refined =
                    (objective(up, seq, gains[t], cfg, trial_seed, calib, mode) -
                     objective(dn, seq, gains[t], cfg, trial_seed, calib, mode)) /
                    (2.0 * h * shrink);
                rel = std::min(rel, std::abs(analytic[j] - refined) /
                                        std::max(std::abs(analytic[j]), std::abs(refined)));
            }
            results[t].max_rel = std::max(results[t].max_rel, rel);
        }
    });

    double worst = 0.0;
    int degenerate_count = 0;
    std::string report = "trial,gain_p,max_rel_err,verdict\n";
    for (int t = 0; t < trials; ++t) {
        const Trial& r = results[static_cast<std::size_t>(t)];
        const std::string verdict =
            r.degenerate ? "PASS-degenerate" : (r.max_rel < 1e-3 ? "PASS" : "FAIL");
        report += std::to_string(t) + "," + fmt(gains[static_cast<std::size_t>(t)]) + "," +
                  fmt(r.max_rel) + "," + verdict + "\n";
        worst = std::max(worst, r.max_rel);
        degenerate_count += r.degenerate ? 1 : 0;
    }
    const bool pass = worst < 1e-3;
    const std::string summary = degenerate_count == trials
                                    ? std::string("PASS-degenerate")
                                    : (pass ? std::string("PASS") : std::string("FAIL"));
    report += "summary,," + fmt(worst) + "," + summary + "\n";
    write_text(report_path, report);
    std::cout << "gradcheck " << summary << ": max relative error " << fmt(worst) << " over "
              << trials << " trials (" << degenerate_count << " degenerate)\n";
    return pass ? 0 : 2;
}

int cmd_eval(const std::string& a_path, const std::string& gt_path, const std::string& out_path) {
    const RgbImage a = load_image_any(a_path);
    const RgbImage b = load_image_any(gt_path);
    require(a.width == b.width && a.height == b.height, "eval: dimension mismatch");

    double l1 = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.pixel_count(); ++i)
            l1 += std::abs(a.plane(c)[i] - b.plane(c)[i]);
    l1 /= 3.0 * static_cast<double>(a.pixel_count());

    const double psnr_db = psnr(a, b);
    const double ssim_val = ssim(a, b);

    nlohmann::json record;
    if (std::isinf(psnr_db))
        record["psnr_db"] = "inf";  // identical inputs
    else
        record["psnr_db"] = psnr_db;
    record["ssim"] = ssim_val;
    record["l1_loss"] = l1;
    write_text(out_path, record.dump(2) + "\n");
    std::cout << "psnr " << fmt(psnr_db) << " dB, ssim " << fmt(ssim_val) << ", l1 " << fmt(l1)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentiable burst-capture simulator and exposure-schedule optimizer"};
    app.require_subcommand(1);

    std::string config_path, noise_path;

    // convert
    auto* convert = app.add_subcommand("convert", "convert a PNG sequence to a RADSEQ file");
    std::string conv_in, conv_out, conv_pattern = "*.png";
    int conv_ccm = -1;
    std::uint64_t conv_seed = 0;
    bool conv_linear = false;
    convert->add_option("in_dir", conv_in)->required();
    convert->add_option("out", conv_out)->required();
    convert->add_option("--pattern", conv_pattern, "filename glob (default *.png)");
    convert->add_option("--ccm", conv_ccm, "bank index (0 identity); default: sampled");
    convert->add_option("--wb-seed", conv_seed, "seed for CCM/WB sampling");
    convert->add_flag("--linear-input", conv_linear, "skip gamma expansion");
    convert->add_option("--config", config_path, "camera config JSON overrides");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "synthesize a burst, previews, and GT");
    std::string sim_in, sim_out, sim_schedule, sim_logits;
    bool sim_seconds = false, sim_png = false, sim_no_noise = false;
    double sim_tu = 128.0, sim_gain = 51200.0;
    std::uint64_t sim_seed = 0;
    int sim_capture = 0;
    simulate->add_option("radseq", sim_in)->required();
    simulate->add_option("out_dir", sim_out)->required();
    simulate->add_option("--schedule", sim_schedule, "t1,t2,... in units of e_S");
    simulate->add_option("--logits", sim_logits, "f1,...,f(n+1) through the bounded softmax");
    simulate->add_flag("--in-seconds", sim_seconds, "--schedule values are seconds");
    simulate->add_option("--t-u", sim_tu, "exposure-sum bound in units of e_S");
    simulate->add_option("--gain-p", sim_gain, "preview gain");
    simulate->add_option("--seed", sim_seed);
    simulate->add_flag("--png", sim_png, "also render PNG previews via the simple ISP");
    simulate->add_flag("--no-noise", sim_no_noise);
    simulate->add_option("--capture-depth", sim_capture,
                         "also emit quantized capture frames at this bit depth");
    simulate->add_option("--config", config_path);
    simulate->add_option("--noise-config", noise_path);

    // search
    auto* search = app.add_subcommand("search", "brute-force pseudo-GT schedule search");
    std::string sea_in, sea_out, sea_cands;
    double sea_gain = 51200.0;
    std::uint64_t sea_seed = 0;
    search->add_option("radseq", sea_in)->required();
    search->add_option("out_csv", sea_out)->required();
    search->add_option("--candidates", sea_cands, "JSON array of schedule records");
    search->add_option("--gain-p", sea_gain);
    search->add_option("--seed", sea_seed);
    search->add_option("--config", config_path);
    search->add_option("--noise-config", noise_path);

    // optimize
    auto* optimize = app.add_subcommand("optimize", "gradient-descent schedule optimization");
    std::string opt_in, opt_csv, opt_sched, opt_init, opt_policy = "fixed";
    double opt_tu = 128.0, opt_gain = 51200.0, opt_lr = 0.5;
    int opt_steps = 200;
    std::uint64_t opt_seed = 0;
    optimize->add_option("radseq", opt_in)->required();
    optimize->add_option("out_csv", opt_csv)->required();
    optimize->add_option("out_schedule", opt_sched)->required();
    optimize->add_option("--init-logits", opt_init, "initial logits (default: zeros)");
    optimize->add_option("--t-u", opt_tu, "exposure-sum bound in units of e_S");
    optimize->add_option("--gain-p", opt_gain);
    optimize->add_option("--steps", opt_steps);
    optimize->add_option("--lr", opt_lr);
    optimize->add_option("--seed-policy", opt_policy, "fixed | per-step");
    optimize->add_option("--seed", opt_seed);
    optimize->add_option("--config", config_path);
    optimize->add_option("--noise-config", noise_path);

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "analytic vs finite-difference report");
    std::string gc_in, gc_report;
    int gc_trials = 10;
    std::uint64_t gc_seed = 0;
    double gc_h = 1e-4, gc_gain_lo = 2.0, gc_gain_hi = 40.0;
    bool gc_no_noise = false, gc_defect = false;
    gradcheck->add_option("radseq", gc_in)->required();
    gradcheck->add_option("report", gc_report)->required();
    gradcheck->add_option("--trials", gc_trials);
    gradcheck->add_option("--seed", gc_seed);
    gradcheck->add_option("--fd-step", gc_h, "finite-difference step in logit units");
    gradcheck->add_option("--gain-min", gc_gain_lo);
    gradcheck->add_option("--gain-max", gc_gain_hi);
    gradcheck->add_flag("--no-noise", gc_no_noise);
    gradcheck->add_flag("--disable-gain-chain", gc_defect,
                        "deliberately drop the gain chain (defect mode)");
    gradcheck->add_option("--config", config_path);
    gradcheck->add_option("--noise-config", noise_path);

    // eval
    auto* eval = app.add_subcommand("eval", "PSNR/SSIM/L1 between two images (.png or .bayer)");
    std::string ev_a, ev_gt, ev_out;
    eval->add_option("image", ev_a)->required();
    eval->add_option("gt", ev_gt)->required();
    eval->add_option("out", ev_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(convert))
            return cmd_convert(conv_in, conv_out, conv_pattern, conv_ccm, conv_seed, conv_linear,
                               config_path);
        if (app.got_subcommand(simulate))
            return cmd_simulate(sim_in, sim_out, sim_schedule, sim_logits, sim_seconds, sim_tu,
                                sim_gain, sim_seed, sim_png, sim_no_noise, sim_capture,
                                config_path, noise_path);
        if (app.got_subcommand(search))
            return cmd_search(sea_in, sea_out, sea_cands, sea_gain, sea_seed, config_path,
                              noise_path);
        if (app.got_subcommand(optimize))
            return cmd_optimize(opt_in, opt_csv, opt_sched, opt_init, opt_tu, opt_gain, opt_steps,
                                opt_lr, opt_policy, opt_seed, config_path, noise_path);
        if (app.got_subcommand(gradcheck))
            return cmd_gradcheck(gc_in, gc_report, gc_trials, gc_seed, gc_h, gc_gain_lo,
                                 gc_gain_hi, gc_no_noise, gc_defect, config_path, noise_path);
        if (app.got_subcommand(eval)) return cmd_eval(ev_a, ev_gt, ev_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
