#include <doctest.h>

#include <cmath>
#include <random>

#include "burstsched/fusion.hpp"
#include "burstsched/rawconv.hpp"
#include "burstsched/simulator.hpp"
#include "../support/scenes.hpp"

using namespace burstsched;

namespace {

BayerFrame random_bayer(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(lo, hi);
    BayerFrame f(w, h);
    for (double& v : f.plane) v = unit(rng);
    return f;
}

RgbImage random_rgb(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(lo, hi);
    RgbImage img(w, h);
    for (int c = 0; c < 3; ++c)
        for (double& v : img.plane(c)) v = unit(rng);
    return img;
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("demosaic: constants pass through and linearity holds") {
    BayerFrame flat(6, 4);
    for (double& v : flat.plane) v = 0.42;
    const RgbImage rgb = demosaic_bilinear(flat);
    for (int c = 0; c < 3; ++c)
        for (double v : rgb.plane(c)) CHECK(v == doctest::Approx(0.42).epsilon(1e-15));

    const BayerFrame x = random_bayer(8, 8, 1);
    const BayerFrame y = random_bayer(8, 8, 2);
    BayerFrame combo(8, 8);
    const double a = 1.7, b = -0.4;
    for (std::size_t i = 0; i < combo.plane.size(); ++i)
        combo.plane[i] = a * x.plane[i] + b * y.plane[i];
    const RgbImage dx = demosaic_bilinear(x);
    const RgbImage dy = demosaic_bilinear(y);
    const RgbImage dc = demosaic_bilinear(combo);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < dc.pixel_count(); ++i)
            CHECK(dc.plane(c)[i] ==
                  doctest::Approx(a * dx.plane(c)[i] + b * dy.plane(c)[i]).epsilon(1e-12));

    BayerFrame odd(5, 4);
    CHECK_THROWS(demosaic_bilinear(odd));
}

TEST_CASE("demosaic adjoint satisfies the dot-product identity") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const BayerFrame x = random_bayer(10, 8, 100 + seed);
        const RgbImage adj = random_rgb(10, 8, 200 + seed, -1.0, 1.0);
        const RgbImage dx = demosaic_bilinear(x);
        double lhs = 0.0;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < dx.pixel_count(); ++i)
                lhs += adj.plane(c)[i] * dx.plane(c)[i];
        const std::vector<double> pulled = demosaic_adjoint(adj);
        double rhs = 0.0;
        for (std::size_t i = 0; i < x.plane.size(); ++i) rhs += pulled[i] * x.plane[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("fuse weights: normalization, symmetry, scale invariance") {
    const std::vector<double> gains = {10.0, 10.0};
    const std::vector<NoiseParams> noise = {noise_params_for_gain(10.0),
                                            noise_params_for_gain(10.0)};
    const std::vector<double> means = {0.4, 0.4};
    const std::vector<double> w = fuse_weights(gains, noise, means);
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));

    // uniform rescaling of all per-frame noise variances leaves weights fixed
    const std::vector<double> g2 = {5.0, 20.0, 9.0};
    std::vector<NoiseParams> n2 = {noise_params_for_gain(5.0), noise_params_for_gain(20.0),
                                   noise_params_for_gain(9.0)};
    const std::vector<double> m2 = {0.2, 0.5, 0.7};
    const std::vector<double> w2 = fuse_weights(g2, n2, m2);
    double sum = 0.0;
    for (double v : w2) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<NoiseParams> scaled = n2;
    for (NoiseParams& np : scaled) {
        np.lambda_read *= 37.0;
        np.lambda_shot *= 37.0;
    }
    const std::vector<double> w3 = fuse_weights(g2, scaled, m2);
    for (std::size_t i = 0; i < w2.size(); ++i)
        CHECK(w3[i] == doctest::Approx(w2[i]).epsilon(1e-12));
}

TEST_CASE("fuse weights: gain-ratio oracle") {
    // frames with gains (g, 2g); weight ratio follows the scalar computation
    const double g = 40.0;
    const std::vector<double> gains = {g, 2.0 * g};
    const std::vector<NoiseParams> noise = {noise_params_for_gain(g),
                                            noise_params_for_gain(2.0 * g)};
    const std::vector<double> means = {0.3, 0.3};
    const std::vector<double> w = fuse_weights(gains, noise, means);
    const double q0 = g * g * (noise[0].lambda_read + noise[0].lambda_shot * means[0]);
    const double q1 = 4.0 * g * g * (noise[1].lambda_read + noise[1].lambda_shot * means[1]);
    CHECK(w[0] / w[1] == doctest::Approx(q1 / q0).epsilon(1e-12));
    CHECK(w[0] > w[1]);  // lower gain frame dominates
}

TEST_CASE("fuse_burst: single frame reduces to demosaic") {
    const BayerFrame f = random_bayer(8, 8, 7);
    const RgbImage fused = fuse_burst({f}, {12.0}, {noise_params_for_gain(12.0)});
    const RgbImage direct = demosaic_bilinear(f);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < fused.pixel_count(); ++i)
            CHECK(fused.plane(c)[i] == doctest::Approx(direct.plane(c)[i]).epsilon(1e-12));
}

TEST_CASE("restoration loss: zero at truth, offset, scalar oracle") {
    const BayerFrame gt = random_bayer(8, 8, 9);
    const RgbImage exact = demosaic_bilinear(gt);
    CHECK(restoration_loss(exact, gt) == doctest::Approx(0.0));

    RgbImage offset = exact;
    for (int c = 0; c < 3; ++c)
        for (double& v : offset.plane(c)) v += 0.1;
    CHECK(restoration_loss(offset, gt) == doctest::Approx(0.1).epsilon(1e-12));

    const RgbImage fused = random_rgb(8, 8, 10);
    double manual = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < fused.pixel_count(); ++i)
            manual += std::abs(fused.plane(c)[i] - exact.plane(c)[i]);
    manual /= 3.0 * static_cast<double>(fused.pixel_count());
    CHECK(restoration_loss(fused, gt) == doctest::Approx(manual).epsilon(1e-12));

    BayerFrame small(4, 4);
    CHECK_THROWS(restoration_loss(fused, small));
}

TEST_CASE("restoration loss: convex in the fused image, zero only at truth") {
    const BayerFrame gt = random_bayer(8, 8, 19);
    const RgbImage a = random_rgb(8, 8, 20);
    const RgbImage b = random_rgb(8, 8, 21);
    for (double lambda : {0.25, 0.5, 0.75}) {
        RgbImage mix(8, 8);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < mix.pixel_count(); ++i)
                mix.plane(c)[i] = lambda * a.plane(c)[i] + (1.0 - lambda) * b.plane(c)[i];
        CHECK(restoration_loss(mix, gt) <=
              lambda * restoration_loss(a, gt) + (1.0 - lambda) * restoration_loss(b, gt) + 1e-12);
    }
    RgbImage off = demosaic_bilinear(gt);
    off.g[13] += 1e-6;
    CHECK(restoration_loss(off, gt) > 0.0);
}

TEST_CASE("psnr: sentinel and closed-form values") {
    const RgbImage a = random_rgb(8, 8, 11, 0.2, 0.8);
    CHECK(std::isinf(psnr(a, a)));

    RgbImage b = a;
    for (int c = 0; c < 3; ++c)
        for (double& v : b.plane(c)) v += 0.1;
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-9));

    RgbImage d = a;
    for (int c = 0; c < 3; ++c)
        for (double& v : d.plane(c)) v += 0.01;
    CHECK(psnr(a, d) == doctest::Approx(40.0).epsilon(1e-9));
}

TEST_CASE("ssim: identity, inversion, constant-offset closed form") {
    const RgbImage a = testsupport::smooth_image(32, 32, 13, 0.2, 0.8);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    RgbImage neg(32, 32);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.pixel_count(); ++i)
            neg.plane(c)[i] = 1.0 - a.plane(c)[i];
    CHECK(ssim(a, neg) < 0.5);

    RgbImage ca(16, 16), cb(16, 16);
    for (int c = 0; c < 3; ++c) {
        for (double& v : ca.plane(c)) v = 0.25;
        for (double& v : cb.plane(c)) v = 0.75;
    }
    const double mu_a = 0.25, mu_b = 0.75, c1 = 1e-4, c2 = 9e-4;
    const double expected =
        ((2 * mu_a * mu_b + c1) * c2) / ((mu_a * mu_a + mu_b * mu_b + c1) * c2);
    CHECK(ssim(ca, cb) == doctest::Approx(expected).epsilon(1e-12));

    RgbImage tiny(8, 8);
    CHECK_THROWS(ssim(tiny, tiny));
}

TEST_CASE("static noise-free scenes fuse to the ground truth for any schedule") {
    CameraConfig cfg;
    const RadianceSequence seq = testsupport::static_sequence(16, 16, 235, 21);
    const BayerFrame gt = ground_truth(seq, cfg);
    for (const auto& units :
         {std::vector<double>{8, 8, 8, 8}, {8, 16, 24, 32}, {30, 11, 40, 9}}) {
        ExposureSchedule sched;
        for (double u : units) sched.t.push_back(u / 1920.0);
        const BurstResult burst = synthesize_burst(seq, sched, 25.0, cfg, 0, NoiseMode::disabled);
        const RgbImage fused = fuse_burst(burst.frames, burst.gains, burst.noise);
        CHECK(restoration_loss(fused, gt) == doctest::Approx(0.0));
    }
}

TEST_CASE("longer exposures lower the expected loss on a static noisy scene") {
    CameraConfig cfg;
    const RadianceSequence seq = testsupport::static_sequence(16, 16, 235, 33);
    const BayerFrame gt = ground_truth(seq, cfg);
    ExposureSchedule longer, shorter;
    for (int i = 0; i < 4; ++i) {
        longer.t.push_back(28.0 / 1920.0);
        shorter.t.push_back(8.0 / 1920.0);
    }
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const BurstResult lb = synthesize_burst(seq, longer, 12.0, cfg, seed);
        const BurstResult sb = synthesize_burst(seq, shorter, 12.0, cfg, seed);
        const double ll = restoration_loss(fuse_burst(lb.frames, lb.gains, lb.noise), gt);
        const double ls = restoration_loss(fuse_burst(sb.frames, sb.gains, sb.noise), gt);
        if (ll < ls) ++wins;
    }
    // sign test: P(X >= 63 | p = 0.5, n = 100) < 0.01
    CHECK(wins >= 63);
}

}  // TEST_SUITE
