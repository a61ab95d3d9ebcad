#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "burstsched/core.hpp"
#include "burstsched/schedopt.hpp"

using namespace burstsched;

namespace {

ScheduleLogits make_logits(std::vector<double> f) {
    ScheduleLogits l;
    l.f = std::move(f);
    l.t_u = 128.0 / 1920.0;
    l.epsilon = 1.0 / 16.0;
    return l;
}

// Independent closed-form evaluation (no max-shift, long double accumulation).
std::vector<double> reference_schedule(const ScheduleLogits& l) {
    const int n = l.burst_size();
    long double denom = 0.0L;
    for (double fi : l.f) denom += std::exp(static_cast<long double>(fi));
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) {
        const long double sigma = std::exp(static_cast<long double>(l.f[i])) / denom;
        t[i] = static_cast<double>(l.t_u * (l.epsilon + (1.0L - (n + 1) * l.epsilon) * sigma));
    }
    return t;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("bounded softmax: symmetric logits give the uniform fraction") {
    const ExposureSchedule sched = bounded_softmax(make_logits({0, 0, 0, 0, 0}));
    REQUIRE(sched.burst_size() == 4);
    for (double t : sched.t) CHECK(t == doctest::Approx(0.2 * 128.0 / 1920.0).epsilon(1e-14));
    CHECK(sched.t[0] == doctest::Approx(25.6 / 1920.0).epsilon(1e-14));
}

TEST_CASE("bounded softmax: saturated logits hit the range endpoints") {
    const ScheduleLogits l = make_logits({40, -40, -40, -40, -40});
    const ExposureSchedule sched = bounded_softmax(l);
    const double t_min = l.t_u * l.epsilon;
    CHECK(std::abs(sched.t[0] - l.t_u * (1.0 - 4.0 * l.epsilon)) < 1e-9);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(sched.t[i] - t_min) < 1e-9);
}

TEST_CASE("bounded softmax: matches an independent evaluation of the closed form") {
    const ScheduleLogits l = make_logits({1, 0, 0, 0, 0});
    const ExposureSchedule sched = bounded_softmax(l);
    const std::vector<double> ref = reference_schedule(l);
    for (int i = 0; i < 4; ++i) CHECK(sched.t[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("bounded softmax: rejects bad inputs") {
    CHECK_THROWS(bounded_softmax(make_logits({0, 0, std::nan(""), 0, 0})));
    CHECK_THROWS(bounded_softmax(make_logits({0, 0, std::numeric_limits<double>::infinity(), 0, 0})));
    ScheduleLogits l = make_logits({0, 0, 0, 0, 0});
    l.epsilon = 0.25;  // (n+1)*eps = 1.25
    CHECK_THROWS(bounded_softmax(l));
}

TEST_CASE("bounded softmax bounds hold over random logits") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 3.0);
    const double t_u = 128.0 / 1920.0, t_min = 8.0 / 1920.0;
    for (int trial = 0; trial < 10000; ++trial) {
        ScheduleLogits l = make_logits({gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
        const ExposureSchedule sched = bounded_softmax(l);
        for (double t : sched.t) CHECK(t > t_min * (1.0 - 1e-12));
        CHECK(sched.total() < t_u);
    }
}

TEST_CASE("jacobian: symmetric logits give equal diagonal and off-diagonal entries") {
    const Mat j = bounded_softmax_jacobian(make_logits({1.3, 1.3, 1.3, 1.3, 1.3}));
    for (int i = 0; i < 4; ++i) {
        CHECK(j.at(i, i) == doctest::Approx(j.at(0, 0)).epsilon(1e-14));
        for (int c = 0; c < 5; ++c)
            if (c != i) CHECK(j.at(i, c) == doctest::Approx(j.at(0, 1)).epsilon(1e-14));
    }
}

TEST_CASE("jacobian matches central finite differences") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        ScheduleLogits l =
            make_logits({gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
        const Mat j = bounded_softmax_jacobian(l);
        const double h = 1e-6;
        for (int col = 0; col < 5; ++col) {
            ScheduleLogits hi = l, lo = l;
            hi.f[col] += h;
            lo.f[col] -= h;
            const ExposureSchedule up = bounded_softmax(hi);
            const ExposureSchedule dn = bounded_softmax(lo);
            for (int row = 0; row < 4; ++row) {
                const double fd = (up.t[row] - dn.t[row]) / (2.0 * h);
                const double err = std::abs(fd - j.at(row, col));
                // relative gate for meaningful entries, absolute gate at the
                // matrix scale for entries that are essentially zero
                const bool ok = err < 1e-6 * std::max(std::abs(fd), std::abs(j.at(row, col))) ||
                                err < 1e-9 * l.t_u;
                CHECK(ok);
            }
        }
    }
}

TEST_CASE("jacobian rows sum to zero") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat j = bounded_softmax_jacobian(
            make_logits({gauss(rng), gauss(rng), gauss(rng), gauss(rng), gauss(rng)}));
        for (int i = 0; i < 4; ++i) {
            double sum = 0.0;
            for (int c = 0; c < 5; ++c) sum += j.at(i, c);
            CHECK(std::abs(sum) < 1e-15);
        }
    }
}

TEST_CASE("timeline: paper bracket lands on the documented instants") {
    CameraConfig cfg;
    ExposureSchedule sched;
    sched.t = {8.0 / 1920, 24.0 / 1920, 40.0 / 1920, 56.0 / 1920};
    const CaptureTimeline tl = build_timeline(sched, cfg);
    const double expected_starts[] = {80, 95, 126, 173};
    const double expected_ends[] = {88, 119, 166, 229};
    for (int i = 0; i < 4; ++i) {
        CHECK(tl.starts[i] * 1920.0 == doctest::Approx(expected_starts[i]).epsilon(1e-12));
        CHECK(tl.ends[i] * 1920.0 == doctest::Approx(expected_ends[i]).epsilon(1e-12));
    }
}

TEST_CASE("timeline: first start is t0 exactly and intervals are consistent") {
    CameraConfig cfg;
    ExposureSchedule sched;
    sched.t = {cfg.t_min, 20.0 / 1920, 9.0 / 1920};
    const CaptureTimeline tl = build_timeline(sched, cfg);
    CHECK(tl.starts[0] == cfg.t0);
    for (std::size_t i = 0; i < sched.t.size(); ++i)
        CHECK(std::abs((tl.ends[i] - tl.starts[i]) - sched.t[i]) < 1e-15);
    for (std::size_t i = 0; i + 1 < sched.t.size(); ++i)
        CHECK(std::abs((tl.starts[i + 1] - tl.ends[i]) - cfg.delta) < 1e-15);
}

TEST_CASE("gains: documented example and coupling properties") {
    ExposureSchedule sched;
    sched.t = {32.0 / 1920};
    const auto g = gains_from_schedule(sched, 51200.0, 16.0 / 1920);
    CHECK(g[0] == doctest::Approx(25600.0).epsilon(1e-12));

    sched.t = {16.0 / 1920};
    CHECK(gains_from_schedule(sched, 51200.0, 16.0 / 1920)[0] ==
          doctest::Approx(51200.0).epsilon(1e-12));

    // halving the exposure doubles the gain; g_i * t_i is constant
    ExposureSchedule pair;
    pair.t = {24.0 / 1920, 12.0 / 1920};
    const auto gp = gains_from_schedule(pair, 7777.0, 16.0 / 1920);
    CHECK(gp[1] == doctest::Approx(2.0 * gp[0]).epsilon(1e-12));
    CHECK(gp[0] * pair.t[0] == doctest::Approx(gp[1] * pair.t[1]).epsilon(1e-12));

    ExposureSchedule bad;
    bad.t = {0.0};
    CHECK_THROWS(gains_from_schedule(bad, 100.0, 16.0 / 1920));
}

TEST_CASE("normalize_inputs: endpoints, scaling, clamping") {
    CameraConfig cfg;
    CHECK(normalize_inputs(51200.0, 0.0, cfg).first == doctest::Approx(0.0));
    CHECK(normalize_inputs(102400.0, 0.0, cfg).first == doctest::Approx(1.0));
    CHECK(normalize_inputs(76800.0, 10.0, cfg).second == doctest::Approx(0.5));
    CHECK(normalize_inputs(76800.0, 40.0, cfg).second == doctest::Approx(1.0));
    // out-of-range gains clamp rather than reject
    CHECK(normalize_inputs(100.0, 0.0, cfg).first == doctest::Approx(0.0));
    CHECK(normalize_inputs(2e5, 0.0, cfg).first == doctest::Approx(1.0));
    CHECK_THROWS(normalize_inputs(51200.0, -1.0, cfg));
    CHECK_THROWS(normalize_inputs(std::nan(""), 0.0, cfg));

    const ShotContext ctx = make_shot_context(76800.0, 5.0, cfg);
    CHECK(ctx.gain_norm == doctest::Approx(0.5));
    CHECK(ctx.motion_norm == doctest::Approx(0.25));
}

TEST_CASE("camera config validation") {
    CameraConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CameraConfig off = cfg;
    off.t0 = 80.5 / 1920.0;  // not a multiple of e_s
    CHECK_THROWS(off.validate());
    CameraConfig tight = cfg;
    tight.t0 = 40.0 / 1920.0;  // below 2*t_p + delta_p + delta
    CHECK_THROWS(tight.validate());
}

}  // TEST_SUITE
