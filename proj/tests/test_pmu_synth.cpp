#include "gencal/pmu_synth.hpp"

#include "gencal/config.hpp"
#include "gencal/truth_sim.hpp"
#include "test_helpers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

using namespace gencal;

namespace {

const TruthTrajectory& truth() {
    static const TruthTrajectory t = [] {
        Scenario s;
        s.params = gencal::testing::params();
        s.t_end = 2.0;
        return simulate(s);
    }();
    return t;
}

// A flat trajectory long enough for 1e4 frames at 60 fps.
TruthTrajectory flat_truth() {
    TruthTrajectory t;
    t.dt = 1.0 / 60.0;
    for (int k = 0; k < 10000; ++k) {
        TruthSample r;
        r.t = k * t.dt;
        r.v = std::polar(1.0, 0.3);
        r.i = std::polar(0.8, 0.1);
        r.f = 1.0;
        t.samples.push_back(r);
    }
    return t;
}

}  // namespace

TEST(Sigmas, FromDefaultTargets) {
    const NoiseSpec s = derive_sigmas({});
    EXPECT_NEAR(s.sigma_v, 0.0023570226039551583, 1e-17);
    EXPECT_EQ(s.sigma_i, s.sigma_v);
    EXPECT_NEAR(s.sigma_v_dot, s.sigma_v * 2.0 * kPi * 6.0, 1e-15);
    EXPECT_NEAR(s.sigma_f, std::sqrt(1e-5), 1e-18);
    EXPECT_NEAR(s.sigma_rocof, std::sqrt(1e-5), 1e-18);
}

TEST(Sigmas, ScaledByReferenceMagnitude) {
    NoiseTargets t;
    t.i_magnitude = 0.5;
    t.derivative_noise = false;
    const NoiseSpec s = derive_sigmas(t);
    EXPECT_NEAR(s.sigma_i, 0.5 * s.sigma_v, 1e-18);
    EXPECT_EQ(s.sigma_v_dot, 0.0);
    EXPECT_EQ(s.sigma_i_dot, 0.0);
}

TEST(Sigmas, NegativeTargetRejected) {
    NoiseTargets t;
    t.tve = -0.01;
    EXPECT_THROW(derive_sigmas(t), InvalidParameter);
}

TEST(Covariance, DefaultAugmented) {
    const Matrix r = measurement_covariance(derive_sigmas({}), ModelKind::Augmented);
    ASSERT_EQ(r.rows(), 4);
    EXPECT_NEAR(r(0, 0), 5.556e-6, 1e-9);
    EXPECT_NEAR(r(1, 1), 5.556e-6, 1e-9);
    EXPECT_NEAR(r(2, 2), 1e-5, 1e-18);
    EXPECT_NEAR(r(3, 3), 1e-5, 1e-18);
    EXPECT_EQ(r(0, 1), 0.0);
    EXPECT_EQ(measurement_covariance(derive_sigmas({}), ModelKind::Conventional).rows(), 2);
}

TEST(Covariance, ZeroSpecRejected) {
    const NoiseSpec s = derive_sigmas(NoiseTargets::noiseless());
    EXPECT_THROW(measurement_covariance(s, ModelKind::Augmented), InvalidParameter);
    EXPECT_THROW(measurement_covariance(s, ModelKind::Conventional), InvalidParameter);
}

TEST(Frames, NoiselessFramesEqualTruth) {
    const FrameStream f = sample_frames(truth(), 60.0, derive_sigmas(NoiseTargets::noiseless()), 1);
    ASSERT_EQ(f.size(), 121u);
    for (std::size_t n = 0; n < f.size(); ++n) {
        const TruthSample& r = truth().samples[n * 160];
        EXPECT_EQ(f[n].v, r.v);
        EXPECT_EQ(f[n].i, r.i);
        EXPECT_EQ(f[n].i_dot, r.i_dot);
        EXPECT_EQ(f[n].f_hz, r.f * 60.0);
        EXPECT_EQ(f[n].rocof_hzps, r.rocof * 60.0);
    }
}

TEST(Frames, NoiseStatisticsMatchTargets) {
    const TruthTrajectory t = flat_truth();
    const NoiseSpec spec = derive_sigmas({});
    const FrameStream f = sample_frames(t, 60.0, spec, 7);
    ASSERT_EQ(f.size(), 10000u);
    double tve2 = 0.0, f2 = 0.0, a2 = 0.0;
    int beyond = 0;
    for (const PmuFrame& p : f) {
        const double tve = std::abs(p.v - t.samples[0].v) / std::abs(t.samples[0].v);
        tve2 += tve * tve;
        if (tve > 0.01) ++beyond;
        f2 += std::pow(p.f_hz / 60.0 - 1.0, 2);
        a2 += std::pow(p.rocof_hzps / 60.0, 2);
    }
    EXPECT_NEAR(std::sqrt(tve2 / 1e4), 0.01 / 3.0, 0.05 * 0.01 / 3.0);
    EXPECT_NEAR(std::sqrt(f2 / 1e4), std::sqrt(1e-5), 0.05 * std::sqrt(1e-5));
    EXPECT_NEAR(std::sqrt(a2 / 1e4), std::sqrt(1e-5), 0.05 * std::sqrt(1e-5));
    EXPECT_LT(beyond, 10);
}

TEST(Frames, SeedDeterminesStream) {
    const NoiseSpec spec = derive_sigmas({});
    const FrameStream a = sample_frames(truth(), 60.0, spec, 3);
    const FrameStream b = sample_frames(truth(), 60.0, spec, 3);
    const FrameStream c = sample_frames(truth(), 60.0, spec, 4);
    for (std::size_t n = 0; n < a.size(); ++n) {
        EXPECT_EQ(a[n].v, b[n].v);
        EXPECT_EQ(a[n].f_hz, b[n].f_hz);
    }
    EXPECT_NE(a[5].v, c[5].v);
}

TEST(Frames, BadRateRejected) {
    EXPECT_THROW(sample_frames(truth(), 0.0, derive_sigmas({}), 1), InvalidParameter);
}

TEST(Interpolate, MidpointsAndEnds) {
    FrameStream f(2);
    f[0].t = 0.0;
    f[0].v = 1.0;
    f[0].f_hz = 60.0;
    f[1].t = 0.1;
    f[1].v = Complex(0.0, 1.0);
    f[1].f_hz = 61.0;
    const FrameStream g = interpolate(f, 2);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_NEAR(g[1].t, 0.05, 1e-17);
    EXPECT_EQ(g[1].v, Complex(0.5, 0.5));
    EXPECT_EQ(g[1].f_hz, 60.5);
    EXPECT_EQ(g[2].v, f[1].v);
    EXPECT_EQ(interpolate(f, 1).size(), 2u);
    EXPECT_THROW(interpolate(f, 0), InvalidParameter);
}

TEST(Interpolate, ErrorBoundedByCurvature) {
    // Linear interpolation of sin(w t) errs by at most h^2 w^2 / 8.
    const double w = 2.0 * kPi * 1.5, h = 1.0 / 60.0;
    FrameStream f;
    for (int n = 0; n <= 60; ++n) {
        PmuFrame p;
        p.t = n * h;
        p.f_hz = std::sin(w * p.t);
        f.push_back(p);
    }
    double worst = 0.0;
    for (const PmuFrame& p : interpolate(f, 5)) worst = std::max(worst, std::abs(p.f_hz - std::sin(w * p.t)));
    EXPECT_LE(worst, h * h * w * w / 8.0 + 1e-15);
    EXPECT_GT(worst, 0.0);
}

TEST(FrameCsv, RoundTripIsExact) {
    const FrameStream f = sample_frames(truth(), 30.0, derive_sigmas({}), 11);
    const auto path = std::filesystem::temp_directory_path() / "gencal_frames_test.csv";
    write_frames_csv(f, path);
    const FrameStream g = read_frames_csv(path);
    std::filesystem::remove(path);
    ASSERT_EQ(g.size(), f.size());
    for (std::size_t n = 0; n < f.size(); ++n) {
        EXPECT_EQ(g[n].t, f[n].t);
        EXPECT_EQ(g[n].v, f[n].v);
        EXPECT_EQ(g[n].i_dot, f[n].i_dot);
        EXPECT_EQ(g[n].rocof_hzps, f[n].rocof_hzps);
    }
}

TEST(NoiseConfig, RoundTrip) {
    NoiseTargets t;
    t.tve = 0.02;
    t.i_magnitude = 0.0;
    t.derivative_noise = false;
    ConfigDocument doc;
    write_noise_targets(t, doc);
    const NoiseTargets back = read_noise_targets(ConfigDocument::parse(doc.to_string()));
    EXPECT_EQ(back.tve, 0.02);
    EXPECT_EQ(back.i_magnitude, 0.0);
    EXPECT_FALSE(back.derivative_noise);
}
