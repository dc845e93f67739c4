#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "llsfreq/angle.hpp"
#include "llsfreq/error.hpp"
#include "llsfreq/phase_estimator.hpp"
#include "llsfreq/signal.hpp"
#include "llsfreq/theory.hpp"
#include "oracles.hpp"

using namespace llsfreq;
constexpr double pi = std::numbers::pi;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no llsfreq::Error thrown";
    return Errc::io_error;
}

std::vector<double> tone_window(double omega, double phase, double fs, std::size_t n,
                                double amplitude = 1.0) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = amplitude * std::sin(omega * i / fs + phase);
    return y;
}

} // namespace

TEST(ReferenceConfig, RoundsWindowLength) {
    const auto c = make_reference_config(two_pi * 320e3, optimal_window_fraction, 10e6);
    EXPECT_EQ(c.window_length, 22u);
    EXPECT_NEAR(c.q_eff, 0.704, 1e-12);
    EXPECT_LE(std::abs(c.q_eff - c.q), c.omega_r / (4 * pi * c.sample_rate) + 1e-15);
}

TEST(ReferenceConfig, Preconditions) {
    EXPECT_EQ(code_of([] { PhaseWindowSolver::build(two_pi * 1e6, 0.1, 10e6); }), Errc::window_too_short);
    EXPECT_EQ(code_of([] { PhaseWindowSolver::build(two_pi * 6e6, 5.0, 10e6); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { PhaseWindowSolver::build(-1.0, 1.0, 10e6); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { PhaseWindowSolver::build(two_pi * 1e3, 0.0, 10e6); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { PhaseWindowSolver::build(two_pi * 1e3, 1.0, 0.0); }), Errc::invalid_argument);
}

TEST(PhaseWindowSolver, DegenerateGramIsRejected) {
    // Two samples spanning a 1e-7 fraction of a cycle: the sin column is ~0.
    EXPECT_EQ(code_of([] { PhaseWindowSolver::with_length(two_pi * 1.0, 2, 10e6); }),
              Errc::degenerate_window);
}

TEST(PhaseWindowSolver, GramApproachesIntegralForManyCycles) {
    const auto s = PhaseWindowSolver::build(two_pi * 100e3, 5.0, 10e6);
    ASSERT_EQ(s.window_length(), 500u);
    const double half = 10e6 * 50e-6 / 2.0; // 250
    EXPECT_NEAR(s.gram().a11, half, 0.01 * half);
    EXPECT_NEAR(s.gram().a22, half, 0.01 * half);
    EXPECT_LT(std::abs(s.gram().a12), 0.01 * half);
}

TEST(PhaseWindowSolver, GramMatchesDirectSumsAndInverts) {
    for (double q : {0.3, 0.5, optimal_window_fraction, 1.0, 3.3}) {
        const auto s = PhaseWindowSolver::build(two_pi * 320e3, q, 10e6);
        long double ss = 0, sc = 0, cc = 0;
        for (std::size_t i = 0; i < s.window_length(); ++i) {
            const long double a = two_pi * 320e3 * static_cast<long double>(i) / 10e6;
            ss += std::sin(a) * std::sin(a);
            sc += std::sin(a) * std::cos(a);
            cc += std::cos(a) * std::cos(a);
        }
        EXPECT_NEAR(s.gram().a11, static_cast<double>(ss), 1e-10);
        EXPECT_NEAR(s.gram().a12, static_cast<double>(sc), 1e-10);
        EXPECT_NEAR(s.gram().a22, static_cast<double>(cc), 1e-10);
        EXPECT_TRUE(s.gram().symmetric());
        const auto ev = s.gram().symmetric_eigenvalues();
        EXPECT_GT(ev[0], 0.0);
        EXPECT_LT((s.inverse_gram() * s.gram()).max_abs_diff(Mat2::identity()), 1e-10);
    }
}

TEST(PhaseWindowSolver, MatchedNoiselessPhase) {
    const double wr = two_pi * 50e3;
    const auto s = PhaseWindowSolver::build(wr, 20.0, 10e6);
    const auto y = tone_window(wr, pi / 4, 10e6, s.window_length());
    EXPECT_NEAR(s.estimate(y, 0.0).phase, pi / 4, 1e-9);
}

TEST(PhaseWindowSolver, AgreesWithDirectSolveOnRandomWindows) {
    NoiseSource rng(stream_seed(2024, 0));
    for (int trial = 0; trial < 120; ++trial) {
        const double fs = rng.uniform(1e6, 20e6);
        const double fr = rng.uniform(1e3, fs / 5.0);
        const double q = rng.uniform(0.3, 3.0);
        const auto s = PhaseWindowSolver::build(two_pi * fr, q, fs);
        std::vector<double> y(s.window_length());
        const double theta = rng.uniform(-pi, pi);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = std::sin(two_pi * fr * i / fs + theta) + rng.gaussian(0.3);

        const auto ref = oracle::sin_cos_fit(y, two_pi * fr, fs);
        const auto fit = s.solve(s.project(y));
        const double scale = std::max(1.0, std::hypot(ref[0], ref[1]));
        EXPECT_NEAR(fit.b_sin, ref[0], 1e-9 * scale);
        EXPECT_NEAR(fit.b_cos, ref[1], 1e-9 * scale);

        PhaseAccumulator acc(s);
        bool done = false;
        for (double v : y) done = acc.push(v);
        EXPECT_TRUE(done);
        const auto streamed = s.solve(acc.sums());
        EXPECT_NEAR(streamed.b_sin, ref[0], 1e-9 * scale);
        EXPECT_NEAR(streamed.b_cos, ref[1], 1e-9 * scale);
        EXPECT_EQ(s.estimate(y, 0.0).phase, phase_from_fit(fit));
    }
}

TEST(PhaseWindowSolver, MatchesClosedFormAtHighOversampling) {
    const double w = two_pi * 20e3, wr = two_pi * 16e3, fs = 100 * 16e3;
    const auto s = PhaseWindowSolver::build(wr, optimal_window_fraction, fs);
    const double q_eff = s.config().q_eff;
    for (int k = 0; k < 64; ++k) {
        const double phi = -pi + two_pi * k / 64.0;
        const auto y = tone_window(w, phi, fs, s.window_length());
        const double est = s.estimate(y, 0.0).phase;
        EXPECT_LT(oracle::angle_distance(est, expected_phase(w, wr, q_eff, phi)), 0.01) << phi;
    }
}

TEST(PhaseWindowSolver, PhaseEquivarianceAndAmplitudeInvariance) {
    const double wr = two_pi * 100e3, fs = 10e6;
    const auto s = PhaseWindowSolver::build(wr, optimal_window_fraction, fs);
    const double base = s.estimate(tone_window(wr, 0.3, fs, s.window_length()), 0.0).phase;
    for (double delta : {0.5, 2.0, 4.0, -2.5}) {
        const double shifted = s.estimate(tone_window(wr, 0.3 + delta, fs, s.window_length()), 0.0).phase;
        EXPECT_LT(oracle::angle_distance(shifted - base, delta), 1e-9);
    }
    const auto y = tone_window(two_pi * 103e3, 1.0, fs, s.window_length());
    const auto fit = s.solve(s.project(y));
    for (double c : {0.01, 3.0, 1e4}) {
        auto scaled = y;
        for (double& v : scaled) v *= c;
        const auto fc = s.solve(s.project(scaled));
        EXPECT_NEAR(fc.b_sin, c * fit.b_sin, 1e-12 * c);
        EXPECT_NEAR(fc.b_cos, c * fit.b_cos, 1e-12 * c);
        EXPECT_NEAR(phase_from_fit(fc), phase_from_fit(fit), 1e-12);
    }
}

TEST(PhaseWindowSolver, EmpiricalPhaseVarianceMatchesPrediction) {
    const double wr = two_pi * 100e3, fs = 10e6, snr_db = 20.0;
    const auto s = PhaseWindowSolver::build(wr, 2.0, fs);
    const double sigma = snr_to_noise_sigma(1.0, snr_db);
    NoiseSource rng(stream_seed(7, 3));
    const auto clean = tone_window(wr, 0.4, fs, s.window_length());
    std::vector<double> phases;
    for (int k = 0; k < 10000; ++k) {
        auto y = clean;
        for (double& v : y) v += rng.gaussian(sigma);
        phases.push_back(s.estimate(y, 0.0).phase);
    }
    const double predicted = predicted_phase_variance(fs, s.config().window_duration(), snr_db_to_linear(snr_db));
    EXPECT_NEAR(oracle::sample_variance(phases) / predicted, 1.0, 0.10);
}

TEST(PhaseWindowSolver, ErrorPaths) {
    const auto s = PhaseWindowSolver::build(two_pi * 100e3, 1.0, 10e6);
    std::vector<double> wrong(s.window_length() + 1, 1.0);
    EXPECT_EQ(code_of([&] { s.project(wrong); }), Errc::invalid_argument);
    std::vector<double> zeros(s.window_length(), 0.0);
    EXPECT_EQ(code_of([&] { s.estimate(zeros, 0.0); }), Errc::undefined_phase);
    EXPECT_EQ(code_of([] { phase_from_fit({0.0, 0.0}); }), Errc::undefined_phase);
}

TEST(PhaseWindowSolver, QuadrantAwareRange) {
    EXPECT_DOUBLE_EQ(phase_from_fit({-1.0, 0.0}), pi);
    EXPECT_DOUBLE_EQ(phase_from_fit({-1.0, -0.0}), pi);
    EXPECT_NEAR(phase_from_fit({-1.0, -1.0}), -3 * pi / 4, 1e-15);
}
