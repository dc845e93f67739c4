#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "llsfreq/error.hpp"
#include "llsfreq/signal.hpp"
#include "oracles.hpp"

using namespace llsfreq;

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

} // namespace

TEST(SnrConversion, UnitAmplitudeAt20dB) {
    EXPECT_NEAR(snr_to_noise_sigma(1.0, 20.0), std::sqrt(1.0 / 200.0), 1e-15);
    EXPECT_NEAR(snr_to_noise_sigma(1.0, 20.0), 0.070711, 5e-7);
}

TEST(SnrConversion, ZeroDbIsUnitSnr) {
    EXPECT_NEAR(snr_to_noise_sigma(2.0, 0.0), std::sqrt(2.0), 1e-15);
}

TEST(SnrConversion, RoundTrip) {
    for (double b : {0.3, 1.0, 7.5})
        for (double db : {-10.0, 0.0, 13.0, 27.0, 60.0}) {
            const double s = snr_to_noise_sigma(b, db);
            EXPECT_NEAR(noise_sigma_to_snr_db(b, s), db, 1e-12 * std::max(1.0, std::abs(db)));
            EXPECT_NEAR(NoiseSpec::from_snr_db(b, db).snr(b), snr_db_to_linear(db),
                        1e-12 * snr_db_to_linear(db));
        }
}

TEST(SnrConversion, RejectsBadInputs) {
    EXPECT_EQ(code_of([] { snr_to_noise_sigma(0.0, 20.0); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { snr_to_noise_sigma(-1.0, 20.0); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { snr_to_noise_sigma(1.0, std::numeric_limits<double>::infinity()); }),
              Errc::invalid_argument);
    EXPECT_EQ(code_of([] { snr_to_noise_sigma(1.0, std::nan("")); }), Errc::invalid_argument);
}

TEST(SnrConversion, GeneratedNoiseMatchesSigmaAt27dB) {
    const double sigma = snr_to_noise_sigma(1.0, 27.0);
    EXPECT_NEAR(sigma, 0.0315853, 1e-7);
    NoiseSource src(stream_seed(99, 0));
    std::vector<double> v(1'000'000);
    for (double& x : v) x = src.gaussian(sigma);
    EXPECT_NEAR(oracle::sample_variance(v) / (sigma * sigma), 1.0, 0.01);
}

TEST(ToneParams, QuadratureDecomposition) {
    for (double theta : {-3.0, -0.4, 0.0, 1.1, 3.1}) {
        const auto t = ToneParams::from_hz(2.5, 1000.0, theta);
        EXPECT_NEAR(t.beta_sin() * t.beta_sin() + t.beta_cos() * t.beta_cos(), 2.5 * 2.5, 1e-12);
        EXPECT_DOUBLE_EQ(t.beta_sin(), 2.5 * std::cos(theta));
        EXPECT_DOUBLE_EQ(t.beta_cos(), 2.5 * std::sin(theta));
    }
}

TEST(ToneParams, PhaseIsWrapped) {
    const auto t = ToneParams::from_hz(1.0, 10.0, 3.0 * std::numbers::pi);
    EXPECT_NEAR(t.phase, std::numbers::pi, 1e-12);
    EXPECT_GT(t.phase, -std::numbers::pi);
}

TEST(ToneParams, Validation) {
    EXPECT_EQ(code_of([] { ToneParams::from_hz(0.0, 10.0, 0.0).validate(); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { ToneParams::from_hz(1.0, -10.0, 0.0).validate(); }), Errc::invalid_argument);
}

TEST(GenerateTone, NoiselessSamples) {
    const auto tone = ToneParams::from_hz(1.0, 1000.0, 0.0);
    const auto s = generate_noisy_tone_samples(tone, NoiseSpec::noiseless(), 10e3, 10, 5);
    ASSERT_EQ(s.size(), 10u);
    EXPECT_NEAR(s[0], 0.0, 1e-15);
    EXPECT_NEAR(s[1], std::sin(0.2 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(s[1], 0.587785, 1e-6);
}

TEST(GenerateTone, QuadratureIdentity) {
    const auto tone = ToneParams::from_hz(1.7, 12345.0, 0.77);
    const auto s = generate_noisy_tone(tone, NoiseSpec::noiseless(), 1e6, 2e-3, 1, 0.25);
    for (std::size_t i = 0; i < s.size(); i += 37) {
        const double t = s.time_at(i);
        const double model = tone.beta_sin() * std::sin(tone.omega * t) + tone.beta_cos() * std::cos(tone.omega * t);
        EXPECT_NEAR(s[i], model, 1e-11);
    }
}

TEST(GenerateTone, DurationAndTimestamps) {
    const auto tone = ToneParams::from_hz(1.0, 1000.0, 0.0);
    const auto s = generate_noisy_tone(tone, NoiseSpec::noiseless(), 10e6, 1e-3, 1, 2.0);
    EXPECT_EQ(s.size(), 10000u);
    EXPECT_DOUBLE_EQ(s.time_at(0), 2.0);
    EXPECT_DOUBLE_EQ(s.time_at(9999), 2.0 + 9999.0 / 10e6);
    EXPECT_EQ(samples_for_duration(0.6e-3, 10e6), 6000u);
    EXPECT_EQ(samples_for_duration(0.2e-3, 10e6), 2000u);
}

TEST(GenerateTone, ZeroLengthRejected) {
    const auto tone = ToneParams::from_hz(1.0, 1000.0, 0.0);
    EXPECT_EQ(code_of([&] { generate_noisy_tone(tone, NoiseSpec::noiseless(), 10e3, 0.0, 1); }),
              Errc::invalid_argument);
    EXPECT_EQ(code_of([&] { generate_noisy_tone_samples(tone, NoiseSpec::noiseless(), 10e3, 0, 1); }),
              Errc::invalid_argument);
}

TEST(GenerateTone, SeedDeterminism) {
    const auto tone = ToneParams::from_hz(1.0, 1000.0, 0.3);
    const NoiseSpec noise{0.5};
    const auto a = generate_noisy_tone_samples(tone, noise, 1e5, 500, 42);
    const auto b = generate_noisy_tone_samples(tone, noise, 1e5, 500, 42);
    const auto c = generate_noisy_tone_samples(tone, noise, 1e5, 500, 43);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i], b[i]);
        differs |= a[i] != c[i];
    }
    EXPECT_TRUE(differs);
}

TEST(GenerateTone, NoiseChannelVariance) {
    const auto tone = ToneParams::from_hz(1.0, 1234.0, 0.1);
    const auto noisy = generate_noisy_tone_samples(tone, NoiseSpec{0.1}, 1e6, 1'000'000, 7);
    const auto clean = generate_noisy_tone_samples(tone, NoiseSpec::noiseless(), 1e6, 1'000'000, 7);
    std::vector<double> eps(noisy.size());
    for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = noisy[i] - clean[i];
    EXPECT_NEAR(oracle::sample_variance(eps), 0.01, 0.01 * 0.01);
}

TEST(GenerateTone, NoiselessPowerIsHalfAmplitudeSquared) {
    // 2000 whole cycles.
    const auto tone = ToneParams::from_hz(3.0, 1000.0, 0.4);
    const auto s = generate_noisy_tone(tone, NoiseSpec::noiseless(), 100e3, 2.0, 1);
    std::vector<double> v(s.samples().begin(), s.samples().end());
    EXPECT_NEAR(oracle::sample_variance(v) / 4.5, 1.0, 1e-3);
}

TEST(Seeding, StreamsAreDistinctAndStable) {
    EXPECT_EQ(stream_seed(1, 0), stream_seed(1, 0));
    EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
    EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
    // Adjacent trial streams should be uncorrelated.
    NoiseSource a(stream_seed(5, 10)), b(stream_seed(5, 11));
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < 200000; ++i) {
        const double x = a.gaussian(1.0), y = b.gaussian(1.0);
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 0.01);
}

TEST(SampledSignal, Invariants) {
    EXPECT_EQ(code_of([] { SampledSignal(1.0, 0.0, {}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { SampledSignal(0.0, 0.0, {1.0}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { SampledSignal(1.0, 0.0, {1.0, std::nan("")}); }), Errc::invalid_argument);
    const SampledSignal s(4.0, 1.0, {0, 1, 2, 3, 4, 5});
    const auto sl = s.slice(2, 3);
    EXPECT_EQ(sl.size(), 3u);
    EXPECT_DOUBLE_EQ(sl.start_time(), 1.5);
    EXPECT_DOUBLE_EQ(sl[0], 2.0);
    EXPECT_EQ(code_of([&] { s.slice(5, 3); }), Errc::invalid_argument);
}

TEST(ToneStep, PhaseContinuousAtTheStep) {
    ToneStep st{1.0, two_pi * 1000.0, two_pi * 1500.0, 2e-3, 0.2};
    const auto s = generate_tone_step(st, NoiseSpec::noiseless(), 1e6, 5000, 1);
    const std::size_t k = 2000;
    // Before: exact tone. After: same phase at the step, new frequency.
    EXPECT_NEAR(s[k - 1], std::sin(st.omega_before * s.time_at(k - 1) + 0.2), 1e-12);
    const double phase_at_step = st.omega_before * 2e-3 + 0.2;
    EXPECT_NEAR(s[k + 10], std::sin(phase_at_step + st.omega_after * (s.time_at(k + 10) - 2e-3)), 1e-9);
}
