#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "llsfreq/error.hpp"
#include "llsfreq/estimator.hpp"
#include "llsfreq/signal.hpp"
#include "oracles.hpp"

using namespace llsfreq;

namespace {

SampledSignal tone(double f, double theta, double fs, std::size_t count, double snr_db = NAN,
                   std::uint64_t seed = 1, double t0 = 0.0) {
    const NoiseSpec noise = std::isnan(snr_db) ? NoiseSpec::noiseless() : NoiseSpec::from_snr_db(1.0, snr_db);
    return generate_noisy_tone_samples(ToneParams::from_hz(1.0, f, theta), noise, fs, count, seed, t0);
}

} // namespace

TEST(Batch, MatchedNoiselessIsExact) {
    const auto cfg = EstimatorConfig::from_hz(320e3, 10e6, 500e-6);
    const auto s = tone(320e3, 0.4, 10e6, 5000);
    const auto e = estimate_frequency_batch(s, cfg);
    EXPECT_LT(std::abs(e.frequency_hz - 320e3), 1e-6);
    EXPECT_EQ(e.frequency_hz, e.omega / two_pi);
    EXPECT_EQ(e.diagnostics.window_length, 22u);
    EXPECT_EQ(e.diagnostics.windows_used, 227u);
    EXPECT_EQ(e.diagnostics.samples_used, 227u * 22u);
    EXPECT_EQ(e.diagnostics.samples_discarded, 5000u - 227u * 22u);
    EXPECT_DOUBLE_EQ(e.time, s.time_at(227 * 22 - 1));
}

TEST(Batch, OnePercentOffsetBiasIsSmall) {
    const auto cfg = EstimatorConfig::from_hz(32e3, 10e6, 500e-6);
    std::vector<double> bias;
    for (int k = 0; k < 64; ++k) {
        const auto plan = plan_block(cfg, cfg.omega_r);
        const auto s = tone(32320.0, two_pi * k / 64.0, 10e6, plan.samples());
        bias.push_back(estimate_frequency_batch(s, cfg).frequency_hz - 32320.0);
    }
    double mean = 0;
    for (double b : bias) mean += b;
    mean /= bias.size();
    EXPECT_LE(std::abs(mean), 0.1);
    EXPECT_LT(oracle::sample_variance(bias), 1.1e-4);
}

TEST(Batch, NoiselessBiasWithinTenthOfHertzAtBiasTablePoints) {
    const double rows[][2] = {{32320, 32e3}, {31680, 32e3}, {323200, 320e3}, {352000, 320e3}, {288000, 320e3}};
    for (const auto& r : rows) {
        const auto cfg = EstimatorConfig::from_hz(r[1], 10e6, 500e-6);
        const auto plan = plan_block(cfg, cfg.omega_r);
        for (int k = 0; k < 16; ++k) {
            const auto s = tone(r[0], two_pi * k / 16.0, 10e6, plan.samples());
            EXPECT_LE(std::abs(estimate_frequency_batch(s, cfg).frequency_hz - r[0]), 0.1) << r[0];
        }
    }
}

TEST(Batch, Errors) {
    const auto s = tone(100e3, 0.0, 10e6, 100);
    auto cfg = EstimatorConfig::from_hz(100e3, 10e6, 1e-3);
    // n = 71 samples, only one full window.
    try {
        estimate_frequency_batch(s, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::insufficient_data);
    }
    cfg.sample_rate = 5e6;
    EXPECT_THROW(estimate_frequency_batch(tone(100e3, 0.0, 10e6, 1000), cfg), Error);
    cfg = EstimatorConfig::from_hz(100e3, 10e6, std::nullopt);
    EXPECT_THROW(plan_block(cfg, cfg.omega_r), Error);
    cfg.block_duration = 1e-6; // N = 0
    EXPECT_THROW(plan_block(cfg, cfg.omega_r), Error);
}

TEST(Batch, WholeRecordWhenNoBlockSize) {
    const auto s = tone(200e3, 1.0, 10e6, 3000);
    auto cfg = EstimatorConfig::from_hz(195e3, 0.0, std::nullopt);
    const auto e = estimate_frequency_batch(s, cfg);
    EXPECT_EQ(e.diagnostics.windows_used, 3000u / e.diagnostics.window_length);
    EXPECT_NEAR(e.frequency_hz, 200e3, 1.0);
}

TEST(Batch, TrackingRangeDiagnostics) {
    const auto s = tone(250e3, 0.0, 10e6, 20000);
    auto cfg = EstimatorConfig::from_hz(200e3, 10e6, 2e-3);
    cfg.snr = 100.0;
    const auto e = estimate_frequency_batch(s, cfg);
    EXPECT_NEAR(e.diagnostics.tracking_half_range_hz, 0.5 * 10e6 / e.diagnostics.window_length, 1e-9);
    EXPECT_FALSE(e.diagnostics.tracking_range_exceeded);
    ASSERT_TRUE(e.diagnostics.predicted_variance_hz2.has_value());
    EXPECT_GT(*e.diagnostics.predicted_variance_hz2, 0.0);

    // Offset beyond F_phi/2 aliases and is flagged.
    const auto far = tone(200e3 + 0.8 * 10e6 / 35.0, 0.0, 10e6, 20000);
    const auto e2 = estimate_frequency_batch(far, cfg);
    EXPECT_TRUE(e2.diagnostics.tracking_range_exceeded || std::abs(e2.frequency_hz - (200e3 + 0.8 * 10e6 / 35.0)) > 1e3);
}

TEST(Tracker, MatchesBatchOnRandomConfigurations) {
    NoiseSource rng(stream_seed(808, 0));
    for (int trial = 0; trial < 120; ++trial) {
        const double fs = rng.uniform(1e6, 10e6);
        const double fr = rng.uniform(10e3, fs / 8.0);
        const double f = fr * rng.uniform(0.92, 1.08);
        const double q = rng.uniform(0.4, 2.0);
        const double t0 = rng.uniform(0.0, 3.0);
        auto cfg = EstimatorConfig::from_hz(fr, fs, std::nullopt, q);
        cfg.block_windows = 2 + static_cast<std::size_t>(rng.uniform(0.0, 60.0));
        cfg.retune = trial % 3 == 0;
        const auto plan = plan_block(cfg, cfg.omega_r);
        const std::size_t count = plan.samples() * 3 + 17;
        const auto s = tone(f, rng.uniform(-3.0, 3.0), fs, count, 30.0, stream_seed(808, trial + 1), t0);

        const auto blocks = estimate_frequency_blocks(s, cfg);
        FrequencyTracker tracker(cfg, t0);
        std::vector<FrequencyEstimate> streamed;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (auto e = tracker.push(s[i])) streamed.push_back(*e);

        ASSERT_EQ(streamed.size(), blocks.size()) << trial;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            EXPECT_NEAR(streamed[b].omega, blocks[b].omega, 1e-9 * std::abs(blocks[b].omega)) << trial;
            EXPECT_NEAR(streamed[b].time, blocks[b].time, 1e-9);
        }
        const auto first = estimate_frequency_batch(s.slice(0, plan.samples()), cfg);
        EXPECT_NEAR(first.omega, blocks.front().omega, 1e-9 * std::abs(first.omega));
    }
}

TEST(Tracker, CadenceAndTimestamps) {
    auto cfg = EstimatorConfig::from_hz(100e3, 10e6, 0.5e-3);
    FrequencyTracker tracker(cfg, 1.0);
    const std::size_t block = tracker.plan().samples();
    const auto s = tone(101e3, 0.0, 10e6, block * 4 + 5, NAN, 1, 1.0);
    std::vector<std::size_t> emitted_at;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (auto e = tracker.push(s[i])) {
            emitted_at.push_back(i);
            EXPECT_DOUBLE_EQ(e->time, s.time_at(i));
        }
    ASSERT_EQ(emitted_at.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(emitted_at[k], (k + 1) * block - 1);
    EXPECT_EQ(tracker.samples_seen(), s.size());
}

TEST(Tracker, ZeroWindowsAreCountedNotThrown) {
    auto cfg = EstimatorConfig::from_hz(100e3, 10e6, 0.2e-3);
    FrequencyTracker tracker(cfg);
    std::vector<double> zeros(tracker.plan().samples(), 0.0);
    const auto out = tracker.push(zeros);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].diagnostics.undefined_windows, tracker.plan().windows);
}

TEST(Tracker, RetuneMovesReference) {
    auto cfg = EstimatorConfig::from_hz(100e3, 10e6, 0.5e-3);
    cfg.retune = true;
    FrequencyTracker tracker(cfg);
    const auto s = tone(104e3, 0.2, 10e6, tracker.plan().samples() * 3);
    const auto out = tracker.push(s.samples());
    ASSERT_EQ(out.size(), 3u);
    EXPECT_NEAR(rad_to_hz(tracker.omega_r()), 104e3, 1.0);
    EXPECT_NEAR(out[2].frequency_hz, 104e3, 0.05);
}

TEST(Tracker, JumpIsTrackedWithinOneBlock) {
    const double fs = 10e6, t_n_block = 1e-3, jump = 5e-3;
    ToneStep step{1.0, two_pi * 400e3, two_pi * 405e3, jump, 0.3};
    const auto s = generate_tone_step(step, NoiseSpec::from_snr_db(1.0, 27.0), fs, 100000, 77);
    FrequencyTracker tracker(EstimatorConfig::from_hz(400e3, fs, t_n_block));
    const double block = static_cast<double>(tracker.plan().samples()) / fs;
    bool checked = false;
    for (const auto& e : tracker.push(s.samples())) {
        const double start = e.time - block + 1.0 / fs;
        if (start < jump - 0.5 / fs) {
            if (e.time < jump) EXPECT_NEAR(e.frequency_hz, 400e3, 5.0);
            continue;
        }
        EXPECT_NEAR(e.frequency_hz, 405e3, 5.0);
        checked = true;
    }
    EXPECT_TRUE(checked);
}

TEST(Batch, VarianceScalingLaws) {
    auto variance = [](double snr_db, double t_n_block, std::uint64_t seed) {
        const double fs = 10e6;
        auto cfg = EstimatorConfig::from_hz(505e3, fs, t_n_block);
        const std::size_t count = plan_block(cfg, cfg.omega_r).samples();
        std::vector<double> est;
        for (int k = 0; k < 2000; ++k) {
            const auto trial = stream_seed(seed, k);
            est.push_back(estimate_frequency_batch(tone(500e3, std::fmod(k * 0.7, 6.28) - 3.14, fs, count, snr_db, trial), cfg).frequency_hz);
        }
        return oracle::sample_variance(est);
    };
    const double base = variance(20.0, 0.4e-3, 1);
    const double snr4 = variance(20.0 + 10.0 * std::log10(4.0), 0.4e-3, 2);
    const double longer = variance(20.0, 0.8e-3, 3);
    EXPECT_NEAR(base / snr4, 4.0, 0.15 * 4.0);
    EXPECT_NEAR(base / longer, 8.0, 0.15 * 8.0);
}
