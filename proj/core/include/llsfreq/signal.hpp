#ifndef LLSFREQ_SIGNAL_HPP
#define LLSFREQ_SIGNAL_HPP

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace llsfreq {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad(double hz) { return two_pi * hz; }
constexpr double rad_to_hz(double rad_per_s) { return rad_per_s / two_pi; }

/// A pure tone B*sin(w*t + theta). The quadrature form used by the fits is
/// beta_sin*sin(w*t) + beta_cos*cos(w*t).
struct ToneParams {
    double amplitude = 1.0; ///< B, signal units, > 0
    double omega = 0.0;     ///< rad/s, > 0
    double phase = 0.0;     ///< rad

    static ToneParams from_hz(double amplitude, double frequency_hz, double phase);

    double beta_sin() const;
    double beta_cos() const;
    void validate() const;
};

/// White Gaussian noise level. sigma == 0 means noiseless.
struct NoiseSpec {
    double sigma = 0.0;

    static NoiseSpec noiseless() { return {}; }
    static NoiseSpec from_snr_db(double amplitude, double snr_db);

    bool is_noiseless() const { return sigma == 0.0; }
    /// Linear SNR (B^2/2)/sigma^2; infinite when noiseless.
    double snr(double amplitude) const;
};

/// sigma = sqrt(B^2 / (2 * 10^(snr_db/10)))
double snr_to_noise_sigma(double amplitude, double snr_db);
double noise_sigma_to_snr_db(double amplitude, double sigma);
double snr_db_to_linear(double snr_db);

/// Uniformly sampled real record. Sample i is taken at start_time + i/sample_rate;
/// the timestamp is always recomputed from the index, never accumulated.
class SampledSignal {
public:
    SampledSignal(double sample_rate, double start_time, std::vector<double> samples);

    double sample_rate() const { return sample_rate_; }
    double start_time() const { return start_time_; }
    std::size_t size() const { return samples_.size(); }
    double duration() const { return static_cast<double>(samples_.size()) / sample_rate_; }
    double time_at(std::size_t i) const {
        return start_time_ + static_cast<double>(i) / sample_rate_;
    }

    std::span<const double> samples() const { return samples_; }
    double operator[](std::size_t i) const { return samples_[i]; }

    /// Copy of samples [first, first + count) with the matching start time.
    SampledSignal slice(std::size_t first, std::size_t count) const;

private:
    double sample_rate_;
    double start_time_;
    std::vector<double> samples_;
};

// Seeding scheme: every trial draws from its own std::mt19937_64 whose seed is
// splitmix64(root_seed + (index + 1) * 0x9E3779B97F4A7C15). Neighbouring
// indices therefore land on decorrelated generator states, and any trial can
// be regenerated in isolation from (root_seed, index).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t root_seed, std::uint64_t index);

/// Gaussian draws use std::normal_distribution over std::mt19937_64. The
/// sequence is fixed per seed for a given standard library build.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

    double gaussian(double sigma);
    double uniform(double lo, double hi);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Number of samples covered by `duration` at `sample_rate` (floor, with a
/// relative guard so 1e-3 s at 10 MHz yields exactly 10000).
std::size_t samples_for_duration(double duration, double sample_rate);

SampledSignal generate_noisy_tone(const ToneParams& tone, const NoiseSpec& noise,
                                  double sample_rate, double duration, std::uint64_t seed,
                                  double start_time = 0.0);

SampledSignal generate_noisy_tone_samples(const ToneParams& tone, const NoiseSpec& noise,
                                          double sample_rate, std::size_t count,
                                          std::uint64_t seed, double start_time = 0.0);

/// Phase-continuous frequency step: omega_before until step_time, omega_after
/// afterwards. Used for the tracking scenarios.
struct ToneStep {
    double amplitude = 1.0;
    double omega_before = 0.0;
    double omega_after = 0.0;
    double step_time = 0.0;
    double phase = 0.0;
};

SampledSignal generate_tone_step(const ToneStep& step, const NoiseSpec& noise,
                                 double sample_rate, std::size_t count, std::uint64_t seed);

} // namespace llsfreq

#endif
