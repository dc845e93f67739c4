#include "llsfreq/signal.hpp"

#include <cmath>
#include <string>

#include "llsfreq/angle.hpp"
#include "llsfreq/error.hpp"

namespace llsfreq {

ToneParams ToneParams::from_hz(double amplitude, double frequency_hz, double phase) {
    ToneParams t{amplitude, hz_to_rad(frequency_hz), wrap_phase(phase)};
    t.validate();
    return t;
}

double ToneParams::beta_sin() const { return amplitude * std::cos(phase); }
double ToneParams::beta_cos() const { return amplitude * std::sin(phase); }

void ToneParams::validate() const {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        raise(Errc::invalid_argument, "tone amplitude must be positive and finite");
    if (!(omega > 0.0) || !std::isfinite(omega))
        raise(Errc::invalid_argument, "tone frequency must be positive and finite");
    if (!std::isfinite(phase)) raise(Errc::invalid_argument, "tone phase must be finite");
}

NoiseSpec NoiseSpec::from_snr_db(double amplitude, double snr_db) {
    return {snr_to_noise_sigma(amplitude, snr_db)};
}

double NoiseSpec::snr(double amplitude) const {
    if (sigma == 0.0) return INFINITY;
    return 0.5 * amplitude * amplitude / (sigma * sigma);
}

double snr_db_to_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

double snr_to_noise_sigma(double amplitude, double snr_db) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        raise(Errc::invalid_argument, "amplitude must be positive and finite");
    if (!std::isfinite(snr_db)) raise(Errc::invalid_argument, "snr_db must be finite");
    return std::sqrt(amplitude * amplitude / (2.0 * snr_db_to_linear(snr_db)));
}

double noise_sigma_to_snr_db(double amplitude, double sigma) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude))
        raise(Errc::invalid_argument, "amplitude must be positive and finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        raise(Errc::invalid_argument, "noise sigma must be positive and finite");
    return 10.0 * std::log10(0.5 * amplitude * amplitude / (sigma * sigma));
}

SampledSignal::SampledSignal(double sample_rate, double start_time, std::vector<double> samples)
    : sample_rate_(sample_rate), start_time_(start_time), samples_(std::move(samples)) {
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
        raise(Errc::invalid_argument, "sample rate must be positive and finite");
    if (!std::isfinite(start_time_)) raise(Errc::invalid_argument, "start time must be finite");
    if (samples_.empty()) raise(Errc::invalid_argument, "signal must contain at least one sample");
    for (double v : samples_)
        if (!std::isfinite(v)) raise(Errc::invalid_argument, "signal samples must be finite");
}

SampledSignal SampledSignal::slice(std::size_t first, std::size_t count) const {
    if (first > samples_.size() || count > samples_.size() - first)
        raise(Errc::invalid_argument, "slice out of range");
    std::vector<double> part(samples_.begin() + static_cast<std::ptrdiff_t>(first),
                             samples_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return SampledSignal(sample_rate_, time_at(first), std::move(part));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t root_seed, std::uint64_t index) {
    return splitmix64(root_seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

double NoiseSource::gaussian(double sigma) { return sigma * normal_(engine_); }

double NoiseSource::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::size_t samples_for_duration(double duration, double sample_rate) {
    if (!(duration >= 0.0) || !std::isfinite(duration))
        raise(Errc::invalid_argument, "duration must be non-negative and finite");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        raise(Errc::invalid_argument, "sample rate must be positive and finite");
    const double exact = duration * sample_rate;
    return static_cast<std::size_t>(std::floor(exact * (1.0 + 1e-12)));
}

SampledSignal generate_noisy_tone(const ToneParams& tone, const NoiseSpec& noise,
                                  double sample_rate, double duration, std::uint64_t seed,
                                  double start_time) {
    return generate_noisy_tone_samples(tone, noise, sample_rate,
                                       samples_for_duration(duration, sample_rate), seed,
                                       start_time);
}

SampledSignal generate_noisy_tone_samples(const ToneParams& tone, const NoiseSpec& noise,
                                          double sample_rate, std::size_t count,
                                          std::uint64_t seed, double start_time) {
    tone.validate();
    if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma))
        raise(Errc::invalid_argument, "noise sigma must be non-negative and finite");
    if (!(sample_rate > 0.0)) raise(Errc::invalid_argument, "sample rate must be positive");
    if (count == 0) raise(Errc::invalid_argument, "requested signal has zero samples");

    NoiseSource rng(seed);
    std::vector<double> y(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = start_time + static_cast<double>(i) / sample_rate;
        y[i] = tone.amplitude * std::sin(tone.omega * t + tone.phase);
        if (!noise.is_noiseless()) y[i] += rng.gaussian(noise.sigma);
    }
    return SampledSignal(sample_rate, start_time, std::move(y));
}

SampledSignal generate_tone_step(const ToneStep& step, const NoiseSpec& noise,
                                 double sample_rate, std::size_t count, std::uint64_t seed) {
    if (!(step.amplitude > 0.0) || !(step.omega_before > 0.0) || !(step.omega_after > 0.0))
        raise(Errc::invalid_argument, "tone step needs positive amplitude and frequencies");
    if (count == 0) raise(Errc::invalid_argument, "requested signal has zero samples");
    if (!(noise.sigma >= 0.0)) raise(Errc::invalid_argument, "noise sigma must be non-negative");

    NoiseSource rng(seed);
    std::vector<double> y(count);
    const double phase_at_step = step.omega_before * step.step_time + step.phase;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double arg = t < step.step_time
                               ? step.omega_before * t + step.phase
                               : phase_at_step + step.omega_after * (t - step.step_time);
        y[i] = step.amplitude * std::sin(arg);
        if (!noise.is_noiseless()) y[i] += rng.gaussian(noise.sigma);
    }
    return SampledSignal(sample_rate, 0.0, std::move(y));
}

} // namespace llsfreq
