#include "llsfreq/dpll.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "llsfreq/angle.hpp"
#include "llsfreq/error.hpp"

namespace llsfreq {

double DpllConfig::detector_bandwidth() const {
    return std::min(10.0 * natural_frequency(), 0.25 * center_omega);
}

void DpllConfig::validate() const {
    if (!(center_omega > 0.0)) raise(Errc::invalid_argument, "DPLL centre frequency must be positive");
    if (!(damping > 0.0)) raise(Errc::invalid_argument, "DPLL damping must be positive");
    if (!(settling_time > 0.0)) raise(Errc::invalid_argument, "DPLL settling time must be positive");
    if (!(sample_rate > 2.0 * rad_to_hz(center_omega)))
        raise(Errc::invalid_argument, "DPLL sample rate must exceed twice the centre frequency");
    if (!(natural_frequency() < 0.1 * two_pi * sample_rate))
        raise(Errc::invalid_argument, "DPLL loop bandwidth too close to the sample rate");
    if (!(lock_threshold > 0.0)) raise(Errc::invalid_argument, "lock threshold must be positive");
}

bool DpllTrace::unlocked_after(double t) const {
    for (std::size_t i = 0; i < time.size(); ++i)
        if (time[i] >= t && !locked[i]) return true;
    return false;
}

double DpllTrace::mean_omega(double t0, double t1) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (time[i] >= t0 && time[i] < t1) {
            sum += omega[i];
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : std::nan("");
}

DpllTrace dpll_track(const SampledSignal& signal, const DpllConfig& config) {
    config.validate();
    const double fs = signal.sample_rate();
    if (std::abs(fs - config.sample_rate) > 1e-9 * fs)
        raise(Errc::invalid_argument, "DPLL sample rate does not match the signal");

    const double dt = 1.0 / fs;
    const double kp = config.proportional_gain();
    const double ki = config.integral_gain();
    const double lp = 1.0 - std::exp(-config.detector_bandwidth() * dt);
    const double lock_lp = 1.0 - std::exp(-dt / (0.25 * config.settling_time));

    const std::size_t n = signal.size();
    DpllTrace trace;
    trace.time.resize(n);
    trace.omega.resize(n);
    trace.locked.resize(n);

    double nco_phase = 0.0;
    double integrator = config.center_omega;
    double i1 = 0.0, i2 = 0.0, q1 = 0.0, q2 = 0.0;
    double lock_metric = 0.5 * std::numbers::pi; // start out unlocked

    for (std::size_t k = 0; k < n; ++k) {
        const double y = signal[k];
        // y = B sin(theta): y*sin(nco) -> B/2 cos(theta - nco), y*cos(nco) -> B/2 sin(theta - nco).
        i1 += lp * (y * std::sin(nco_phase) - i1);
        i2 += lp * (i1 - i2);
        q1 += lp * (y * std::cos(nco_phase) - q1);
        q2 += lp * (q1 - q2);

        const double magnitude = std::hypot(i2, q2);
        const double detector = magnitude > 0.0 ? q2 / magnitude : 0.0;
        const double phase_error = magnitude > 0.0 ? std::atan2(q2, i2) : 0.5 * std::numbers::pi;

        const double omega = integrator + kp * detector;
        integrator += ki * detector * dt;
        nco_phase = wrap_phase(nco_phase + omega * dt);

        lock_metric += lock_lp * (std::abs(phase_error) - lock_metric);
        const bool locked = lock_metric < config.lock_threshold;

        trace.time[k] = signal.time_at(k);
        trace.omega[k] = omega;
        trace.locked[k] = locked ? 1 : 0;
    }

    std::optional<std::size_t> settled_from;
    for (std::size_t k = 0; k < n; ++k) {
        if (trace.locked[k]) {
            if (trace.ever_locked && !settled_from) trace.lost_lock = true;
            trace.ever_locked = true;
            if (!settled_from) settled_from = k;
        } else if (settled_from) {
            settled_from.reset();
            trace.lost_lock = true;
        }
    }
    if (settled_from) trace.pull_in_time = trace.time[*settled_from];

    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    double sum = 0.0;
    for (std::size_t k = n - tail; k < n; ++k) sum += trace.omega[k];
    trace.final_omega = sum / static_cast<double>(tail);
    return trace;
}

} // namespace llsfreq
