#ifndef LLSFREQ_DPLL_HPP
#define LLSFREQ_DPLL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "llsfreq/signal.hpp"

namespace llsfreq {

/// Second-order digital PLL driven only by a settling-time knob:
/// omega_n = 4/(zeta*settling_time), proportional gain 2*zeta*omega_n,
/// integral gain omega_n^2 (phase detector normalised to 1 rad/rad).
struct DpllConfig {
    double center_omega = 0.0;  ///< NCO free-running frequency, rad/s
    double damping = 0.70710678118654752;
    double settling_time = 0.0; ///< s (2% criterion)
    double sample_rate = 0.0;
    double lock_threshold = 0.5; ///< rad; filtered |phase error| below this means locked

    double natural_frequency() const { return 4.0 / (damping * settling_time); }
    double proportional_gain() const { return 2.0 * damping * natural_frequency(); }
    double integral_gain() const { return natural_frequency() * natural_frequency(); }
    /// Corner of the two-pole I/Q low-pass that strips the 2*omega mixing product.
    double detector_bandwidth() const;

    void validate() const;
};

struct DpllTrace {
    std::vector<double> time;
    std::vector<double> omega;        ///< instantaneous NCO frequency, rad/s
    std::vector<std::uint8_t> locked; ///< lock indicator per sample
    double final_omega = 0.0;         ///< NCO frequency averaged over the last 10% of samples
    bool ever_locked = false;
    bool lost_lock = false;           ///< locked at some point, unlocked later
    /// Time after which the indicator stays locked to the end; empty if it never settles.
    std::optional<double> pull_in_time;

    /// True when the indicator drops at any sample with time >= t.
    bool unlocked_after(double t) const;
    /// Mean NCO frequency over [t0, t1).
    double mean_omega(double t0, double t1) const;
};

/// Per sample: multiply by the quadrature NCO outputs, low-pass, take the
/// normalised in-phase error sin(e), run the PI loop filter and advance the
/// NCO. Divergence is reported through the lock indicator, never thrown.
DpllTrace dpll_track(const SampledSignal& signal, const DpllConfig& config);

} // namespace llsfreq

#endif
