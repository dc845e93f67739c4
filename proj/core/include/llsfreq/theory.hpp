#ifndef LLSFREQ_THEORY_HPP
#define LLSFREQ_THEORY_HPP

#include <cstddef>
#include <numbers>
#include <vector>

#include "llsfreq/mat2.hpp"

namespace llsfreq {

/// Window fraction q* = 1/sqrt(2) that nearly cancels the periodic part of
/// the phase bias.
inline constexpr double optimal_window_fraction = std::numbers::sqrt2 / 2.0;

// ---------------------------------------------------------------------------
// Variance predictions. All arguments must be > 0 (invalid_argument otherwise).

/// Var{phi_hat} ~= 1/(Fs*t_n*SNR), rad^2.
double predicted_phase_variance(double sample_rate, double window_duration, double snr);

/// Var{omega_hat} ~= 12/(Fs*t_N^3*SNR), (rad/s)^2.
double predicted_freq_variance(double sample_rate, double block_duration, double snr);

/// General slope variance 12*sigma_phi^2/(F_phi*t_N^3), (rad/s)^2.
double predicted_freq_variance_from_phase(double phase_variance, double phase_rate,
                                          double block_duration);

/// (rad/s)^2 -> Hz^2.
constexpr double rad2_to_hz2(double v) { return v / (4.0 * std::numbers::pi * std::numbers::pi); }

/// Integral approximation of the stage-1 Gram matrix over [0, t_n] with the
/// [sin cos] design, before dropping the oscillating terms.
Mat2 integral_phase_gram(double sample_rate, double window_duration, double omega_r);

/// Fs*t_n/2 * I, the many-cycles limit of integral_phase_gram.
Mat2 isotropic_phase_gram(double sample_rate, double window_duration);

// ---------------------------------------------------------------------------
// Noise-free expected phase of the stage-1 estimate when a tone at omega is
// fitted with a reference at omega_r over q reference cycles.

/// Numerator and denominator inside the arctangent of the closed form,
/// evaluated term by term in expanded form. Both vanish identically when
/// omega == omega_r, and their common factor (omega - omega_r) flips the
/// quadrant of atan2(numerator, denominator) for omega < omega_r.
struct PhaseRatio {
    double numerator = 0.0;
    double denominator = 0.0;
};
PhaseRatio expected_phase_terms(double omega, double omega_r, double q, double phi);

/// E{phi_hat}(phi) with the same quadrant convention as the estimator
/// (atan2(b_cos, b_sin)), continuous in phi up to 2*pi wraps.
///
/// The common (omega - omega_r) factor is removed analytically before
/// taking atan2, so the matched case is evaluated exactly rather than as 0/0.
/// Raises undefined_phase if the reduced numerator and denominator both vanish.
double expected_phase(double omega, double omega_r, double q, double phi);

/// Principal-value closed forms for q = 1/2 and q = 1 (range (-pi/2, pi/2)).
double expected_phase_half_cycle(double omega, double omega_r, double phi);
double expected_phase_full_cycle(double omega, double omega_r, double phi);

/// Coefficients of E{phi_hat} = atan((A cos phi + B sin phi)/(C cos phi + D sin phi))
/// at q = 1/sqrt(2).
///
/// The last terms of A and D are -2*sqrt2*pi*(omega - omega_r*sin(sqrt2*pi)*sin(x))
/// and +2*sqrt2*pi*(omega_r - omega*sin(sqrt2*pi)*sin(x)), x = sqrt2*pi*omega/omega_r.
/// The form equals -1/2 times expected_phase_terms.
struct OptimalWindowCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
};
OptimalWindowCoefficients optimal_window_coefficients(double omega, double omega_r);

/// Principal-value arctangent of the q = 1/sqrt(2) form.
double expected_phase_optimal_window(double omega, double omega_r, double phi);

// ---------------------------------------------------------------------------
// Bias analysis.

struct BiasProfile {
    std::vector<double> phi;      ///< uniform grid on [0, 2*pi)
    std::vector<double> expected; ///< E{phi_hat}, unwrapped along the grid
    std::vector<double> bias;     ///< expected - phi
    std::vector<double> slope;    ///< dE/dphi by central differences
    double mean_bias = 0.0;       ///< shifted into (-pi, pi]
    double bias_variance = 0.0;   ///< population variance over the grid
    double max_slope_deviation = 0.0; ///< max |dE/dphi - 1|
};

/// Raises invalid_argument when grid_size < 16.
BiasProfile phase_bias_profile(double omega, double omega_r, double q,
                               std::size_t grid_size = 512);

struct QSweep {
    std::vector<double> q;
    std::vector<double> bias_variance;
    /// Interior local minima, refined by a parabola through the three
    /// neighbouring grid points.
    std::vector<double> local_minima;
};

/// Var{Bias{phi_hat}} on `steps` evenly spaced q values spanning [q_min, q_max].
/// Raises invalid_argument unless 0 < q_min < q_max and steps >= 10.
QSweep q_sweep(double omega, double omega_r, double q_min, double q_max, std::size_t steps,
               std::size_t grid_size = 512);

} // namespace llsfreq

#endif
