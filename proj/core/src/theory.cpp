#include "llsfreq/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llsfreq/angle.hpp"
#include "llsfreq/error.hpp"

namespace llsfreq {
namespace {

constexpr double pi = std::numbers::pi;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        raise(Errc::invalid_argument, std::string(name) + " must be positive and finite");
}

void check_frequencies(double omega, double omega_r, double q) {
    require_positive(omega, "omega");
    require_positive(omega_r, "omega_r");
    require_positive(q, "q");
}

// Numerator/denominator of the closed form given the two bracketed
// trigonometric groups X (cosine group) and Y (sine group).
PhaseRatio combine(double q, double x, double y) {
    const double s2 = std::sin(2.0 * pi * q);
    const double s4 = std::sin(4.0 * pi * q);
    return {-(x * (-4.0 * pi * q + s4) + 2.0 * s2 * s2 * y),
            -2.0 * x * s2 * s2 + (4.0 * pi * q + s4) * y};
}

} // namespace

double predicted_phase_variance(double sample_rate, double window_duration, double snr) {
    require_positive(sample_rate, "sample rate");
    require_positive(window_duration, "window duration");
    require_positive(snr, "snr");
    return 1.0 / (sample_rate * window_duration * snr);
}

double predicted_freq_variance(double sample_rate, double block_duration, double snr) {
    require_positive(sample_rate, "sample rate");
    require_positive(block_duration, "block duration");
    require_positive(snr, "snr");
    return 12.0 / (sample_rate * block_duration * block_duration * block_duration * snr);
}

double predicted_freq_variance_from_phase(double phase_variance, double phase_rate,
                                          double block_duration) {
    require_positive(phase_variance, "phase variance");
    require_positive(phase_rate, "phase rate");
    require_positive(block_duration, "block duration");
    return 12.0 * phase_variance /
           (phase_rate * block_duration * block_duration * block_duration);
}

Mat2 integral_phase_gram(double sample_rate, double window_duration, double omega_r) {
    require_positive(sample_rate, "sample rate");
    require_positive(window_duration, "window duration");
    require_positive(omega_r, "omega_r");
    const double t = window_duration;
    const double w = omega_r;
    const double off = (1.0 - std::cos(2.0 * w * t)) / (4.0 * w);
    return {sample_rate * (t / 2.0 - std::sin(2.0 * w * t) / (4.0 * w)), sample_rate * off,
            sample_rate * off, sample_rate * (t / 2.0 + std::sin(2.0 * w * t) / (4.0 * w))};
}

Mat2 isotropic_phase_gram(double sample_rate, double window_duration) {
    const double d = sample_rate * window_duration / 2.0;
    return {d, 0.0, 0.0, d};
}

PhaseRatio expected_phase_terms(double omega, double omega_r, double q, double phi) {
    check_frequencies(omega, omega_r, q);
    const double w = omega;
    const double wr = omega_r;
    const double a = phi + 2.0 * pi * q * (w - wr) / wr;
    const double c = phi + 2.0 * pi * q * (w + wr) / wr;
    const double x = 2.0 * w * std::cos(phi) - (w + wr) * std::cos(a) + (-w + wr) * std::cos(c);
    const double y = -2.0 * wr * std::sin(phi) + (w + wr) * std::sin(a) + (-w + wr) * std::sin(c);
    return combine(q, x, y);
}

double expected_phase(double omega, double omega_r, double q, double phi) {
    check_frequencies(omega, omega_r, q);
    // X and Y above are omega_r*d*X' and omega_r*d*Y' with d = omega/omega_r - 1,
    // via cos(p) - cos(p + a) = 2 sin(p + a/2) sin(a/2) and the sine analogue.
    const double d = (omega - omega_r) / omega_r;
    const double r = omega / omega_r;
    const double cycle = 2.0 * pi * q;
    const double half_shift = 0.5 * cycle * d;
    const double sinc_term = d == 0.0 ? 0.5 * cycle : std::sin(half_shift) / d;
    const double c = phi + cycle * (r + 1.0);
    const double x = 2.0 * (r + 1.0) * std::sin(phi + half_shift) * sinc_term + std::cos(phi) -
                     std::cos(c);
    const double y = 2.0 * (r + 1.0) * std::cos(phi + half_shift) * sinc_term + std::sin(phi) -
                     std::sin(c);
    const PhaseRatio t = combine(q, x, y);
    if (t.numerator == 0.0 && t.denominator == 0.0)
        raise(Errc::undefined_phase, "expected phase undefined at omega=" +
                                         std::to_string(omega) + " omega_r=" +
                                         std::to_string(omega_r) + " q=" + std::to_string(q) +
                                         " phi=" + std::to_string(phi));
    return phase_of(t.numerator, t.denominator);
}

double expected_phase_half_cycle(double omega, double omega_r, double phi) {
    check_frequencies(omega, omega_r, 0.5);
    const double r = omega / omega_r;
    // cos(phi) + cos(phi + pi*r) and sin(phi) + sin(phi + pi*r) share the factor
    // 2*cos(pi*r/2), which vanishes at r = 1; cancel it.
    const double a = phi + 0.5 * pi * r;
    return std::atan(-r * std::cos(a) / std::sin(a));
}

double expected_phase_full_cycle(double omega, double omega_r, double phi) {
    check_frequencies(omega, omega_r, 1.0);
    const double r = omega / omega_r;
    return std::atan(r * std::tan(phi + pi * r));
}

OptimalWindowCoefficients optimal_window_coefficients(double omega, double omega_r) {
    check_frequencies(omega, omega_r, optimal_window_fraction);
    const double w = omega;
    const double wr = omega_r;
    const double k = std::numbers::sqrt2 * pi;
    const double sk = std::sin(k);
    const double ck = std::cos(k);
    const double s2k = std::sin(2.0 * k);
    const double x = k * w / wr;
    const double cx = std::cos(x);
    const double sx = std::sin(x);

    OptimalWindowCoefficients co;
    co.a = 2.0 * w * cx * (k * ck - sk) + w * s2k - 2.0 * k * (w - wr * sk * sx);
    co.b = 2.0 * k * wr * cx * sk - 2.0 * wr * sk * sk + 2.0 * w * sx * (-k * ck + sk);
    co.c = 2.0 * k * w * cx * sk + 2.0 * w * sk * sk - 2.0 * wr * sx * (k * ck + sk);
    co.d = -2.0 * wr * cx * (k * ck + sk) + wr * s2k + 2.0 * k * (wr - w * sk * sx);
    return co;
}

double expected_phase_optimal_window(double omega, double omega_r, double phi) {
    const OptimalWindowCoefficients co = optimal_window_coefficients(omega, omega_r);
    const double num = co.a * std::cos(phi) + co.b * std::sin(phi);
    const double den = co.c * std::cos(phi) + co.d * std::sin(phi);
    return std::atan(num / den);
}

BiasProfile phase_bias_profile(double omega, double omega_r, double q, std::size_t grid_size) {
    if (grid_size < 16) raise(Errc::invalid_argument, "bias profile grid needs >= 16 points");
    check_frequencies(omega, omega_r, q);

    BiasProfile p;
    const std::size_t m = grid_size;
    const double h = 2.0 * pi / static_cast<double>(m);
    p.phi.resize(m);
    p.expected.resize(m);
    p.bias.resize(m);
    p.slope.resize(m);

    for (std::size_t i = 0; i < m; ++i) {
        p.phi[i] = h * static_cast<double>(i);
        const double e = expected_phase(omega, omega_r, q, p.phi[i]);
        p.expected[i] = i == 0 ? e : p.expected[i - 1] + angle_diff(e, p.expected[i - 1]);
    }

    // Shift by a whole number of turns so the mean bias lands in (-pi, pi].
    double raw_mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) raw_mean += p.expected[i] - p.phi[i];
    raw_mean /= static_cast<double>(m);
    const double turns = (raw_mean - wrap_phase(raw_mean)) / (2.0 * pi);
    const double shift = 2.0 * pi * std::round(turns);

    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        p.expected[i] -= shift;
        p.bias[i] = p.expected[i] - p.phi[i];
        mean += p.bias[i];
    }
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double b : p.bias) var += (b - mean) * (b - mean);
    p.mean_bias = mean;
    p.bias_variance = var / static_cast<double>(m);

    // The bias is 2*pi periodic, so neighbours wrap around the grid.
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double next = p.bias[(i + 1) % m];
        const double prev = p.bias[(i + m - 1) % m];
        p.slope[i] = 1.0 + angle_diff(next, prev) / (2.0 * h);
        worst = std::max(worst, std::abs(p.slope[i] - 1.0));
    }
    p.max_slope_deviation = worst;
    return p;
}

QSweep q_sweep(double omega, double omega_r, double q_min, double q_max, std::size_t steps,
               std::size_t grid_size) {
    if (!(q_min > 0.0) || !(q_max > q_min))
        raise(Errc::invalid_argument, "q sweep needs 0 < q_min < q_max");
    if (steps < 10) raise(Errc::invalid_argument, "q sweep needs at least 10 steps");

    QSweep s;
    s.q.resize(steps);
    s.bias_variance.resize(steps);
    const double dq = (q_max - q_min) / static_cast<double>(steps - 1);
    for (std::size_t j = 0; j < steps; ++j) {
        s.q[j] = j + 1 == steps ? q_max : q_min + dq * static_cast<double>(j);
        s.bias_variance[j] = phase_bias_profile(omega, omega_r, s.q[j], grid_size).bias_variance;
    }
    for (std::size_t j = 1; j + 1 < steps; ++j) {
        const double lo = s.bias_variance[j - 1];
        const double mid = s.bias_variance[j];
        const double hi = s.bias_variance[j + 1];
        if (!(mid < lo && mid <= hi)) continue;
        const double curvature = lo - 2.0 * mid + hi;
        double offset = curvature > 0.0 ? 0.5 * (lo - hi) / curvature : 0.0;
        offset = std::clamp(offset, -1.0, 1.0);
        s.local_minima.push_back(s.q[j] + offset * dq);
    }
    return s;
}

} // namespace llsfreq
