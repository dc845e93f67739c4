#include "llsfreq/phase_estimator.hpp"

#include <cmath>
#include <string>

#include "llsfreq/angle.hpp"
#include "llsfreq/error.hpp"
#include "llsfreq/signal.hpp"

namespace llsfreq {
namespace {

constexpr double max_gram_condition = 1e12;

void check_reference(double omega_r, double sample_rate) {
    if (!(omega_r > 0.0) || !std::isfinite(omega_r))
        raise(Errc::invalid_argument, "reference frequency must be positive");
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate))
        raise(Errc::invalid_argument, "sample rate must be positive");
    if (!(sample_rate > 2.0 * rad_to_hz(omega_r)))
        raise(Errc::invalid_argument,
              "sample rate must exceed two samples per reference cycle");
}

} // namespace

ReferenceConfig make_reference_config(double omega_r, double q, double sample_rate) {
    check_reference(omega_r, sample_rate);
    if (!(q > 0.0) || !std::isfinite(q)) raise(Errc::invalid_argument, "q must be positive");

    const double exact = sample_rate * two_pi * q / omega_r;
    const double n = std::round(exact);
    if (n < 2.0)
        raise(Errc::window_too_short, "window of " + std::to_string(exact) +
                                          " samples rounds below 2");
    ReferenceConfig c;
    c.omega_r = omega_r;
    c.q = q;
    c.sample_rate = sample_rate;
    c.window_length = static_cast<std::size_t>(n);
    c.q_eff = n * omega_r / (two_pi * sample_rate);
    return c;
}

double phase_from_fit(const QuadratureFit& fit) {
    if (fit.b_sin == 0.0 && fit.b_cos == 0.0)
        raise(Errc::undefined_phase, "both quadrature coefficients are zero");
    return phase_of(fit.b_cos, fit.b_sin);
}

PhaseWindowSolver PhaseWindowSolver::build(double omega_r, double q, double sample_rate) {
    return PhaseWindowSolver(make_reference_config(omega_r, q, sample_rate));
}

PhaseWindowSolver PhaseWindowSolver::with_length(double omega_r, std::size_t window_length,
                                                 double sample_rate) {
    check_reference(omega_r, sample_rate);
    if (window_length < 2) raise(Errc::window_too_short, "window needs at least 2 samples");
    ReferenceConfig c;
    c.omega_r = omega_r;
    c.sample_rate = sample_rate;
    c.window_length = window_length;
    c.q_eff = static_cast<double>(window_length) * omega_r / (two_pi * sample_rate);
    c.q = c.q_eff;
    return PhaseWindowSolver(c);
}

PhaseWindowSolver::PhaseWindowSolver(ReferenceConfig config)
    : config_(config), sin_table_(config.window_length), cos_table_(config.window_length) {
    double ss = 0.0;
    double sc = 0.0;
    double cc = 0.0;
    for (std::size_t i = 0; i < config_.window_length; ++i) {
        const double arg = config_.omega_r * static_cast<double>(i) / config_.sample_rate;
        const double s = std::sin(arg);
        const double c = std::cos(arg);
        sin_table_[i] = s;
        cos_table_[i] = c;
        ss += s * s;
        sc += s * c;
        cc += c * c;
    }
    gram_ = {ss, sc, sc, cc};

    const auto eig = gram_.symmetric_eigenvalues();
    if (!(eig[0] > 0.0) || eig[1] / eig[0] > max_gram_condition)
        raise(Errc::degenerate_window,
              "reference Gram matrix is ill-conditioned (n=" +
                  std::to_string(config_.window_length) + ")");
    inverse_gram_ = gram_.inverse();
}

QuadratureSums PhaseWindowSolver::project(std::span<const double> window) const {
    if (window.size() != config_.window_length)
        raise(Errc::invalid_argument, "window has " + std::to_string(window.size()) +
                                          " samples, solver expects " +
                                          std::to_string(config_.window_length));
    QuadratureSums sums;
    for (std::size_t i = 0; i < window.size(); ++i) {
        sums.sin_proj += sin_table_[i] * window[i];
        sums.cos_proj += cos_table_[i] * window[i];
    }
    return sums;
}

QuadratureFit PhaseWindowSolver::solve(const QuadratureSums& sums) const {
    const auto b = inverse_gram_.apply(sums.sin_proj, sums.cos_proj);
    return {b[0], b[1]};
}

PhaseEstimate PhaseWindowSolver::estimate(std::span<const double> window,
                                          double start_time) const {
    const QuadratureSums sums = project(window);
    if (sums.sin_proj == 0.0 && sums.cos_proj == 0.0)
        raise(Errc::undefined_phase, "window projections are both zero");
    const QuadratureFit fit = solve(sums);
    return {phase_from_fit(fit), start_time, fit};
}

} // namespace llsfreq
