#include "llsfreq/nls.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "llsfreq/error.hpp"

namespace llsfreq {
namespace {

struct NormalEquations {
    Mat2 gram;
    double sin_proj = 0.0;
    double cos_proj = 0.0;
};

NormalEquations normal_equations(const SampledSignal& signal, double omega) {
    NormalEquations ne;
    double ss = 0.0;
    double sc = 0.0;
    double cc = 0.0;
    const auto y = signal.samples();
    const double step = omega / signal.sample_rate();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double arg = step * static_cast<double>(i);
        const double s = std::sin(arg);
        const double c = std::cos(arg);
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ne.sin_proj += s * y[i];
        ne.cos_proj += c * y[i];
    }
    ne.gram = {ss, sc, sc, cc};
    return ne;
}

} // namespace

NlsConfig NlsConfig::for_record(double initial_omega, double max_offset, double record_duration) {
    if (!(record_duration > 0.0)) raise(Errc::invalid_argument, "record duration must be positive");
    const double lobe = two_pi / record_duration;
    NlsConfig c;
    c.initial_omega = initial_omega;
    c.half_width = std::abs(max_offset) + 2.0 * lobe;
    c.grid_step = lobe / 8.0;
    c.tolerance = 1e-7 * lobe;
    return c;
}

void NlsConfig::validate() const {
    if (!(initial_omega > 0.0)) raise(Errc::invalid_argument, "NLS initial frequency must be positive");
    if (!(half_width > 0.0)) raise(Errc::invalid_argument, "NLS half-width must be positive");
    if (!(tolerance > 0.0)) raise(Errc::invalid_argument, "NLS tolerance must be positive");
    if (!(grid_step > 0.0) || !(grid_step < half_width))
        raise(Errc::invalid_argument, "NLS grid step must be in (0, half_width)");
    if (!(initial_omega - half_width > 0.0))
        raise(Errc::invalid_argument, "NLS search window must exclude zero frequency");
    if (max_iterations < 1) raise(Errc::invalid_argument, "NLS needs max_iterations >= 1");
}

QuadratureFit nls_amplitudes(const SampledSignal& signal, double omega) {
    const NormalEquations ne = normal_equations(signal, omega);
    if (!(std::abs(ne.gram.det()) > 0.0))
        raise(Errc::degenerate_window, "NLS design is singular at this frequency");
    const auto b = ne.gram.inverse().apply(ne.sin_proj, ne.cos_proj);
    return {b[0], b[1]};
}

double nls_objective(const SampledSignal& signal, double omega) {
    const NormalEquations ne = normal_equations(signal, omega);
    const double det = ne.gram.det();
    if (!(std::abs(det) > 0.0)) return 0.0;
    const auto b = ne.gram.inverse().apply(ne.sin_proj, ne.cos_proj);
    // |A b|^2 = b^T G b = b^T P for the least-squares b.
    return b[0] * ne.sin_proj + b[1] * ne.cos_proj;
}

FrequencyEstimate nls_estimate(const SampledSignal& signal, const NlsConfig& config) {
    config.validate();
    if (signal.size() < 4) raise(Errc::insufficient_data, "NLS needs at least 4 samples");

    const double lo = config.initial_omega - config.half_width;
    const double hi = config.initial_omega + config.half_width;
    const auto points = static_cast<std::size_t>(std::ceil((hi - lo) / config.grid_step)) + 1;
    const double step = (hi - lo) / static_cast<double>(points - 1);

    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t j = 0; j < points; ++j) {
        const double v = nls_objective(signal, lo + step * static_cast<double>(j));
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    if (best == 0 || best + 1 == points)
        raise(Errc::boundary_hit, "NLS maximum on the search boundary at " +
                                      std::to_string(rad_to_hz(lo + step * static_cast<double>(best))) +
                                      " Hz; widen the search window");

    // Golden-section search for the maximum on the bracketing cell pair.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo + step * static_cast<double>(best - 1);
    double b = lo + step * static_cast<double>(best + 1);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = nls_objective(signal, x1);
    double f2 = nls_objective(signal, x2);
    int iterations = 0;
    while (b - a > config.tolerance) {
        if (++iterations > config.max_iterations)
            raise(Errc::no_convergence, "NLS golden-section did not reach tolerance in " +
                                            std::to_string(config.max_iterations) + " iterations");
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = nls_objective(signal, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = nls_objective(signal, x2);
        }
    }
    double omega = 0.5 * (a + b);
    // Keep the best of the final probes.
    const double fm = nls_objective(signal, omega);
    if (f1 > fm && f1 >= f2) omega = x1;
    else if (f2 > fm && f2 > f1) omega = x2;

    FrequencyEstimate out;
    out.omega = omega;
    out.frequency_hz = rad_to_hz(omega);
    out.time = signal.time_at(signal.size() - 1);
    out.diagnostics.omega_r = config.initial_omega;
    out.diagnostics.samples_used = signal.size();
    out.diagnostics.block_duration = signal.duration();
    out.diagnostics.offset_hz = rad_to_hz(omega - config.initial_omega);
    return out;
}

} // namespace llsfreq
