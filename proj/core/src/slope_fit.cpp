#include "llsfreq/slope_fit.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "llsfreq/angle.hpp"
#include "llsfreq/error.hpp"

namespace llsfreq {

PhaseSeries PhaseSeries::uniform(double t0, double spacing, std::vector<double> phases,
                                 bool wrapped) {
    PhaseSeries s;
    s.times.resize(phases.size());
    for (std::size_t k = 0; k < phases.size(); ++k)
        s.times[k] = t0 + static_cast<double>(k) * spacing;
    s.phases = std::move(phases);
    s.wrapped = wrapped;
    return s;
}

double PhaseSeries::rate() const {
    if (times.size() < 2) raise(Errc::invalid_argument, "phase series needs >= 2 entries");
    return static_cast<double>(times.size() - 1) / (times.back() - times.front());
}

void PhaseSeries::validate() const {
    if (times.size() != phases.size())
        raise(Errc::invalid_argument, "phase series times/phases length mismatch");
    if (phases.size() < 2) raise(Errc::invalid_argument, "phase series needs >= 2 entries");
    const double spacing = 1.0 / rate();
    if (!(spacing > 0.0)) raise(Errc::invalid_argument, "phase series times must increase");
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        if (std::abs((times[k + 1] - times[k]) - spacing) > 1e-9 * spacing)
            raise(Errc::invalid_argument, "phase series is not uniformly spaced");
    }
    if (wrapped) {
        for (double p : phases)
            if (!(p > -std::numbers::pi && p <= std::numbers::pi))
                raise(Errc::invalid_argument, "wrapped phase outside (-pi, pi]");
    }
}

PhaseSeries unwrap_phase_series(const PhaseSeries& series, double omega_r) {
    if (series.phases.size() < 2)
        raise(Errc::invalid_argument, "unwrapping needs at least 2 phase estimates");
    series.validate();
    if (!series.wrapped) raise(Errc::invalid_argument, "series is already unwrapped");

    OnlineUnwrapper unwrapper(omega_r);
    PhaseSeries out;
    out.times = series.times;
    out.phases.resize(series.size());
    out.wrapped = false;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double psi = unwrapper.push(series.times[k], series.phases[k]);
        out.phases[k] = psi + omega_r * series.times[k];
    }
    return out;
}

double OnlineUnwrapper::push(double time, double wrapped_phase) {
    const double detrended = wrap_phase(wrapped_phase - omega_r_ * time);
    if (!started_) {
        started_ = true;
        previous_ = detrended;
    } else {
        previous_ += angle_diff(detrended, previous_);
    }
    return previous_;
}

SlopeWeights::SlopeWeights(std::span<const double> times) {
    const std::size_t n = times.size();
    if (n < 2) raise(Errc::invalid_argument, "slope fit needs at least 2 points");
    origin_ = times.front();
    double su = 0.0;
    double suu = 0.0;
    for (double t : times) {
        const double u = t - origin_;
        su += u;
        suu += u * u;
    }
    const Mat2 gram{static_cast<double>(n), su, su, suu};
    // Singular exactly when every u is equal (variance of u is zero).
    const double spread = suu - su * su / static_cast<double>(n);
    if (!(spread > 0.0) || !(std::abs(gram.det()) > 0.0))
        raise(Errc::singular_design, "all phase timestamps are equal");
    inverse_gram_ = gram.inverse();

    slope_weights_.resize(n);
    offset_weights_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = times[k] - origin_;
        slope_weights_[k] = inverse_gram_.a22 * u + inverse_gram_.a21;
        offset_weights_[k] = inverse_gram_.a11 + inverse_gram_.a12 * u;
    }
}

SlopeWeights SlopeWeights::uniform(std::size_t count, double spacing) {
    std::vector<double> t(count);
    for (std::size_t k = 0; k < count; ++k) t[k] = static_cast<double>(k) * spacing;
    return SlopeWeights(t);
}

AffineFit fit_frequency(std::span<const double> times, std::span<const double> phases) {
    if (times.size() != phases.size())
        raise(Errc::invalid_argument, "times/phases length mismatch");
    const SlopeWeights weights(times);
    double slope = 0.0;
    double offset_at_origin = 0.0;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        slope += weights.slope_weights()[k] * phases[k];
        offset_at_origin += weights.offset_weights()[k] * phases[k];
    }
    AffineFit fit;
    fit.slope = slope;
    fit.origin = weights.origin();
    fit.offset = offset_at_origin - slope * fit.origin;
    fit.inverse_gram = weights.inverse_gram();
    return fit;
}

AffineFit fit_frequency(const PhaseSeries& series) {
    if (series.phases.size() < 2)
        raise(Errc::invalid_argument, "slope fit needs at least 2 phase estimates");
    return fit_frequency(series.times, series.phases);
}

} // namespace llsfreq
