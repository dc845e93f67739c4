#ifndef LLSFREQ_SLOPE_FIT_HPP
#define LLSFREQ_SLOPE_FIT_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "llsfreq/mat2.hpp"

namespace llsfreq {

/// Timestamped phase estimates, one per window.
struct PhaseSeries {
    std::vector<double> times;
    std::vector<double> phases;
    bool wrapped = true;

    std::size_t size() const { return phases.size(); }

    /// Phases at t0, t0 + spacing, ...; times are t0 + k*spacing.
    static PhaseSeries uniform(double t0, double spacing, std::vector<double> phases,
                               bool wrapped);

    /// 1/spacing of a uniform series.
    double rate() const;

    /// Checks equal lengths, >= 2 entries, uniform increasing times within
    /// 1e-9 of the spacing, and (-pi, pi] phases when wrapped.
    void validate() const;
};

/// Detrend by the reference ramp, unwrap, and add the ramp back:
///   psi_k = wrap(phi_k - omega_r*t_k), consecutive psi differences forced into
///   (-pi, pi], result_k = psi_k + omega_r*t_k.
/// Exact when |omega - omega_r| < pi*F_phi; beyond that the recovered slope
/// aliases by a multiple of 2*pi*F_phi.
PhaseSeries unwrap_phase_series(const PhaseSeries& series, double omega_r);

/// Fit of phi = offset + slope*t.
///
/// The Gram matrix is formed in shifted time u = t - origin
/// (origin = first timestamp) so long records do not lose precision;
/// inverse_gram is (A^T A)^-1 for the design [1, t - origin]. `offset` is
/// reported at t = 0.
struct AffineFit {
    double offset = 0.0;
    double slope = 0.0;
    double origin = 0.0;
    Mat2 inverse_gram;
};

/// Slope extractor weights w_k = J22*(t_k - origin) + J21 so that
/// slope = sum_k w_k*phi_k. They satisfy sum w = 0 and sum w*t = 1.
class SlopeWeights {
public:
    /// Raises invalid_argument for < 2 times and singular_design when the
    /// times do not span a non-zero interval.
    explicit SlopeWeights(std::span<const double> times);

    /// Weights for t_k = k*spacing, k = 0..count-1.
    static SlopeWeights uniform(std::size_t count, double spacing);

    std::size_t size() const { return slope_weights_.size(); }
    double origin() const { return origin_; }
    const Mat2& inverse_gram() const { return inverse_gram_; }
    std::span<const double> slope_weights() const { return slope_weights_; }
    std::span<const double> offset_weights() const { return offset_weights_; }

private:
    double origin_ = 0.0;
    Mat2 inverse_gram_;
    std::vector<double> slope_weights_;
    std::vector<double> offset_weights_;
};

/// Least-squares slope of an unwrapped series via the single-pass weighted sum.
/// The frequency estimate is `slope`.
AffineFit fit_frequency(const PhaseSeries& series);
AffineFit fit_frequency(std::span<const double> times, std::span<const double> phases);

/// O(1)-state unwrapper for streaming use; keeps only the previous detrended
/// phase. Feed wrapped phases in time order; returns the unwrapped
/// detrended phase psi_k (the caller re-adds omega_r*t_k if needed).
class OnlineUnwrapper {
public:
    explicit OnlineUnwrapper(double omega_r) : omega_r_(omega_r) {}

    double push(double time, double wrapped_phase);
    void reset() { started_ = false; }
    double omega_r() const { return omega_r_; }

private:
    double omega_r_;
    bool started_ = false;
    double previous_ = 0.0;
};

} // namespace llsfreq

#endif
