#ifndef LLSFREQ_NLS_HPP
#define LLSFREQ_NLS_HPP

#include <cstddef>

#include "llsfreq/estimator.hpp"
#include "llsfreq/phase_estimator.hpp"
#include "llsfreq/signal.hpp"

namespace llsfreq {

/// Batch nonlinear least squares: maximise the concentrated objective
/// C(w) = |A(w) b*(w)|^2 = P(w)^T G(w)^-1 P(w) over a coarse grid, then
/// refine the best cell by golden-section search.
struct NlsConfig {
    double initial_omega = 0.0; ///< centre of the search window, rad/s
    double half_width = 0.0;    ///< rad/s
    double grid_step = 0.0;     ///< coarse grid resolution, rad/s
    double tolerance = 1e-6;    ///< final bracket width, rad/s
    int max_iterations = 200;

    /// Window wide enough for `max_offset` plus the main lobe of a record of
    /// `record_duration` seconds, sampled at an eighth of the lobe width.
    static NlsConfig for_record(double initial_omega, double max_offset, double record_duration);

    void validate() const;
};

/// Concentrated objective at trial frequency omega, with record-local time
/// t_i = i/Fs. Invariant to the signal phase and to the time origin.
double nls_objective(const SampledSignal& signal, double omega);

/// The amplitude fit b*(omega) behind the objective, on [sin cos] columns.
QuadratureFit nls_amplitudes(const SampledSignal& signal, double omega);

/// Raises boundary_hit when the grid maximum sits on the search edge and
/// no_convergence when golden-section exceeds max_iterations.
FrequencyEstimate nls_estimate(const SampledSignal& signal, const NlsConfig& config);

} // namespace llsfreq

#endif
