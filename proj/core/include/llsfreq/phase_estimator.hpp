#ifndef LLSFREQ_PHASE_ESTIMATOR_HPP
#define LLSFREQ_PHASE_ESTIMATOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "llsfreq/mat2.hpp"

namespace llsfreq {

/// Window geometry for one reference frequency. The window holds
/// n = round(Fs * 2*pi*q / omega_r) samples, and q_eff = n*omega_r/(2*pi*Fs)
/// is the fraction actually realised; everything downstream uses q_eff.
struct ReferenceConfig {
    double omega_r = 0.0;
    double q = 0.0;
    double sample_rate = 0.0;
    std::size_t window_length = 0;
    double q_eff = 0.0;

    double window_duration() const { return static_cast<double>(window_length) / sample_rate; }
    /// Rate of phase estimates, 1/t_n.
    double phase_rate() const { return sample_rate / static_cast<double>(window_length); }
};

ReferenceConfig make_reference_config(double omega_r, double q, double sample_rate);

/// The two projections sum(sin(w_r*tau_i)*y_i) and sum(cos(w_r*tau_i)*y_i).
struct QuadratureSums {
    double sin_proj = 0.0;
    double cos_proj = 0.0;
};

/// Fitted quadrature weights: y ~ b_sin*sin(w_r*tau) + b_cos*cos(w_r*tau).
struct QuadratureFit {
    double b_sin = 0.0;
    double b_cos = 0.0;
};

struct PhaseEstimate {
    double phase = 0.0;      ///< atan2(b_cos, b_sin), in (-pi, pi]
    double start_time = 0.0; ///< time of the first sample of the window
    QuadratureFit coefficients;
};

/// Raises undefined_phase when both coefficients are zero.
double phase_from_fit(const QuadratureFit& fit);

/// Precomputed reference tables and inverse Gram matrix for one window
/// configuration. Window-local time tau_i = i/Fs restarts at zero for every
/// window, so the estimated phase is the signal phase at the window start.
///
/// Immutable after construction; share freely between threads.
class PhaseWindowSolver {
public:
    /// Raises invalid_argument unless omega_r > 0, q > 0 and Fs > 2*f_r;
    /// window_too_short when n < 2; degenerate_window when cond(G) > 1e12.
    static PhaseWindowSolver build(double omega_r, double q, double sample_rate);

    /// Same solver with an explicit sample count instead of a cycle fraction.
    static PhaseWindowSolver with_length(double omega_r, std::size_t window_length,
                                         double sample_rate);

    const ReferenceConfig& config() const { return config_; }
    std::size_t window_length() const { return config_.window_length; }

    std::span<const double> sin_table() const { return sin_table_; }
    std::span<const double> cos_table() const { return cos_table_; }

    /// Exact discrete Gram matrix A^T A of the [sin cos] design.
    const Mat2& gram() const { return gram_; }
    /// Its inverse, J_phi.
    const Mat2& inverse_gram() const { return inverse_gram_; }

    /// Single pass over one window. Raises invalid_argument on a length mismatch.
    QuadratureSums project(std::span<const double> window) const;
    QuadratureFit solve(const QuadratureSums& sums) const;

    PhaseEstimate estimate(std::span<const double> window, double start_time) const;

private:
    PhaseWindowSolver(ReferenceConfig config);

    ReferenceConfig config_;
    std::vector<double> sin_table_;
    std::vector<double> cos_table_;
    Mat2 gram_;
    Mat2 inverse_gram_;
};

/// Per-sample form of PhaseWindowSolver::project: two multiply-accumulates
/// against the solver tables per sample. Single writer.
class PhaseAccumulator {
public:
    explicit PhaseAccumulator(const PhaseWindowSolver& solver) : solver_(&solver) {}

    /// Returns true when the sample completed a window; the sums then stay
    /// readable until reset().
    bool push(double sample) {
        sums_.sin_proj += solver_->sin_table()[count_] * sample;
        sums_.cos_proj += solver_->cos_table()[count_] * sample;
        return ++count_ == solver_->window_length();
    }

    const QuadratureSums& sums() const { return sums_; }
    std::size_t count() const { return count_; }
    bool complete() const { return count_ == solver_->window_length(); }
    void reset() {
        sums_ = {};
        count_ = 0;
    }
    void rebind(const PhaseWindowSolver& solver) {
        solver_ = &solver;
        reset();
    }

private:
    const PhaseWindowSolver* solver_;
    QuadratureSums sums_;
    std::size_t count_ = 0;
};

} // namespace llsfreq

#endif
