#ifndef LLSFREQ_ESTIMATOR_HPP
#define LLSFREQ_ESTIMATOR_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "llsfreq/phase_estimator.hpp"
#include "llsfreq/signal.hpp"
#include "llsfreq/slope_fit.hpp"
#include "llsfreq/theory.hpp"

namespace llsfreq {

struct EstimatorConfig {
    double omega_r = 0.0;
    double q = optimal_window_fraction;
    /// 0 means "take it from the signal" in the batch functions.
    double sample_rate = 0.0;
    /// Time per frequency estimate, t_N. Quantised to N = floor(t_N/t_n) windows.
    std::optional<double> block_duration;
    /// Explicit N; wins over block_duration when both are set.
    std::optional<std::size_t> block_windows;
    /// After every estimate, move the reference to omega_hat and rebuild tables.
    bool retune = false;
    /// Linear SNR; when set, estimates carry the predicted variance.
    std::optional<double> snr;

    static EstimatorConfig from_hz(double reference_hz, double sample_rate,
                                   std::optional<double> block_duration,
                                   double q = optimal_window_fraction);
};

/// Resolved geometry of one estimation block.
struct BlockPlan {
    ReferenceConfig reference;
    std::size_t windows = 0; ///< N

    std::size_t samples() const { return windows * reference.window_length; }
    double duration() const { return static_cast<double>(windows) * reference.window_duration(); }
};

/// Raises invalid_argument when neither block size is set or N < 2.
BlockPlan plan_block(const EstimatorConfig& config, double omega_r);

struct EstimateDiagnostics {
    double omega_r = 0.0;
    std::size_t window_length = 0;
    double q_eff = 0.0;
    std::size_t windows_used = 0;
    std::size_t samples_used = 0;
    std::size_t samples_discarded = 0;
    double block_duration = 0.0;          ///< realised t_N = N*t_n
    double tracking_half_range_hz = 0.0;  ///< F_phi/2
    double offset_hz = 0.0;               ///< f_hat - f_r
    bool tracking_range_exceeded = false; ///< |f_hat - f_r| > F_phi/2: unwrap may alias
    std::size_t undefined_windows = 0;    ///< streaming only: all-zero windows taken as phase 0
    std::optional<double> predicted_variance_hz2;
};

struct FrequencyEstimate {
    double omega = 0.0;
    double frequency_hz = 0.0; ///< omega / (2*pi)
    double time = 0.0;         ///< time of the last consumed sample
    EstimateDiagnostics diagnostics;
};

/// One estimate from the leading windows of `signal`: N windows when the
/// config sets a block size and the record holds them, otherwise every
/// complete window. Raises insufficient_data with fewer than 2 windows.
FrequencyEstimate estimate_frequency_batch(const SampledSignal& signal,
                                           const EstimatorConfig& config);

/// Consecutive non-overlapping blocks of N windows, honouring `retune`.
/// Produces the same sequence the streaming tracker emits for this record.
std::vector<FrequencyEstimate> estimate_frequency_blocks(const SampledSignal& signal,
                                                         const EstimatorConfig& config);

/// Streaming form: per sample, two multiply-accumulates; per window, one
/// arctangent and one weighted-sum update; per block, one estimate.
/// One tracker per stream; not thread-safe.
class FrequencyTracker {
public:
    explicit FrequencyTracker(EstimatorConfig config, double start_time = 0.0);

    std::optional<FrequencyEstimate> push(double sample);
    std::vector<FrequencyEstimate> push(std::span<const double> samples);

    double omega_r() const { return plan_.reference.omega_r; }
    const BlockPlan& plan() const { return plan_; }
    std::uint64_t samples_seen() const { return sample_index_; }

private:
    void configure(double omega_r);
    FrequencyEstimate finish_block();

    EstimatorConfig config_;
    double start_time_;
    std::unique_ptr<PhaseWindowSolver> solver_;
    BlockPlan plan_;
    std::vector<double> slope_weights_;
    std::optional<PhaseAccumulator> accumulator_;
    std::optional<OnlineUnwrapper> unwrapper_;
    std::size_t window_index_ = 0;
    double weighted_sum_ = 0.0;
    std::size_t undefined_windows_ = 0;
    std::uint64_t sample_index_ = 0;
};

} // namespace llsfreq

#endif
