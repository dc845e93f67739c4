#include "llsfreq/estimator.hpp"

#include <cmath>
#include <string>

#include "llsfreq/angle.hpp"
#include "llsfreq/error.hpp"

namespace llsfreq {
namespace {

double resolve_sample_rate(const EstimatorConfig& config, const SampledSignal& signal) {
    if (config.sample_rate == 0.0) return signal.sample_rate();
    if (std::abs(config.sample_rate - signal.sample_rate()) > 1e-9 * signal.sample_rate())
        raise(Errc::invalid_argument, "config sample rate does not match the signal");
    return signal.sample_rate();
}

std::size_t windows_for(const EstimatorConfig& config, const ReferenceConfig& ref) {
    if (config.block_windows) return *config.block_windows;
    if (!config.block_duration) return 0;
    const double t_n = ref.window_duration();
    if (!(*config.block_duration > 0.0))
        raise(Errc::invalid_argument, "block duration must be positive");
    // Relative guard so an exact multiple of t_n is not floored one short.
    return static_cast<std::size_t>(std::floor(*config.block_duration / t_n * (1.0 + 1e-12)));
}

void fill_diagnostics(EstimateDiagnostics& d, const EstimatorConfig& config,
                      const ReferenceConfig& ref, std::size_t windows, double omega_hat) {
    d.omega_r = ref.omega_r;
    d.window_length = ref.window_length;
    d.q_eff = ref.q_eff;
    d.windows_used = windows;
    d.samples_used = windows * ref.window_length;
    d.block_duration = static_cast<double>(windows) * ref.window_duration();
    d.tracking_half_range_hz = 0.5 * ref.phase_rate();
    d.offset_hz = rad_to_hz(omega_hat - ref.omega_r);
    d.tracking_range_exceeded = std::abs(d.offset_hz) > d.tracking_half_range_hz;
    if (config.snr)
        d.predicted_variance_hz2 =
            rad2_to_hz2(predicted_freq_variance(ref.sample_rate, d.block_duration, *config.snr));
}

// Stage 1 on `windows` consecutive windows starting at `first`, then unwrap
// and stage 2. Times are absolute.
FrequencyEstimate estimate_windows(const SampledSignal& signal, std::size_t first,
                                   const PhaseWindowSolver& solver, std::size_t windows,
                                   const EstimatorConfig& config) {
    const std::size_t n = solver.window_length();
    const auto samples = signal.samples();
    PhaseSeries series;
    series.wrapped = true;
    series.times.reserve(windows);
    series.phases.reserve(windows);
    for (std::size_t k = 0; k < windows; ++k) {
        const std::size_t start = first + k * n;
        const PhaseEstimate est = solver.estimate(samples.subspan(start, n), signal.time_at(start));
        series.times.push_back(est.start_time);
        series.phases.push_back(est.phase);
    }
    const PhaseSeries unwrapped = unwrap_phase_series(series, solver.config().omega_r);
    const AffineFit fit = fit_frequency(unwrapped);

    FrequencyEstimate out;
    out.omega = fit.slope;
    out.frequency_hz = rad_to_hz(fit.slope);
    out.time = signal.time_at(first + windows * n - 1);
    fill_diagnostics(out.diagnostics, config, solver.config(), windows, fit.slope);
    return out;
}

bool retune_target_valid(double omega_hat, double sample_rate) {
    return std::isfinite(omega_hat) && omega_hat > 0.0 && sample_rate > 2.0 * rad_to_hz(omega_hat);
}

} // namespace

EstimatorConfig EstimatorConfig::from_hz(double reference_hz, double sample_rate,
                                         std::optional<double> block_duration, double q) {
    EstimatorConfig c;
    c.omega_r = hz_to_rad(reference_hz);
    c.sample_rate = sample_rate;
    c.block_duration = block_duration;
    c.q = q;
    return c;
}

BlockPlan plan_block(const EstimatorConfig& config, double omega_r) {
    if (!(config.sample_rate > 0.0)) raise(Errc::invalid_argument, "sample rate must be set");
    BlockPlan plan;
    plan.reference = make_reference_config(omega_r, config.q, config.sample_rate);
    if (!config.block_windows && !config.block_duration)
        raise(Errc::invalid_argument, "block size (t_N or N) is required");
    plan.windows = windows_for(config, plan.reference);
    if (plan.windows < 2)
        raise(Errc::invalid_argument, "block holds " + std::to_string(plan.windows) +
                                          " windows; at least 2 are required");
    return plan;
}

FrequencyEstimate estimate_frequency_batch(const SampledSignal& signal,
                                           const EstimatorConfig& config) {
    const double fs = resolve_sample_rate(config, signal);
    const PhaseWindowSolver solver = PhaseWindowSolver::build(config.omega_r, config.q, fs);
    const std::size_t n = solver.window_length();
    const std::size_t available = signal.size() / n;
    if (available < 2)
        raise(Errc::insufficient_data, "record holds " + std::to_string(available) +
                                           " complete windows of " + std::to_string(n) +
                                           " samples; at least 2 are required");
    std::size_t windows = available;
    if (const std::size_t planned = windows_for(config, solver.config()); planned > 0) {
        if (planned < 2) raise(Errc::invalid_argument, "block holds fewer than 2 windows");
        windows = std::min(planned, available);
    }
    FrequencyEstimate out = estimate_windows(signal, 0, solver, windows, config);
    out.diagnostics.samples_discarded = signal.size() - out.diagnostics.samples_used;
    return out;
}

std::vector<FrequencyEstimate> estimate_frequency_blocks(const SampledSignal& signal,
                                                         const EstimatorConfig& config) {
    EstimatorConfig cfg = config;
    cfg.sample_rate = resolve_sample_rate(config, signal);
    double omega_r = cfg.omega_r;

    std::vector<FrequencyEstimate> out;
    std::size_t first = 0;
    for (;;) {
        const BlockPlan plan = plan_block(cfg, omega_r);
        if (signal.size() - first < plan.samples()) break;
        const PhaseWindowSolver solver(PhaseWindowSolver::build(omega_r, cfg.q, cfg.sample_rate));
        FrequencyEstimate est = estimate_windows(signal, first, solver, plan.windows, cfg);
        first += plan.samples();
        est.diagnostics.samples_discarded = 0;
        if (cfg.retune && retune_target_valid(est.omega, cfg.sample_rate)) omega_r = est.omega;
        out.push_back(est);
    }
    return out;
}

FrequencyTracker::FrequencyTracker(EstimatorConfig config, double start_time)
    : config_(config), start_time_(start_time) {
    configure(config_.omega_r);
}

void FrequencyTracker::configure(double omega_r) {
    plan_ = plan_block(config_, omega_r);
    solver_ = std::make_unique<PhaseWindowSolver>(
        PhaseWindowSolver::build(omega_r, config_.q, config_.sample_rate));
    const SlopeWeights weights =
        SlopeWeights::uniform(plan_.windows, plan_.reference.window_duration());
    slope_weights_.assign(weights.slope_weights().begin(), weights.slope_weights().end());
    accumulator_.emplace(*solver_);
    unwrapper_.emplace(omega_r);
    window_index_ = 0;
    weighted_sum_ = 0.0;
    undefined_windows_ = 0;
}

std::optional<FrequencyEstimate> FrequencyTracker::push(double sample) {
    ++sample_index_;
    if (!accumulator_->push(sample)) return std::nullopt;

    const QuadratureSums& sums = accumulator_->sums();
    double phase = 0.0;
    if (sums.sin_proj == 0.0 && sums.cos_proj == 0.0) {
        ++undefined_windows_;
    } else {
        phase = phase_from_fit(solver_->solve(sums));
    }
    accumulator_->reset();

    // Block-local window time; the slope does not depend on the time origin.
    const double t_k = static_cast<double>(window_index_) * plan_.reference.window_duration();
    const double psi = unwrapper_->push(t_k, phase);
    weighted_sum_ += slope_weights_[window_index_] * (psi + plan_.reference.omega_r * t_k);

    if (++window_index_ < plan_.windows) return std::nullopt;
    return finish_block();
}

FrequencyEstimate FrequencyTracker::finish_block() {
    FrequencyEstimate out;
    out.omega = weighted_sum_;
    out.frequency_hz = rad_to_hz(weighted_sum_);
    out.time = start_time_ + static_cast<double>(sample_index_ - 1) / config_.sample_rate;
    fill_diagnostics(out.diagnostics, config_, plan_.reference, plan_.windows, out.omega);
    out.diagnostics.undefined_windows = undefined_windows_;

    const double next_omega_r =
        config_.retune && retune_target_valid(out.omega, config_.sample_rate) ? out.omega
                                                                              : plan_.reference.omega_r;
    if (next_omega_r != plan_.reference.omega_r) {
        configure(next_omega_r);
    } else {
        unwrapper_->reset();
        window_index_ = 0;
        weighted_sum_ = 0.0;
        undefined_windows_ = 0;
    }
    return out;
}

std::vector<FrequencyEstimate> FrequencyTracker::push(std::span<const double> samples) {
    std::vector<FrequencyEstimate> out;
    for (double s : samples)
        if (auto e = push(s)) out.push_back(*e);
    return out;
}

} // namespace llsfreq
