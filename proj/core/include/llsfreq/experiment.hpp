#ifndef LLSFREQ_EXPERIMENT_HPP
#define LLSFREQ_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llsfreq/estimator.hpp"
#include "llsfreq/theory.hpp"

namespace llsfreq {

enum class ExperimentKind { bias_table, mse_table, compare_nls, compare_dpll, bias_sweep, fig_data };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view text);

/// One parameter row. Frequencies in Hz. For compare-dpll rows the block
/// duration is derived as settling/2 when only the settling time is given.
struct ExperimentRow {
    double f_hz = 0.0;
    double fr_hz = 0.0;
    double fs_hz = 10e6;
    std::optional<double> snr_db; ///< empty: noiseless
    std::optional<double> block_duration;
    std::optional<double> settling_time;
    double q = optimal_window_fraction;
    double amplitude = 1.0;

    double delta_f_hz() const { return f_hz - fr_hz; }
    double resolved_block_duration() const;
};

/// Startup and frequency-jump traces for compare-dpll.
struct ScenarioSpec {
    bool enabled = true;
    double block_duration = 1e-3; ///< LLS t_N in the scenarios
    double duration = 10e-3;
    double jump_time = 5e-3;
    double jump_hz = 5000.0;      ///< added to the row frequency at jump_time
    std::size_t decimation = 100; ///< keep every k-th DPLL sample in the trace
};

struct FigureParams {
    std::string figure = "fig-5"; ///< fig-3, fig-4 or fig-5
    double f_hz = 300300.0;
    double fr_hz = 300000.0;
    std::vector<double> q_values;  ///< fig-3/fig-4 curves
    double q_min = 0.25;           ///< fig-5 and bias-sweep range
    double q_max = 1.0;
    std::size_t steps = 751;
    std::size_t grid_size = 512;

    /// fig-3: f=20 kHz, f_r=16 kHz, q in {0.5, q*}; fig-4: f=18 kHz,
    /// f_r=18.18 kHz, q in {0.5, q*, 1}; fig-5: f=300.3 kHz, f_r=300 kHz.
    static FigureParams defaults_for(const std::string& figure);
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::mse_table;
    std::vector<ExperimentRow> rows;
    std::size_t trials = 500;
    std::uint64_t root_seed = 1;
    std::size_t phases = 64;  ///< theta sweep length for bias-table
    std::size_t threads = 0;  ///< 0: hardware concurrency
    std::string output;
    ScenarioSpec scenario;
    FigureParams figure;

    void validate() const;
};

/// Summary of per-trial frequency errors e_k = f_hat_k - f (Hz).
struct ErrorStats {
    std::size_t count = 0;
    double mean = 0.0;     ///< mean bias
    double variance = 0.0; ///< population variance
    double mse = 0.0;      ///< mean of e_k^2
    double std_dev = 0.0;  ///< sample standard deviation (K-1 normalisation)

    static ErrorStats from_errors(const std::vector<double>& errors);
};

struct RowReport {
    ExperimentRow row;
    std::string status = "ok";
    // Resolved geometry.
    double q_eff = 0.0;
    std::size_t window_length = 0;
    std::size_t windows = 0;
    double block_duration = 0.0;
    std::size_t record_samples = 0;
    // LLS.
    std::size_t trials = 0;
    std::size_t failed_trials = 0;
    ErrorStats lls;
    std::optional<double> predicted_variance_hz2;
    // Baseline (comparison kinds only).
    std::string baseline;
    std::size_t baseline_failed = 0;
    ErrorStats baseline_stats;
    std::optional<double> std_ratio; ///< std_LLS / std_baseline
    std::size_t lost_lock_trials = 0;
    double wall_time_s = 0.0;
};

struct TracePoint {
    double time = 0.0;
    double frequency_hz = 0.0;
    bool locked = true;
};

struct ScenarioResult {
    std::string name;          ///< "startup" or "jump"
    double settling_time = 0.0;
    double true_before_hz = 0.0;
    double true_after_hz = 0.0;
    double jump_time = 0.0;    ///< infinity for startup
    std::vector<TracePoint> lls;
    std::vector<TracePoint> dpll;
    std::optional<double> dpll_pull_in_time;
    bool dpll_lost_lock_after_jump = false;
    double dpll_final_hz = 0.0;
    std::optional<double> lls_first_block_error_hz;     ///< first block after t=0
    std::optional<double> lls_first_post_jump_error_hz; ///< first block starting at or after the jump
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<RowReport> rows;
    std::vector<ScenarioResult> scenarios;
};

ExperimentReport run_bias_experiment(const ExperimentSpec& spec);
ExperimentReport run_mse_experiment(const ExperimentSpec& spec);
ExperimentReport run_comparison(const ExperimentSpec& spec);
/// Dispatches on spec.kind (table and comparison kinds only).
ExperimentReport run_experiment(const ExperimentSpec& spec);

ScenarioResult run_startup_scenario(const ExperimentRow& row, const ScenarioSpec& scenario,
                                    std::uint64_t seed);
ScenarioResult run_jump_scenario(const ExperimentRow& row, const ScenarioSpec& scenario,
                                 std::uint64_t seed);

struct FigureData {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

FigureData emit_figure_data(const FigureParams& params);

ExperimentSpec default_table1_spec();
ExperimentSpec default_table2_spec();
ExperimentSpec default_table3_spec();
ExperimentSpec default_table4_spec();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; callers write results by index so output order does
/// not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

// Serialisation (experiment_io.cpp).

ExperimentSpec parse_experiment_spec(std::string_view json_text);
ExperimentSpec load_experiment_spec(const std::string& path);
std::string experiment_spec_to_json(const ExperimentSpec& spec);
/// FNV-1a 64 over the canonical JSON form.
std::uint64_t spec_hash(const ExperimentSpec& spec);

extern const char* const library_version;

void write_report_csv(std::ostream& out, const ExperimentReport& report, bool include_timing = true);
void write_scenarios_csv(std::ostream& out, const std::vector<ScenarioResult>& scenarios);
void write_figure_csv(std::ostream& out, const FigureData& data,
                      const std::vector<std::string>& metadata = {});

} // namespace llsfreq

#endif
