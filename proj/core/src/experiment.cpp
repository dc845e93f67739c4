#include "llsfreq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "llsfreq/dpll.hpp"
#include "llsfreq/error.hpp"
#include "llsfreq/nls.hpp"

namespace llsfreq {

namespace {

constexpr std::uint64_t theta_stream = 0x7468657461ULL;

struct Geometry {
    EstimatorConfig config;
    BlockPlan plan;
};

Geometry resolve_geometry(const ExperimentRow& row) {
    if (!(row.f_hz > 0.0)) raise(Errc::invalid_argument, "row frequency must be positive");
    if (!(row.amplitude > 0.0)) raise(Errc::invalid_argument, "row amplitude must be positive");
    if (!(row.fs_hz > 2.0 * row.f_hz)) raise(Errc::invalid_argument, "row sample rate must exceed 2f");
    Geometry g;
    g.config = EstimatorConfig::from_hz(row.fr_hz, row.fs_hz, row.resolved_block_duration(), row.q);
    if (row.snr_db) g.config.snr = snr_db_to_linear(*row.snr_db);
    g.plan = plan_block(g.config, g.config.omega_r);
    return g;
}

NoiseSpec row_noise(const ExperimentRow& row) {
    return row.snr_db ? NoiseSpec::from_snr_db(row.amplitude, *row.snr_db) : NoiseSpec::noiseless();
}

void fill_geometry(RowReport& r, const Geometry& g) {
    r.q_eff = g.plan.reference.q_eff;
    r.window_length = g.plan.reference.window_length;
    r.windows = g.plan.windows;
    r.block_duration = g.plan.duration();
}

double random_theta(std::uint64_t trial_seed) {
    NoiseSource src(stream_seed(trial_seed, theta_stream));
    return src.uniform(0.0, two_pi);
}

std::uint64_t row_seed(std::uint64_t root, std::size_t row_index) {
    return stream_seed(root, static_cast<std::uint64_t>(row_index));
}

// Per-trial outcome: NaN marks a failed trial.
std::vector<double> finite_only(const std::vector<double>& values, std::size_t& failed) {
    std::vector<double> out;
    out.reserve(values.size());
    failed = 0;
    for (double v : values) {
        if (std::isfinite(v)) out.push_back(v);
        else ++failed;
    }
    return out;
}

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

template <class RowFn>
ExperimentReport run_rows(const ExperimentSpec& spec, RowFn&& fn) {
    spec.validate();
    ExperimentReport report;
    report.spec = spec;
    for (std::size_t i = 0; i < spec.rows.size(); ++i) {
        RowReport r;
        r.row = spec.rows[i];
        const auto start = std::chrono::steady_clock::now();
        try {
            fn(i, r);
        } catch (const Error& e) {
            r.status = e.what();
        }
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.rows.push_back(std::move(r));
    }
    return report;
}

std::vector<TracePoint> lls_trace(const std::vector<FrequencyEstimate>& estimates) {
    std::vector<TracePoint> out;
    out.reserve(estimates.size());
    for (const auto& e : estimates) out.push_back({e.time, e.frequency_hz, true});
    return out;
}

std::vector<TracePoint> dpll_points(const DpllTrace& trace, std::size_t decimation) {
    std::vector<TracePoint> out;
    const std::size_t step = std::max<std::size_t>(1, decimation);
    for (std::size_t i = 0; i < trace.time.size(); i += step)
        out.push_back({trace.time[i], rad_to_hz(trace.omega[i]), trace.locked[i] != 0});
    if (!trace.time.empty() && (trace.time.size() - 1) % step != 0) {
        const std::size_t i = trace.time.size() - 1;
        out.push_back({trace.time[i], rad_to_hz(trace.omega[i]), trace.locked[i] != 0});
    }
    return out;
}

DpllConfig dpll_config_for(const ExperimentRow& row, double center_hz) {
    if (!row.settling_time) raise(Errc::invalid_argument, "DPLL rows need a settling time");
    DpllConfig c;
    c.center_omega = hz_to_rad(center_hz);
    c.settling_time = *row.settling_time;
    c.sample_rate = row.fs_hz;
    return c;
}

ScenarioResult run_scenario(const ExperimentRow& row, const ScenarioSpec& scenario,
                            std::uint64_t seed, bool jump) {
    if (!(scenario.duration > 0.0)) raise(Errc::invalid_argument, "scenario duration must be positive");
    ScenarioResult out;
    out.name = jump ? "jump" : "startup";
    out.settling_time = row.settling_time.value_or(0.0);
    out.true_before_hz = row.f_hz;
    out.true_after_hz = jump ? row.f_hz + scenario.jump_hz : row.f_hz;
    out.jump_time = jump ? scenario.jump_time : std::numeric_limits<double>::infinity();

    const std::size_t count = samples_for_duration(scenario.duration, row.fs_hz);
    ToneStep step;
    step.amplitude = row.amplitude;
    step.omega_before = hz_to_rad(out.true_before_hz);
    step.omega_after = hz_to_rad(out.true_after_hz);
    step.step_time = jump ? scenario.jump_time : scenario.duration * 2.0;
    step.phase = random_theta(seed);
    const SampledSignal signal = generate_tone_step(step, row_noise(row), row.fs_hz, count, seed);

    EstimatorConfig lls = EstimatorConfig::from_hz(row.fr_hz, row.fs_hz, scenario.block_duration, row.q);
    const auto estimates = estimate_frequency_blocks(signal, lls);
    out.lls = lls_trace(estimates);
    const double dt = 1.0 / row.fs_hz;
    for (const auto& e : estimates) {
        const double block_start =
            e.time - static_cast<double>(e.diagnostics.samples_used - 1) * dt;
        if (!out.lls_first_block_error_hz)
            out.lls_first_block_error_hz = e.frequency_hz - out.true_before_hz;
        if (jump && !out.lls_first_post_jump_error_hz && block_start >= scenario.jump_time - 0.5 * dt)
            out.lls_first_post_jump_error_hz = e.frequency_hz - out.true_after_hz;
    }

    const DpllTrace trace = dpll_track(signal, dpll_config_for(row, row.fr_hz));
    out.dpll = dpll_points(trace, scenario.decimation);
    out.dpll_pull_in_time = trace.pull_in_time;
    out.dpll_final_hz = rad_to_hz(trace.final_omega);
    if (jump) out.dpll_lost_lock_after_jump = trace.unlocked_after(scenario.jump_time);
    return out;
}

std::string q_label(const char* prefix, double q) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_q%.4f", prefix, q);
    return buf;
}

} // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
    switch (kind) {
    case ExperimentKind::bias_table: return "bias-table";
    case ExperimentKind::mse_table: return "mse-table";
    case ExperimentKind::compare_nls: return "compare-nls";
    case ExperimentKind::compare_dpll: return "compare-dpll";
    case ExperimentKind::bias_sweep: return "bias-sweep";
    case ExperimentKind::fig_data: return "fig-data";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
    for (auto k : {ExperimentKind::bias_table, ExperimentKind::mse_table, ExperimentKind::compare_nls,
                   ExperimentKind::compare_dpll, ExperimentKind::bias_sweep, ExperimentKind::fig_data})
        if (to_string(k) == text) return k;
    raise(Errc::parse_error, "unknown experiment kind '" + std::string(text) + "'");
}

double ExperimentRow::resolved_block_duration() const {
    if (block_duration) return *block_duration;
    if (settling_time) return *settling_time / 2.0;
    raise(Errc::invalid_argument, "row needs t_N or a settling time");
}

FigureParams FigureParams::defaults_for(const std::string& figure) {
    FigureParams p;
    p.figure = figure;
    if (figure == "fig-3") {
        p.f_hz = 20000.0;
        p.fr_hz = 16000.0;
        p.q_values = {0.5, optimal_window_fraction};
    } else if (figure == "fig-4") {
        p.f_hz = 18000.0;
        p.fr_hz = 18180.0;
        p.q_values = {0.5, optimal_window_fraction, 1.0};
    } else if (figure != "fig-5") {
        raise(Errc::invalid_argument, "unknown figure '" + figure + "'");
    }
    return p;
}

void ExperimentSpec::validate() const {
    if (trials < 1) raise(Errc::invalid_argument, "trials must be at least 1");
    if (kind == ExperimentKind::bias_table && phases < 1)
        raise(Errc::invalid_argument, "phase sweep needs at least one phase");
    const bool needs_rows = kind != ExperimentKind::bias_sweep && kind != ExperimentKind::fig_data;
    if (needs_rows && rows.empty()) raise(Errc::invalid_argument, "experiment has no rows");
}

ErrorStats ErrorStats::from_errors(const std::vector<double>& errors) {
    ErrorStats s;
    s.count = errors.size();
    if (errors.empty()) {
        s.mean = s.variance = s.mse = s.std_dev = nan_value;
        return s;
    }
    const double k = static_cast<double>(errors.size());
    double sum = 0.0, sq = 0.0;
    for (double e : errors) {
        sum += e;
        sq += e * e;
    }
    s.mean = sum / k;
    s.mse = sq / k;
    double dev = 0.0;
    for (double e : errors) dev += (e - s.mean) * (e - s.mean);
    s.variance = dev / k;
    s.std_dev = errors.size() > 1 ? std::sqrt(dev / (k - 1.0)) : 0.0;
    return s;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

ExperimentReport run_bias_experiment(const ExperimentSpec& spec) {
    return run_rows(spec, [&](std::size_t, RowReport& r) {
        if (r.row.snr_db) raise(Errc::invalid_argument, "bias rows must be noiseless");
        const Geometry g = resolve_geometry(r.row);
        fill_geometry(r, g);
        r.record_samples = g.plan.samples();
        const ToneParams base = ToneParams::from_hz(r.row.amplitude, r.row.f_hz, 0.0);

        std::vector<double> errors(spec.phases, nan_value);
        parallel_for(spec.phases, spec.threads, [&](std::size_t j) {
            ToneParams tone = base;
            tone.phase = two_pi * static_cast<double>(j) / static_cast<double>(spec.phases);
            const SampledSignal s = generate_noisy_tone_samples(tone, NoiseSpec::noiseless(),
                                                                r.row.fs_hz, r.record_samples, 0);
            try {
                errors[j] = estimate_frequency_batch(s, g.config).frequency_hz - r.row.f_hz;
            } catch (const Error&) {
            }
        });
        r.trials = spec.phases;
        r.lls = ErrorStats::from_errors(finite_only(errors, r.failed_trials));
    });
}

ExperimentReport run_mse_experiment(const ExperimentSpec& spec) {
    return run_rows(spec, [&](std::size_t row_index, RowReport& r) {
        const Geometry g = resolve_geometry(r.row);
        fill_geometry(r, g);
        r.record_samples = g.plan.samples();
        const NoiseSpec noise = row_noise(r.row);
        const std::uint64_t seed0 = row_seed(spec.root_seed, row_index);

        std::vector<double> errors(spec.trials, nan_value);
        parallel_for(spec.trials, spec.threads, [&](std::size_t k) {
            const std::uint64_t seed = stream_seed(seed0, k);
            const ToneParams tone = ToneParams::from_hz(r.row.amplitude, r.row.f_hz, random_theta(seed));
            const SampledSignal s =
                generate_noisy_tone_samples(tone, noise, r.row.fs_hz, r.record_samples, seed);
            try {
                errors[k] = estimate_frequency_batch(s, g.config).frequency_hz - r.row.f_hz;
            } catch (const Error&) {
            }
        });
        r.trials = spec.trials;
        r.lls = ErrorStats::from_errors(finite_only(errors, r.failed_trials));
        if (r.row.snr_db)
            r.predicted_variance_hz2 = rad2_to_hz2(predicted_freq_variance(
                r.row.fs_hz, r.block_duration, snr_db_to_linear(*r.row.snr_db)));
    });
}

ExperimentReport run_comparison(const ExperimentSpec& spec) {
    const bool dpll = spec.kind == ExperimentKind::compare_dpll;
    if (!dpll && spec.kind != ExperimentKind::compare_nls)
        raise(Errc::invalid_argument, "comparison needs kind compare-nls or compare-dpll");

    ExperimentReport report = run_rows(spec, [&](std::size_t row_index, RowReport& r) {
        const Geometry g = resolve_geometry(r.row);
        fill_geometry(r, g);
        r.baseline = dpll ? "dpll" : "nls";
        std::optional<DpllConfig> dcfg;
        if (dpll) {
            dcfg = dpll_config_for(r.row, r.row.f_hz);
            dcfg->validate();
            r.record_samples = samples_for_duration(10.0 * *r.row.settling_time, r.row.fs_hz);
        } else {
            r.record_samples = g.plan.samples();
        }
        const NoiseSpec noise = row_noise(r.row);
        const std::uint64_t seed0 = row_seed(spec.root_seed, row_index);

        std::vector<double> lls_err(spec.trials, nan_value), base_err(spec.trials, nan_value);
        std::vector<char> lost(spec.trials, 0);
        parallel_for(spec.trials, spec.threads, [&](std::size_t k) {
            const std::uint64_t seed = stream_seed(seed0, k);
            const ToneParams tone = ToneParams::from_hz(r.row.amplitude, r.row.f_hz, random_theta(seed));
            const SampledSignal s =
                generate_noisy_tone_samples(tone, noise, r.row.fs_hz, r.record_samples, seed);
            try {
                lls_err[k] = estimate_frequency_batch(s, g.config).frequency_hz - r.row.f_hz;
            } catch (const Error&) {
            }
            try {
                if (dpll) {
                    const DpllTrace trace = dpll_track(s, *dcfg);
                    base_err[k] = rad_to_hz(trace.final_omega) - r.row.f_hz;
                    lost[k] = trace.lost_lock ? 1 : 0;
                } else {
                    const NlsConfig ncfg = NlsConfig::for_record(
                        g.config.omega_r, hz_to_rad(std::abs(r.row.delta_f_hz())), s.duration());
                    base_err[k] = nls_estimate(s, ncfg).frequency_hz - r.row.f_hz;
                }
            } catch (const Error&) {
            }
        });
        r.trials = spec.trials;
        r.lls = ErrorStats::from_errors(finite_only(lls_err, r.failed_trials));
        r.baseline_stats = ErrorStats::from_errors(finite_only(base_err, r.baseline_failed));
        r.lost_lock_trials = static_cast<std::size_t>(std::count(lost.begin(), lost.end(), 1));
        if (r.baseline_stats.count > 1 && r.baseline_stats.std_dev > 0.0)
            r.std_ratio = r.lls.std_dev / r.baseline_stats.std_dev;
        if (r.row.snr_db)
            r.predicted_variance_hz2 = rad2_to_hz2(predicted_freq_variance(
                r.row.fs_hz, r.block_duration, snr_db_to_linear(*r.row.snr_db)));
    });

    if (dpll && spec.scenario.enabled) {
        for (std::size_t i = 0; i < spec.rows.size(); ++i) {
            if (report.rows[i].status != "ok") continue;
            const std::uint64_t seed = stream_seed(row_seed(spec.root_seed, i), spec.trials);
            report.scenarios.push_back(run_startup_scenario(spec.rows[i], spec.scenario, seed));
            report.scenarios.push_back(run_jump_scenario(spec.rows[i], spec.scenario, seed));
        }
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    switch (spec.kind) {
    case ExperimentKind::bias_table: return run_bias_experiment(spec);
    case ExperimentKind::mse_table: return run_mse_experiment(spec);
    case ExperimentKind::compare_nls:
    case ExperimentKind::compare_dpll: return run_comparison(spec);
    default: raise(Errc::invalid_argument, "kind has no tabular report; use the figure commands");
    }
}

ScenarioResult run_startup_scenario(const ExperimentRow& row, const ScenarioSpec& scenario,
                                    std::uint64_t seed) {
    return run_scenario(row, scenario, seed, false);
}

ScenarioResult run_jump_scenario(const ExperimentRow& row, const ScenarioSpec& scenario,
                                 std::uint64_t seed) {
    return run_scenario(row, scenario, seed, true);
}

FigureData emit_figure_data(const FigureParams& params) {
    const double w = hz_to_rad(params.f_hz);
    const double wr = hz_to_rad(params.fr_hz);
    FigureData out;
    if (params.figure == "fig-5") {
        const QSweep sweep = q_sweep(w, wr, params.q_min, params.q_max, params.steps, params.grid_size);
        out.columns = {"q", "bias_variance_rad2"};
        for (std::size_t i = 0; i < sweep.q.size(); ++i)
            out.rows.push_back({sweep.q[i], sweep.bias_variance[i]});
        return out;
    }
    const bool fig3 = params.figure == "fig-3";
    if (!fig3 && params.figure != "fig-4")
        raise(Errc::invalid_argument, "unknown figure '" + params.figure + "'");
    const std::vector<double> qs = params.q_values.empty()
                                       ? FigureParams::defaults_for(params.figure).q_values
                                       : params.q_values;
    std::vector<BiasProfile> profiles;
    out.columns = {"phi"};
    for (double q : qs) {
        profiles.push_back(phase_bias_profile(w, wr, q, params.grid_size));
        out.columns.push_back(q_label(fig3 ? "expected" : "bias", q));
    }
    for (std::size_t i = 0; i < params.grid_size; ++i) {
        std::vector<double> line{profiles.front().phi[i]};
        for (const auto& p : profiles) line.push_back(fig3 ? p.expected[i] : p.bias[i]);
        out.rows.push_back(std::move(line));
    }
    return out;
}

namespace {

ExperimentRow make_row(double f, double fr, std::optional<double> snr_db,
                       std::optional<double> t_n, std::optional<double> settling = std::nullopt) {
    ExperimentRow r;
    r.f_hz = f;
    r.fr_hz = fr;
    r.snr_db = snr_db;
    r.block_duration = t_n;
    r.settling_time = settling;
    return r;
}

} // namespace

ExperimentSpec default_table1_spec() {
    ExperimentSpec s;
    s.kind = ExperimentKind::bias_table;
    s.trials = 1;
    for (auto [f, fr] : {std::pair{32320.0, 32e3}, {31680.0, 32e3}, {323200.0, 320e3},
                         {352000.0, 320e3}, {288000.0, 320e3}})
        s.rows.push_back(make_row(f, fr, std::nullopt, 500e-6));
    return s;
}

ExperimentSpec default_table2_spec() {
    ExperimentSpec s;
    s.kind = ExperimentKind::mse_table;
    s.trials = 500;
    for (double t : {1e-3, 0.8e-3, 0.6e-3, 0.4e-3, 0.2e-3})
        s.rows.push_back(make_row(500e3, 505e3, 20.0, t));
    return s;
}

ExperimentSpec default_table3_spec() {
    ExperimentSpec s;
    s.kind = ExperimentKind::compare_nls;
    s.trials = 50;
    for (double t : {0.05e-3, 0.1e-3, 0.2e-3, 1e-3, 2e-3})
        s.rows.push_back(make_row(200e3, 195e3, 27.0, t));
    return s;
}

ExperimentSpec default_table4_spec() {
    ExperimentSpec s;
    s.kind = ExperimentKind::compare_dpll;
    s.trials = 50;
    for (double settling : {0.05e-3, 0.1e-3, 0.2e-3, 1e-3, 2e-3})
        s.rows.push_back(make_row(400e3, 395e3, 27.0, std::nullopt, settling));
    return s;
}

} // namespace llsfreq
