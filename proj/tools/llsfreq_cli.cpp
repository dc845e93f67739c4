// llsfreq command line front end. Frequencies are given in Hz.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "llsfreq/error.hpp"
#include "llsfreq/estimator.hpp"
#include "llsfreq/experiment.hpp"
#include "llsfreq/signal.hpp"
#include "llsfreq/signal_io.hpp"
#include "llsfreq/theory.hpp"

using namespace llsfreq;

namespace {

constexpr int exit_insufficient = 2;

// "-" or empty means standard output.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) raise(Errc::io_error, "cannot open " + path + " for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string sibling_path(const std::string& path, const std::string& suffix) {
    if (path.empty() || path == "-") return "traces" + suffix;
    std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

void print_diagnostics(const FrequencyEstimate& e) {
    const auto& d = e.diagnostics;
    std::printf("f_hat_hz=%.10g\n", e.frequency_hz);
    std::printf("f_r_hz=%.10g\n", rad_to_hz(d.omega_r));
    std::printf("offset_hz=%.10g\n", d.offset_hz);
    std::printf("q_eff=%.10g\n", d.q_eff);
    std::printf("n=%zu\n", d.window_length);
    std::printf("N=%zu\n", d.windows_used);
    std::printf("t_N_s=%.10g\n", d.block_duration);
    std::printf("samples_used=%zu\n", d.samples_used);
    std::printf("samples_discarded=%zu\n", d.samples_discarded);
    std::printf("tracking_half_range_hz=%.10g\n", d.tracking_half_range_hz);
    std::printf("tracking_range_exceeded=%d\n", d.tracking_range_exceeded ? 1 : 0);
    if (d.predicted_variance_hz2) std::printf("predicted_var_hz2=%.10g\n", *d.predicted_variance_hz2);
}

ExperimentSpec table_spec(int table) {
    switch (table) {
    case 1: return default_table1_spec();
    case 2: return default_table2_spec();
    case 3: return default_table3_spec();
    case 4: return default_table4_spec();
    default: raise(Errc::invalid_argument, "table must be 1, 2, 3 or 4");
    }
}

struct SpecOverrides {
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

void apply(ExperimentSpec& spec, const SpecOverrides& o) {
    if (o.trials) spec.trials = *o.trials;
    if (o.seed) spec.root_seed = *o.seed;
    if (o.threads) spec.threads = *o.threads;
}

void add_overrides(CLI::App* cmd, SpecOverrides& o) {
    cmd->add_option("--trials", o.trials, "Trials per row");
    cmd->add_option("--seed", o.seed, "Root seed");
    cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
}

void write_report(const ExperimentReport& report, const std::string& out, const std::string& traces) {
    Output o(out);
    write_report_csv(o.stream(), report);
    if (!report.scenarios.empty()) {
        const std::string path = traces.empty() ? sibling_path(out, "_traces.csv") : traces;
        Output t(path);
        write_scenarios_csv(t.stream(), report.scenarios);
        for (const auto& s : report.scenarios) {
            std::fprintf(stderr, "%s settling=%gs: dpll_pull_in=%s lls_first_err=%.4g Hz",
                         s.name.c_str(), s.settling_time,
                         s.dpll_pull_in_time ? std::to_string(*s.dpll_pull_in_time).c_str() : "never",
                         s.lls_first_block_error_hz.value_or(0.0));
            if (s.name == "jump")
                std::fprintf(stderr, " lls_post_jump_err=%.4g Hz dpll_lost_lock=%d",
                             s.lls_first_post_jump_error_hz.value_or(0.0),
                             s.dpll_lost_lock_after_jump ? 1 : 0);
            std::fprintf(stderr, "\n");
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-tone frequency estimation by two-stage linear least squares"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Write a noisy tone to a signal file");
    double sim_f = 0.0, sim_fs = 10e6, sim_duration = 1e-3, sim_amp = 1.0, sim_phase = 0.0;
    std::optional<double> sim_fr, sim_snr;
    bool sim_noiseless = false;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    sim->add_option("--f", sim_f, "Tone frequency (Hz)")->required();
    sim->add_option("--fr", sim_fr, "Reference frequency (Hz), echoed only");
    auto* snr_opt = sim->add_option("--snr-db", sim_snr, "SNR in dB");
    auto* nl_opt = sim->add_flag("--noiseless", sim_noiseless, "No additive noise");
    snr_opt->excludes(nl_opt);
    sim->add_option("--fs", sim_fs, "Sample rate (Hz)")->capture_default_str();
    sim->add_option("--duration", sim_duration, "Record length (s)")->capture_default_str();
    sim->add_option("--amplitude", sim_amp, "Amplitude B")->capture_default_str();
    sim->add_option("--phase", sim_phase, "Initial phase (rad)")->capture_default_str();
    sim->add_option("--seed", sim_seed, "Noise seed")->capture_default_str();
    sim->add_option("--out", sim_out, "Output file (.csv or raw f64 with .json sidecar)")->required();

    // estimate / track share the estimator options.
    std::string est_in;
    double est_fr = 0.0, est_q = optimal_window_fraction;
    std::optional<double> est_tn, est_snr;
    bool track_retune = false;
    auto* est = app.add_subcommand("estimate", "Batch frequency estimate of a signal file");
    auto* trk = app.add_subcommand("track", "Streaming estimates as CSV (time, f_hat)");
    for (auto* cmd : {est, trk}) {
        cmd->add_option("--in", est_in, "Signal file")->required();
        cmd->add_option("--fr", est_fr, "Reference frequency (Hz)")->required();
        cmd->add_option("--q", est_q, "Window fraction of a reference cycle")->capture_default_str();
        cmd->add_option("--snr-db", est_snr, "Known SNR, adds the predicted variance");
    }
    est->add_option("--tn", est_tn, "Block duration t_N (s); default: whole record");
    trk->add_option("--tn", est_tn, "Block duration t_N (s)")->required();
    trk->add_flag("--retune", track_retune, "Move the reference to each new estimate");

    // montecarlo
    auto* mc = app.add_subcommand("montecarlo", "Run an experiment spec");
    std::string mc_spec, mc_out, mc_traces;
    std::optional<int> mc_table;
    SpecOverrides mc_over;
    auto* mc_spec_opt = mc->add_option("--spec", mc_spec, "Experiment spec (JSON)");
    mc->add_option("--table", mc_table, "Built-in spec for table 1-4")->excludes(mc_spec_opt);
    mc->add_option("--out", mc_out, "Report CSV ('-' for stdout)");
    mc->add_option("--traces", mc_traces, "Scenario trace CSV for compare-dpll");
    add_overrides(mc, mc_over);

    // bias-sweep
    auto* bs = app.add_subcommand("bias-sweep", "Var{Bias{phi_hat}} versus q");
    double bs_f = 300300.0, bs_fr = 300000.0, bs_qmin = 0.25, bs_qmax = 2.3;
    std::size_t bs_steps = 2001, bs_grid = 512;
    std::string bs_out;
    bs->add_option("--f", bs_f, "Tone frequency (Hz)")->capture_default_str();
    bs->add_option("--fr", bs_fr, "Reference frequency (Hz)")->capture_default_str();
    bs->add_option("--qmin", bs_qmin)->capture_default_str();
    bs->add_option("--qmax", bs_qmax)->capture_default_str();
    bs->add_option("--steps", bs_steps)->capture_default_str();
    bs->add_option("--grid", bs_grid, "Phase grid size")->capture_default_str();
    bs->add_option("--out", bs_out, "Output CSV ('-' for stdout)");

    // compare
    auto* cmp = app.add_subcommand("compare", "LLS against the NLS or DPLL baseline");
    std::string cmp_baseline, cmp_spec, cmp_out, cmp_traces;
    SpecOverrides cmp_over;
    cmp->add_option("--baseline", cmp_baseline, "nls or dpll")
        ->required()
        ->check(CLI::IsMember({"nls", "dpll"}));
    cmp->add_option("--spec", cmp_spec, "Experiment spec (JSON); default: table 3 or 4");
    cmp->add_option("--out", cmp_out, "Report CSV ('-' for stdout)");
    cmp->add_option("--traces", cmp_traces, "Scenario trace CSV (dpll only)");
    add_overrides(cmp, cmp_over);

    // figure
    auto* fig = app.add_subcommand("figure", "Theory curves for figures 3, 4 and 5");
    std::string fig_kind = "fig-5", fig_out;
    std::optional<double> fig_f, fig_fr, fig_qmin, fig_qmax;
    std::optional<std::size_t> fig_steps;
    std::vector<double> fig_q;
    fig->add_option("--kind", fig_kind)->check(CLI::IsMember({"fig-3", "fig-4", "fig-5"}))->capture_default_str();
    fig->add_option("--f", fig_f, "Tone frequency (Hz)");
    fig->add_option("--fr", fig_fr, "Reference frequency (Hz)");
    fig->add_option("--q", fig_q, "q values (fig-3, fig-4)");
    fig->add_option("--qmin", fig_qmin);
    fig->add_option("--qmax", fig_qmax);
    fig->add_option("--steps", fig_steps);
    fig->add_option("--out", fig_out, "Output CSV ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const NoiseSpec noise =
                sim_snr ? NoiseSpec::from_snr_db(sim_amp, *sim_snr) : NoiseSpec::noiseless();
            const auto tone = ToneParams::from_hz(sim_amp, sim_f, sim_phase);
            const auto signal = generate_noisy_tone(tone, noise, sim_fs, sim_duration, sim_seed);
            write_signal(sim_out, signal);
            std::fprintf(stderr, "wrote %zu samples at %g Hz to %s\n", signal.size(), sim_fs,
                         sim_out.c_str());
        } else if (*est || *trk) {
            const SampledSignal signal = read_signal(est_in);
            EstimatorConfig cfg = EstimatorConfig::from_hz(est_fr, signal.sample_rate(), est_tn, est_q);
            cfg.retune = track_retune;
            if (est_snr) cfg.snr = snr_db_to_linear(*est_snr);
            if (*est) {
                print_diagnostics(estimate_frequency_batch(signal, cfg));
            } else {
                FrequencyTracker tracker(cfg, signal.start_time());
                std::printf("time_s,f_hat_hz\n");
                for (const auto& e : tracker.push(signal.samples()))
                    std::printf("%.12g,%.12g\n", e.time, e.frequency_hz);
            }
        } else if (*mc) {
            if (!mc_table && mc_spec.empty()) raise(Errc::invalid_argument, "give --spec or --table");
            ExperimentSpec spec = mc_table ? table_spec(*mc_table) : load_experiment_spec(mc_spec);
            apply(spec, mc_over);
            const std::string out = mc_out.empty() ? spec.output : mc_out;
            write_report(run_experiment(spec), out, mc_traces);
        } else if (*bs) {
            const QSweep sweep = q_sweep(hz_to_rad(bs_f), hz_to_rad(bs_fr), bs_qmin, bs_qmax, bs_steps, bs_grid);
            FigureData data{{"q", "bias_variance_rad2"}, {}};
            for (std::size_t i = 0; i < sweep.q.size(); ++i)
                data.rows.push_back({sweep.q[i], sweep.bias_variance[i]});
            std::vector<std::string> meta{"llsfreq " + std::string(library_version),
                                          "f_hz: " + std::to_string(bs_f),
                                          "fr_hz: " + std::to_string(bs_fr)};
            std::string minima = "local_minima:";
            for (double q : sweep.local_minima) minima += " " + std::to_string(q);
            meta.push_back(minima);
            Output o(bs_out);
            write_figure_csv(o.stream(), data, meta);
        } else if (*cmp) {
            ExperimentSpec spec = cmp_spec.empty()
                                      ? (cmp_baseline == "nls" ? default_table3_spec() : default_table4_spec())
                                      : load_experiment_spec(cmp_spec);
            spec.kind = cmp_baseline == "nls" ? ExperimentKind::compare_nls : ExperimentKind::compare_dpll;
            apply(spec, cmp_over);
            const std::string out = cmp_out.empty() ? spec.output : cmp_out;
            write_report(run_comparison(spec), out, cmp_traces);
        } else if (*fig) {
            FigureParams p = FigureParams::defaults_for(fig_kind);
            if (fig_f) p.f_hz = *fig_f;
            if (fig_fr) p.fr_hz = *fig_fr;
            if (!fig_q.empty()) p.q_values = fig_q;
            if (fig_qmin) p.q_min = *fig_qmin;
            if (fig_qmax) p.q_max = *fig_qmax;
            if (fig_steps) p.steps = *fig_steps;
            Output o(fig_out);
            write_figure_csv(o.stream(), emit_figure_data(p),
                             {"llsfreq " + std::string(library_version), "figure: " + fig_kind,
                              "f_hz: " + std::to_string(p.f_hz), "fr_hz: " + std::to_string(p.fr_hz)});
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == Errc::insufficient_data ? exit_insufficient : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
