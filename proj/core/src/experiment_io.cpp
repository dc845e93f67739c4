#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "llsfreq/error.hpp"
#include "llsfreq/experiment.hpp"

namespace llsfreq {

const char* const library_version = "0.1.0";

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

std::optional<double> get_opt(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<double>();
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

ExperimentRow row_from_json(const json& j) {
    ExperimentRow r;
    r.f_hz = j.at("f").get<double>();
    r.fr_hz = j.at("fr").get<double>();
    r.fs_hz = get_or(j, "fs", r.fs_hz);
    r.snr_db = get_opt(j, "snr_db");
    r.block_duration = get_opt(j, "t_N");
    r.settling_time = get_opt(j, "settling");
    r.q = get_or(j, "q", r.q);
    r.amplitude = get_or(j, "amplitude", r.amplitude);
    return r;
}

json row_to_json(const ExperimentRow& r) {
    return json{{"f", r.f_hz},          {"fr", r.fr_hz},
                {"fs", r.fs_hz},        {"snr_db", opt_json(r.snr_db)},
                {"t_N", opt_json(r.block_duration)}, {"settling", opt_json(r.settling_time)},
                {"q", r.q},             {"amplitude", r.amplitude}};
}

} // namespace

ExperimentSpec parse_experiment_spec(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text.begin(), json_text.end());
    } catch (const json::exception& e) {
        raise(Errc::parse_error, std::string("spec is not valid JSON: ") + e.what());
    }
    try {
        ExperimentSpec s;
        s.kind = parse_experiment_kind(j.at("kind").get<std::string>());
        s.trials = get_or<std::size_t>(j, "trials", s.trials);
        s.root_seed = get_or<std::uint64_t>(j, "seed", s.root_seed);
        s.phases = get_or<std::size_t>(j, "phases", s.phases);
        s.threads = get_or<std::size_t>(j, "threads", s.threads);
        s.output = get_or<std::string>(j, "output", s.output);
        if (auto it = j.find("rows"); it != j.end())
            for (const auto& row : *it) s.rows.push_back(row_from_json(row));
        if (auto it = j.find("scenario"); it != j.end()) {
            auto& sc = s.scenario;
            sc.enabled = get_or(*it, "enabled", sc.enabled);
            sc.block_duration = get_or(*it, "t_N", sc.block_duration);
            sc.duration = get_or(*it, "duration", sc.duration);
            sc.jump_time = get_or(*it, "jump_time", sc.jump_time);
            sc.jump_hz = get_or(*it, "jump_hz", sc.jump_hz);
            sc.decimation = get_or<std::size_t>(*it, "decimation", sc.decimation);
        }
        if (auto it = j.find("figure"); it != j.end()) {
            FigureParams f = FigureParams::defaults_for(get_or<std::string>(*it, "figure", "fig-5"));
            f.f_hz = get_or(*it, "f", f.f_hz);
            f.fr_hz = get_or(*it, "fr", f.fr_hz);
            f.q_values = get_or(*it, "q_values", f.q_values);
            f.q_min = get_or(*it, "q_min", f.q_min);
            f.q_max = get_or(*it, "q_max", f.q_max);
            f.steps = get_or<std::size_t>(*it, "steps", f.steps);
            f.grid_size = get_or<std::size_t>(*it, "grid", f.grid_size);
            s.figure = f;
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        raise(Errc::parse_error, std::string("bad spec field: ") + e.what());
    }
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::io_error, "cannot open spec file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_spec(buf.str());
}

std::string experiment_spec_to_json(const ExperimentSpec& s) {
    json rows = json::array();
    for (const auto& r : s.rows) rows.push_back(row_to_json(r));
    const auto& sc = s.scenario;
    const auto& f = s.figure;
    json j{{"kind", std::string(to_string(s.kind))},
           {"trials", s.trials},
           {"seed", s.root_seed},
           {"phases", s.phases},
           {"rows", rows},
           {"scenario",
            {{"enabled", sc.enabled}, {"t_N", sc.block_duration}, {"duration", sc.duration},
             {"jump_time", sc.jump_time}, {"jump_hz", sc.jump_hz}, {"decimation", sc.decimation}}},
           {"figure",
            {{"figure", f.figure}, {"f", f.f_hz}, {"fr", f.fr_hz}, {"q_values", f.q_values},
             {"q_min", f.q_min}, {"q_max", f.q_max}, {"steps", f.steps}, {"grid", f.grid_size}}}};
    // threads and output do not affect results and stay out of the hash.
    return j.dump();
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : experiment_spec_to_json(spec)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report, bool include_timing) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, spec_hash(report.spec));
    out << "# llsfreq " << library_version << "\n"
        << "# kind: " << to_string(report.spec.kind) << "\n"
        << "# spec_hash: " << hash << "\n"
        << "# root_seed: " << report.spec.root_seed << "\n";
    out << "row,f_hz,fr_hz,delta_f_hz,fs_hz,snr_db,t_N_requested_s,settling_s,q,q_eff,n,N,t_N_s,"
           "record_samples,trials,failed,mean_bias_hz,var_hz2,mse_hz2,std_hz,predicted_var_hz2,"
           "baseline,baseline_failed,baseline_mean_bias_hz,baseline_var_hz2,baseline_std_hz,"
           "std_ratio,lost_lock_trials";
    if (include_timing) out << ",wall_s";
    out << ",status\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const RowReport& r = report.rows[i];
        const bool has_base = !r.baseline.empty();
        out << i << ',' << num(r.row.f_hz) << ',' << num(r.row.fr_hz) << ','
            << num(r.row.delta_f_hz()) << ',' << num(r.row.fs_hz) << ',' << opt(r.row.snr_db) << ','
            << opt(r.row.block_duration) << ',' << opt(r.row.settling_time) << ',' << num(r.row.q)
            << ',' << num(r.q_eff) << ',' << r.window_length << ',' << r.windows << ','
            << num(r.block_duration) << ',' << r.record_samples << ',' << r.trials << ','
            << r.failed_trials << ',' << num(r.lls.mean) << ',' << num(r.lls.variance) << ','
            << num(r.lls.mse) << ',' << num(r.lls.std_dev) << ',' << opt(r.predicted_variance_hz2)
            << ',' << r.baseline << ',';
        if (has_base)
            out << r.baseline_failed << ',' << num(r.baseline_stats.mean) << ','
                << num(r.baseline_stats.variance) << ',' << num(r.baseline_stats.std_dev) << ',';
        else
            out << ",,,,";
        out << opt(r.std_ratio) << ',' << (has_base ? std::to_string(r.lost_lock_trials) : "");
        if (include_timing) out << ',' << num(r.wall_time_s);
        std::string status = r.status;
        for (char& c : status)
            if (c == ',' || c == '\n') c = ';';
        out << ',' << status << '\n';
    }
}

void write_scenarios_csv(std::ostream& out, const std::vector<ScenarioResult>& scenarios) {
    out << "scenario,settling_s,series,time_s,frequency_hz,locked\n";
    for (const auto& s : scenarios) {
        for (const auto& p : s.lls)
            out << s.name << ',' << num(s.settling_time) << ",lls," << num(p.time) << ','
                << num(p.frequency_hz) << ",1\n";
        for (const auto& p : s.dpll)
            out << s.name << ',' << num(s.settling_time) << ",dpll," << num(p.time) << ','
                << num(p.frequency_hz) << ',' << (p.locked ? 1 : 0) << '\n';
    }
}

void write_figure_csv(std::ostream& out, const FigureData& data,
                      const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) out << "# " << line << '\n';
    for (std::size_t i = 0; i < data.columns.size(); ++i)
        out << (i ? "," : "") << data.columns[i];
    out << '\n';
    for (const auto& row : data.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
        out << '\n';
    }
}

} // namespace llsfreq
