#include "llsfreq/signal_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "llsfreq/error.hpp"

namespace llsfreq {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, std::size_t line_no) {
    const std::string t = trim(field);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != t.size())
        raise(Errc::parse_error, "line " + std::to_string(line_no) + ": bad number '" + t + "'");
    return v;
}

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
        return r;
    }
    return v;
}

} // namespace

SignalFormat format_for_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? SignalFormat::csv : SignalFormat::raw_f64;
}

std::filesystem::path sidecar_path(const std::filesystem::path& raw_path) {
    return std::filesystem::path(raw_path.string() + ".json");
}

void write_signal_csv(std::ostream& out, const SampledSignal& signal) {
    out << "t,y\n";
    char buf[64];
    for (std::size_t i = 0; i < signal.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", signal.time_at(i), signal[i]);
        out << buf;
    }
}

SampledSignal read_signal_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> t;
    std::vector<double> y;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (s == "t,y") continue;
            raise(Errc::parse_error, "signal CSV must start with header 't,y'");
        }
        const auto comma = s.find(',');
        if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
            raise(Errc::parse_error, "line " + std::to_string(line_no) + ": expected two columns");
        t.push_back(parse_double(s.substr(0, comma), line_no));
        y.push_back(parse_double(s.substr(comma + 1), line_no));
    }
    if (y.empty()) raise(Errc::parse_error, "signal CSV has no samples");
    if (y.size() == 1) raise(Errc::parse_error, "cannot infer sample rate from a single row");

    const double span = t.back() - t.front();
    if (!(span > 0.0)) raise(Errc::parse_error, "time column must be increasing");
    const double dt = span / static_cast<double>(t.size() - 1);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double expected = t.front() + static_cast<double>(i) * dt;
        if (std::abs(t[i] - expected) > 1e-6 * dt)
            raise(Errc::parse_error, "time column is not uniformly sampled at row " +
                                         std::to_string(i + 1));
    }
    return SampledSignal(1.0 / dt, t.front(), std::move(y));
}

void write_signal(const std::filesystem::path& path, const SampledSignal& signal) {
    if (format_for_path(path) == SignalFormat::csv) {
        std::ofstream out(path);
        if (!out) raise(Errc::io_error, "cannot open " + path.string() + " for writing");
        write_signal_csv(out, signal);
        if (!out) raise(Errc::io_error, "write failed for " + path.string());
        return;
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io_error, "cannot open " + path.string() + " for writing");
    for (double v : signal.samples()) {
        const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    if (!out) raise(Errc::io_error, "write failed for " + path.string());

    nlohmann::json meta = {
        {"sample_rate", signal.sample_rate()},
        {"start_time", signal.start_time()},
        {"sample_count", signal.size()},
    };
    std::ofstream side(sidecar_path(path));
    if (!side) raise(Errc::io_error, "cannot write sidecar for " + path.string());
    side << meta.dump(2) << '\n';
}

SampledSignal read_signal(const std::filesystem::path& path) {
    if (format_for_path(path) == SignalFormat::csv) {
        std::ifstream in(path);
        if (!in) raise(Errc::io_error, "cannot open " + path.string());
        return read_signal_csv(in);
    }

    std::ifstream side(sidecar_path(path));
    if (!side) raise(Errc::io_error, "missing sidecar " + sidecar_path(path).string());
    nlohmann::json meta;
    try {
        side >> meta;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("sidecar: ") + e.what());
    }
    double fs = 0.0;
    double t0 = 0.0;
    std::size_t count = 0;
    try {
        fs = meta.at("sample_rate").get<double>();
        t0 = meta.at("start_time").get<double>();
        count = meta.at("sample_count").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse_error, std::string("sidecar: ") + e.what());
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open " + path.string());
    std::vector<double> y(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits))
            raise(Errc::parse_error, "raw file shorter than sidecar sample_count");
        y[i] = std::bit_cast<double>(to_little_endian(bits));
    }
    if (in.peek() != std::char_traits<char>::eof())
        raise(Errc::parse_error, "raw file longer than sidecar sample_count");
    return SampledSignal(fs, t0, std::move(y));
}

} // namespace llsfreq
