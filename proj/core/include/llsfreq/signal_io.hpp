#ifndef LLSFREQ_SIGNAL_IO_HPP
#define LLSFREQ_SIGNAL_IO_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "llsfreq/signal.hpp"

namespace llsfreq {

// Two on-disk layouts:
//  * CSV: header line "t,y", one "t,y" row per sample, '.' decimal separator.
//    The sample rate is recovered from the time column, which must be uniform.
//  * Raw: headerless little-endian float64 samples, plus a sidecar file
//    "<path>.json" holding {"sample_rate", "start_time", "sample_count"}.
// The layout is picked from the extension: ".csv" is CSV, anything else raw.
enum class SignalFormat { csv, raw_f64 };

SignalFormat format_for_path(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& raw_path);

void write_signal_csv(std::ostream& out, const SampledSignal& signal);
SampledSignal read_signal_csv(std::istream& in);

void write_signal(const std::filesystem::path& path, const SampledSignal& signal);
SampledSignal read_signal(const std::filesystem::path& path);

} // namespace llsfreq

#endif
