#include "llsfreq/error.hpp"

namespace llsfreq {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::window_too_short: return "window-too-short";
    case Errc::degenerate_window: return "degenerate-window";
    case Errc::undefined_phase: return "undefined-phase";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::singular_design: return "singular-design";
    case Errc::boundary_hit: return "boundary-hit";
    case Errc::no_convergence: return "no-convergence";
    case Errc::io_error: return "io-error";
    case Errc::parse_error: return "parse-error";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace llsfreq
