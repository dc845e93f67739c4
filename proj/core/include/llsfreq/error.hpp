#ifndef LLSFREQ_ERROR_HPP
#define LLSFREQ_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace llsfreq {

enum class Errc {
    invalid_argument,
    window_too_short,
    degenerate_window,
    undefined_phase,
    insufficient_data,
    singular_design,
    boundary_hit,
    no_convergence,
    io_error,
    parse_error,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map them to exit statuses.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

} // namespace llsfreq

#endif
