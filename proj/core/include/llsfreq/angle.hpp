#ifndef LLSFREQ_ANGLE_HPP
#define LLSFREQ_ANGLE_HPP

#include <cmath>
#include <numbers>

namespace llsfreq {

/// Maps any finite angle into (-pi, pi].
inline double wrap_phase(double angle) {
    constexpr double pi = std::numbers::pi;
    double r = std::remainder(angle, 2.0 * pi); // [-pi, pi]
    if (r <= -pi) r += 2.0 * pi;
    return r;
}

/// Quadrant-aware arctangent with range (-pi, pi]; atan2 may return -pi.
inline double phase_of(double y, double x) {
    const double a = std::atan2(y, x);
    return a <= -std::numbers::pi ? std::numbers::pi : a;
}

/// Smallest signed difference a - b modulo `period`, in (-period/2, period/2].
inline double angle_diff(double a, double b, double period = 2.0 * std::numbers::pi) {
    double r = std::remainder(a - b, period);
    if (r <= -0.5 * period) r += period;
    return r;
}

} // namespace llsfreq

#endif
