#ifndef LLSFREQ_MAT2_HPP
#define LLSFREQ_MAT2_HPP

#include <algorithm>
#include <array>
#include <cmath>

namespace llsfreq {

// Dense 2x2 real matrix, row-major. Both least-squares stages only ever
// need 2x2 normal equations, so this stays tiny on purpose.
struct Mat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    constexpr double det() const { return a11 * a22 - a12 * a21; }
    constexpr double trace() const { return a11 + a22; }

    // Caller guarantees det() != 0.
    constexpr Mat2 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    constexpr std::array<double, 2> apply(double x1, double x2) const {
        return {a11 * x1 + a12 * x2, a21 * x1 + a22 * x2};
    }

    friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
        return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
    }

    double max_abs_diff(const Mat2& o) const {
        return std::max({std::abs(a11 - o.a11), std::abs(a12 - o.a12),
                         std::abs(a21 - o.a21), std::abs(a22 - o.a22)});
    }

    bool symmetric() const { return a12 == a21; }

    // Eigenvalues of a symmetric matrix, ascending.
    std::array<double, 2> symmetric_eigenvalues() const {
        const double mean = 0.5 * (a11 + a22);
        const double half_diff = 0.5 * (a11 - a22);
        const double radius = std::hypot(half_diff, a12);
        return {mean - radius, mean + radius};
    }
};

} // namespace llsfreq

#endif
