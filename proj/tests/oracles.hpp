// Reference computations for the tests, written without the library's
// solvers: plain long-double sums, Cramer's rule and numerical quadrature.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

inline constexpr long double pi = std::numbers::pi_v<long double>;

/// Least squares y ~ b_sin*sin(w*tau) + b_cos*cos(w*tau), tau_i = i/fs.
inline std::array<double, 2> sin_cos_fit(std::span<const double> y, double omega, double fs) {
    long double ss = 0, sc = 0, cc = 0, sy = 0, cy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const long double tau = static_cast<long double>(i) / fs;
        const long double s = std::sin(omega * tau), c = std::cos(omega * tau);
        ss += s * s;
        sc += s * c;
        cc += c * c;
        sy += s * y[i];
        cy += c * y[i];
    }
    const long double det = ss * cc - sc * sc;
    return {static_cast<double>((sy * cc - sc * cy) / det),
            static_cast<double>((ss * cy - sc * sy) / det)};
}

/// Ordinary least-squares slope and intercept (at t = 0) of p against t.
inline std::array<double, 2> line_fit(std::span<const double> t, std::span<const double> p) {
    long double tm = 0, pm = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tm += t[i];
        pm += p[i];
    }
    tm /= t.size();
    pm /= p.size();
    long double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxy += (t[i] - tm) * (p[i] - pm);
        sxx += (t[i] - tm) * (t[i] - tm);
    }
    const long double slope = sxy / sxx;
    return {static_cast<double>(slope), static_cast<double>(pm - slope * tm)};
}

/// Continuous-time stage-1 fit of sin(omega*tau + phi) over [0, 2*pi*q/omega_r]
/// by composite Simpson quadrature; returns atan2(b_cos, b_sin).
inline double continuous_expected_phase(double omega, double omega_r, double q, double phi,
                                        int panels = 4000) {
    const long double T = 2 * pi * q / omega_r;
    const long double h = T / panels;
    long double ss = 0, sc = 0, cc = 0, sy = 0, cy = 0;
    for (int i = 0; i <= panels; ++i) {
        const long double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
        const long double tau = i * h;
        const long double s = std::sin(omega_r * tau), c = std::cos(omega_r * tau);
        const long double y = std::sin(omega * tau + phi);
        ss += w * s * s;
        sc += w * s * c;
        cc += w * c * c;
        sy += w * s * y;
        cy += w * c * y;
    }
    const long double det = ss * cc - sc * sc;
    const long double b_sin = (sy * cc - sc * cy) / det;
    const long double b_cos = (ss * cy - sc * sy) / det;
    return static_cast<double>(std::atan2(b_cos, b_sin));
}

/// k-th positive root of tan(x) = x, k >= 1 (x in (k*pi, k*pi + pi/2)).
inline double tan_fixed_point(int k) {
    long double x = k * pi + pi / 2 - 1e-3L;
    for (int i = 0; i < 100; ++i) {
        const long double f = std::tan(x) - x;
        const long double df = 1 / (std::cos(x) * std::cos(x)) - 1;
        x -= f / df;
    }
    return static_cast<double>(x);
}

inline double sample_variance(const std::vector<double>& v) {
    long double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    long double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return static_cast<double>(s / (v.size() - 1));
}

/// Smallest |a - b| modulo 2*pi.
inline double angle_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2 * std::numbers::pi));
}

} // namespace oracle
