#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fraccond/core/error.hpp"

namespace fraccond {

namespace detail {

// Lanczos coefficients, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

/// sin(pi x) with the argument reduced modulo 2 before scaling by pi.
inline double sin_pi(double x) {
    double r = std::fmod(x, 2.0);
    if (r < 0.0) r += 2.0;
    if (r > 1.0) return -std::sin(std::numbers::pi * (r - 1.0));
    return std::sin(std::numbers::pi * r);
}

} // namespace detail

/// Euler Gamma function.
inline double gamma_fn(double x) {
    if (!std::isfinite(x)) throw DomainError("gamma_fn: non-finite argument");
    if (x <= 0.0 && x == std::nearbyint(x))
        throw DomainError("gamma_fn: pole at non-positive integer " + std::to_string(x));
    if (x < 0.5) {
        return std::numbers::pi / (detail::sin_pi(x) * gamma_fn(1.0 - x));
    }
    const double z = x - 1.0;
    double acc = detail::kLanczos[0];
    for (std::size_t i = 1; i < detail::kLanczos.size(); ++i)
        acc += detail::kLanczos[i] / (z + static_cast<double>(i));
    const double t = z + detail::kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

/// C_{n,s} = 4^s Gamma(n/2+s) / (pi^{n/2} |Gamma(-s)|).
inline double cns(int n, double s) {
    if (n < 1) throw DomainError("cns: dimension must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("cns: order s must lie in (0,1)");
    const double half_n = 0.5 * n;
    return std::pow(4.0, s) * gamma_fn(half_n + s) /
           (std::pow(std::numbers::pi, half_n) * std::abs(gamma_fn(-s)));
}

/// Surface measure of the unit sphere S^{n-1}; omega_0 = 2.
inline double sphere_surface(int n) {
    if (n < 1) throw DomainError("sphere_surface: dimension must be >= 1");
    const double half_n = 0.5 * n;
    return 2.0 * std::pow(std::numbers::pi, half_n) / gamma_fn(half_n);
}

/// Limit of C_{n,s}/(s(1-s)) as s -> 1, namely 4n/omega_{n-1}.
inline double cns_limit(int n) { return 4.0 * n / sphere_surface(n); }

/// Relative deviation of C_{n,s}/(s(1-s)) from its s -> 1 limit.
inline double cns_limit_check(int n, double s) {
    const double ratio = cns(n, s) / (s * (1.0 - s));
    const double limit = cns_limit(n);
    return std::abs(ratio - limit) / limit;
}

} // namespace fraccond
