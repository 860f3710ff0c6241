#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace secdyn::golden {

inline const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
inline const double psi = (1.0 - std::sqrt(5.0)) / 2.0;
inline const double inv_sqrt5 = 1.0 / std::sqrt(5.0);
// lim_n sum_{k<n} F_{n-k}/phi^n
inline const double index_sum_limit = (5.0 + 3.0 * std::sqrt(5.0)) / 10.0;

inline constexpr int kMaxFib = 92;

inline constexpr std::array<std::uint64_t, kMaxFib + 1> fib_table = [] {
    std::array<std::uint64_t, kMaxFib + 1> t{};
    t[0] = 0;
    t[1] = 1;
    for (int i = 2; i <= kMaxFib; ++i) t[i] = t[i - 1] + t[i - 2];
    return t;
}();

inline std::uint64_t fib(int n) { return fib_table.at(static_cast<std::size_t>(n)); }

// F_m / phi^n. Exact table arithmetic while m <= 92, Binet form beyond.
inline double fib_over_phi_pow(int m, int n) {
    if (m <= kMaxFib && n <= 1000) return static_cast<double>(fib(m)) / std::pow(phi, n);
    double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
    // (phi^m - psi^m)/(sqrt5 phi^n) with psi^m = (-1)^m phi^{-m}
    return (std::pow(phi, m - n) - sign * std::pow(phi, -m - n)) * inv_sqrt5;
}

}  // namespace secdyn::golden
