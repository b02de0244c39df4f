// Test-only reference computations, kept independent of the library paths
// they check.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace oracles {

// Distance from x to the nearest integer.
inline double nearest_int_dist(double x) {
    double f = x - std::floor(x);
    return f <= 0.5 ? f : 1.0 - f;
}

// integral_0^1 ||m x|| dx = 1/4 for every integer m >= 1 (piecewise-linear
// integration; the library never computes this integral this way).
inline double sawtooth_mean(long long m) {
    if (m == 0) return 0.0;
    // per period of length 1/m the average of ||u|| over [0,1] is 1/4
    return 0.25;
}

// Continued-fraction convergent denominators of alpha (q_1, q_2, ...).
inline std::vector<long long> cf_denominators(double alpha, int count) {
    std::vector<long long> qs;
    double x = alpha - std::floor(alpha);
    long long q0 = 0, q1 = 1;
    for (int i = 0; i < count; ++i) {
        if (x < 1e-15) break;
        x = 1.0 / x;
        long long a = static_cast<long long>(std::floor(x));
        x -= std::floor(x);
        long long q2 = a * q1 + q0;
        q0 = q1;
        q1 = q2;
        qs.push_back(q1);
    }
    return qs;
}

// Thue-Morse +-1 sequence by bit parity: s(n) = (-1)^{popcount(n)}.
inline int thue_morse_pm(std::uint64_t n) {
    return (__builtin_popcountll(n) & 1) ? -1 : 1;
}

// Direct-counting Thue-Morse correlation over a length-L window:
// (1/L) sum_{j<L} s(j) s(j+n).  Independent of the recursion route.
inline double thue_morse_correlation_direct(long long n, long long L) {
    long long acc = 0;
    for (long long j = 0; j < L; ++j)
        acc += thue_morse_pm(static_cast<std::uint64_t>(j)) *
               thue_morse_pm(static_cast<std::uint64_t>(j + n));
    return static_cast<double>(acc) / static_cast<double>(L);
}

// Fibonacci substitution word over {a=0, b=1} after k steps from "a".
inline std::vector<int> fibonacci_word(int k) {
    std::vector<int> w{0};
    for (int i = 0; i < k; ++i) {
        std::vector<int> next;
        next.reserve(2 * w.size());
        for (int s : w) {
            if (s == 0) {
                next.push_back(0);
                next.push_back(1);
            } else {
                next.push_back(0);
            }
        }
        w.swap(next);
    }
    return w;
}

// Trapezoid quadrature of f over [0,1) with n midpoint nodes.
template <typename F>
double midpoint_integral(F&& f, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += f((i + 0.5) / n);
    return acc / n;
}

} // namespace oracles
