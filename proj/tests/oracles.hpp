#pragma once

// Independent reference computations for tests. Plain long-double loops with
// no use of the library's kernels, so they can check the optimized paths.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace oracle {

inline long double sum(std::span<const double> x) {
    long double s = 0.0L;
    for (double v : x) s += v;
    return s;
}

inline long double sum_sq(std::span<const double> x) {
    long double s = 0.0L;
    for (double v : x) s += static_cast<long double>(v) * v;
    return s;
}

// Direct evaluation of (sqrt(N) - |sum| / ||x||) / (sqrt(N) - 1).
inline double hoyer(std::span<const double> x) {
    const long double n = static_cast<long double>(x.size());
    const long double f = std::sqrt(sum_sq(x));
    if (f == 0.0L) return 1.0;
    return static_cast<double>((std::sqrt(n) - std::fabs(sum(x)) / f) / (std::sqrt(n) - 1.0L));
}

// Gini through the pairwise mean absolute difference,
//   G = sum_i sum_j |c_i - c_j| / (2 N sum c),
// which equals the sorted-weight form but shares no code with it.
inline double gini_pairwise(std::span<const double> x) {
    long double total = 0.0L, pair = 0.0L;
    for (double a : x) total += std::fabs(a);
    if (total == 0.0L) return 1.0;
    for (double a : x) {
        for (double b : x) pair += std::fabs(std::fabs(static_cast<long double>(a)) - std::fabs(b));
    }
    return static_cast<double>(pair / (2.0L * static_cast<long double>(x.size()) * total));
}

// Two-pass mean and sample variance.
struct MeanVar {
    double mean;
    double var;  // denominator n - 1
};

inline MeanVar mean_var(std::span<const double> x) {
    long double m = 0.0L;
    for (double v : x) m += v;
    m /= static_cast<long double>(x.size());
    long double ss = 0.0L;
    for (double v : x) ss += (v - m) * (v - m);
    return {static_cast<double>(m), static_cast<double>(ss / (x.size() - 1.0L))};
}

}  // namespace oracle
