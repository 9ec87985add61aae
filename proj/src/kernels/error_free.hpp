#pragma once

// Error-free transformations used by the compensated reductions.
// Must not be compiled with -ffast-math or floating-point contraction.

#ifdef __FAST_MATH__
#error "fast math breaks the error-free transformations"
#endif

namespace hoyer::kernels::detail {

// s + e == a + b exactly (Knuth).
inline void two_sum(double a, double b, double& s, double& e) noexcept {
    s = a + b;
    const double bp = s - a;
    e = (a - (s - bp)) + (b - bp);
}

// p + e == a * a exactly (Dekker/Veltkamp split, no FMA required).
inline void two_square(double a, double& p, double& e) noexcept {
    constexpr double splitter = 134217729.0;  // 2^27 + 1
    p = a * a;
    const double c = splitter * a;
    const double hi = c - (c - a);
    const double lo = a - hi;
    e = ((hi * hi - p) + 2.0 * hi * lo) + lo * lo;
}

}  // namespace hoyer::kernels::detail
