#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version; the variant is chosen once at startup from
// CPUID and can be overridden (tests pin each backend to compare them).
//
// Element-wise kernels produce bit-identical results on every backend.
// sum_and_squares is a compensated reduction whose result carries roughly
// twice working precision, so backends agree to within a few ulps even
// though their summation order differs.

#include <cstddef>
#include <span>
#include <string_view>

namespace hoyer::kernels {

struct SumAndSquares {
    double sum = 0.0;     // sum of x_i
    double sum_sq = 0.0;  // sum of x_i^2
};

enum class Backend { scalar, avx2 };

struct KernelTable {
    SumAndSquares (*sum_and_squares)(const double* x, std::size_t n);
    // out = x - y
    void (*subtract)(const double* x, const double* y, double* out, std::size_t n);
    // acc += x
    void (*accumulate)(double* acc, const double* x, std::size_t n);
    // One Welford step per entry; `count` is the sample count including x.
    void (*welford_update)(double* mean, double* m2, const double* x, std::size_t n,
                           std::size_t count);
};

std::string_view to_string(Backend backend) noexcept;

bool backend_supported(Backend backend) noexcept;
Backend best_backend() noexcept;
Backend active_backend() noexcept;
// Throws ValueError when the backend was not compiled in or the CPU lacks it.
void select_backend(Backend backend);

const KernelTable& table(Backend backend);

SumAndSquares sum_and_squares(std::span<const double> x);
void subtract(std::span<const double> x, std::span<const double> y, std::span<double> out);
void accumulate(std::span<double> acc, std::span<const double> x);
void welford_update(std::span<double> mean, std::span<double> m2, std::span<const double> x,
                    std::size_t count);

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(HOYER_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
}  // namespace detail

}  // namespace hoyer::kernels
