// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "error_free.hpp"
#include "hoyer/kernels.hpp"

namespace hoyer::kernels::detail {
namespace {

struct Lanes {
    __m256d s, s_err, q, q_err;
};

inline void two_sum_pd(__m256d a, __m256d b, __m256d& s, __m256d& e) noexcept {
    s = _mm256_add_pd(a, b);
    const __m256d bp = _mm256_sub_pd(s, a);
    e = _mm256_add_pd(_mm256_sub_pd(a, _mm256_sub_pd(s, bp)), _mm256_sub_pd(b, bp));
}

inline void step(Lanes& l, __m256d x) noexcept {
    __m256d e;
    two_sum_pd(l.s, x, l.s, e);
    l.s_err = _mm256_add_pd(l.s_err, e);

    const __m256d p = _mm256_mul_pd(x, x);
    const __m256d pe = _mm256_fmsub_pd(x, x, p);
    two_sum_pd(l.q, p, l.q, e);
    l.q_err = _mm256_add_pd(l.q_err, _mm256_add_pd(e, pe));
}

inline Lanes zero_lanes() noexcept {
    const __m256d z = _mm256_setzero_pd();
    return {z, z, z, z};
}

SumAndSquares sum_and_squares_avx2(const double* x, std::size_t n) {
    Lanes a = zero_lanes();
    Lanes b = zero_lanes();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        step(a, _mm256_loadu_pd(x + i));
        step(b, _mm256_loadu_pd(x + i + 4));
    }
    if (i + 4 <= n) {
        step(a, _mm256_loadu_pd(x + i));
        i += 4;
    }

    alignas(32) double s[8], s_err[8], q[8], q_err[8];
    _mm256_store_pd(s, a.s);
    _mm256_store_pd(s + 4, b.s);
    _mm256_store_pd(s_err, a.s_err);
    _mm256_store_pd(s_err + 4, b.s_err);
    _mm256_store_pd(q, a.q);
    _mm256_store_pd(q + 4, b.q);
    _mm256_store_pd(q_err, a.q_err);
    _mm256_store_pd(q_err + 4, b.q_err);

    double ts = 0.0, ts_err = 0.0, tq = 0.0, tq_err = 0.0;
    for (int k = 0; k < 8; ++k) {
        double e;
        two_sum(ts, s[k], ts, e);
        ts_err += e + s_err[k];
        two_sum(tq, q[k], tq, e);
        tq_err += e + q_err[k];
    }
    for (; i < n; ++i) {
        double e;
        two_sum(ts, x[i], ts, e);
        ts_err += e;
        const double p = x[i] * x[i];
        const double pe = std::fma(x[i], x[i], -p);
        two_sum(tq, p, tq, e);
        tq_err += e + pe;
    }
    return {ts + ts_err, tq + tq_err};
}

void subtract_avx2(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = x[i] - y[i];
}

void accumulate_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

// Same operation order as the scalar kernel (no FMA) so results match bit for bit.
void welford_update_avx2(double* mean, double* m2, const double* x, std::size_t n,
                         std::size_t count) {
    const double k = static_cast<double>(count);
    const __m256d vk = _mm256_set1_pd(k);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        __m256d mv = _mm256_loadu_pd(mean + i);
        const __m256d delta = _mm256_sub_pd(xv, mv);
        mv = _mm256_add_pd(mv, _mm256_div_pd(delta, vk));
        const __m256d m2v = _mm256_add_pd(_mm256_loadu_pd(m2 + i),
                                          _mm256_mul_pd(delta, _mm256_sub_pd(xv, mv)));
        _mm256_storeu_pd(mean + i, mv);
        _mm256_storeu_pd(m2 + i, m2v);
    }
    for (; i < n; ++i) {
        const double delta = x[i] - mean[i];
        mean[i] += delta / k;
        m2[i] += delta * (x[i] - mean[i]);
    }
}

}  // namespace

const KernelTable& avx2_table() noexcept {
    static const KernelTable t{&sum_and_squares_avx2, &subtract_avx2, &accumulate_avx2,
                               &welford_update_avx2};
    return t;
}

}  // namespace hoyer::kernels::detail
