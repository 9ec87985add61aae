#include "error_free.hpp"
#include "hoyer/kernels.hpp"

namespace hoyer::kernels::detail {
namespace {

SumAndSquares sum_and_squares_scalar(const double* x, std::size_t n) {
    double s = 0.0, s_err = 0.0;
    double q = 0.0, q_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e;
        two_sum(s, x[i], s, e);
        s_err += e;

        double p, pe;
        two_square(x[i], p, pe);
        two_sum(q, p, q, e);
        q_err += e + pe;
    }
    return {s + s_err, q + q_err};
}

void subtract_scalar(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void accumulate_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void welford_update_scalar(double* mean, double* m2, const double* x, std::size_t n,
                           std::size_t count) {
    const double k = static_cast<double>(count);
    for (std::size_t i = 0; i < n; ++i) {
        const double delta = x[i] - mean[i];
        mean[i] += delta / k;
        m2[i] += delta * (x[i] - mean[i]);
    }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable t{&sum_and_squares_scalar, &subtract_scalar, &accumulate_scalar,
                               &welford_update_scalar};
    return t;
}

}  // namespace hoyer::kernels::detail
