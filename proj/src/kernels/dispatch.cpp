#include <atomic>
#include <string>

#include "hoyer/errors.hpp"
#include "hoyer/kernels.hpp"

namespace hoyer::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(HOYER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<Backend>& active() noexcept {
    static std::atomic<Backend> backend{best_backend()};
    return backend;
}

void require_size(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(expected) +
                             " vs " + std::to_string(got) + ")");
    }
}

}  // namespace

std::string_view to_string(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_supported(Backend backend) noexcept {
    switch (backend) {
        case Backend::scalar: return true;
        case Backend::avx2: {
            static const bool ok = cpu_has_avx2();
            return ok;
        }
    }
    return false;
}

Backend best_backend() noexcept {
    return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

Backend active_backend() noexcept { return active().load(std::memory_order_relaxed); }

void select_backend(Backend backend) {
    if (!backend_supported(backend)) {
        throw ValueError("kernel backend '" + std::string(to_string(backend)) +
                         "' is not available on this build/CPU");
    }
    active().store(backend, std::memory_order_relaxed);
}

const KernelTable& table(Backend backend) {
    if (!backend_supported(backend)) {
        throw ValueError("kernel backend '" + std::string(to_string(backend)) +
                         "' is not available on this build/CPU");
    }
#if defined(HOYER_HAVE_AVX2)
    if (backend == Backend::avx2) return detail::avx2_table();
#endif
    return detail::scalar_table();
}

SumAndSquares sum_and_squares(std::span<const double> x) {
    return table(active_backend()).sum_and_squares(x.data(), x.size());
}

void subtract(std::span<const double> x, std::span<const double> y, std::span<double> out) {
    require_size(x.size(), y.size(), "subtract");
    require_size(x.size(), out.size(), "subtract");
    table(active_backend()).subtract(x.data(), y.data(), out.data(), x.size());
}

void accumulate(std::span<double> acc, std::span<const double> x) {
    require_size(acc.size(), x.size(), "accumulate");
    table(active_backend()).accumulate(acc.data(), x.data(), x.size());
}

void welford_update(std::span<double> mean, std::span<double> m2, std::span<const double> x,
                    std::size_t count) {
    require_size(mean.size(), x.size(), "welford_update");
    require_size(m2.size(), x.size(), "welford_update");
    if (count == 0) throw ValueError("welford_update: count must be at least 1");
    table(active_backend()).welford_update(mean.data(), m2.data(), x.data(), x.size(), count);
}

}  // namespace hoyer::kernels
