#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "hoyer/errors.hpp"
#include "hoyer/kernels.hpp"
#include "oracles.hpp"

using namespace hoyer::kernels;

namespace {

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (backend_supported(Backend::avx2)) out.push_back(Backend::avx2);
    return out;
}

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Restores the process-wide backend after a test pins one.
struct BackendGuard {
    Backend saved = active_backend();
    ~BackendGuard() { select_backend(saved); }
};

}  // namespace

TEST_CASE("best backend is selected by default and scalar is always available") {
    CHECK(backend_supported(Backend::scalar));
    CHECK(active_backend() == best_backend());
    MESSAGE("active kernel backend: " << to_string(active_backend()));
}

TEST_CASE("select_backend rejects unavailable variants") {
    BackendGuard guard;
    select_backend(Backend::scalar);
    CHECK(active_backend() == Backend::scalar);
    if (!backend_supported(Backend::avx2)) {
        CHECK_THROWS_AS(select_backend(Backend::avx2), hoyer::ValueError);
    }
}

TEST_CASE("sum_and_squares matches a long-double oracle on every backend") {
    std::mt19937_64 rng(7);
    for (Backend b : available_backends()) {
        const auto& k = table(b);
        for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 1000u, 20000u}) {
            const auto x = random_values(n, rng, 3.0);
            const auto got = k.sum_and_squares(x.data(), x.size());
            const double s = static_cast<double>(oracle::sum(x));
            const double q = static_cast<double>(oracle::sum_sq(x));
            CAPTURE(to_string(b));
            CAPTURE(n);
            CHECK(got.sum == doctest::Approx(s).epsilon(1e-13).scale(std::sqrt(q) + 1.0));
            CHECK(got.sum_sq == doctest::Approx(q).epsilon(1e-14));
        }
    }
}

TEST_CASE("compensation recovers sums that naive accumulation loses") {
    // 1e16 + 1 - 1e16 ... repeated: plain double summation returns 0.
    std::vector<double> x;
    for (int i = 0; i < 64; ++i) {
        x.push_back(1e16);
        x.push_back(1.0);
        x.push_back(-1e16);
    }
    for (Backend b : available_backends()) {
        const auto got = table(b).sum_and_squares(x.data(), x.size());
        CAPTURE(to_string(b));
        CHECK(got.sum == 64.0);
        // 128 * 1e32 + 64, exact up to the final rounding.
        CHECK(got.sum_sq == 128e32 + 64.0);
    }
}

TEST_CASE("scalar and avx2 reductions agree within a few ulps") {
    if (!backend_supported(Backend::avx2)) return;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> len(0, 300);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = len(rng);
        auto x = random_values(n, rng, std::pow(10.0, (trial % 9) - 4));
        if (trial % 5 == 0) {
            for (auto& v : x) v = std::abs(v);  // same-sign input
        }
        const auto a = table(Backend::scalar).sum_and_squares(x.data(), n);
        const auto b = table(Backend::avx2).sum_and_squares(x.data(), n);
        CAPTURE(n);
        const double eps = 4.0 * std::numeric_limits<double>::epsilon();
        CHECK(std::abs(a.sum - b.sum) <= eps * (std::abs(a.sum) + std::sqrt(a.sum_sq) * 1e-3));
        CHECK(std::abs(a.sum_sq - b.sum_sq) <= eps * a.sum_sq);
    }
}

TEST_CASE("element-wise kernels are bit-identical across backends") {
    std::mt19937_64 rng(3);
    for (std::size_t n : {1u, 3u, 4u, 5u, 13u, 64u, 1001u}) {
        const auto x = random_values(n, rng, 5.0);
        const auto y = random_values(n, rng, 2.0);

        std::vector<std::vector<double>> subs, accs, means, m2s;
        for (Backend b : available_backends()) {
            const auto& k = table(b);
            std::vector<double> out(n);
            k.subtract(x.data(), y.data(), out.data(), n);
            subs.push_back(out);

            std::vector<double> acc = y;
            k.accumulate(acc.data(), x.data(), n);
            accs.push_back(acc);

            std::vector<double> mean(n, 0.0), m2(n, 0.0);
            std::mt19937_64 frames_rng(99);
            for (std::size_t c = 1; c <= 7; ++c) {
                const auto frame = random_values(n, frames_rng, 1.0);
                k.welford_update(mean.data(), m2.data(), frame.data(), n, c);
            }
            means.push_back(mean);
            m2s.push_back(m2);
        }
        for (std::size_t i = 1; i < subs.size(); ++i) {
            CAPTURE(n);
            CHECK(bitwise_equal(subs[0], subs[i]));
            CHECK(bitwise_equal(accs[0], accs[i]));
            CHECK(bitwise_equal(means[0], means[i]));
            CHECK(bitwise_equal(m2s[0], m2s[i]));
        }
        // x - y and y + x are exact references for the trivial kernels.
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(subs[0][i] == x[i] - y[i]);
            CHECK(accs[0][i] == y[i] + x[i]);
        }
    }
}

TEST_CASE("welford update reproduces the two-pass mean and variance") {
    std::mt19937_64 rng(5);
    const std::size_t pixels = 9, frames = 40;
    std::vector<std::vector<double>> data;
    for (std::size_t f = 0; f < frames; ++f) data.push_back(random_values(pixels, rng, 2.0));

    std::vector<double> mean(pixels, 0.0), m2(pixels, 0.0);
    for (std::size_t f = 0; f < frames; ++f) welford_update(mean, m2, data[f], f + 1);

    for (std::size_t p = 0; p < pixels; ++p) {
        std::vector<double> column;
        for (const auto& row : data) column.push_back(row[p]);
        const auto ref = oracle::mean_var(column);
        CHECK(mean[p] == doctest::Approx(ref.mean).epsilon(1e-13));
        CHECK(m2[p] / (frames - 1) == doctest::Approx(ref.var).epsilon(1e-13));
    }
}

TEST_CASE("span wrappers validate lengths") {
    std::vector<double> a(4), b(5), out(4);
    CHECK_THROWS_AS(subtract(a, b, out), hoyer::DimensionError);
    CHECK_THROWS_AS(accumulate(a, b), hoyer::DimensionError);
    std::vector<double> m2(4);
    CHECK_THROWS_AS(welford_update(a, m2, a, 0), hoyer::ValueError);
}
