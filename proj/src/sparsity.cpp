#include "hoyer/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hoyer/errors.hpp"
#include "hoyer/kernels.hpp"

namespace hoyer {
namespace {

constexpr double kTinySumSq = 1e-280;

void require_index_shape(const ImageMatrix& x, const char* what) {
    if (x.size() < 2) {
        throw DimensionError(std::string(what) + " needs at least 2 entries, got " +
                             std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
}

[[noreturn]] void throw_non_finite(const ImageMatrix& x, std::size_t flat) {
    throw ValueError("non-finite entry at (" + std::to_string(flat / x.cols()) + ", " +
                     std::to_string(flat % x.cols()) + ")");
}

void require_finite(const ImageMatrix& x) {
    const auto v = x.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw_non_finite(x, i);
    }
}

// Sum and sum of squares of `x`, possibly of a power-of-two rescaled copy when
// the squares overflow or underflow. `scale` is the factor that was applied.
struct ScaledSums {
    kernels::SumAndSquares sums;
    double scale = 1.0;
};

ScaledSums checked_sums(const ImageMatrix& x) {
    auto sums = kernels::sum_and_squares(x.values());
    if (std::isfinite(sums.sum) && std::isfinite(sums.sum_sq) && sums.sum_sq >= kTinySumSq) {
        return {sums, 1.0};
    }
    require_finite(x);

    double max_abs = 0.0;
    for (double v : x.values()) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) return {{0.0, 0.0}, 1.0};

    const double scale = std::ldexp(1.0, -std::ilogb(max_abs));
    std::vector<double> scaled(x.values().begin(), x.values().end());
    for (double& v : scaled) v *= scale;
    return {kernels::sum_and_squares(scaled), scale};
}

}  // namespace

std::string_view to_string(MomentMode mode) noexcept {
    return mode == MomentMode::literal ? "literal" : "debias";
}

MomentMode parse_moment_mode(std::string_view text) {
    if (text == "literal") return MomentMode::literal;
    if (text == "debias") return MomentMode::debias;
    throw ValueError("unknown moment mode '" + std::string(text) + "' (expected literal|debias)");
}

double hoyer_index(const ImageMatrix& x) {
    require_index_shape(x, "hoyer_index");
    const auto [sums, scale] = checked_sums(x);
    if (sums.sum_sq == 0.0) return 1.0;

    const double root_n = std::sqrt(static_cast<double>(x.size()));
    const double ratio = std::abs(sums.sum) / std::sqrt(sums.sum_sq);
    return (root_n - ratio) / (root_n - 1.0);
}

double gini_index(const ImageMatrix& x) {
    require_index_shape(x, "gini_index");
    require_finite(x);

    std::vector<double> mags(x.values().begin(), x.values().end());
    for (double& v : mags) v = std::abs(v);
    std::sort(mags.begin(), mags.end());

    const double l1 = kernels::sum_and_squares(mags).sum;
    if (l1 == 0.0) return 1.0;

    // sum_k c_k (N - k + 1/2), k = 1..N, accumulated with compensation.
    const double n = static_cast<double>(mags.size());
    std::vector<double> weighted(mags.size());
    for (std::size_t i = 0; i < mags.size(); ++i) {
        weighted[i] = (mags[i] / l1) * ((n - static_cast<double>(i + 1) + 0.5) / n);
    }
    const double s = kernels::sum_and_squares(weighted).sum;
    return 1.0 - 2.0 * s;
}

double noise_bias(const SignalMoments& m) {
    if (!(std::isfinite(m.a2_bar) && m.a2_bar > 0.0)) {
        throw ValueError("noise_bias: a2_bar must be finite and > 0, got " + std::to_string(m.a2_bar));
    }
    if (!(std::isfinite(m.a_bar) && m.a_bar >= 0.0)) {
        throw ValueError("noise_bias: a_bar must be finite and >= 0, got " + std::to_string(m.a_bar));
    }
    if (!(std::isfinite(m.sigma2) && m.sigma2 >= 0.0)) {
        throw ValueError("noise_bias: sigma2 must be finite and >= 0, got " + std::to_string(m.sigma2));
    }
    if (m.a_bar == 0.0 || m.sigma2 == 0.0) return 0.0;

    const double noisy = m.a2_bar + m.sigma2;
    const double root_clean = std::sqrt(m.a2_bar);
    const double root_noisy = std::sqrt(noisy);
    // Written as a_bar / sqrt(a2) * sigma2 / (sqrt(noisy) (root_clean + root_noisy))
    // so neither a2 * noisy nor the full denominator can overflow.
    return (m.a_bar / root_clean) * (m.sigma2 / root_noisy) / (root_clean + root_noisy);
}

double corrected_hoyer_unclamped(double h_raw, const SignalMoments& m) {
    if (!std::isfinite(h_raw)) throw ValueError("corrected_hoyer: h_raw must be finite");
    return h_raw - noise_bias(m);
}

double corrected_hoyer(double h_raw, const SignalMoments& m) {
    return std::clamp(corrected_hoyer_unclamped(h_raw, m), 0.0, 1.0);
}

double moment_floor(double sigma2_hat) noexcept {
    if (!(sigma2_hat > 0.0)) return 1e-300;
    return std::max(1e-12 * sigma2_hat, std::numeric_limits<double>::min());
}

SignalMoments estimate_moments(const ImageMatrix& residual, double sigma2_hat, MomentMode mode) {
    if (!(std::isfinite(sigma2_hat) && sigma2_hat >= 0.0)) {
        throw ValueError("estimate_moments: sigma2_hat must be finite and >= 0");
    }
    const auto [sums, scale] = checked_sums(residual);
    const double n = static_cast<double>(residual.size());

    // Undo the rescale: sum scales by `scale`, sum_sq by `scale^2`.
    const double a_bar = std::abs(sums.sum) / scale / n;
    const double second = sums.sum_sq / n / scale / scale;
    if (!std::isfinite(second)) {
        throw ValueError("estimate_moments: squared magnitude of residual overflows");
    }

    const double raw = mode == MomentMode::debias ? second - sigma2_hat : second;
    const double a2_bar = std::max({raw, a_bar * a_bar, moment_floor(sigma2_hat)});
    return {a_bar, a2_bar, sigma2_hat};
}

bool SignBalance::mixed() const noexcept {
    if (positive_mass == 0.0 || negative_mass == 0.0) return false;
    const double ratio = positive_mass / negative_mass;
    return ratio >= 0.25 && ratio <= 4.0;
}

SignBalance sign_balance(const ImageMatrix& x) {
    SignBalance b;
    for (double v : x.values()) {
        if (v > 0.0) b.positive_mass += v;
        else b.negative_mass -= v;
    }
    return b;
}

}  // namespace hoyer
