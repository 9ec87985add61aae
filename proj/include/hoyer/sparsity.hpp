#pragma once

// Stateless sparsity measures on a single matrix and the noise-bias
// correction for the Hoyer index. All functions are pure and thread-safe.

#include <string_view>

#include "hoyer/image_matrix.hpp"

namespace hoyer {

/// Per-pixel signal moments of an anomaly seen through additive white noise.
///   a_bar  : |sum A| / (p1 p2), the average signed magnitude
///   a2_bar : ||A||_F^2 / (p1 p2), the average squared magnitude (> 0)
///   sigma2 : entrywise noise variance
struct SignalMoments {
    double a_bar = 0.0;
    double a2_bar = 0.0;
    double sigma2 = 0.0;

    friend bool operator==(const SignalMoments&, const SignalMoments&) = default;
};

/// How the second moment is recovered from a noisy residual.
///   literal : ||R||_F^2 / (p1 p2), which estimates a2_bar + sigma2
///   debias  : ||R||_F^2 / (p1 p2) - sigma2, floored at a_bar^2
enum class MomentMode { literal, debias };

std::string_view to_string(MomentMode mode) noexcept;
// Throws ValueError on anything other than "literal" or "debias".
MomentMode parse_moment_mode(std::string_view text);

/// Hoyer sparsity of a matrix,
///
///   h(X) = (sqrt(N) - |sum X| / ||X||_F) / (sqrt(N) - 1),   N = p1 p2.
///
/// 1 means at most one nonzero entry, 0 means all entries equal. The all-zero
/// matrix is treated as maximally sparse and yields 1. For same-sign input the
/// result lies in [0, 1]; mixed-sign input can exceed 1 (up to
/// sqrt(N)/(sqrt(N)-1)) because the signed sum can cancel.
///
/// Throws DimensionError when N < 2 and ValueError on non-finite entries.
double hoyer_index(const ImageMatrix& x);

/// Gini sparsity of |X| using the sorted-magnitude weighting
///   G = 1 - 2 sum_k (c_(k) / ||c||_1) (N - k + 1/2) / N,  c ascending.
/// Slower than hoyer_index (it sorts); kept as a cross-check. Same error
/// contract and the same all-zero convention.
double gini_index(const ImageMatrix& x);

/// Asymptotic inflation of the Hoyer index caused by white noise of variance
/// sigma2 on an anomaly with the given moments:
///
///   a_bar sigma2 / ( sqrt(a2_bar (a2_bar + sigma2)) (sqrt(a2_bar) + sqrt(a2_bar + sigma2)) )
///
/// Lies in [0, a_bar / sqrt(a2_bar)]. Throws ValueError unless a2_bar > 0,
/// a_bar >= 0 and sigma2 >= 0 (all finite).
double noise_bias(const SignalMoments& m);

/// h_raw - noise_bias(m), without clamping.
double corrected_hoyer_unclamped(double h_raw, const SignalMoments& m);

/// h_raw - noise_bias(m), clamped to [0, 1].
double corrected_hoyer(double h_raw, const SignalMoments& m);

/// Lower bound applied to a2_bar so noise_bias stays defined when the residual
/// carries no signal: 1e-12 * sigma2_hat (never below the smallest normal
/// double), or 1e-300 when sigma2_hat is zero.
double moment_floor(double sigma2_hat) noexcept;

/// Plug-in moments of a residual matrix R:
///   a_bar  = |sum R| / N
///   a2_bar = ||R||_F^2 / N                          (literal)
///   a2_bar = ||R||_F^2 / N - sigma2_hat             (debias)
/// In both modes a2_bar is raised to at least max(a_bar^2, moment_floor).
/// sigma2 is passed through.
SignalMoments estimate_moments(const ImageMatrix& residual, double sigma2_hat,
                               MomentMode mode = MomentMode::debias);

/// Positive and negative mass of a matrix. The Hoyer index only reflects
/// sparsity for same-sign anomalies; a residual whose masses are within a
/// factor of 4 of each other is flagged as mixed-sign.
struct SignBalance {
    double positive_mass = 0.0;
    double negative_mass = 0.0;

    bool mixed() const noexcept;
};

SignBalance sign_balance(const ImageMatrix& x);

}  // namespace hoyer
