#include <algorithm>
#include <cmath>
#include <string>

#include "hoyer/errors.hpp"
#include "hoyer/kernels.hpp"
#include "hoyer/sim.hpp"

namespace hoyer::sim {
namespace {

ImageMatrix plus_noise(const ImageMatrix& a, double sigma, std::uint64_t seed) {
    ImageMatrix x = sample_noise(a.rows(), a.cols(), {sigma, seed});
    auto out = x.values();
    const auto av = a.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + out[i];
    return x;
}

void require_reps(std::size_t reps) {
    if (reps == 0) throw PreconditionError("verification needs at least one replicate");
}

}  // namespace

SignalMoments exact_moments(const ImageMatrix& anomaly, double sigma2) {
    const auto sums = kernels::sum_and_squares(anomaly.values());
    const double n = static_cast<double>(anomaly.size());
    return {std::abs(sums.sum) / n, sums.sum_sq / n, sigma2};
}

BiasCheck verify_bias_theorem(const ImageMatrix& anomaly, double sigma, std::size_t reps,
                              std::uint64_t seed) {
    require_reps(reps);
    if (!(std::isfinite(sigma) && sigma >= 0.0)) throw ValueError("sigma must be finite and >= 0");

    const double h_clean = hoyer_index(anomaly);
    BiasCheck out;
    out.predicted_bias = noise_bias(exact_moments(anomaly, sigma * sigma));
    if (sigma == 0.0) return out;

    double total = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        total += hoyer_index(plus_noise(anomaly, sigma, mix_seed(seed, r))) - h_clean;
    }
    out.empirical_mean_gap = total / static_cast<double>(reps);
    out.abs_diff = std::abs(out.empirical_mean_gap - out.predicted_bias);
    return out;
}

BiasCheck verify_bias_theorem(double a_const, double sigma, std::size_t p1, std::size_t p2,
                              std::size_t reps, std::uint64_t seed) {
    return verify_bias_theorem(ImageMatrix(p1, p2, a_const), sigma, reps, seed);
}

std::vector<DecayRow> verify_noise_sparsity_decay(
    std::span<const std::pair<std::size_t, std::size_t>> sizes, double sigma, std::size_t reps,
    std::uint64_t seed) {
    require_reps(reps);
    std::vector<DecayRow> rows;
    for (const auto& [p1, p2] : sizes) {
        const double n = static_cast<double>(p1 * p2);
        if (p1 * p2 < 16) {
            throw DimensionError("noise decay needs p1*p2 >= 16, got " + std::to_string(p1 * p2));
        }
        const double scale = std::sqrt(n / std::log(std::log(n)));
        const std::uint64_t size_seed = mix_seed(seed, p1 * p2);

        std::vector<double> gaps, abs_gaps, scaled;
        for (std::size_t r = 0; r < reps; ++r) {
            const double gap = 1.0 - hoyer_index(sample_noise(p1, p2, {sigma, mix_seed(size_seed, r)}));
            gaps.push_back(gap);
            abs_gaps.push_back(std::abs(gap));
            scaled.push_back(std::abs(gap) * scale);
        }
        rows.push_back({p1, p2, median(gaps), median(abs_gaps), median(scaled)});
    }
    return rows;
}

DominanceCheck verify_noise_dominance(const ImageMatrix& anomaly, double sigma, std::size_t reps,
                                      std::uint64_t seed) {
    require_reps(reps);
    DominanceCheck out;
    out.h_clean = hoyer_index(anomaly);
    out.predicted = out.h_clean + noise_bias(exact_moments(anomaly, sigma * sigma));
    for (std::size_t r = 0; r < reps; ++r) {
        out.h_values.push_back(hoyer_index(plus_noise(anomaly, sigma, mix_seed(seed, r))));
    }
    out.min_h = *std::min_element(out.h_values.begin(), out.h_values.end());
    return out;
}

}  // namespace hoyer::sim
