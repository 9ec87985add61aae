#pragma once

// Sparsity estimation over a frame stream: fit an in-control baseline once,
// then turn out-of-control frames (singly or averaged over a window) into
// corrected Hoyer readings.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hoyer/image_matrix.hpp"
#include "hoyer/sparsity.hpp"

namespace hoyer {

/// In-control mean and noise level estimated from the first w0 frames.
/// Immutable after fitting; safe to share across threads.
struct BaselineModel {
    ImageMatrix mu0_hat;
    double sigma2_hat = 0.0;
    std::size_t w0 = 0;
};

struct SparsityReading {
    std::int64_t t = 0;
    double h_raw = 0.0;
    double bias = 0.0;
    double g = 0.0;  // clamp(h_raw - bias, 0, 1)
    double g_unclamped = 0.0;
    SignalMoments moments;

    friend bool operator==(const SparsityReading&, const SparsityReading&) = default;
};

/// Streaming baseline fit. Keeps a per-pixel running mean and sum of squared
/// deviations (Welford), so no frames are buffered.
///
/// sigma2_hat = sum over pixels of M2 / (p1 p2 (w0 - 1)): the pooled
/// per-pixel sample variance, which is unbiased for the entrywise noise
/// variance even though every residual is taken against the estimated mean.
class BaselineFitter {
public:
    void add(const ImageMatrix& frame);
    std::size_t count() const noexcept { return count_; }
    // Throws PreconditionError when fewer than two frames were added.
    BaselineModel finish() const;

private:
    std::optional<ImageMatrix> mean_;
    std::optional<ImageMatrix> m2_;
    std::size_t count_ = 0;
};

BaselineModel fit_baseline(std::span<const ImageMatrix> frames);

/// x - mu0_hat.
ImageMatrix residual(const ImageMatrix& x, const BaselineModel& baseline);

/// Single-frame corrected reading: residual, raw Hoyer index, plug-in moments
/// with the baseline's noise variance, bias and corrected index.
SparsityReading corrected_reading(const ImageMatrix& x, const BaselineModel& baseline,
                                  MomentMode mode = MomentMode::debias, std::int64_t t = 0);

/// Running average of residuals over a window of out-of-control frames.
class WindowAccumulator {
public:
    explicit WindowAccumulator(const BaselineModel& baseline);

    void add(const ImageMatrix& frame);
    std::size_t size() const noexcept { return count_; }

    ImageMatrix mean_residual() const;
    // Hoyer index of the mean residual, uncorrected.
    double index() const;
    // Corrected reading of the mean residual. Averaging w frames divides the
    // noise variance by w, so sigma2_hat / w is used as the effective variance.
    SparsityReading corrected(MomentMode mode = MomentMode::debias, std::int64_t t = 0) const;

private:
    const BaselineModel* baseline_;
    ImageMatrix sum_;
    ImageMatrix scratch_;
    std::size_t count_ = 0;
};

double windowed_index(std::span<const ImageMatrix> frames, const BaselineModel& baseline);
SparsityReading windowed_reading(std::span<const ImageMatrix> frames, const BaselineModel& baseline,
                                 MomentMode mode = MomentMode::debias);

/// Inclusive range of 1-based frame indices; first > last is empty.
struct TauRange {
    std::int64_t first = 1;
    std::int64_t last = 0;

    bool empty() const noexcept { return first > last; }
    std::size_t size() const noexcept {
        return empty() ? 0 : static_cast<std::size_t>(last - first + 1);
    }
};

/// Loads frame t (1-based). Lets monitor_series run over on-disk streams
/// without holding them in memory.
using FrameLoader = std::function<ImageMatrix(std::int64_t t)>;

/// One corrected reading per frame index in `tau`, in order, with reading.t = index.
std::vector<SparsityReading> monitor_series(std::size_t stream_length, const FrameLoader& load,
                                            const BaselineModel& baseline, TauRange tau,
                                            MomentMode mode = MomentMode::debias);

std::vector<SparsityReading> monitor_series(std::span<const ImageMatrix> stream,
                                            const BaselineModel& baseline, TauRange tau,
                                            MomentMode mode = MomentMode::debias);

}  // namespace hoyer
