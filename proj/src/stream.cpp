#include "hoyer/stream.hpp"

#include <cmath>
#include <string>

#include "hoyer/errors.hpp"
#include "hoyer/kernels.hpp"

namespace hoyer {

void BaselineFitter::add(const ImageMatrix& frame) {
    if (!mean_) {
        mean_.emplace(frame.rows(), frame.cols(), 0.0);
        m2_.emplace(frame.rows(), frame.cols(), 0.0);
    }
    require_same_shape(*mean_, frame, "fit_baseline");
    ++count_;
    kernels::welford_update(mean_->values(), m2_->values(), frame.values(), count_);
}

BaselineModel BaselineFitter::finish() const {
    if (count_ < 2) {
        throw PreconditionError("fit_baseline needs at least 2 in-control frames, got " +
                                std::to_string(count_));
    }
    const double total_m2 = kernels::sum_and_squares(m2_->values()).sum;
    const double dof = static_cast<double>(m2_->size()) * static_cast<double>(count_ - 1);
    const double sigma2 = total_m2 / dof;
    if (!std::isfinite(sigma2)) throw ValueError("fit_baseline: non-finite noise variance");
    return BaselineModel{*mean_, sigma2, count_};
}

BaselineModel fit_baseline(std::span<const ImageMatrix> frames) {
    BaselineFitter fitter;
    for (const auto& f : frames) fitter.add(f);
    return fitter.finish();
}

ImageMatrix residual(const ImageMatrix& x, const BaselineModel& baseline) {
    require_same_shape(baseline.mu0_hat, x, "residual");
    ImageMatrix out(x.rows(), x.cols());
    kernels::subtract(x.values(), baseline.mu0_hat.values(), out.values());
    return out;
}

namespace {

SparsityReading reading_from_residual(const ImageMatrix& r, double sigma2, MomentMode mode,
                                      std::int64_t t) {
    SparsityReading out;
    out.t = t;
    out.h_raw = hoyer_index(r);
    out.moments = estimate_moments(r, sigma2, mode);
    out.bias = noise_bias(out.moments);
    out.g_unclamped = out.h_raw - out.bias;
    out.g = corrected_hoyer(out.h_raw, out.moments);
    return out;
}

}  // namespace

SparsityReading corrected_reading(const ImageMatrix& x, const BaselineModel& baseline,
                                  MomentMode mode, std::int64_t t) {
    return reading_from_residual(residual(x, baseline), baseline.sigma2_hat, mode, t);
}

WindowAccumulator::WindowAccumulator(const BaselineModel& baseline)
    : baseline_(&baseline),
      sum_(baseline.mu0_hat.rows(), baseline.mu0_hat.cols(), 0.0),
      scratch_(baseline.mu0_hat.rows(), baseline.mu0_hat.cols(), 0.0) {}

void WindowAccumulator::add(const ImageMatrix& frame) {
    require_same_shape(baseline_->mu0_hat, frame, "windowed_index");
    kernels::subtract(frame.values(), baseline_->mu0_hat.values(), scratch_.values());
    kernels::accumulate(sum_.values(), scratch_.values());
    ++count_;
}

ImageMatrix WindowAccumulator::mean_residual() const {
    if (count_ == 0) throw PreconditionError("windowed_index: empty window");
    ImageMatrix mean = sum_;
    const double w = static_cast<double>(count_);
    for (double& v : mean.values()) v /= w;
    return mean;
}

double WindowAccumulator::index() const { return hoyer_index(mean_residual()); }

SparsityReading WindowAccumulator::corrected(MomentMode mode, std::int64_t t) const {
    const double effective = baseline_->sigma2_hat / static_cast<double>(count_ ? count_ : 1);
    return reading_from_residual(mean_residual(), effective, mode, t);
}

double windowed_index(std::span<const ImageMatrix> frames, const BaselineModel& baseline) {
    WindowAccumulator acc(baseline);
    for (const auto& f : frames) acc.add(f);
    return acc.index();
}

SparsityReading windowed_reading(std::span<const ImageMatrix> frames, const BaselineModel& baseline,
                                 MomentMode mode) {
    WindowAccumulator acc(baseline);
    for (const auto& f : frames) acc.add(f);
    return acc.corrected(mode);
}

std::vector<SparsityReading> monitor_series(std::size_t stream_length, const FrameLoader& load,
                                            const BaselineModel& baseline, TauRange tau,
                                            MomentMode mode) {
    std::vector<SparsityReading> out;
    if (tau.empty()) return out;
    if (tau.first < 1 || tau.last > static_cast<std::int64_t>(stream_length)) {
        throw PreconditionError("tau range [" + std::to_string(tau.first) + ", " +
                                std::to_string(tau.last) + "] outside stream of " +
                                std::to_string(stream_length) + " frames");
    }
    out.reserve(tau.size());
    for (std::int64_t t = tau.first; t <= tau.last; ++t) {
        out.push_back(corrected_reading(load(t), baseline, mode, t));
    }
    return out;
}

std::vector<SparsityReading> monitor_series(std::span<const ImageMatrix> stream,
                                            const BaselineModel& baseline, TauRange tau,
                                            MomentMode mode) {
    return monitor_series(
        stream.size(), [&](std::int64_t t) { return stream[static_cast<std::size_t>(t - 1)]; },
        baseline, tau, mode);
}

}  // namespace hoyer
