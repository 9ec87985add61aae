#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <string>

#include "hoyer/errors.hpp"
#include "hoyer/sim.hpp"

namespace hoyer::sim {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

SplitMix64::result_type SplitMix64::operator()() noexcept {
    state_ += kGolden;
    return finalize(state_);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key) noexcept {
    return finalize(master ^ finalize(key + kGolden));
}

void validate(const NoiseSpec& spec) {
    if (!(std::isfinite(spec.sigma) && spec.sigma > 0.0)) {
        throw ValueError("noise sigma must be finite and > 0, got " + std::to_string(spec.sigma));
    }
}

void fill_noise(std::span<double> out, const NoiseSpec& spec) {
    validate(spec);
    SplitMix64 engine(spec.seed);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : out) v = spec.sigma * normal(engine);
}

ImageMatrix sample_noise(std::size_t p1, std::size_t p2, const NoiseSpec& spec) {
    ImageMatrix e(p1, p2);
    fill_noise(e.values(), spec);
    return e;
}

ResidualStream::ResidualStream(ImageMatrix anomaly, NoiseSpec noise, std::size_t n_ic,
                               std::size_t n_ooc)
    : anomaly_(std::move(anomaly)), noise_(noise), n_ic_(n_ic), n_ooc_(n_ooc) {
    validate(noise_);
    if (n_ic_ == 0 || n_ooc_ == 0) {
        throw PreconditionError("residual stream needs at least one in-control and one "
                                "out-of-control frame");
    }
}

ImageMatrix ResidualStream::noise(std::int64_t t) const {
    if (t < first_t() || t > last_t()) {
        throw PreconditionError("frame t=" + std::to_string(t) + " outside stream [" +
                                std::to_string(first_t()) + ", " + std::to_string(last_t()) + "]");
    }
    const NoiseSpec frame_spec{noise_.sigma, mix_seed(noise_.seed, static_cast<std::uint64_t>(t))};
    return sample_noise(anomaly_.rows(), anomaly_.cols(), frame_spec);
}

ImageMatrix ResidualStream::frame(std::int64_t t) const {
    ImageMatrix r = noise(t);
    if (t > 0) {
        auto out = r.values();
        const auto a = anomaly_.values();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + out[i];
    }
    return r;
}

std::vector<TimedFrame> simulate_residual_stream(const ImageMatrix& anomaly, const NoiseSpec& spec,
                                                 std::size_t n_ic, std::size_t n_ooc) {
    const ResidualStream stream(anomaly, spec, n_ic, n_ooc);
    std::vector<TimedFrame> frames;
    frames.reserve(n_ic + n_ooc);
    for (std::int64_t t = stream.first_t(); t <= stream.last_t(); ++t) {
        frames.push_back({t, stream.frame(t)});
    }
    return frames;
}

}  // namespace hoyer::sim
