#pragma once

// Simulation harness: anomaly patterns, seeded Gaussian noise, residual
// streams with a change at t = 0, error bands of the corrected index, and
// Monte Carlo checks of the asymptotic results.
//
// Seeding. Every random draw is derived from a 64-bit master seed by
// mix_seed (a SplitMix64 finalizer chain). An experiment cell (one sigma or
// one magnification c) gets
//     cell_seed = mix_seed(master, cell_key(experiment, kind, x))
// where x is the cell's parameter value, so a cell's output does not depend
// on which other cells are run or in which order. Replicate r of a cell uses
// mix_seed(cell_seed, r), and frame t of a stream uses mix_seed(stream_seed, t).
// Noise for a frame is a SplitMix64 sequence started at the frame seed and
// mapped to N(0, 1) with Boost's ziggurat normal_distribution, filled in
// row-major order and scaled by sigma.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hoyer/image_matrix.hpp"
#include "hoyer/sparsity.hpp"

namespace hoyer::sim {

// ---------------------------------------------------------------- anomalies

enum class AnomalyKind { dense, sparse };

std::string_view to_string(AnomalyKind kind) noexcept;
AnomalyKind parse_anomaly_kind(std::string_view text);

// A_ij = floor((j - 1) / 50), j 1-based: a staircase across columns.
ImageMatrix make_dense_anomaly(std::size_t p1, std::size_t p2);
// A_ij = 5 for 50 <= j < 60 (j 1-based), else 0: a ten-column band.
ImageMatrix make_sparse_anomaly(std::size_t p1, std::size_t p2);
ImageMatrix make_anomaly(AnomalyKind kind, std::size_t p1, std::size_t p2);

// Magnified pattern on c x 2c:
//   dense  A_ij = floor(4 (j - 1) / (2c))            (four equal bands 0..3)
//   sparse A_ij = 5 for c/2 <= j < c/2 + c/10         (band of width c/10)
// c must be a positive multiple of 10 (ValueError otherwise).
ImageMatrix make_scaled_anomaly(AnomalyKind kind, std::size_t c);

// -------------------------------------------------------------------- noise

/// Counter-based 64-bit generator (Steele, Lea & Flood's SplitMix64).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

private:
    std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t key) noexcept;

struct NoiseSpec {
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

// Throws ValueError unless sigma is finite and > 0.
void validate(const NoiseSpec& spec);

// Entries iid N(0, sigma^2). Same spec -> same matrix, bit for bit.
ImageMatrix sample_noise(std::size_t p1, std::size_t p2, const NoiseSpec& spec);
void fill_noise(std::span<double> out, const NoiseSpec& spec);

// --------------------------------------------------------- residual streams

/// R_t = 1(t > 0) A + e_t for t = -n_ic + 1 .. n_ooc. Frames are generated
/// on demand; e_t depends only on (spec.seed, t).
class ResidualStream {
public:
    ResidualStream(ImageMatrix anomaly, NoiseSpec noise, std::size_t n_ic, std::size_t n_ooc);

    std::int64_t first_t() const noexcept { return -static_cast<std::int64_t>(n_ic_) + 1; }
    std::int64_t last_t() const noexcept { return static_cast<std::int64_t>(n_ooc_); }
    const ImageMatrix& anomaly() const noexcept { return anomaly_; }

    ImageMatrix noise(std::int64_t t) const;
    ImageMatrix frame(std::int64_t t) const;

private:
    ImageMatrix anomaly_;
    NoiseSpec noise_;
    std::size_t n_ic_;
    std::size_t n_ooc_;
};

struct TimedFrame {
    std::int64_t t;
    ImageMatrix frame;
};

std::vector<TimedFrame> simulate_residual_stream(const ImageMatrix& anomaly, const NoiseSpec& spec,
                                                 std::size_t n_ic, std::size_t n_ooc);

// -------------------------------------------------------------- error bands

/// Mean absolute error with a +/- 1.96 standard deviation band
/// (sample standard deviation, denominator n - 1).
struct ErrorBand {
    double m_eps = 0.0;
    double sigma_eps = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Throws PreconditionError when fewer than two errors are given.
ErrorBand error_band(std::span<const double> errors);

double median(std::vector<double> values);

// -------------------------------------------------------------- experiments

enum class Experiment { robustness, consistency };

std::string_view to_string(Experiment e) noexcept;

std::uint64_t cell_key(Experiment experiment, AnomalyKind kind, double x) noexcept;
std::uint64_t cell_seed(std::uint64_t master, Experiment experiment, AnomalyKind kind,
                        double x) noexcept;

/// One simulated stream: fit the baseline on the n_ic = w0 in-control frames,
/// take a corrected reading of each of the n_ooc out-of-control frames and
/// band |g - h(A)|.
struct CellResult {
    double h_true = 0.0;
    ErrorBand band;
    std::vector<double> errors;
};

CellResult run_cell(const ImageMatrix& anomaly, const NoiseSpec& noise, std::size_t w0,
                    std::size_t n_ooc, MomentMode mode);

/// One table row: x is sigma (robustness) or c (consistency). With
/// replicates > 1 every band field is the median over replicates.
struct BandRow {
    double x = 0.0;
    double h_true = 0.0;
    ErrorBand band;
};

std::vector<double> default_sigma_grid();       // 0.5, 1.0, ..., 6.0
std::vector<std::size_t> default_c_grid();     // 10, 20, ..., 100

struct RobustnessConfig {
    std::vector<double> sigmas = default_sigma_grid();
    AnomalyKind kind = AnomalyKind::dense;
    std::uint64_t seed = 0;
    std::size_t w0 = 200;
    std::size_t n_ooc = 200;
    std::size_t p1 = 100;
    std::size_t p2 = 200;
    MomentMode mode = MomentMode::debias;
    std::size_t replicates = 1;
};

struct ConsistencyConfig {
    std::vector<std::size_t> cs = default_c_grid();
    double sigma = 3.0;
    AnomalyKind kind = AnomalyKind::dense;
    std::uint64_t seed = 0;
    std::size_t w0 = 200;
    std::size_t n_ooc = 200;
    MomentMode mode = MomentMode::debias;
    std::size_t replicates = 1;
};

std::vector<BandRow> run_robustness(const RobustnessConfig& config);
std::vector<BandRow> run_consistency(const ConsistencyConfig& config);

/// Uncorrected windowed index against h(A) for growing windows of iid
/// out-of-control frames. Windows are nested prefixes of one stream per seed.
struct WindowConvergenceConfig {
    AnomalyKind kind = AnomalyKind::dense;
    double sigma = 2.0;
    std::vector<std::size_t> windows{1, 10, 100};
    std::size_t replicates = 20;
    std::uint64_t seed = 0;
    std::size_t w0 = 200;
    std::size_t p1 = 100;
    std::size_t p2 = 200;
};

struct WindowConvergenceRow {
    std::size_t w = 0;
    double median_abs_error = 0.0;
};

std::vector<WindowConvergenceRow> run_window_convergence(const WindowConvergenceConfig& config);

// ------------------------------------------------------------ verification

struct BiasCheck {
    double empirical_mean_gap = 0.0;  // mean of h(A + e) - h(A)
    double predicted_bias = 0.0;      // noise_bias on the exact moments of A
    double abs_diff = 0.0;
};

BiasCheck verify_bias_theorem(const ImageMatrix& anomaly, double sigma, std::size_t reps,
                              std::uint64_t seed);
BiasCheck verify_bias_theorem(double a_const, double sigma, std::size_t p1, std::size_t p2,
                              std::size_t reps, std::uint64_t seed);

/// Exact moments (sigma2 set to the given variance) of a noise-free matrix.
SignalMoments exact_moments(const ImageMatrix& anomaly, double sigma2);

struct DecayRow {
    std::size_t p1 = 0;
    std::size_t p2 = 0;
    double median_gap = 0.0;      // median of 1 - h(e), signed
    double median_abs_gap = 0.0;  // median of |1 - h(e)|
    double median_scaled = 0.0;   // median of |1 - h(e)| sqrt(N / log log N)
};

// Sizes need p1 p2 >= 16 so that log log N > 0.
std::vector<DecayRow> verify_noise_sparsity_decay(
    std::span<const std::pair<std::size_t, std::size_t>> sizes, double sigma, std::size_t reps,
    std::uint64_t seed);

struct DominanceCheck {
    std::vector<double> h_values;  // h(A + e) per replicate
    double min_h = 0.0;
    double h_clean = 0.0;          // h(A)
    double predicted = 0.0;        // h(A) + noise_bias(exact moments)
};

DominanceCheck verify_noise_dominance(const ImageMatrix& anomaly, double sigma, std::size_t reps,
                                      std::uint64_t seed);

}  // namespace hoyer::sim
