#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "hoyer/errors.hpp"
#include "hoyer/sim.hpp"
#include "hoyer/stream.hpp"

namespace hoyer::sim {

ErrorBand error_band(std::span<const double> errors) {
    if (errors.size() < 2) {
        throw PreconditionError("error_band needs at least 2 errors, got " +
                                std::to_string(errors.size()));
    }
    const double n = static_cast<double>(errors.size());
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= n;
    double ss = 0.0;
    for (double e : errors) ss += (e - mean) * (e - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd, mean - 1.96 * sd, mean + 1.96 * sd};
}

double median(std::vector<double> values) {
    if (values.empty()) throw PreconditionError("median of an empty sequence");
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

std::string_view to_string(Experiment e) noexcept {
    return e == Experiment::robustness ? "robustness" : "consistency";
}

std::uint64_t cell_key(Experiment experiment, AnomalyKind kind, double x) noexcept {
    const std::uint64_t tag = (static_cast<std::uint64_t>(experiment) << 8) |
                              static_cast<std::uint64_t>(kind);
    return mix_seed(tag, std::bit_cast<std::uint64_t>(x));
}

std::uint64_t cell_seed(std::uint64_t master, Experiment experiment, AnomalyKind kind,
                        double x) noexcept {
    return mix_seed(master, cell_key(experiment, kind, x));
}

CellResult run_cell(const ImageMatrix& anomaly, const NoiseSpec& noise, std::size_t w0,
                    std::size_t n_ooc, MomentMode mode) {
    const ResidualStream stream(anomaly, noise, w0, n_ooc);

    BaselineFitter fitter;
    for (std::int64_t t = stream.first_t(); t <= 0; ++t) fitter.add(stream.frame(t));
    const BaselineModel baseline = fitter.finish();

    CellResult out;
    out.h_true = hoyer_index(anomaly);
    out.errors.reserve(n_ooc);
    for (std::int64_t t = 1; t <= stream.last_t(); ++t) {
        const auto reading = corrected_reading(stream.frame(t), baseline, mode, t);
        out.errors.push_back(std::abs(reading.g - out.h_true));
    }
    out.band = error_band(out.errors);
    return out;
}

std::vector<double> default_sigma_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 12; ++k) grid.push_back(0.5 * k);
    return grid;
}

std::vector<std::size_t> default_c_grid() {
    std::vector<std::size_t> grid;
    for (std::size_t c = 10; c <= 100; c += 10) grid.push_back(c);
    return grid;
}

namespace {

BandRow replicated_row(double x, const ImageMatrix& anomaly, double sigma, std::uint64_t seed,
                       std::size_t w0, std::size_t n_ooc, MomentMode mode,
                       std::size_t replicates) {
    if (replicates == 0) throw PreconditionError("replicates must be at least 1");
    if (replicates == 1) {
        const auto cell = run_cell(anomaly, {sigma, seed}, w0, n_ooc, mode);
        return {x, cell.h_true, cell.band};
    }
    std::vector<double> m, s, lo, hi;
    double h_true = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) {
        const auto cell = run_cell(anomaly, {sigma, mix_seed(seed, r)}, w0, n_ooc, mode);
        h_true = cell.h_true;
        m.push_back(cell.band.m_eps);
        s.push_back(cell.band.sigma_eps);
        lo.push_back(cell.band.lo);
        hi.push_back(cell.band.hi);
    }
    return {x, h_true, {median(m), median(s), median(lo), median(hi)}};
}

}  // namespace

std::vector<BandRow> run_robustness(const RobustnessConfig& config) {
    if (config.sigmas.empty()) throw PreconditionError("robustness: empty sigma grid");
    const ImageMatrix anomaly = make_anomaly(config.kind, config.p1, config.p2);
    std::vector<BandRow> rows;
    for (double sigma : config.sigmas) {
        validate(NoiseSpec{sigma, 0});
        const auto seed = cell_seed(config.seed, Experiment::robustness, config.kind, sigma);
        rows.push_back(replicated_row(sigma, anomaly, sigma, seed, config.w0, config.n_ooc,
                                      config.mode, config.replicates));
    }
    return rows;
}

std::vector<BandRow> run_consistency(const ConsistencyConfig& config) {
    if (config.cs.empty()) throw PreconditionError("consistency: empty c grid");
    validate(NoiseSpec{config.sigma, 0});
    std::vector<BandRow> rows;
    for (std::size_t c : config.cs) {
        const ImageMatrix anomaly = make_scaled_anomaly(config.kind, c);
        const double x = static_cast<double>(c);
        const auto seed = cell_seed(config.seed, Experiment::consistency, config.kind, x);
        rows.push_back(replicated_row(x, anomaly, config.sigma, seed, config.w0, config.n_ooc,
                                      config.mode, config.replicates));
    }
    return rows;
}

std::vector<WindowConvergenceRow> run_window_convergence(const WindowConvergenceConfig& config) {
    if (config.windows.empty()) throw PreconditionError("window convergence: no windows");
    if (config.replicates == 0) throw PreconditionError("replicates must be at least 1");
    auto windows = config.windows;
    std::sort(windows.begin(), windows.end());
    if (windows.front() == 0) throw PreconditionError("window length must be at least 1");

    const ImageMatrix anomaly = make_anomaly(config.kind, config.p1, config.p2);
    const double h_true = hoyer_index(anomaly);
    // Keyed like a robustness cell, but on a distinct tag so streams never coincide.
    const std::uint64_t base = mix_seed(config.seed, cell_key(Experiment::robustness, config.kind,
                                                              config.sigma) ^ 0x5749'4e44'4f57ULL);

    std::vector<std::vector<double>> errors(windows.size());
    for (std::size_t r = 0; r < config.replicates; ++r) {
        const ResidualStream stream(anomaly, {config.sigma, mix_seed(base, r)}, config.w0,
                                    windows.back());
        BaselineFitter fitter;
        for (std::int64_t t = stream.first_t(); t <= 0; ++t) fitter.add(stream.frame(t));
        const BaselineModel baseline = fitter.finish();

        WindowAccumulator acc(baseline);
        std::size_t next = 0;
        for (std::int64_t t = 1; t <= stream.last_t(); ++t) {
            acc.add(stream.frame(t));
            while (next < windows.size() && windows[next] == acc.size()) {
                errors[next].push_back(std::abs(acc.index() - h_true));
                ++next;
            }
        }
    }

    std::vector<WindowConvergenceRow> rows;
    for (std::size_t k = 0; k < windows.size(); ++k) rows.push_back({windows[k], median(errors[k])});
    return rows;
}

}  // namespace hoyer::sim
