// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "hoyer/frame_io.hpp"
#include "hoyer/sim.hpp"
#include "hoyer/sparsity.hpp"
#include "hoyer/stream.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
namespace sim = hoyer::sim;
namespace io = hoyer::io;
using hoyer::ImageMatrix;
using hoyer::MomentMode;

namespace {

// Tolerances and limits.
constexpr double kExactTol = 1e-12;
constexpr double kOracleTol = 1e-9;
constexpr double kRobustBound = 0.08;
constexpr double kRobustSeconds = 60.0;
constexpr double kConsistencyRatio = 0.5;
constexpr double kConsistencySeconds = 60.0;
constexpr double kTheoremTol = 0.01;
constexpr double kDecaySpread = 3.0;
constexpr double kDominanceFloor = 0.95;
constexpr double kLiteralFloor = 0.3;
constexpr double kDebiasCeiling = 0.08;
constexpr double kMonitorSeconds = 30.0;

constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kPropertySeeds = 20;

constexpr double kDenseH = 0.19962785637227252641;
constexpr double kSparseH = 0.78192222734316947441;
constexpr double kUnitBias = 0.29289321881345247560;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("hoyer_accept_" + name + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

Outcome exact_values() {
    ImageMatrix single(100, 200);
    single(17, 123) = 3.0;
    const double h_const = hoyer::hoyer_index(ImageMatrix(100, 200, 2.0));
    const double h_single = hoyer::hoyer_index(single);
    const auto dense = sim::make_dense_anomaly(100, 200);
    const auto sparse = sim::make_sparse_anomaly(100, 200);
    const double hd = hoyer::hoyer_index(dense);
    const double hs = hoyer::hoyer_index(sparse);
    const double od = oracle::hoyer(dense.values());
    const double os = oracle::hoyer(sparse.values());
    const bool pass = std::abs(h_const) < kExactTol && std::abs(h_single - 1.0) < kExactTol &&
                      std::abs(hd - kDenseH) < kOracleTol && std::abs(hs - kSparseH) < kOracleTol &&
                      std::abs(hd - od) < kOracleTol && std::abs(hs - os) < kOracleTol;
    return {pass, "h(const)=" + num(h_const, 3) + " h(single)=" + num(h_single, 17) +
                      " h(dense)=" + num(hd, 12) + " h(sparse)=" + num(hs, 12)};
}

Outcome robustness() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_pinned = 0.0, worst_median = 0.0;
    for (auto kind : {sim::AnomalyKind::dense, sim::AnomalyKind::sparse}) {
        sim::RobustnessConfig cfg;
        cfg.kind = kind;
        cfg.seed = kSeed;
        for (const auto& row : sim::run_robustness(cfg)) worst_pinned = std::max(worst_pinned, row.band.m_eps);
        cfg.replicates = kPropertySeeds;
        for (const auto& row : sim::run_robustness(cfg)) worst_median = std::max(worst_median, row.band.m_eps);
    }
    const double secs = seconds_since(t0);
    return {worst_pinned < kRobustBound && worst_median < kRobustBound && secs <= kRobustSeconds,
            "max m_eps pinned=" + num(worst_pinned, 4) + " median-of-20=" + num(worst_median, 4) +
                " (<" + num(kRobustBound) + ") in " + num(secs, 3) + " s"};
}

Outcome consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (auto kind : {sim::AnomalyKind::dense, sim::AnomalyKind::sparse}) {
        sim::ConsistencyConfig cfg;
        cfg.kind = kind;
        cfg.seed = kSeed;
        cfg.replicates = kPropertySeeds;
        const auto rows = sim::run_consistency(cfg);
        const auto& first = rows.front();  // c = 10
        const auto& last = rows.back();    // c = 100
        const double w_first = first.band.hi - first.band.lo;
        const double w_last = last.band.hi - last.band.lo;
        pass = pass && last.band.m_eps < kConsistencyRatio * first.band.m_eps && w_last < w_first;
        detail += std::string(sim::to_string(kind)) + ": m(10)=" + num(first.band.m_eps, 4) +
                  " m(100)=" + num(last.band.m_eps, 4) + " width " + num(w_first, 4) + "->" +
                  num(w_last, 4) + "; ";
    }
    const double secs = seconds_since(t0);
    return {pass && secs <= kConsistencySeconds, detail + num(secs, 3) + " s"};
}

Outcome theorem() {
    const auto r = sim::verify_bias_theorem(1.0, 1.0, 400, 400, 50, kSeed);
    const double diff = std::abs(r.empirical_mean_gap - kUnitBias);
    return {diff < kTheoremTol, "mean gap=" + num(r.empirical_mean_gap, 6) + " vs " +
                                    num(kUnitBias, 6) + " |diff|=" + num(diff, 3)};
}

Outcome decay() {
    const std::vector<std::pair<std::size_t, std::size_t>> sizes{{10, 10}, {25, 40}, {100, 100}, {250, 400}};
    const auto rows = sim::verify_noise_sparsity_decay(sizes, 1.0, 50, kSeed);
    double lo = rows.front().median_scaled, hi = lo;
    std::string detail = "scaled medians";
    for (const auto& r : rows) {
        lo = std::min(lo, r.median_scaled);
        hi = std::max(hi, r.median_scaled);
        detail += " " + num(r.median_scaled, 4);
    }
    const double spread = hi / lo;
    return {lo > 0.0 && spread < kDecaySpread, detail + " spread=" + num(spread, 4)};
}

Outcome dominance() {
    const auto r = sim::verify_noise_dominance(sim::make_dense_anomaly(200, 200), 100.0, 20, kSeed);
    return {r.min_h > kDominanceFloor,
            "min h(A+e)=" + num(r.min_h, 5) + " predicted=" + num(r.predicted, 5)};
}

Outcome window_convergence() {
    bool pass = true;
    std::string detail;
    for (auto kind : {sim::AnomalyKind::dense, sim::AnomalyKind::sparse}) {
        sim::WindowConvergenceConfig cfg;
        cfg.kind = kind;
        cfg.seed = kSeed;
        cfg.windows = {1, 10, 100};
        cfg.replicates = kPropertySeeds;
        const auto rows = sim::run_window_convergence(cfg);
        detail += std::string(sim::to_string(kind)) + ":";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            detail += " " + num(rows[i].median_abs_error, 4);
            if (i > 0) pass = pass && rows[i].median_abs_error < rows[i - 1].median_abs_error;
        }
        detail += "; ";
    }
    return {pass, detail};
}

Outcome mode_contrast() {
    sim::RobustnessConfig cfg;
    cfg.sigmas = {6.0};
    cfg.seed = kSeed;
    cfg.mode = MomentMode::literal;
    const double literal = sim::run_robustness(cfg).front().band.m_eps;
    cfg.mode = MomentMode::debias;
    const double debias = sim::run_robustness(cfg).front().band.m_eps;
    return {literal > kLiteralFloor && debias < kDebiasCeiling,
            "literal m_eps=" + num(literal, 4) + " debias m_eps=" + num(debias, 4)};
}

Outcome determinism() {
    TempDir dir("determinism");
    std::ostringstream out, err;
    const auto run_once = [&](const std::string& stem) {
        return hoyer::cli::run({"simulate", "robustness", "--seed", std::to_string(kSeed), "--out",
                                (dir.path / (stem + ".json")).string()},
                               out, err);
    };
    if (run_once("a") != 0 || run_once("b") != 0) return {false, "simulate failed: " + err.str()};
    const bool json_same = io::read_bytes(dir.path / "a.json") == io::read_bytes(dir.path / "b.json");
    const bool csv_same = io::read_bytes(dir.path / "a.csv") == io::read_bytes(dir.path / "b.csv");
    return {json_same && csv_same, std::string("json ") + (json_same ? "identical" : "differs") +
                                       ", csv " + (csv_same ? "identical" : "differs")};
}

Outcome monitor_shape() {
    TempDir dir("monitor");
    const auto frames = dir.path / "frames";
    fs::create_directories(frames);
    // 8-bit crowd-like stream: static background, noise, a bright blob after frame 300.
    ImageMatrix background(130, 320);
    for (std::size_t i = 0; i < 130; ++i)
        for (std::size_t j = 0; j < 320; ++j) background(i, j) = 80.0 + static_cast<double>((i + 2 * j) % 40);
    for (std::size_t k = 1; k <= 578; ++k) {
        ImageMatrix f = background;
        const auto e = sim::sample_noise(130, 320, {3.0, sim::mix_seed(kSeed, k)});
        for (std::size_t i = 0; i < f.size(); ++i) {
            double v = std::round(f.values()[i] + e.values()[i]);
            if (k > 300 && (i / 320) >= 40 && (i / 320) < 70 && (i % 320) >= 100 && (i % 320) < 160) v += 60.0;
            f.values()[i] = std::clamp(v, 0.0, 255.0);
        }
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04zu.pgm", k);
        io::write_pgm(f, frames / name);
    }
    const auto series = dir.path / "series.csv";
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = hoyer::cli::run({"monitor", "--frames", frames.string(), "--w0", "100",
                                      "--tau-from", "201", "--tau-to", "578", "--out", series.string()},
                                     out, err);
    const double secs = seconds_since(t0);
    if (code != 0) return {false, "monitor exited " + std::to_string(code) + ": " + err.str()};
    const auto records = io::parse_series_csv(io::read_bytes(series));
    return {records.size() == 378 && secs <= kMonitorSeconds,
            std::to_string(records.size()) + " records in " + num(secs, 3) + " s"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"exact values", exact_values},
        {"robustness under 0.08", robustness},
        {"consistency decay", consistency},
        {"bias limit for constant signal", theorem},
        {"white-noise decay is bounded", decay},
        {"noise dominance at sigma=100", dominance},
        {"window averaging converges", window_convergence},
        {"literal vs debias contrast", mode_contrast},
        {"simulate is byte-deterministic", determinism},
        {"monitor on a 578-frame stream", monitor_shape},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %2zu %-32s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
