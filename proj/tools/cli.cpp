#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hoyer/errors.hpp"
#include "hoyer/frame_io.hpp"
#include "hoyer/kernels.hpp"
#include "hoyer/sim.hpp"
#include "hoyer/sparsity.hpp"
#include "hoyer/stream.hpp"
#include "hoyer/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace hoyer::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;

struct IndexOptions {
    std::string matrix;
    std::string baseline_dir;
    std::string glob = "*.pgm";
    std::size_t w0 = 100;
    std::string mode = "debias";
};

struct SimulateOptions {
    std::string experiment;
    std::string kind = "dense";
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    std::string csv;
    std::string mode = "debias";
    std::size_t w0 = 200;
    std::size_t n_ooc = 200;
    std::size_t replicates = 1;
    std::vector<double> sigmas = sim::default_sigma_grid();
    std::vector<std::size_t> cs = sim::default_c_grid();
    double sigma = 3.0;
};

struct MonitorOptions {
    std::string frames;
    std::string glob = "*.pgm";
    std::size_t w0 = 100;
    std::int64_t tau_from = 0;  // 0: w0 + 1
    std::int64_t tau_to = 0;    // 0: last frame
    std::string mode = "debias";
    std::string out;
    std::string report;
};

struct VerifyOptions {
    std::string check;
    std::uint64_t seed = kDefaultSeed;
    std::size_t reps = 0;  // 0: the check's default
    std::string out;
};

std::string fmt(double v) { return io::format_double(v); }

void print_reading(std::ostream& out, const SparsityReading& r) {
    const auto rec = io::to_record(r);
    out << "t=" << rec.t << " h_raw=" << fmt(rec.h_raw) << " bias=" << fmt(rec.bias)
        << " g=" << fmt(rec.g) << " g_unclamped=" << fmt(rec.g_unclamped)
        << " a_bar=" << fmt(rec.a_bar) << " a2_bar=" << fmt(rec.a2_bar)
        << " sigma2=" << fmt(rec.sigma2) << "\n";
}

BaselineModel fit_from_directory(const io::FrameDirectory& frames, std::size_t w0) {
    if (w0 < 2) throw PreconditionError("--w0 must be at least 2");
    if (frames.size() < w0) {
        throw PreconditionError("need at least w0=" + std::to_string(w0) +
                                " in-control frames, found " + std::to_string(frames.size()));
    }
    BaselineFitter fitter;
    for (std::size_t i = 0; i < w0; ++i) fitter.add(frames.load(i));
    return fitter.finish();
}

// ------------------------------------------------------------------ index

int cmd_index(const IndexOptions& o, std::ostream& out, std::ostream& err) {
    const MomentMode mode = parse_moment_mode(o.mode);
    const ImageMatrix x = io::read_frame(o.matrix);

    SparsityReading reading;
    if (!o.baseline_dir.empty()) {
        const auto frames = io::FrameDirectory::open(o.baseline_dir, o.glob);
        const auto baseline = fit_from_directory(frames, o.w0);
        reading = corrected_reading(x, baseline, mode, 0);
        const auto r = residual(x, baseline);
        if (sign_balance(r).mixed()) {
            err << "warning: residual is mixed-sign; the Hoyer index assumes a same-sign anomaly\n";
        }
    } else {
        // No baseline: the matrix is its own residual and no noise is removed.
        const BaselineModel none{ImageMatrix(x.rows(), x.cols(), 0.0), 0.0, 0};
        reading = corrected_reading(x, none, mode, 0);
        if (sign_balance(x).mixed()) {
            err << "warning: matrix is mixed-sign; the Hoyer index assumes a same-sign anomaly\n";
        }
    }
    print_reading(out, reading);
    const bool blank = std::all_of(x.values().begin(), x.values().end(),
                                   [](double v) { return v == 0.0; });
    if (blank) out << "note: blank matrix convention, the all-zero matrix has h = 1\n";
    return kOk;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    const auto kind = sim::parse_anomaly_kind(o.kind);
    const auto mode = parse_moment_mode(o.mode);
    if (o.replicates == 0) throw PreconditionError("--replicates must be at least 1");

    io::ExperimentReport report;
    ordered_json config;
    config["subcommand"] = "simulate";
    config["experiment"] = o.experiment;
    config["kind"] = o.kind;
    config["seed"] = o.seed;
    config["mode"] = o.mode;
    config["w0"] = o.w0;
    config["n_ooc"] = o.n_ooc;
    config["replicates"] = o.replicates;

    if (o.experiment == "robustness") {
        sim::RobustnessConfig c;
        c.sigmas = o.sigmas;
        c.kind = kind;
        c.seed = o.seed;
        c.w0 = o.w0;
        c.n_ooc = o.n_ooc;
        c.mode = mode;
        c.replicates = o.replicates;
        config["p1"] = c.p1;
        config["p2"] = c.p2;
        config["sigmas"] = c.sigmas;
        report.x_name = "sigma";
        report.rows = sim::run_robustness(c);
    } else {
        sim::ConsistencyConfig c;
        c.cs = o.cs;
        c.sigma = o.sigma;
        c.kind = kind;
        c.seed = o.seed;
        c.w0 = o.w0;
        c.n_ooc = o.n_ooc;
        c.mode = mode;
        c.replicates = o.replicates;
        config["sigma"] = c.sigma;
        config["cs"] = c.cs;
        report.x_name = "c";
        report.rows = sim::run_consistency(c);
    }
    report.experiment = o.experiment;
    report.config = config;

    fs::path csv = o.csv.empty() ? fs::path(o.out).replace_extension(".csv") : fs::path(o.csv);
    io::write_report_json(report, o.out);
    io::write_band_csv(report.rows, csv);

    out << o.experiment << " (" << o.kind << ", " << o.mode << ", seed " << o.seed << ")\n";
    for (const auto& r : report.rows) {
        out << "  " << report.x_name << "=" << fmt(r.x) << "  h(A)=" << std::fixed
            << std::setprecision(5) << r.h_true << "  m_eps=" << r.band.m_eps << "  band=["
            << r.band.lo << ", " << r.band.hi << "]\n"
            << std::defaultfloat;
    }
    out << "wrote " << o.out << " and " << csv.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- monitor

int cmd_monitor(const MonitorOptions& o, std::ostream& out) {
    const auto mode = parse_moment_mode(o.mode);
    const auto frames = io::FrameDirectory::open(o.frames, o.glob);
    const auto n = static_cast<std::int64_t>(frames.size());
    const std::int64_t w0 = static_cast<std::int64_t>(o.w0);

    TauRange tau{o.tau_from ? o.tau_from : w0 + 1, o.tau_to ? o.tau_to : n};
    if (tau.first <= w0) {
        throw PreconditionError("--tau-from (" + std::to_string(tau.first) +
                                ") must be greater than --w0 (" + std::to_string(w0) +
                                "); the first w0 frames form the in-control baseline");
    }
    if (tau.last > n) {
        throw PreconditionError("--tau-to (" + std::to_string(tau.last) + ") exceeds the " +
                                std::to_string(n) + " frames found");
    }

    const auto baseline = fit_from_directory(frames, o.w0);
    const auto readings = monitor_series(
        frames.size(), [&](std::int64_t t) { return frames.load(static_cast<std::size_t>(t - 1)); },
        baseline, tau, mode);
    const auto records = io::to_records(readings);
    io::write_series_csv(records, o.out);

    if (!o.report.empty()) {
        ordered_json j;
        j["tool"] = "hoyer";
        j["version"] = kVersion;
        j["config"] = {{"subcommand", "monitor"}, {"glob", o.glob},   {"w0", o.w0},
                       {"tau_from", tau.first},   {"tau_to", tau.last}, {"mode", o.mode}};
        j["frames"] = frames.size();
        j["sigma2_hat"] = baseline.sigma2_hat;
        j["records"] = records.size();
        io::write_text(o.report, j.dump(2) + "\n");
    }

    out << "baseline: w0=" << o.w0 << " sigma2_hat=" << fmt(baseline.sigma2_hat) << "\n";
    if (!readings.empty()) {
        const auto lowest = std::min_element(readings.begin(), readings.end(),
                                             [](const auto& a, const auto& b) { return a.g < b.g; });
        out << "lowest corrected index g=" << fmt(lowest->g) << " at t=" << lowest->t << "\n";
    }
    out << "wrote " << records.size() << " records to " << o.out << "\n";
    return kOk;
}

// ----------------------------------------------------------------- verify

int cmd_verify(const VerifyOptions& o, std::ostream& out) {
    ordered_json j;
    j["tool"] = "hoyer";
    j["version"] = kVersion;
    bool pass = false;

    if (o.check == "theorem1") {
        const std::size_t reps = o.reps ? o.reps : 50;
        const auto r = sim::verify_bias_theorem(1.0, 1.0, 400, 400, reps, o.seed);
        pass = r.abs_diff < 0.01;
        out << "theorem1: A=1 on 400x400, sigma=1, " << reps << " reps\n"
            << "  mean h(A+e)-h(A) = " << fmt(r.empirical_mean_gap) << "\n"
            << "  predicted bias   = " << fmt(r.predicted_bias) << "\n"
            << "  |difference|     = " << fmt(r.abs_diff) << "  (limit 0.01)\n";
        j["config"] = {{"subcommand", "verify"}, {"check", o.check}, {"seed", o.seed},
                       {"reps", reps},           {"a_const", 1.0},   {"sigma", 1.0},
                       {"p1", 400},              {"p2", 400}};
        j["result"] = {{"empirical_mean_gap", r.empirical_mean_gap},
                       {"predicted_bias", r.predicted_bias},
                       {"abs_diff", r.abs_diff}};
    } else if (o.check == "corollary1") {
        const std::size_t reps = o.reps ? o.reps : 20;
        const auto a = sim::make_dense_anomaly(200, 200);
        const auto r = sim::verify_noise_dominance(a, 100.0, reps, o.seed);
        pass = r.min_h > 0.95;
        out << "corollary1: dense staircase on 200x200, sigma=100, " << reps << " reps\n"
            << "  h(A)             = " << fmt(r.h_clean) << "\n"
            << "  predicted h(A+e) = " << fmt(r.predicted) << "\n"
            << "  min h(A+e)       = " << fmt(r.min_h) << "  (must exceed 0.95)\n";
        j["config"] = {{"subcommand", "verify"}, {"check", o.check}, {"seed", o.seed},
                       {"reps", reps},           {"sigma", 100.0},   {"p1", 200},
                       {"p2", 200}};
        j["result"] = {{"h_clean", r.h_clean}, {"predicted", r.predicted}, {"min_h", r.min_h},
                       {"h_values", r.h_values}};
    } else {
        const std::size_t reps = o.reps ? o.reps : 50;
        const std::vector<std::pair<std::size_t, std::size_t>> sizes{
            {10, 10}, {25, 40}, {100, 100}, {250, 400}};
        const auto rows = sim::verify_noise_sparsity_decay(sizes, 1.0, reps, o.seed);
        double lo = rows.front().median_scaled, hi = lo;
        out << "lemma2: white noise, sigma=1, " << reps << " reps per size\n";
        ordered_json jrows = ordered_json::array();
        for (const auto& r : rows) {
            lo = std::min(lo, r.median_scaled);
            hi = std::max(hi, r.median_scaled);
            out << "  N=" << r.p1 * r.p2 << "  median |1-h|=" << fmt(r.median_abs_gap)
                << "  scaled=" << fmt(r.median_scaled) << "\n";
            jrows.push_back({{"p1", r.p1},
                             {"p2", r.p2},
                             {"median_gap", r.median_gap},
                             {"median_abs_gap", r.median_abs_gap},
                             {"median_scaled", r.median_scaled}});
        }
        const double ratio = lo > 0.0 ? hi / lo : INFINITY;
        pass = ratio < 3.0;
        out << "  max/min scaled = " << fmt(ratio) << "  (must stay below 3)\n";
        j["config"] = {{"subcommand", "verify"}, {"check", o.check}, {"seed", o.seed},
                       {"reps", reps},           {"sigma", 1.0}};
        j["result"] = {{"rows", jrows}, {"ratio", ratio}};
    }

    j["pass"] = pass;
    if (!o.out.empty()) io::write_text(o.out, j.dump(2) + "\n");
    out << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparsity estimation for noisy image streams (Hoyer / corrected Hoyer index)",
                 "hoyer"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    IndexOptions idx;
    auto* index = app.add_subcommand("index", "Hoyer index of one matrix, corrected when a "
                                              "baseline directory is given");
    index->add_option("matrix", idx.matrix, "Matrix file (.csv or .pgm)")->required();
    index->add_option("--baseline", idx.baseline_dir, "Directory of in-control frames");
    index->add_option("--glob", idx.glob, "Frame file pattern inside --baseline")
        ->capture_default_str();
    index->add_option("--w0", idx.w0, "Number of in-control frames")->capture_default_str();
    index->add_option("--mode", idx.mode, "Moment estimator: literal|debias")
        ->capture_default_str()
        ->check(CLI::IsMember({"literal", "debias"}));

    SimulateOptions simo;
    auto* simulate = app.add_subcommand("simulate", "Reproduce the robustness or consistency study");
    simulate->add_option("experiment", simo.experiment, "robustness|consistency")
        ->required()
        ->check(CLI::IsMember({"robustness", "consistency"}));
    simulate->add_option("--kind", simo.kind, "dense|sparse")
        ->capture_default_str()
        ->check(CLI::IsMember({"dense", "sparse"}));
    simulate->add_option("--seed", simo.seed, "Master seed")->capture_default_str();
    simulate->add_option("--out", simo.out, "JSON report path")->required();
    simulate->add_option("--csv", simo.csv, "Plot-ready CSV path (default: --out with .csv)");
    simulate->add_option("--mode", simo.mode, "literal|debias")
        ->capture_default_str()
        ->check(CLI::IsMember({"literal", "debias"}));
    simulate->add_option("--w0", simo.w0, "In-control frames per stream")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    simulate->add_option("--n-ooc", simo.n_ooc, "Out-of-control frames per stream")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    simulate->add_option("--replicates", simo.replicates, "Streams per cell (median reported)")
        ->capture_default_str();
    simulate->add_option("--sigmas", simo.sigmas, "Noise grid for robustness")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    simulate->add_option("--cs", simo.cs, "Magnification grid for consistency")->delimiter(',');
    simulate->add_option("--sigma", simo.sigma, "Noise level for consistency")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    MonitorOptions mon;
    auto* monitor = app.add_subcommand("monitor", "Corrected index for every candidate change point");
    monitor->add_option("--frames", mon.frames, "Directory of frames")->required();
    monitor->add_option("--glob", mon.glob, "Frame file pattern")->capture_default_str();
    monitor->add_option("--w0", mon.w0, "In-control window (first w0 frames)")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
    monitor->add_option("--tau-from", mon.tau_from, "First monitored frame, 1-based (default w0+1)");
    monitor->add_option("--tau-to", mon.tau_to, "Last monitored frame, 1-based (default: last)");
    monitor->add_option("--mode", mon.mode, "literal|debias")
        ->capture_default_str()
        ->check(CLI::IsMember({"literal", "debias"}));
    monitor->add_option("--out", mon.out, "Series CSV path")->required();
    monitor->add_option("--report", mon.report, "Optional JSON run summary");

    VerifyOptions ver;
    auto* verify = app.add_subcommand("verify", "Monte Carlo check of an asymptotic result");
    verify->add_option("check", ver.check, "lemma2|theorem1|corollary1")
        ->required()
        ->check(CLI::IsMember({"lemma2", "theorem1", "corollary1"}));
    verify->add_option("--seed", ver.seed, "Master seed")->capture_default_str();
    verify->add_option("--reps", ver.reps, "Replicates (default depends on the check)");
    verify->add_option("--out", ver.out, "Optional JSON report");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (index->parsed()) return cmd_index(idx, out, err);
        if (simulate->parsed()) return cmd_simulate(simo, out);
        if (monitor->parsed()) return cmd_monitor(mon, out);
        return cmd_verify(ver, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    }
}

}  // namespace hoyer::cli
