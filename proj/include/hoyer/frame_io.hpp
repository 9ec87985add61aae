#pragma once

// On-disk formats: numeric CSV matrices, PGM (P2/P5) frames, frame
// directories, sparsity time series (CSV) and experiment reports (JSON).
//
// Readers never reshape or truncate silently; every structural problem is a
// FormatError carrying the path and, for text formats, the line and column.
// Failures to open or write a file are IoError.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hoyer/image_matrix.hpp"
#include "hoyer/sim.hpp"
#include "hoyer/stream.hpp"

namespace hoyer::io {

// ---------------------------------------------------------------- matrices

// Comma-separated rows, one per line. Lines starting with '#' before the
// first data row are treated as headers. Blank lines are only allowed at the
// end of the file.
ImageMatrix parse_matrix_csv(std::string_view text, std::string_view source = "<memory>");
ImageMatrix read_matrix_csv(const std::filesystem::path& path);
// Shortest round-trip decimal representation of every value.
std::string format_matrix_csv(const ImageMatrix& m);
void write_matrix_csv(const ImageMatrix& m, const std::filesystem::path& path);

// P2 (ASCII) or P5 (binary; 16-bit big-endian samples when maxval > 255).
// Intensities are returned as-is, without rescaling by maxval.
ImageMatrix parse_pgm(std::string_view bytes, std::string_view source = "<memory>");
ImageMatrix read_pgm(const std::filesystem::path& path);
// Values must be integers in [0, maxval]; ValueError otherwise.
void write_pgm(const ImageMatrix& m, const std::filesystem::path& path, unsigned maxval = 255,
               bool binary = true);

// Dispatches on extension: .pgm / .pnm -> PGM, .csv / .txt -> CSV.
ImageMatrix read_frame(const std::filesystem::path& path);

// ------------------------------------------------------------------ frames

/// Files in a directory whose names match a shell wildcard pattern, ordered
/// by the last run of digits in each name. Frames are loaded on demand.
class FrameDirectory {
public:
    static FrameDirectory open(const std::filesystem::path& dir, std::string_view pattern);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::filesystem::path& path(std::size_t i) const { return entries_.at(i).path; }
    std::uint64_t index(std::size_t i) const { return entries_.at(i).index; }

    // Loads the i-th frame (0-based position). Throws FormatError naming the
    // file when its shape differs from the first frame's.
    ImageMatrix load(std::size_t i) const;

private:
    struct Entry {
        std::uint64_t index;
        std::filesystem::path path;
    };
    std::vector<Entry> entries_;
    mutable std::size_t rows_ = 0;
    mutable std::size_t cols_ = 0;
};

std::vector<ImageMatrix> read_frame_dir(const std::filesystem::path& dir, std::string_view pattern);

// ------------------------------------------------------------------ series

struct SeriesRecord {
    std::int64_t t = 0;
    double h_raw = 0.0;
    double bias = 0.0;
    double g = 0.0;
    double g_unclamped = 0.0;
    double a_bar = 0.0;
    double a2_bar = 0.0;
    double sigma2 = 0.0;
};

inline constexpr std::string_view kSeriesHeader = "t,h_raw,bias,g,g_unclamped,a_bar,a2_bar,sigma2";

SeriesRecord to_record(const SparsityReading& reading) noexcept;
std::vector<SeriesRecord> to_records(std::span<const SparsityReading> readings);

std::string format_double(double v);
std::string format_record(const SeriesRecord& r);
std::string format_series_csv(std::span<const SeriesRecord> records);
void write_series_csv(std::span<const SeriesRecord> records, const std::filesystem::path& path);
std::vector<SeriesRecord> parse_series_csv(std::string_view text, std::string_view source = "<memory>");

// ----------------------------------------------------------------- reports

/// Result of a simulation driver plus everything needed to rerun it.
struct ExperimentReport {
    std::string experiment;       // "robustness" | "consistency"
    std::string x_name;           // "sigma" | "c"
    nlohmann::ordered_json config;  // full run configuration, defaults included
    std::vector<sim::BandRow> rows;
};

nlohmann::ordered_json to_json(const ExperimentReport& report);
std::string format_report_json(const ExperimentReport& report);
void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);

// Plot-ready "x,m_eps,lo,hi".
std::string format_band_csv(std::span<const sim::BandRow> rows);
void write_band_csv(std::span<const sim::BandRow> rows, const std::filesystem::path& path);

// Writes `contents` to `path`, throwing IoError with the path on failure.
void write_text(const std::filesystem::path& path, std::string_view contents);
std::string read_bytes(const std::filesystem::path& path);

}  // namespace hoyer::io
