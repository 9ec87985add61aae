#include "hoyer/frame_io.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "hoyer/errors.hpp"
#include "hoyer/version.hpp"

namespace fs = std::filesystem;

namespace hoyer::io {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void format_error(std::string_view source, std::size_t line, std::size_t column,
                               const std::string& what) {
    std::string msg(source);
    if (line) msg += ":" + std::to_string(line);
    if (column) msg += ":" + std::to_string(column);
    throw FormatError(msg + ": " + what);
}

bool parse_finite(std::string_view field, double& out) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    if (field.empty()) return false;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

std::string shape_string(std::size_t rows, std::size_t cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

// ----------------------------------------------------------------- files

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path.string() + ": read failed");
    return bytes;
}

void write_text(const fs::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError(path.string() + ": write failed");
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

// ------------------------------------------------------------------- CSV

ImageMatrix parse_matrix_csv(std::string_view text, std::string_view source) {
    const auto lines = split_lines(text);
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    bool in_data = false;

    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::size_t line_no = k + 1;
        const auto line = trim(lines[k]);
        if (!in_data && !line.empty() && line.front() == '#') continue;
        if (line.empty()) format_error(source, line_no, 0, "empty row");
        in_data = true;

        std::size_t fields = 0;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            const auto field = trim(line.substr(start, comma == std::string_view::npos
                                                            ? std::string_view::npos
                                                            : comma - start));
            ++fields;
            double v;
            if (!parse_finite(field, v)) {
                format_error(source, line_no, fields,
                             "not a finite number: '" + std::string(field) + "'");
            }
            values.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (rows == 0) {
            cols = fields;
        } else if (fields != cols) {
            format_error(source, line_no, 0,
                         "ragged row: expected " + std::to_string(cols) + " fields, found " +
                             std::to_string(fields));
        }
        ++rows;
    }
    if (rows == 0) format_error(source, 0, 0, "no data rows");
    return ImageMatrix(rows, cols, std::move(values));
}

ImageMatrix read_matrix_csv(const fs::path& path) {
    return parse_matrix_csv(read_bytes(path), path.string());
}

std::string format_matrix_csv(const ImageMatrix& m) {
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_matrix_csv(const ImageMatrix& m, const fs::path& path) {
    write_text(path, format_matrix_csv(m));
}

// ------------------------------------------------------------------- PGM

namespace {

class PgmCursor {
public:
    PgmCursor(std::string_view bytes, std::string_view source) : bytes_(bytes), source_(source) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    // Returns false at end of input.
    bool next_unsigned(unsigned long& out, const char* what) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) return false;
        const char* begin = bytes_.data() + pos_;
        const char* end = bytes_.data() + bytes_.size();
        const auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc() ||
            (ptr < end && !std::isspace(static_cast<unsigned char>(*ptr)) && *ptr != '#')) {
            fail(std::string("malformed ") + what);
        }
        pos_ = static_cast<std::size_t>(ptr - bytes_.data());
        return true;
    }

    unsigned long require_unsigned(const char* what) {
        unsigned long v = 0;
        if (!next_unsigned(v, what)) fail(std::string("missing ") + what);
        return v;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError(std::string(source_) + ": " + what);
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }
    std::string_view rest() const noexcept { return bytes_.substr(pos_); }

private:
    std::string_view bytes_;
    std::string_view source_;
    std::size_t pos_ = 0;
};

}  // namespace

ImageMatrix parse_pgm(std::string_view bytes, std::string_view source) {
    PgmCursor cur(bytes, source);
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        cur.fail("bad magic (expected P2 or P5)");
    }
    const bool binary = bytes[1] == '5';
    cur.advance(2);

    const unsigned long width = cur.require_unsigned("width");
    const unsigned long height = cur.require_unsigned("height");
    const unsigned long maxval = cur.require_unsigned("maxval");
    if (width == 0 || height == 0) cur.fail("zero image dimension");
    if (maxval == 0 || maxval > 65535) {
        cur.fail("maxval out of range (1..65535): " + std::to_string(maxval));
    }

    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<double> values(count);

    if (binary) {
        // Exactly one whitespace byte separates the header from the payload.
        if (cur.pos() >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[cur.pos()]))) {
            cur.fail("truncated payload: missing header terminator");
        }
        cur.advance(1);
        const std::size_t sample = maxval > 255 ? 2 : 1;
        const auto payload = cur.rest();
        if (payload.size() < count * sample) {
            cur.fail("truncated payload: expected " + std::to_string(count * sample) +
                     " bytes, got " + std::to_string(payload.size()));
        }
        if (payload.size() > count * sample) {
            cur.fail("unexpected trailing data after " + std::to_string(count * sample) +
                     " payload bytes");
        }
        const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
        for (std::size_t i = 0; i < count; ++i) {
            const unsigned v = sample == 1 ? p[i] : (unsigned{p[2 * i]} << 8) | p[2 * i + 1];
            if (v > maxval) cur.fail("sample " + std::to_string(i) + " exceeds maxval");
            values[i] = static_cast<double>(v);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            unsigned long v = 0;
            if (!cur.next_unsigned(v, "sample")) {
                cur.fail("truncated payload: expected " + std::to_string(count) + " samples, got " +
                         std::to_string(i));
            }
            if (v > maxval) cur.fail("sample " + std::to_string(i) + " exceeds maxval");
            values[i] = static_cast<double>(v);
        }
        cur.skip_space_and_comments();
        if (!cur.rest().empty()) cur.fail("unexpected trailing data after samples");
    }
    return ImageMatrix(height, width, std::move(values));
}

ImageMatrix read_pgm(const fs::path& path) { return parse_pgm(read_bytes(path), path.string()); }

void write_pgm(const ImageMatrix& m, const fs::path& path, unsigned maxval, bool binary) {
    if (maxval == 0 || maxval > 65535) throw ValueError("PGM maxval must be in 1..65535");
    std::string out = (binary ? "P5\n" : "P2\n") + std::to_string(m.cols()) + " " +
                      std::to_string(m.rows()) + "\n" + std::to_string(maxval) + "\n";
    const auto v = m.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0 && v[i] <= maxval && std::floor(v[i]) == v[i])) {
            throw ValueError("PGM sample must be an integer in [0, " + std::to_string(maxval) +
                             "], got " + format_double(v[i]));
        }
        const auto s = static_cast<unsigned>(v[i]);
        if (binary) {
            if (maxval > 255) out += static_cast<char>((s >> 8) & 0xff);
            out += static_cast<char>(s & 0xff);
        } else {
            out += std::to_string(s);
            out += ((i + 1) % m.cols() == 0) ? '\n' : ' ';
        }
    }
    write_text(path, out);
}

ImageMatrix read_frame(const fs::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm" || ext == ".pnm") return read_pgm(path);
    if (ext == ".csv" || ext == ".txt") return read_matrix_csv(path);
    throw FormatError(path.string() + ": unsupported frame format '" + ext + "'");
}

// ---------------------------------------------------------------- frames

FrameDirectory FrameDirectory::open(const fs::path& dir, std::string_view pattern) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + ": not a directory");

    const std::string pat(pattern);
    FrameDirectory out;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (::fnmatch(pat.c_str(), name.c_str(), 0) != 0) continue;

        const auto last_digit = name.find_last_of("0123456789");
        if (last_digit == std::string::npos) {
            throw FormatError(entry.path().string() + ": file name carries no frame index");
        }
        auto first_digit = last_digit;
        while (first_digit > 0 && std::isdigit(static_cast<unsigned char>(name[first_digit - 1]))) {
            --first_digit;
        }
        std::uint64_t index = 0;
        const auto [ptr, perr] =
            std::from_chars(name.data() + first_digit, name.data() + last_digit + 1, index);
        if (perr != std::errc()) {
            throw FormatError(entry.path().string() + ": frame index out of range");
        }
        out.entries_.push_back({index, entry.path()});
    }
    if (ec) throw IoError(dir.string() + ": " + ec.message());
    if (out.entries_.empty()) {
        throw FormatError(dir.string() + ": no files match '" + pat + "'");
    }

    std::sort(out.entries_.begin(), out.entries_.end(),
              [](const Entry& a, const Entry& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < out.entries_.size(); ++i) {
        if (out.entries_[i].index == out.entries_[i - 1].index) {
            throw FormatError(out.entries_[i].path.string() + ": duplicate frame index " +
                              std::to_string(out.entries_[i].index) + " (also " +
                              out.entries_[i - 1].path.filename().string() + ")");
        }
    }

    const ImageMatrix first = read_frame(out.entries_.front().path);
    out.rows_ = first.rows();
    out.cols_ = first.cols();
    return out;
}

ImageMatrix FrameDirectory::load(std::size_t i) const {
    const auto& entry = entries_.at(i);
    ImageMatrix frame = read_frame(entry.path);
    if (frame.rows() != rows_ || frame.cols() != cols_) {
        throw FormatError(entry.path.string() + ": frame is " +
                          shape_string(frame.rows(), frame.cols()) + ", expected " +
                          shape_string(rows_, cols_));
    }
    return frame;
}

std::vector<ImageMatrix> read_frame_dir(const fs::path& dir, std::string_view pattern) {
    const auto frames = FrameDirectory::open(dir, pattern);
    std::vector<ImageMatrix> out;
    out.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) out.push_back(frames.load(i));
    return out;
}

// ---------------------------------------------------------------- series

SeriesRecord to_record(const SparsityReading& r) noexcept {
    return {r.t, r.h_raw, r.bias, r.g, r.g_unclamped, r.moments.a_bar, r.moments.a2_bar,
            r.moments.sigma2};
}

std::vector<SeriesRecord> to_records(std::span<const SparsityReading> readings) {
    std::vector<SeriesRecord> out;
    out.reserve(readings.size());
    for (const auto& r : readings) out.push_back(to_record(r));
    return out;
}

std::string format_record(const SeriesRecord& r) {
    std::string out = std::to_string(r.t);
    for (double v : {r.h_raw, r.bias, r.g, r.g_unclamped, r.a_bar, r.a2_bar, r.sigma2}) {
        out += ',';
        out += format_double(v);
    }
    return out;
}

std::string format_series_csv(std::span<const SeriesRecord> records) {
    std::string out(kSeriesHeader);
    out += '\n';
    for (const auto& r : records) {
        out += format_record(r);
        out += '\n';
    }
    return out;
}

void write_series_csv(std::span<const SeriesRecord> records, const fs::path& path) {
    write_text(path, format_series_csv(records));
}

std::vector<SeriesRecord> parse_series_csv(std::string_view text, std::string_view source) {
    const auto lines = split_lines(text);
    if (lines.empty() || trim(lines.front()) != kSeriesHeader) {
        format_error(source, 1, 0, "expected header '" + std::string(kSeriesHeader) + "'");
    }
    std::vector<SeriesRecord> out;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        std::array<double, 7> v{};
        std::int64_t t = 0;
        std::size_t start = 0;
        const auto line = lines[k];
        for (std::size_t f = 0; f < 8; ++f) {
            const auto comma = line.find(',', start);
            if ((f < 7) == (comma == std::string_view::npos)) {
                format_error(source, k + 1, f + 1, "expected 8 fields");
            }
            const auto field = trim(line.substr(start, comma - start));
            if (f == 0) {
                const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), t);
                if (ec != std::errc() || ptr != field.data() + field.size()) {
                    format_error(source, k + 1, 1, "bad frame index");
                }
            } else if (!parse_finite(field, v[f - 1])) {
                format_error(source, k + 1, f + 1, "not a finite number");
            }
            start = comma + 1;
        }
        out.push_back({t, v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
    }
    return out;
}

// --------------------------------------------------------------- reports

nlohmann::ordered_json to_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["tool"] = "hoyer";
    j["version"] = kVersion;
    j["experiment"] = report.experiment;
    j["config"] = report.config;
    j["x_name"] = report.x_name;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["x"] = row.x;
        r["h_true"] = row.h_true;
        r["m_eps"] = row.band.m_eps;
        r["sigma_eps"] = row.band.sigma_eps;
        r["lo"] = row.band.lo;
        r["hi"] = row.band.hi;
        rows.push_back(std::move(r));
    }
    return j;
}

std::string format_report_json(const ExperimentReport& report) {
    return to_json(report).dump(2) + "\n";
}

void write_report_json(const ExperimentReport& report, const fs::path& path) {
    write_text(path, format_report_json(report));
}

std::string format_band_csv(std::span<const sim::BandRow> rows) {
    std::string out = "x,m_eps,lo,hi\n";
    for (const auto& r : rows) {
        out += format_double(r.x) + "," + format_double(r.band.m_eps) + "," +
               format_double(r.band.lo) + "," + format_double(r.band.hi) + "\n";
    }
    return out;
}

void write_band_csv(std::span<const sim::BandRow> rows, const fs::path& path) {
    write_text(path, format_band_csv(rows));
}

}  // namespace hoyer::io
