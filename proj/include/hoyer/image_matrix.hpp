#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace hoyer {

/// Dense row-major grid of pixel intensities. Every frame, anomaly, noise
/// field and residual in the library is an ImageMatrix.
///
/// Shapes are always at least 1x1. Entries are expected to be finite; the
/// readers reject non-finite values and the index computations report them
/// as ValueError.
class ImageMatrix {
public:
    ImageMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    ImageMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static ImageMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }

    // 0-based (row, col).
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool same_shape(const ImageMatrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const ImageMatrix&, const ImageMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
};

// Throws DimensionError naming `context` when the shapes differ.
void require_same_shape(const ImageMatrix& a, const ImageMatrix& b, std::string_view context);

}  // namespace hoyer
