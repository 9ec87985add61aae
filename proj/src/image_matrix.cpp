#include "hoyer/image_matrix.hpp"

#include <string>

#include "hoyer/errors.hpp"

namespace hoyer {
namespace {

void require_positive_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw DimensionError("image matrix must be at least 1x1, got " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
}

}  // namespace

ImageMatrix::ImageMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
    require_positive_shape(rows, cols);
    values_.assign(rows * cols, fill);
}

ImageMatrix::ImageMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    require_positive_shape(rows, cols);
    if (values_.size() != rows * cols) {
        throw DimensionError("image matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " needs " + std::to_string(rows * cols) + " values, got " +
                             std::to_string(values_.size()));
    }
}

ImageMatrix ImageMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n_rows = rows.size();
    const std::size_t n_cols = n_rows ? rows.begin()->size() : 0;
    std::vector<double> values;
    values.reserve(n_rows * n_cols);
    for (const auto& row : rows) {
        if (row.size() != n_cols) throw DimensionError("ragged initializer for image matrix");
        values.insert(values.end(), row.begin(), row.end());
    }
    return ImageMatrix(n_rows, n_cols, std::move(values));
}

void require_same_shape(const ImageMatrix& a, const ImageMatrix& b, std::string_view context) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(context) + ": shape " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " does not match " +
                             std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

}  // namespace hoyer
