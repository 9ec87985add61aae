#include <string>

#include "hoyer/errors.hpp"
#include "hoyer/sim.hpp"

namespace hoyer::sim {

std::string_view to_string(AnomalyKind kind) noexcept {
    return kind == AnomalyKind::dense ? "dense" : "sparse";
}

AnomalyKind parse_anomaly_kind(std::string_view text) {
    if (text == "dense") return AnomalyKind::dense;
    if (text == "sparse") return AnomalyKind::sparse;
    throw ValueError("unknown anomaly kind '" + std::string(text) + "' (expected dense|sparse)");
}

ImageMatrix make_dense_anomaly(std::size_t p1, std::size_t p2) {
    ImageMatrix a(p1, p2);
    for (std::size_t i = 0; i < p1; ++i) {
        for (std::size_t j = 0; j < p2; ++j) a(i, j) = static_cast<double>(j / 50);
    }
    return a;
}

ImageMatrix make_sparse_anomaly(std::size_t p1, std::size_t p2) {
    ImageMatrix a(p1, p2);
    for (std::size_t i = 0; i < p1; ++i) {
        // 1-based 50 <= j < 60 is 0-based 49 <= j < 59.
        for (std::size_t j = 49; j < 59 && j < p2; ++j) a(i, j) = 5.0;
    }
    return a;
}

ImageMatrix make_anomaly(AnomalyKind kind, std::size_t p1, std::size_t p2) {
    return kind == AnomalyKind::dense ? make_dense_anomaly(p1, p2) : make_sparse_anomaly(p1, p2);
}

ImageMatrix make_scaled_anomaly(AnomalyKind kind, std::size_t c) {
    if (c == 0 || c % 10 != 0) {
        throw ValueError("magnification c must be a positive multiple of 10, got " +
                         std::to_string(c));
    }
    const std::size_t p1 = c;
    const std::size_t p2 = 2 * c;
    ImageMatrix a(p1, p2);
    if (kind == AnomalyKind::dense) {
        for (std::size_t i = 0; i < p1; ++i) {
            for (std::size_t j = 0; j < p2; ++j) a(i, j) = static_cast<double>((4 * j) / p2);
        }
    } else {
        const std::size_t begin = p2 / 4;  // 1-based c/2, i.e. 0-based c/2 - 1
        const std::size_t width = c / 10;
        for (std::size_t i = 0; i < p1; ++i) {
            for (std::size_t j = begin - 1; j < begin - 1 + width; ++j) a(i, j) = 5.0;
        }
    }
    return a;
}

}  // namespace hoyer::sim
