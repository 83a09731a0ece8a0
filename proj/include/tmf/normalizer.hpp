#pragma once

#include <span>
#include <vector>

namespace tmf {

/// Column-wise min/max of the training rows.
struct NormalizerState {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t width() const { return min.size(); }
    bool degenerate(std::size_t col) const { return min[col] == max[col]; }
};

/// Throws std::invalid_argument on no rows, ragged rows, or non-finite values.
NormalizerState fit_normalizer(std::span<const std::vector<double>> rows);

/// (x - min) / (max - min) clamped to [0, 1]; degenerate columns give 0.5.
std::vector<double> apply_normalizer(const NormalizerState& state, std::span<const double> row);

} // namespace tmf
