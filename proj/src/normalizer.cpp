#include "tmf/normalizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmf {

NormalizerState fit_normalizer(std::span<const std::vector<double>> rows) {
    if (rows.empty()) throw std::invalid_argument("cannot fit a normalizer on zero rows");
    const auto width = rows.front().size();
    NormalizerState s{rows.front(), rows.front()};
    for (const auto& row : rows) {
        if (row.size() != width) throw std::invalid_argument("ragged rows in normalizer fit");
        for (std::size_t j = 0; j < width; ++j) {
            if (!std::isfinite(row[j])) throw std::invalid_argument("non-finite value in normalizer fit");
            s.min[j] = std::min(s.min[j], row[j]);
            s.max[j] = std::max(s.max[j], row[j]);
        }
    }
    return s;
}

std::vector<double> apply_normalizer(const NormalizerState& state, std::span<const double> row) {
    if (row.size() != state.width())
        throw std::invalid_argument("row width " + std::to_string(row.size()) + " does not match normalizer width " +
                                    std::to_string(state.width()));
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (!std::isfinite(row[j])) throw std::invalid_argument("non-finite value passed to normalizer");
        if (state.degenerate(j)) {
            out[j] = 0.5;
            continue;
        }
        out[j] = std::clamp((row[j] - state.min[j]) / (state.max[j] - state.min[j]), 0.0, 1.0);
    }
    return out;
}

} // namespace tmf
