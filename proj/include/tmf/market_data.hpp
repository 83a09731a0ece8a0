#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tmf/date.hpp"

namespace tmf {

/// One trading day for a ticker.
struct OhlcvBar {
    Date date;
    double open = 0;
    double high = 0;
    double low = 0;
    double close = 0;
    double adj_close = 0;
};

/// Throws std::invalid_argument if prices are non-positive/non-finite or the
/// high/low envelope does not contain open and close.
void validate_bar(const OhlcvBar& bar);

struct Diagnostic {
    std::size_t line = 0;
    std::string message;
};

struct OhlcvLoad {
    std::vector<OhlcvBar> bars;
    /// Present when the file carries a trailing `Label` column; one entry per bar.
    std::vector<std::optional<int>> golden_labels;
    std::vector<Diagnostic> rejected;
};

/// Reads `Date,Open,High,Low,Close,Adj Close[,Label]`. Rows must be strictly
/// date-ascending. Bad rows throw ParseError unless `lenient`, in which case
/// they are recorded in `rejected` and skipped.
OhlcvLoad read_ohlcv_csv(std::istream& in, bool lenient = false);
OhlcvLoad read_ohlcv_csv(const std::filesystem::path& path, bool lenient = false);

} // namespace tmf
