#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tmf/market_data.hpp"

namespace tmf {

enum class PriceField { close, open, adj_close };

PriceField parse_price_field(std::string_view name);
std::string_view to_string(PriceField f);
double price_of(const OhlcvBar& bar, PriceField f);

struct LabeledBar {
    OhlcvBar bar;
    int label = 1;
};

/// label = 0 when today's price exceeds tomorrow's, else 1 (ties go up).
/// The final bar has no successor and is dropped.
std::vector<LabeledBar> label_bars(std::span<const OhlcvBar> bars, PriceField field = PriceField::close);

struct LabelMismatch {
    Date date;
    int golden = 0;
    int computed = 0;
};

/// Compares a reference label column against the rule. Bars without a
/// successor or without a reference label are not compared.
std::vector<LabelMismatch> audit_labels(std::span<const OhlcvBar> bars,
                                        std::span<const std::optional<int>> golden,
                                        PriceField field = PriceField::close);

} // namespace tmf
