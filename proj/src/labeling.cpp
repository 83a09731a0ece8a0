#include "tmf/labeling.hpp"

#include <stdexcept>
#include <string>

namespace tmf {

PriceField parse_price_field(std::string_view name) {
    if (name == "close") return PriceField::close;
    if (name == "open") return PriceField::open;
    if (name == "adj_close") return PriceField::adj_close;
    throw std::invalid_argument("unknown price field '" + std::string(name) + "'");
}

std::string_view to_string(PriceField f) {
    switch (f) {
    case PriceField::close: return "close";
    case PriceField::open: return "open";
    case PriceField::adj_close: return "adj_close";
    }
    return "close";
}

double price_of(const OhlcvBar& bar, PriceField f) {
    switch (f) {
    case PriceField::close: return bar.close;
    case PriceField::open: return bar.open;
    case PriceField::adj_close: return bar.adj_close;
    }
    return bar.close;
}

std::vector<LabeledBar> label_bars(std::span<const OhlcvBar> bars, PriceField field) {
    if (bars.size() < 2) throw std::invalid_argument("labeling needs at least two bars");
    std::vector<LabeledBar> out;
    out.reserve(bars.size() - 1);
    for (std::size_t t = 0; t + 1 < bars.size(); ++t) {
        const int label = price_of(bars[t], field) > price_of(bars[t + 1], field) ? 0 : 1;
        out.push_back({bars[t], label});
    }
    return out;
}

std::vector<LabelMismatch> audit_labels(std::span<const OhlcvBar> bars,
                                        std::span<const std::optional<int>> golden, PriceField field) {
    std::vector<LabelMismatch> out;
    if (golden.empty() || bars.size() < 2) return out;
    if (golden.size() != bars.size()) throw std::invalid_argument("golden label column length mismatch");
    const auto labeled = label_bars(bars, field);
    for (std::size_t t = 0; t < labeled.size(); ++t)
        if (golden[t] && *golden[t] != labeled[t].label) out.push_back({bars[t].date, *golden[t], labeled[t].label});
    return out;
}

} // namespace tmf
