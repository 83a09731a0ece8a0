#include "tmf/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tmf/errors.hpp"
#include "text_util.hpp"

namespace tmf {

void validate_bar(const OhlcvBar& bar) {
    for (double p : {bar.open, bar.high, bar.low, bar.close, bar.adj_close})
        if (!std::isfinite(p) || p <= 0)
            throw std::invalid_argument("prices must be finite and positive on " + bar.date.iso());
    if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close) ||
        bar.low > bar.high)
        throw std::invalid_argument("high/low envelope violated on " + bar.date.iso());
}

OhlcvLoad read_ohlcv_csv(std::istream& in, bool lenient) {
    OhlcvLoad out;
    std::string line;
    std::size_t lineno = 0;
    bool has_label = false;

    if (!std::getline(in, line)) throw ParseError("empty OHLCV file", 0);
    ++lineno;
    {
        auto header = detail::split(detail::trim(line), ',');
        for (auto& h : header) h = detail::trim(h);
        const std::vector<std::string> expected{"Date", "Open", "High", "Low", "Close", "Adj Close"};
        if (header.size() < expected.size() ||
            !std::equal(expected.begin(), expected.end(), header.begin()))
            throw ParseError("expected header 'Date,Open,High,Low,Close,Adj Close'", 1);
        if (header.size() == 7 && header[6] == "Label")
            has_label = true;
        else if (header.size() != 6)
            throw ParseError("unexpected extra columns in header", 1);
    }

    const std::size_t width = has_label ? 7 : 6;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string row = detail::trim(line);
        if (row.empty()) continue;
        try {
            auto cells = detail::split(row, ',');
            if (cells.size() != width)
                throw std::invalid_argument("expected " + std::to_string(width) + " columns, got " +
                                            std::to_string(cells.size()));
            OhlcvBar bar;
            bar.date = Date::parse(detail::trim(cells[0]));
            bar.open = detail::parse_double(cells[1]);
            bar.high = detail::parse_double(cells[2]);
            bar.low = detail::parse_double(cells[3]);
            bar.close = detail::parse_double(cells[4]);
            bar.adj_close = detail::parse_double(cells[5]);
            validate_bar(bar);
            if (!out.bars.empty() && !(out.bars.back().date < bar.date))
                throw std::invalid_argument("dates must be strictly ascending (" + bar.date.iso() +
                                            " after " + out.bars.back().date.iso() + ")");
            std::optional<int> golden;
            if (has_label) {
                const std::string l = detail::trim(cells[6]);
                if (l != "0" && l != "1") throw std::invalid_argument("label must be 0 or 1");
                golden = l == "1" ? 1 : 0;
            }
            out.bars.push_back(bar);
            out.golden_labels.push_back(golden);
        } catch (const std::invalid_argument& e) {
            if (!lenient) throw ParseError(e.what(), lineno);
            out.rejected.push_back({lineno, e.what()});
        }
    }
    if (!has_label) out.golden_labels.clear();
    return out;
}

OhlcvLoad read_ohlcv_csv(const std::filesystem::path& path, bool lenient) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_ohlcv_csv(in, lenient);
}

} // namespace tmf
