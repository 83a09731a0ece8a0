#include "tmf/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tmf/errors.hpp"

namespace tmf {
namespace {

// Rolling sums can leave residue of order eps*|x| where the exact value is 0.
bool negligible(double value, double scale) {
    return std::abs(value) <= 1e-12 * std::max(1.0, std::abs(scale));
}

IndicatorSeries undefined_series(std::size_t len, std::size_t warmup) {
    IndicatorSeries s;
    s.values.assign(len, kUndefined);
    s.warmup = std::min(warmup, len);
    return s;
}

void require_period(int n, int min, const char* what) {
    if (n < min)
        throw std::invalid_argument(std::string(what) + " period must be >= " + std::to_string(min));
}

} // namespace

double IndicatorSeries::at(std::size_t i) const {
    if (!defined(i)) throw std::out_of_range("indicator undefined at index " + std::to_string(i));
    return values[i];
}

void IndicatorConfig::validate() const {
    require_period(ma_period, 1, "MA");
    require_period(rsi_period, 2, "RSI");
    require_period(macd_fast, 1, "MACD fast");
    require_period(cci_period, 2, "CCI");
    require_period(bb_period, 2, "Bollinger");
    if (macd_fast >= macd_slow) throw std::invalid_argument("MACD fast period must be < slow period");
    if (!(bb_sigma_mult > 0)) throw std::invalid_argument("Bollinger multiplier must be > 0");
}

IndicatorSeries sma(std::span<const double> series, int n) {
    require_period(n, 1, "SMA");
    if (series.empty()) throw std::invalid_argument("SMA of an empty series");
    const auto len = series.size();
    const auto w = static_cast<std::size_t>(n);
    IndicatorSeries out = undefined_series(len, w - 1);
    double sum = 0;
    for (std::size_t t = 0; t < len; ++t) {
        sum += series[t];
        if (t >= w) sum -= series[t - w];
        if (t + 1 >= w) out.values[t] = sum / n;
    }
    return out;
}

IndicatorSeries ema(std::span<const double> series, int n) {
    require_period(n, 1, "EMA");
    const auto w = static_cast<std::size_t>(n);
    if (series.size() < w) throw std::invalid_argument("EMA needs at least n values");
    IndicatorSeries out = undefined_series(series.size(), w - 1);
    const double a = 2.0 / (n + 1.0);
    double seed = 0;
    for (std::size_t i = 0; i < w; ++i) seed += series[i];
    double prev = seed / n;
    out.values[w - 1] = prev;
    for (std::size_t t = w; t < series.size(); ++t) {
        prev = a * series[t] + (1 - a) * prev;
        out.values[t] = prev;
    }
    return out;
}

IndicatorSeries rsi(std::span<const double> closes, int n) {
    require_period(n, 2, "RSI");
    if (closes.size() < static_cast<std::size_t>(n) + 2)
        throw std::invalid_argument("RSI needs at least n + 2 closes");
    const auto len = closes.size();
    std::vector<double> up(len - 1), down(len - 1);
    for (std::size_t t = 1; t < len; ++t) {
        const double change = closes[t] - closes[t - 1];
        up[t - 1] = change > 0 ? change : 0.0;
        down[t - 1] = change < 0 ? -change : 0.0;
    }
    const IndicatorSeries eu = ema(up, n);
    const IndicatorSeries ed = ema(down, n);
    IndicatorSeries out = undefined_series(len, static_cast<std::size_t>(n));
    for (std::size_t t = out.warmup; t < len; ++t) {
        const double u = eu.values[t - 1];
        const double d = ed.values[t - 1];
        if (d == 0.0)
            out.values[t] = u == 0.0 ? 50.0 : 100.0;
        else
            out.values[t] = 100.0 - 100.0 * (1.0 / (1.0 + u / d));
    }
    return out;
}

IndicatorSeries macd(std::span<const double> closes, int fast, int slow) {
    require_period(fast, 1, "MACD fast");
    if (fast >= slow) throw std::invalid_argument("MACD fast period must be < slow period");
    if (closes.size() < static_cast<std::size_t>(slow))
        throw std::invalid_argument("MACD needs at least `slow` closes");
    const IndicatorSeries f = ema(closes, fast);
    const IndicatorSeries s = ema(closes, slow);
    IndicatorSeries out = undefined_series(closes.size(), s.warmup);
    for (std::size_t t = out.warmup; t < closes.size(); ++t) out.values[t] = f.values[t] - s.values[t];
    return out;
}

IndicatorSeries cci(std::span<const OhlcvBar> bars, int p) {
    require_period(p, 2, "CCI");
    const auto w = static_cast<std::size_t>(p);
    if (bars.size() < w) throw std::invalid_argument("CCI needs at least p bars");
    std::vector<double> typical(bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i)
        typical[i] = (bars[i].high + bars[i].low + bars[i].close) / 3.0;
    const IndicatorSeries mean = sma(typical, p);
    IndicatorSeries out = undefined_series(bars.size(), w - 1);
    for (std::size_t t = out.warmup; t < bars.size(); ++t) {
        const double ma = mean.values[t];
        double dev = 0;
        for (std::size_t i = t + 1 - w; i <= t; ++i) dev += std::abs(typical[i] - ma);
        dev /= p;
        const double num = typical[t] - ma;
        out.values[t] = negligible(dev, ma) ? 0.0 : num / (0.015 * dev);
    }
    return out;
}

BollingerBands bollinger(std::span<const double> closes, int n, double m) {
    require_period(n, 2, "Bollinger");
    if (!(m > 0)) throw std::invalid_argument("Bollinger multiplier must be > 0");
    const auto w = static_cast<std::size_t>(n);
    if (closes.size() < w) throw std::invalid_argument("Bollinger needs at least n closes");
    BollingerBands bb{undefined_series(closes.size(), w - 1), sma(closes, n),
                      undefined_series(closes.size(), w - 1)};
    for (std::size_t t = w - 1; t < closes.size(); ++t) {
        const double mid = bb.middle.values[t];
        double ss = 0;
        for (std::size_t i = t + 1 - w; i <= t; ++i) ss += (closes[i] - mid) * (closes[i] - mid);
        double sigma = std::sqrt(ss / n);
        if (negligible(sigma, mid)) sigma = 0.0;
        bb.upper.values[t] = mid + m * sigma;
        bb.lower.values[t] = mid - m * sigma;
    }
    return bb;
}

std::vector<double> closes_of(std::span<const OhlcvBar> bars) {
    std::vector<double> c(bars.size());
    std::transform(bars.begin(), bars.end(), c.begin(), [](const OhlcvBar& b) { return b.close; });
    return c;
}

MarketFeatures::MarketFeatures(std::span<const OhlcvBar> bars, const IndicatorConfig& cfg)
    : cfg_(cfg), closes_(closes_of(bars)) {
    cfg_.validate();
    const auto len = closes_.size();
    auto enough = [len](int need) { return len >= static_cast<std::size_t>(need); };
    if ((ma_available_ = enough(cfg_.ma_period))) ma_ = sma(closes_, cfg_.ma_period);
    if ((rsi_available_ = enough(cfg_.rsi_period + 2))) rsi_ = rsi(closes_, cfg_.rsi_period);
    if ((macd_available_ = enough(cfg_.macd_slow))) macd_ = macd(closes_, cfg_.macd_fast, cfg_.macd_slow);
    if ((cci_available_ = enough(cfg_.cci_period))) cci_ = cci(bars, cfg_.cci_period);
    if ((bb_available_ = enough(cfg_.bb_period)))
        bb_ = bollinger(closes_, cfg_.bb_period, cfg_.bb_sigma_mult);
}

// The RSI op needs n + 2 closes, so the prefix ending at t must be that long.
bool MarketFeatures::rsi_ready(std::size_t t) const {
    return rsi_available_ && rsi_.defined(t) && t + 1 >= static_cast<std::size_t>(cfg_.rsi_period) + 2;
}

bool MarketFeatures::ready(std::size_t t) const {
    return t < size() && rsi_ready(t) && macd_available_ && macd_.defined(t) &&
           cci_available_ && cci_.defined(t) && bb_available_ && bb_.middle.defined(t) &&
           ma_available_ && ma_.defined(t);
}

MarketVector MarketFeatures::at(std::size_t t) const {
    if (t >= size()) throw std::out_of_range("bar index " + std::to_string(t) + " out of range");
    if (!rsi_ready(t)) throw NotReadyError("RSI", t);
    if (!macd_available_ || !macd_.defined(t)) throw NotReadyError("MACD", t);
    if (!cci_available_ || !cci_.defined(t)) throw NotReadyError("CCI", t);
    if (!bb_available_ || !bb_.middle.defined(t)) throw NotReadyError("BB", t);
    if (!ma_available_ || !ma_.defined(t)) throw NotReadyError("MA", t);

    const double ub = bb_.upper.values[t], mb = bb_.middle.values[t], lb = bb_.lower.values[t];
    double bb_scalar = mb;
    switch (cfg_.bb_scalar_mode) {
    case BollingerScalar::percent_b:
        bb_scalar = ub == lb ? 0.5 : (closes_[t] - lb) / (ub - lb);
        break;
    case BollingerScalar::bandwidth:
        bb_scalar = (ub - lb) / mb;
        break;
    case BollingerScalar::middle:
        break;
    }
    return {rsi_.values[t], macd_.values[t], cci_.values[t], bb_scalar, ma_.values[t]};
}

MarketVector market_feature_vector(std::span<const OhlcvBar> bars, Date t, const IndicatorConfig& cfg) {
    const auto it = std::lower_bound(bars.begin(), bars.end(), t,
                                     [](const OhlcvBar& b, Date d) { return b.date < d; });
    if (it == bars.end() || it->date != t) throw std::invalid_argument("no bar dated " + t.iso());
    const auto idx = static_cast<std::size_t>(it - bars.begin());
    return MarketFeatures(bars.first(idx + 1), cfg).at(idx);
}

} // namespace tmf
