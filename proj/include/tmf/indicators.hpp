#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tmf/market_data.hpp"

namespace tmf {

/// Index-aligned indicator output. The first `warmup` entries are undefined
/// (stored as NaN); every defined entry is finite.
struct IndicatorSeries {
    std::vector<double> values;
    std::size_t warmup = 0;

    std::size_t size() const { return values.size(); }
    bool defined(std::size_t i) const { return i < values.size() && i >= warmup; }
    /// Throws std::out_of_range when `i` is undefined.
    double at(std::size_t i) const;
};

enum class BollingerScalar { percent_b, bandwidth, middle };

struct IndicatorConfig {
    int ma_period = 10;
    int rsi_period = 27;
    int macd_fast = 12;
    int macd_slow = 26;
    int cci_period = 20;
    int bb_period = 20;
    double bb_sigma_mult = 2.0;
    BollingerScalar bb_scalar_mode = BollingerScalar::percent_b;

    /// Throws std::invalid_argument on out-of-range periods.
    void validate() const;
};

struct BollingerBands {
    IndicatorSeries upper;
    IndicatorSeries middle;
    IndicatorSeries lower;
};

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

IndicatorSeries sma(std::span<const double> series, int n);
/// Seeded with the SMA of the first n values, then a = 2/(n+1) smoothing.
IndicatorSeries ema(std::span<const double> series, int n);
/// Defined from index n on. Flat window gives 50; no down-moves gives 100.
IndicatorSeries rsi(std::span<const double> closes, int n);
IndicatorSeries macd(std::span<const double> closes, int fast, int slow);
/// Zero mean deviation gives 0.
IndicatorSeries cci(std::span<const OhlcvBar> bars, int p);
/// Population standard deviation over the trailing window.
BollingerBands bollinger(std::span<const double> closes, int n, double m);

std::vector<double> closes_of(std::span<const OhlcvBar> bars);

/// M-vector slot order: RSI, MACD, CCI, BB scalar, MA.
using MarketVector = std::array<double, 5>;

/// Precomputed indicator table over a whole bar history. All indicators are
/// causal, so reading index t equals computing over the prefix [0, t].
class MarketFeatures {
public:
    MarketFeatures(std::span<const OhlcvBar> bars, const IndicatorConfig& cfg);

    std::size_t size() const { return closes_.size(); }
    bool ready(std::size_t t) const;
    /// Throws NotReadyError naming the first indicator still in warmup.
    MarketVector at(std::size_t t) const;

private:
    bool rsi_ready(std::size_t t) const;

    IndicatorConfig cfg_;
    std::vector<double> closes_;
    IndicatorSeries ma_, rsi_, macd_, cci_;
    BollingerBands bb_;
    bool rsi_available_ = false;
    bool macd_available_ = false;
    bool cci_available_ = false;
    bool bb_available_ = false;
    bool ma_available_ = false;
};

/// Market vector for the bar dated `t`. Throws std::invalid_argument if no
/// bar carries that date, NotReadyError inside any warmup window.
MarketVector market_feature_vector(std::span<const OhlcvBar> bars, Date t, const IndicatorConfig& cfg);

} // namespace tmf
