#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmf/indicators.hpp"
#include "tmf/labeling.hpp"
#include "tmf/normalizer.hpp"
#include "tmf/sentiment.hpp"
#include "tmf/social.hpp"
#include "tmf/text.hpp"
#include "tmf/tmvector.hpp"

namespace tmf {

struct DatasetConfig {
    std::string ticker;
    FeatureSet features = FeatureSet::full();
    PriceField label_field = PriceField::close;
    IndicatorConfig indicators;
    double train_fraction = 0.8;
    /// Prior trading days' M-vectors prepended as numeric timesteps (needs M).
    int numeric_lookback = 0;
    /// Overrides the longest-train-sentence threshold; longer texts are cropped.
    std::optional<int> max_len_override;
};

/// Everything known about one emitted sample before normalization.
struct SampleProvenance {
    std::string tweet_id;
    std::string author;
    Timestamp timestamp;
    Date day;
    int label = 0;
    int tweet_score = 0;
    SentimentVector se;
    SocialVector so{};
    ScVector sc{};
    std::optional<MarketVector> m;
    std::vector<double> raw_numeric;
    std::size_t token_count = 0;
};

struct BuildReport {
    std::size_t tweets_total = 0;
    std::size_t tweets_other_ticker = 0;
    std::size_t tweets_before_first_bar = 0;
    std::size_t tweets_unlabeled_day = 0;
    std::size_t tweets_in_warmup = 0;
    std::size_t non_trading_day_joins = 0;
    std::size_t samples = 0;
    std::size_t train = 0;
    std::size_t test = 0;
    std::vector<LabelMismatch> label_mismatches;
    /// FNV-1a over (tweet id, timestamp, raw Sc bits) of every sample.
    std::string leakage_audit_hash;
};

struct Dataset {
    FeatureSet features = FeatureSet::full();
    int numeric_width = 0;
    int lookback = 0;
    int max_len = 0;   // 0 when the text block is absent
    int embed_dim = 0; // 0 when the text block is absent
    std::vector<TmVector> train;
    std::vector<TmVector> test;
    NormalizerState normalizer;
    BuildReport report;
    std::vector<SampleProvenance> provenance;  // train then test, sample order
};

/// Joins tweets to their trading day's market features and next-day label,
/// replays user histories chronologically (each sample sees only strictly
/// earlier tweets), splits chronologically and fits the normalizer on the
/// training part only. Tweets on non-trading days join the most recent prior
/// trading day. Throws std::runtime_error when no sample survives the join.
Dataset build_dataset(std::span<const TweetRecord> tweets, std::span<const OhlcvBar> bars,
                      const DatasetConfig& cfg, const SentimentProvider& sentiment,
                      const EmbeddingTable& embeddings, const StopWords& stopwords,
                      std::span<const std::optional<int>> golden_labels = {});

} // namespace tmf
