#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tmf/date.hpp"
#include "tmf/indicators.hpp"
#include "tmf/normalizer.hpp"
#include "tmf/sentiment.hpp"
#include "tmf/social.hpp"
#include "tmf/text.hpp"

namespace tmf {

enum class FeatureBlock : unsigned { Tw = 1u, So = 2u, Se = 4u, Sc = 8u, M = 16u };

inline constexpr int kMarketWidth = 5;
inline constexpr int kSocialWidth = 6;
inline constexpr int kSentimentWidth = 3;
inline constexpr int kScoreWidth = 4;

/// Non-empty subset of {Tw, So, Se, Sc, M}.
class FeatureSet {
public:
    /// Throws std::invalid_argument when `bits` is empty or has unknown flags.
    explicit FeatureSet(unsigned bits);
    FeatureSet(std::initializer_list<FeatureBlock> blocks);

    /// Comma-separated block names ("M,So,Se") or "FF" for everything.
    static FeatureSet parse(std::string_view text);
    static FeatureSet full();

    bool has(FeatureBlock b) const { return (bits_ & static_cast<unsigned>(b)) != 0; }
    bool has_text() const { return has(FeatureBlock::Tw); }
    /// Sum of numeric block widths, fixed order M, So, Se, Sc.
    int numeric_width() const;
    unsigned bits() const { return bits_; }
    std::string str() const;

    friend bool operator==(FeatureSet, FeatureSet) = default;

private:
    unsigned bits_;
};

/// One training sample.
struct TmVector {
    std::optional<Eigen::MatrixXd> text;  // max_len x k, zero rows past the sentence
    std::vector<double> numeric;          // normalized, in [0, 1]
    /// Earlier numeric timesteps (oldest first), lookback x numeric width.
    Eigen::MatrixXd numeric_lookback;
    int label = 0;
    std::string ticker;
    Date day;
    std::string author;
    std::string tweet_id;
    Timestamp timestamp;
};

/// Raw feature blocks for one tweet; only the blocks in the feature set are required.
struct FeatureBlocks {
    std::optional<MarketVector> m;
    std::optional<SocialVector> so;
    std::optional<SentimentVector> se;
    std::optional<ScVector> sc;
};

/// Concatenates the demanded blocks in order M, So, Se, Sc before
/// normalization. Throws AssemblyError naming the first missing block.
std::vector<double> raw_numeric(const FeatureBlocks& blocks, FeatureSet fs);

struct AssemblyContext {
    FeatureSet features;
    const NormalizerState* normalizer = nullptr;
    const EmbeddingTable* embeddings = nullptr;  // required when features has Tw
    const StopWords* stopwords = nullptr;        // required when features has Tw
    int max_len = 1;
};

TmVector assemble(const TweetRecord& tweet, const FeatureBlocks& blocks, int label, Date day,
                  const AssemblyContext& ctx);

} // namespace tmf
