#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

namespace tmf {

struct SentimentVector {
    double polarity = 0;      // [-1, 1]
    double subjectivity = 0;  // [0, 1]
    int label = 0;            // -1, 0, 1
};

inline constexpr double kNeutralThreshold = 0.05;

/// Maps polarity to {-1, 0, 1}; |polarity| < threshold is neutral.
int sentiment_label(double polarity, double threshold = kNeutralThreshold);

class SentimentProvider {
public:
    virtual ~SentimentProvider() = default;
    /// Must be deterministic for a given text. Empty text yields (0, 0, 0).
    virtual SentimentVector analyze(std::string_view text) const = 0;
};

struct LexiconEntry {
    double polarity = 0;
    double subjectivity = 0;
};

/// Averages lexicon polarity/subjectivity over matched tokens. A negator up to
/// two tokens before a match flips and halves its polarity.
class LexiconSentiment final : public SentimentProvider {
public:
    explicit LexiconSentiment(std::unordered_map<std::string, LexiconEntry> lexicon,
                              double neutral_threshold = kNeutralThreshold);

    /// JSON object: word -> {"polarity": p, "subjectivity": s}.
    static LexiconSentiment from_json(std::string_view json, double neutral_threshold = kNeutralThreshold);
    static LexiconSentiment from_file(const std::filesystem::path& path,
                                      double neutral_threshold = kNeutralThreshold);
    /// The lexicon shipped in data/lexicon.json.
    static const LexiconSentiment& builtin();

    SentimentVector analyze(std::string_view text) const override;
    std::size_t size() const { return lexicon_.size(); }

private:
    std::unordered_map<std::string, LexiconEntry> lexicon_;
    double threshold_;
};

} // namespace tmf
