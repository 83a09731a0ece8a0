#include "tmf/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tmf/resources.hpp"
#include "tmf/text.hpp"

namespace tmf {
namespace {

// Tokens arrive with punctuation stripped, so "don't" shows up as "dont".
constexpr std::array<std::string_view, 16> kNegators{
    "not", "no", "never", "dont", "doesnt", "didnt", "isnt", "arent",
    "wasnt", "werent", "cant", "cannot", "wont", "wouldnt", "shouldnt", "nothing"};

bool is_negator(const std::string& tok) {
    return std::find(kNegators.begin(), kNegators.end(), tok) != kNegators.end();
}

} // namespace

int sentiment_label(double polarity, double threshold) {
    if (std::abs(polarity) < threshold) return 0;
    return polarity > 0 ? 1 : -1;
}

LexiconSentiment::LexiconSentiment(std::unordered_map<std::string, LexiconEntry> lexicon,
                                   double neutral_threshold)
    : lexicon_(std::move(lexicon)), threshold_(neutral_threshold) {
    for (const auto& [word, e] : lexicon_)
        if (!(e.polarity >= -1 && e.polarity <= 1 && e.subjectivity >= 0 && e.subjectivity <= 1))
            throw std::invalid_argument("lexicon entry out of range: " + word);
}

LexiconSentiment LexiconSentiment::from_json(std::string_view json, double neutral_threshold) {
    const auto doc = nlohmann::json::parse(json);
    if (!doc.is_object()) throw std::invalid_argument("lexicon must be a JSON object");
    std::unordered_map<std::string, LexiconEntry> lex;
    for (const auto& [word, v] : doc.items())
        lex.emplace(word, LexiconEntry{v.at("polarity").get<double>(), v.at("subjectivity").get<double>()});
    return LexiconSentiment(std::move(lex), neutral_threshold);
}

LexiconSentiment LexiconSentiment::from_file(const std::filesystem::path& path, double neutral_threshold) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str(), neutral_threshold);
}

const LexiconSentiment& LexiconSentiment::builtin() {
    static const LexiconSentiment lex = from_json(builtin_lexicon_json());
    return lex;
}

SentimentVector LexiconSentiment::analyze(std::string_view text) const {
    const auto tokens = word_tokens(text);
    double pol = 0, subj = 0;
    int hits = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto it = lexicon_.find(tokens[i]);
        if (it == lexicon_.end()) continue;
        double p = it->second.polarity;
        const bool negated = (i >= 1 && is_negator(tokens[i - 1])) || (i >= 2 && is_negator(tokens[i - 2]));
        if (negated) p *= -0.5;
        pol += p;
        subj += it->second.subjectivity;
        ++hits;
    }
    if (hits == 0) return {};
    SentimentVector out;
    out.polarity = std::clamp(pol / hits, -1.0, 1.0);
    out.subjectivity = std::clamp(subj / hits, 0.0, 1.0);
    out.label = sentiment_label(out.polarity, threshold_);
    return out;
}

} // namespace tmf
