#include "tmf/tmvector.hpp"

#include <stdexcept>

#include "text_util.hpp"
#include "tmf/errors.hpp"

namespace tmf {
namespace {

constexpr unsigned kAllBits = 31u;

struct BlockName {
    FeatureBlock block;
    std::string_view name;
};
constexpr BlockName kBlockNames[] = {{FeatureBlock::Tw, "Tw"},
                                     {FeatureBlock::M, "M"},
                                     {FeatureBlock::So, "So"},
                                     {FeatureBlock::Se, "Se"},
                                     {FeatureBlock::Sc, "Sc"}};

} // namespace

FeatureSet::FeatureSet(unsigned bits) : bits_(bits) {
    if (bits == 0 || (bits & ~kAllBits) != 0) throw std::invalid_argument("feature set must be a non-empty subset");
}

FeatureSet::FeatureSet(std::initializer_list<FeatureBlock> blocks)
    : FeatureSet([&] {
          unsigned b = 0;
          for (auto x : blocks) b |= static_cast<unsigned>(x);
          return b;
      }()) {}

FeatureSet FeatureSet::full() { return FeatureSet(kAllBits); }

FeatureSet FeatureSet::parse(std::string_view text) {
    unsigned bits = 0;
    for (const auto& raw : detail::split(text, ',')) {
        const std::string part = detail::trim(raw);
        if (part == "FF") {
            bits |= kAllBits;
            continue;
        }
        bool known = false;
        for (const auto& bn : kBlockNames)
            if (part == bn.name) {
                bits |= static_cast<unsigned>(bn.block);
                known = true;
            }
        if (!known) throw std::invalid_argument("unknown feature block '" + part + "'");
    }
    return FeatureSet(bits);
}

int FeatureSet::numeric_width() const {
    return (has(FeatureBlock::M) ? kMarketWidth : 0) + (has(FeatureBlock::So) ? kSocialWidth : 0) +
           (has(FeatureBlock::Se) ? kSentimentWidth : 0) + (has(FeatureBlock::Sc) ? kScoreWidth : 0);
}

std::string FeatureSet::str() const {
    if (bits_ == kAllBits) return "FF";
    std::string out;
    for (const auto& bn : kBlockNames)
        if (has(bn.block)) {
            if (!out.empty()) out += ',';
            out += bn.name;
        }
    return out;
}

std::vector<double> raw_numeric(const FeatureBlocks& blocks, FeatureSet fs) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(fs.numeric_width()));
    if (fs.has(FeatureBlock::M)) {
        if (!blocks.m) throw AssemblyError("M");
        out.insert(out.end(), blocks.m->begin(), blocks.m->end());
    }
    if (fs.has(FeatureBlock::So)) {
        if (!blocks.so) throw AssemblyError("So");
        out.insert(out.end(), blocks.so->begin(), blocks.so->end());
    }
    if (fs.has(FeatureBlock::Se)) {
        if (!blocks.se) throw AssemblyError("Se");
        out.push_back(static_cast<double>(blocks.se->label));
        out.push_back(blocks.se->subjectivity);
        out.push_back(blocks.se->polarity);
    }
    if (fs.has(FeatureBlock::Sc)) {
        if (!blocks.sc) throw AssemblyError("Sc");
        out.insert(out.end(), blocks.sc->begin(), blocks.sc->end());
    }
    return out;
}

TmVector assemble(const TweetRecord& tweet, const FeatureBlocks& blocks, int label, Date day,
                  const AssemblyContext& ctx) {
    if (label != 0 && label != 1) throw std::invalid_argument("label must be 0 or 1");
    TmVector v;
    const auto raw = raw_numeric(blocks, ctx.features);
    if (!raw.empty()) {
        if (!ctx.normalizer) throw std::invalid_argument("numeric features need a fitted normalizer");
        v.numeric = apply_normalizer(*ctx.normalizer, raw);
    }
    if (ctx.features.has_text()) {
        if (!ctx.embeddings) throw AssemblyError("Tw (no embedding table)");
        static const StopWords no_stopwords;
        const auto tokens = tokenize_clean(tweet.text, ctx.stopwords ? *ctx.stopwords : no_stopwords);
        v.text = embed_sequence(tokens, *ctx.embeddings, ctx.max_len);
    }
    v.numeric_lookback.resize(0, static_cast<Eigen::Index>(v.numeric.size()));
    v.label = label;
    v.ticker = tweet.ticker;
    v.day = day;
    v.author = tweet.username;
    v.tweet_id = tweet.id;
    v.timestamp = tweet.timestamp;
    return v;
}

} // namespace tmf
