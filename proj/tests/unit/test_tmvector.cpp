#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "../oracles/replay_oracle.hpp"
#include "../support/generators.hpp"
#include "tmf/dataset.hpp"
#include "tmf/dataset_io.hpp"
#include "tmf/errors.hpp"
#include "tmf/labeling.hpp"
#include "tmf/normalizer.hpp"
#include "tmf/tmvector.hpp"

using namespace tmf;

namespace {

OhlcvBar bar(int day, double close) { return {Date(day), close, close, close, close, close}; }

struct Corpus {
    std::vector<OhlcvBar> bars;
    std::vector<TweetRecord> tweets;
};

Corpus corpus(std::uint64_t seed, std::size_t bars, std::size_t tweets) {
    Rng rng(seed);
    Corpus c;
    c.bars = gen::random_bars(rng, bars);
    c.tweets = gen::random_tweets(rng, c.bars, tweets);
    return c;
}

Dataset build(const Corpus& c, FeatureSet fs, int lookback = 0) {
    DatasetConfig cfg;
    cfg.ticker = "AAPL";
    cfg.features = fs;
    cfg.numeric_lookback = lookback;
    static const EmbeddingTable emb(8, EmbeddingFallback::hashed, 1);
    return build_dataset(c.tweets, c.bars, cfg, LexiconSentiment::builtin(), emb, builtin_stopwords());
}

} // namespace

TEST(Labeling, May2020RuleAndAudit) {
    const auto load = read_ohlcv_csv(std::filesystem::path(TMF_TEST_DATA) / "aapl_may2020.csv");
    const auto labeled = label_bars(load.bars);
    ASSERT_EQ(labeled.size(), 5u);
    EXPECT_EQ(labeled[0].label, 0);  // 175.35 -> 175.33
    EXPECT_EQ(labeled[4].label, 0);  // 177.09 -> 176.19
    const std::vector<int> rule{0, 0, 1, 1, 0};
    for (std::size_t i = 0; i < rule.size(); ++i) EXPECT_EQ(labeled[i].label, rule[i]) << i;

    const auto mismatches = audit_labels(load.bars, load.golden_labels);
    std::vector<std::string> days;
    for (const auto& m : mismatches) days.push_back(m.date.iso());
    EXPECT_EQ(days, (std::vector<std::string>{"2020-05-03", "2020-05-04", "2020-05-06"}));
}

TEST(Labeling, RuleEdgeCases) {
    const std::vector<OhlcvBar> up{bar(0, 99.80), bar(1, 100.0)};
    EXPECT_EQ(label_bars(up)[0].label, 1);
    const std::vector<OhlcvBar> flat{bar(0, 5), bar(1, 5)};
    EXPECT_EQ(label_bars(flat)[0].label, 1);
    EXPECT_THROW(label_bars(std::vector<OhlcvBar>{bar(0, 1)}), std::invalid_argument);

    auto opened = up;
    opened[0].open = 120;
    EXPECT_EQ(label_bars(opened, PriceField::open)[0].label, 0);
    EXPECT_EQ(parse_price_field("adj_close"), PriceField::adj_close);

    Rng rng(8);
    const auto bars = gen::random_bars(rng, 57);
    EXPECT_EQ(label_bars(bars).size(), 56u);
}

TEST(Normalizer, Examples) {
    const std::vector<std::vector<double>> rows{{2, 1}, {4, 1}, {6, 1}};
    const auto s = fit_normalizer(rows);
    EXPECT_EQ(s.min[0], 2);
    EXPECT_EQ(s.max[0], 6);
    EXPECT_TRUE(s.degenerate(1));
    EXPECT_EQ(apply_normalizer(s, std::vector<double>{4, 1}), (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(apply_normalizer(s, std::vector<double>{2, 7})[0], 0.0);
    EXPECT_EQ(apply_normalizer(s, std::vector<double>{6, 7})[0], 1.0);
    EXPECT_EQ(apply_normalizer(s, std::vector<double>{8, 7})[0], 1.0);
    EXPECT_EQ(apply_normalizer(s, std::vector<double>{-8, 7})[0], 0.0);
    EXPECT_THROW(apply_normalizer(s, std::vector<double>{1}), std::invalid_argument);
    EXPECT_THROW(fit_normalizer(std::vector<std::vector<double>>{}), std::invalid_argument);
}

TEST(Normalizer, MatchesColumnScan) {
    Rng rng(99);
    std::vector<std::vector<double>> rows(40, std::vector<double>(6));
    for (auto& r : rows)
        for (auto& v : r) v = rng.uniform(-1e3, 1e3);
    const auto s = fit_normalizer(rows);
    for (std::size_t j = 0; j < 6; ++j) {
        double lo = rows[0][j], hi = rows[0][j];
        for (const auto& r : rows) {
            lo = std::min(lo, r[j]);
            hi = std::max(hi, r[j]);
        }
        EXPECT_EQ(s.min[j], lo);
        EXPECT_EQ(s.max[j], hi);
    }
}

TEST(FeatureSet, WidthsAndParsing) {
    EXPECT_EQ(FeatureSet({FeatureBlock::M}).numeric_width(), 5);
    EXPECT_EQ(FeatureSet::full().numeric_width(), 18);
    EXPECT_TRUE(FeatureSet::full().has_text());
    EXPECT_EQ(FeatureSet({FeatureBlock::Tw}).numeric_width(), 0);
    EXPECT_EQ(FeatureSet::parse("M,So,Se").numeric_width(), 14);
    EXPECT_EQ(FeatureSet::parse("FF"), FeatureSet::full());
    EXPECT_THROW(FeatureSet::parse("M,Xx"), std::invalid_argument);
    EXPECT_THROW(FeatureSet(0u), std::invalid_argument);
}

TEST(Assemble, BlocksOrderAndErrors) {
    FeatureBlocks b;
    b.m = MarketVector{1, 2, 3, 4, 5};
    b.so = SocialVector{6, 7, 8, 9, 10, 11};
    b.se = SentimentVector{0.5, 0.25, 1};
    b.sc = ScVector{12, 13, 14, 15};
    const auto raw = raw_numeric(b, FeatureSet::parse("M,So,Se,Sc"));
    EXPECT_EQ(raw, (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 1, 0.25, 0.5, 12, 13, 14, 15}));

    FeatureBlocks missing = b;
    missing.so.reset();
    try {
        raw_numeric(missing, FeatureSet::parse("M,So"));
        FAIL() << "expected AssemblyError";
    } catch (const AssemblyError& e) {
        EXPECT_EQ(e.block(), "So");
    }

    TweetRecord t;
    t.id = "1";
    t.username = "a";
    t.text = "Strong rally today";
    const FeatureSet fs = FeatureSet::parse("M");
    const auto state = fit_normalizer(std::vector<std::vector<double>>{{0, 0, 0, 0, 0}, {2, 4, 6, 8, 10}});
    const AssemblyContext ctx{fs, &state, nullptr, nullptr, 1};
    const auto v = assemble(t, b, 1, Date(3), ctx);
    EXPECT_FALSE(v.text.has_value());
    EXPECT_EQ(v.numeric, (std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5}));
    const auto again = assemble(t, b, 1, Date(3), ctx);
    EXPECT_EQ(again.numeric, v.numeric);

    const EmbeddingTable emb(4, EmbeddingFallback::hashed, 2);
    const AssemblyContext text_ctx{FeatureSet({FeatureBlock::Tw}), nullptr, &emb, &builtin_stopwords(), 5};
    const auto tv = assemble(t, {}, 0, Date(3), text_ctx);
    ASSERT_TRUE(tv.text.has_value());
    EXPECT_EQ(tv.text->rows(), 5);
    EXPECT_EQ(tv.text->cols(), 4);
    EXPECT_TRUE(tv.numeric.empty());
    EXPECT_TRUE(tv.text->bottomRows(2).isZero());
}

TEST(BuildDataset, TenSamplesSplitEightTwo) {
    Corpus c;
    Rng rng(1);
    c.bars = gen::random_bars(rng, 5);
    for (int i = 0; i < 10; ++i) {
        TweetRecord t;
        t.id = "x" + std::to_string(i);
        t.username = "u" + std::to_string(i % 3);
        t.timestamp = Timestamp(static_cast<std::int64_t>(c.bars[static_cast<std::size_t>(i % 4)].date.days()) * 86400 + i);
        t.text = "buy";
        c.tweets.push_back(t);
    }
    const auto ds = build(c, FeatureSet::parse("So,Se,Sc"));
    ASSERT_EQ(ds.train.size(), 8u);
    ASSERT_EQ(ds.test.size(), 2u);
    for (std::size_t i = 1; i < ds.provenance.size(); ++i)
        EXPECT_LE(ds.provenance[i - 1].timestamp, ds.provenance[i].timestamp);

    Corpus same_day = c;
    for (auto& t : same_day.tweets) t.timestamp = Timestamp(static_cast<std::int64_t>(c.bars[1].date.days()) * 86400);
    const auto sd = build(same_day, FeatureSet::parse("So,Se,Sc"));
    EXPECT_EQ(sd.train.size(), 8u);
    EXPECT_EQ(sd.test.size(), 2u);
    for (const auto& p : sd.provenance) EXPECT_EQ(p.sc, (ScVector{0, 0, 0, 0}));
}

TEST(BuildDataset, EmptyJoinAndWarmup) {
    auto c = corpus(2, 40, 50);
    auto late = c;
    for (auto& t : late.tweets) t.timestamp = Timestamp(0);
    EXPECT_THROW(build(late, FeatureSet::parse("So")), std::runtime_error);

    const auto ds = build(c, FeatureSet::parse("M,So"));
    EXPECT_GT(ds.report.tweets_in_warmup, 0u);
    const MarketFeatures mf(c.bars, IndicatorConfig{});
    for (const auto& p : ds.provenance) {
        const auto it = std::find_if(c.bars.begin(), c.bars.end(), [&](const OhlcvBar& b) { return b.date == p.day; });
        ASSERT_NE(it, c.bars.end());
        EXPECT_TRUE(mf.ready(static_cast<std::size_t>(it - c.bars.begin())));
    }
}

TEST(BuildDataset, NumericEntriesInUnitIntervalAndTrainExtrema) {
    const auto c = corpus(3, 120, 800);
    const auto ds = build(c, FeatureSet::parse("M,So,Se,Sc"));
    EXPECT_EQ(ds.numeric_width, 18);
    for (const auto* part : {&ds.train, &ds.test})
        for (const auto& v : *part)
            for (double x : v.numeric) {
                EXPECT_GE(x, 0.0);
                EXPECT_LE(x, 1.0);
            }
    for (int j = 0; j < ds.numeric_width; ++j) {
        if (ds.normalizer.degenerate(static_cast<std::size_t>(j))) continue;
        double lo = 1, hi = 0;
        for (const auto& v : ds.train) {
            lo = std::min(lo, v.numeric[static_cast<std::size_t>(j)]);
            hi = std::max(hi, v.numeric[static_cast<std::size_t>(j)]);
        }
        EXPECT_EQ(lo, 0.0) << j;
        EXPECT_EQ(hi, 1.0) << j;
    }
}

TEST(BuildDataset, ScUsesOnlyStrictlyEarlierTweets) {
    const auto c = corpus(4, 60, 1000);
    const auto ds = build(c, FeatureSet::parse("So,Se,Sc"));
    const auto labeled = label_bars(c.bars);

    // Every tweet that reaches a labeled day is scored, warmup or not.
    struct Scored {
        std::string user;
        std::int64_t at;
        int score;
    };
    std::vector<Scored> scored;
    for (const auto& t : c.tweets) {
        if (!t.ticker.empty() && t.ticker != "AAPL") continue;
        const Date d = t.timestamp.date();
        int idx = -1;
        for (std::size_t i = 0; i < c.bars.size(); ++i)
            if (c.bars[i].date <= d) idx = static_cast<int>(i);
        if (idx < 0 || static_cast<std::size_t>(idx) >= labeled.size()) continue;
        const int label = labeled[static_cast<std::size_t>(idx)].label;
        const int predicted = LexiconSentiment::builtin().analyze(t.text).label;
        const int hit = (predicted == -1 ? 0 : 1) == label ? 1 : -1;
        scored.push_back({t.username, t.timestamp.seconds(), hit});
    }
    ASSERT_EQ(ds.provenance.size(), scored.size());
    for (const auto& p : ds.provenance) {
        oracle::Replay replay;
        for (const auto& s : scored)
            if (s.user == p.author && s.at < p.timestamp.seconds()) replay.push({s.user, s.score, s.at});
        EXPECT_EQ(p.sc, replay.sc(p.author)) << p.tweet_id;
    }
}

TEST(BuildDataset, DeterministicAndTextLengths) {
    const auto c = corpus(5, 50, 300);
    const auto a = build(c, FeatureSet::full());
    const auto b = build(c, FeatureSet::full());
    EXPECT_EQ(a.report.leakage_audit_hash, b.report.leakage_audit_hash);
    ASSERT_EQ(a.train.size(), b.train.size());
    std::size_t longest = 0;
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        EXPECT_EQ(a.train[i].numeric, b.train[i].numeric);
        EXPECT_EQ(*a.train[i].text, *b.train[i].text);
        longest = std::max(longest, a.provenance[i].token_count);
    }
    EXPECT_EQ(static_cast<std::size_t>(a.max_len), longest);
    EXPECT_EQ(a.embed_dim, 8);
}

TEST(BuildDataset, LookbackRowsCarryPriorMarketVectors) {
    const auto c = corpus(6, 80, 300);
    const auto ds = build(c, FeatureSet::parse("M,So"), 3);
    ASSERT_FALSE(ds.train.empty());
    for (const auto& v : ds.train) {
        EXPECT_EQ(v.numeric_lookback.rows(), 3);
        EXPECT_EQ(v.numeric_lookback.cols(), 11);
        EXPECT_TRUE(v.numeric_lookback.rightCols(6).isZero());
        EXPECT_GE(v.numeric_lookback.minCoeff(), 0.0);
        EXPECT_LE(v.numeric_lookback.maxCoeff(), 1.0);
    }
    EXPECT_THROW(build(c, FeatureSet::parse("So"), 2), std::invalid_argument);
}

TEST(DatasetIo, RoundTripAndCorruption) {
    const auto c = corpus(7, 50, 200);
    const auto ds = build(c, FeatureSet::full());
    const auto dir = std::filesystem::temp_directory_path() / "tmf_dataset_io_test";
    std::filesystem::remove_all(dir);
    write_dataset_dir(dir, ds, "AAPL");
    const auto back = read_samples(dir / "train.bin");
    EXPECT_EQ(back.layout, layout_of(ds));
    ASSERT_EQ(back.samples.size(), ds.train.size());
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        const auto& x = ds.train[i];
        const auto& y = back.samples[i];
        EXPECT_EQ(x.numeric, y.numeric);
        EXPECT_EQ(*x.text, *y.text);
        EXPECT_EQ(x.label, y.label);
        EXPECT_EQ(x.day, y.day);
        EXPECT_EQ(x.timestamp, y.timestamp);
        EXPECT_EQ(x.tweet_id, y.tweet_id);
        EXPECT_EQ(x.author, y.author);
    }
    const auto norm = normalizer_from_json(nlohmann::json::parse(std::ifstream(dir / "normalizer.json")));
    EXPECT_EQ(norm.min, ds.normalizer.min);
    EXPECT_EQ(norm.max, ds.normalizer.max);

    {
        std::fstream f(dir / "test.bin", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');
    }
    EXPECT_THROW(read_samples(dir / "test.bin"), std::runtime_error);
    std::filesystem::remove_all(dir);
}
