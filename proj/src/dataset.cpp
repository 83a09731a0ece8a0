#include "tmf/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hashing.hpp"

namespace tmf {
namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct Joined {
    const TweetRecord* tweet;
    std::size_t bar_index;
    int label;
};

} // namespace

Dataset build_dataset(std::span<const TweetRecord> tweets, std::span<const OhlcvBar> bars,
                      const DatasetConfig& cfg, const SentimentProvider& sentiment,
                      const EmbeddingTable& embeddings, const StopWords& stopwords,
                      std::span<const std::optional<int>> golden_labels) {
    if (!(cfg.train_fraction > 0 && cfg.train_fraction < 1))
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    if (cfg.numeric_lookback < 0) throw std::invalid_argument("lookback must be >= 0");
    if (cfg.numeric_lookback > 0 && !cfg.features.has(FeatureBlock::M))
        throw std::invalid_argument("numeric lookback needs the M block");
    if (cfg.max_len_override && *cfg.max_len_override < 1) throw std::invalid_argument("max_len must be >= 1");

    Dataset ds;
    ds.features = cfg.features;
    ds.numeric_width = cfg.features.numeric_width();
    ds.lookback = cfg.numeric_lookback;
    BuildReport& report = ds.report;
    report.tweets_total = tweets.size();

    const auto labeled = label_bars(bars, cfg.label_field);
    report.label_mismatches = audit_labels(bars, golden_labels, cfg.label_field);
    const MarketFeatures market(bars, cfg.indicators);

    std::vector<const TweetRecord*> order;
    const std::string ticker = lower(cfg.ticker);
    for (const auto& t : tweets) {
        if (!t.ticker.empty() && lower(t.ticker) != ticker) {
            ++report.tweets_other_ticker;
            continue;
        }
        order.push_back(&t);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const TweetRecord* a, const TweetRecord* b) { return a->timestamp < b->timestamp; });

    SocialTracker social;
    UserHistoryStore histories;
    // Scores from tweets sharing the current timestamp are held back so that
    // no sample sees a same-instant tweet.
    struct Pending {
        const std::string* author;
        int score;
        Timestamp at;
    };
    std::vector<Pending> pending;
    auto flush_before = [&](Timestamp now) {
        if (!pending.empty() && pending.front().at < now) {
            for (const auto& p : pending) histories.apply(*p.author, p.score, p.at);
            pending.clear();
        }
    };

    std::vector<SampleProvenance> samples;
    std::vector<std::vector<std::string>> sample_tokens;
    std::vector<const TweetRecord*> sample_tweets;
    std::vector<std::size_t> sample_bar;
    for (const TweetRecord* tw : order) {
        const SocialVector so = social.observe(*tw);
        const Date day = tw->timestamp.date();
        auto it = std::upper_bound(bars.begin(), bars.end(), day,
                                   [](Date d, const OhlcvBar& b) { return d < b.date; });
        if (it == bars.begin()) {
            ++report.tweets_before_first_bar;
            continue;
        }
        const auto bar_index = static_cast<std::size_t>(std::prev(it) - bars.begin());
        if (bar_index >= labeled.size()) {
            ++report.tweets_unlabeled_day;
            continue;
        }
        flush_before(tw->timestamp);

        SampleProvenance p;
        p.tweet_id = tw->id;
        p.author = tw->username;
        p.timestamp = tw->timestamp;
        p.day = bars[bar_index].date;
        p.label = labeled[bar_index].label;
        p.se = sentiment.analyze(tw->text);
        p.so = so;
        p.sc = histories.vector_for(tw->username);
        p.tweet_score = tweet_score(p.se.label, p.label);
        pending.push_back({&tw->username, p.tweet_score, tw->timestamp});

        if (cfg.features.has(FeatureBlock::M)) {
            if (!market.ready(bar_index)) {
                ++report.tweets_in_warmup;
                continue;
            }
            p.m = market.at(bar_index);
        }
        if (p.day != day) ++report.non_trading_day_joins;

        FeatureBlocks blocks{p.m, p.so, p.se, p.sc};
        p.raw_numeric = raw_numeric(blocks, cfg.features);
        auto tokens = tokenize_clean(tw->text, stopwords);
        p.token_count = tokens.size();
        samples.push_back(std::move(p));
        sample_tokens.push_back(std::move(tokens));
        sample_tweets.push_back(tw);
        sample_bar.push_back(bar_index);
    }

    if (samples.empty()) throw std::runtime_error("empty join: no tweet matched a labeled trading day");
    const std::size_t n = samples.size();
    const auto n_train = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw std::runtime_error("too few samples (" + std::to_string(n) + ") for a train/test split");
    report.samples = n;
    report.train = n_train;
    report.test = n - n_train;

    std::vector<std::vector<double>> train_rows;
    train_rows.reserve(n_train);
    for (std::size_t i = 0; i < n_train; ++i) train_rows.push_back(samples[i].raw_numeric);
    ds.normalizer = fit_normalizer(train_rows);

    if (cfg.features.has_text()) {
        std::size_t longest = 1;
        for (std::size_t i = 0; i < n_train; ++i) longest = std::max(longest, sample_tokens[i].size());
        ds.max_len = cfg.max_len_override.value_or(static_cast<int>(longest));
        ds.embed_dim = embeddings.dim();
    }

    // Market-only normalizer for lookback rows: M occupies the leading columns.
    NormalizerState m_norm;
    if (ds.lookback > 0) {
        m_norm.min.assign(ds.normalizer.min.begin(), ds.normalizer.min.begin() + kMarketWidth);
        m_norm.max.assign(ds.normalizer.max.begin(), ds.normalizer.max.begin() + kMarketWidth);
    }

    const AssemblyContext ctx{cfg.features, &ds.normalizer, &embeddings, &stopwords, std::max(ds.max_len, 1)};
    std::uint64_t audit = detail::fnv1a("tmf-leakage-audit");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = samples[i];
        FeatureBlocks blocks{p.m, p.so, p.se, p.sc};
        TmVector v = assemble(*sample_tweets[i], blocks, p.label, p.day, ctx);
        if (v.ticker.empty()) v.ticker = cfg.ticker;
        if (ds.lookback > 0) {
            v.numeric_lookback = Eigen::MatrixXd::Zero(ds.lookback, ds.numeric_width);
            for (int j = 0; j < ds.lookback; ++j) {
                const auto back = static_cast<std::size_t>(ds.lookback - j);
                if (sample_bar[i] < back || !market.ready(sample_bar[i] - back)) continue;
                const auto mv = market.at(sample_bar[i] - back);
                const auto norm = apply_normalizer(m_norm, mv);
                for (int c = 0; c < kMarketWidth; ++c) v.numeric_lookback(j, c) = norm[static_cast<std::size_t>(c)];
            }
        }
        (i < n_train ? ds.train : ds.test).push_back(std::move(v));

        audit = detail::fnv1a(p.tweet_id, audit);
        audit = detail::fnv1a(std::to_string(p.timestamp.seconds()), audit);
        for (double x : p.sc) audit = detail::fnv1a(std::to_string(std::bit_cast<std::uint64_t>(x)), audit);
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(audit));
    report.leakage_audit_hash = hex;
    ds.provenance = std::move(samples);
    return ds;
}

} // namespace tmf
