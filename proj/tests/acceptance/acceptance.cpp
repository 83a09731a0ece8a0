// One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "../oracles/indicator_oracle.hpp"
#include "../oracles/replay_oracle.hpp"
#include "../oracles/tally_oracle.hpp"
#include "../support/cli_run.hpp"
#include "../support/generators.hpp"
#include "../support/gradcheck.hpp"
#include "tmf/cells.hpp"
#include "tmf/checkpoint.hpp"
#include "tmf/eval.hpp"
#include "tmf/indicators.hpp"
#include "tmf/labeling.hpp"
#include "tmf/market_data.hpp"
#include "tmf/normalizer.hpp"
#include "tmf/social.hpp"
#include "tmf/train.hpp"

using namespace tmf;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream note;

    void check(bool cond, const std::string& what) {
        if (!cond && ok) note << what;
        ok = ok && cond;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool series_match(const IndicatorSeries& got, const std::vector<double>& want, double tol) {
    if (got.size() != want.size()) return false;
    for (std::size_t t = 0; t < want.size(); ++t) {
        if (std::isnan(want[t]) != !got.defined(t)) return false;
        if (!std::isnan(want[t]) && std::fabs(got.values[t] - want[t]) > tol) return false;
    }
    return true;
}

void indicator_oracles(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int run = 0; run < 100 && o.ok; ++run) {
        Rng rng(5000 + static_cast<std::uint64_t>(run));
        const auto bars = gen::random_bars(rng, 1000);
        const auto c = closes_of(bars);
        std::vector<oracle::Bar> ob;
        for (const auto& b : bars) ob.push_back({b.high, b.low, b.close});
        const std::string tag = " (walk " + std::to_string(run) + ")";
        o.check(series_match(sma(c, 10), oracle::sma(c, 10), 1e-9), "sma" + tag);
        o.check(series_match(ema(c, 10), oracle::ema(c, 10), 1e-9), "ema" + tag);
        o.check(series_match(rsi(c, 27), oracle::rsi(c, 27), 1e-9), "rsi" + tag);
        o.check(series_match(macd(c, 12, 26), oracle::macd(c, 12, 26), 1e-9), "macd" + tag);
        o.check(series_match(cci(bars, 20), oracle::cci(ob, 20), 1e-9), "cci" + tag);
        const auto bb = bollinger(c, 20, 2.0);
        const auto want = oracle::bollinger(c, 20, 2.0);
        o.check(series_match(bb.upper, want.upper, 1e-9) && series_match(bb.middle, want.middle, 1e-9) &&
                    series_match(bb.lower, want.lower, 1e-9),
                "bollinger" + tag);
    }
    const double s = seconds_since(t0);
    o.check(s < 10, "runtime over 10 s");
    o.note << (o.ok ? "" : "; ") << s << " s";
}

void rsi_boundaries(Outcome& o) {
    std::vector<double> up, down, flat(30, 42.0);
    for (int i = 0; i < 30; ++i) {
        up.push_back(100 + i);
        down.push_back(100 - i);
    }
    o.check(std::fabs(rsi(up, 27).values.back() - 100) <= 1e-9, "increasing series");
    o.check(std::fabs(rsi(down, 27).values.back()) <= 1e-9, "decreasing series");
    o.check(rsi(flat, 27).values.back() == 50.0, "flat series");
}

void gradient_checks(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    for (CellKind k : {CellKind::indrnn, CellKind::lstm, CellKind::gru})
        for (Architecture a : {Architecture::text_only, Architecture::numeric_only, Architecture::fused}) {
            Rng rng(900 + static_cast<std::uint64_t>(k) * 10 + static_cast<std::uint64_t>(a));
            ModelConfig cfg;
            cfg.architecture = a;
            cfg.cell = k;
            cfg.hidden = 3;
            cfg.text_dim = a == Architecture::numeric_only ? 0 : 3;
            cfg.numeric_dim = a == Architecture::text_only ? 0 : 4;
            auto m = Model::random(cfg, rng);
            m.weights.for_each([&](const std::string& name, Eigen::MatrixXd& w) {
                if (name.find("/b") != std::string::npos)
                    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-0.5, 0.5);
            });
            const auto batch = gen::grad_batch(rng, a != Architecture::numeric_only, a != Architecture::text_only);
            std::vector<DropoutMasks> masks;
            for (int i = 0; i < 3; ++i) masks.push_back(draw_masks(cfg, 0.5, 0.5, rng));
            const auto r = gen::grad_check(m, batch, masks, 1e-4);
            worst = std::max(worst, r.max_rel_error);
            o.check(r.max_rel_error < 1e-4, std::string(to_string(k)) + "/" + std::string(to_string(a)) + " " +
                                                r.worst_block);
        }
    const double s = seconds_since(t0);
    o.check(s < 30, "runtime over 30 s");
    o.note << (o.ok ? "" : "; ") << "max rel " << worst << ", " << s << " s";
}

void indrnn_independence(Outcome& o) {
    const auto seed = gen::for_all(4000, 100, [](Rng& rng) {
        const int n = 2 + static_cast<int>(rng.below(10));
        const int m = 1 + static_cast<int>(rng.below(6));
        const int len = 1 + static_cast<int>(rng.below(8));
        auto p = CellParams::random(CellKind::indrnn, m, n, rng);
        for (int i = 0; i < n; ++i) p[indrnn_block::b](i, 0) = rng.uniform(-1, 1);
        Sequence xs;
        for (int t = 0; t < len; ++t) xs.push_back(Eigen::VectorXd::NullaryExpr(m, [&] { return rng.uniform(-1, 1); }));
        Eigen::VectorXd h0 = Eigen::VectorXd::NullaryExpr(n, [&] { return rng.uniform(0, 1); });
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        Eigen::VectorXd h1 = h0;
        h1(j) += rng.uniform(0.1, 1.0);
        const auto a = indrnn_forward(p, xs, h0, {});
        const auto b = indrnn_forward(p, xs, h1, {});
        bool moved = false;
        for (int t = 0; t < len; ++t)
            for (int k = 0; k < n; ++k) {
                const double d = a[static_cast<std::size_t>(t)](k) - b[static_cast<std::size_t>(t)](k);
                if (k != j && d != 0.0) return false;
                if (k == j && d != 0.0) moved = true;
            }
        return moved;
    });
    o.check(seed == 0, "failing seed " + std::to_string(seed));
}

void user_history_replay(Outcome& o) {
    Rng rng(7777);
    UserHistoryStore store;
    oracle::Replay replay;
    long long now = 0;
    for (int i = 0; i < 10000 && o.ok; ++i) {
        now += static_cast<long long>(rng.below(3));
        const oracle::Event e{"u" + std::to_string(rng.below(60)), rng.bernoulli(0.55) ? 1 : -1, now};
        store.apply(e.user, e.score, Timestamp(e.time));
        replay.push(e);
        for (const auto& [user, h] : store.all()) o.check(h.pus + h.nus == h.h, "pus + nus != h for " + user);
    }
    for (const auto& [user, scores] : replay.users())
        o.check(store.vector_for(user) == replay.sc(user), "Sc differs for " + user);
    o.check(store.size() == replay.users().size(), "user count");

    const auto seed = gen::for_all(4100, 1000, [](Rng& rng) {
        UserHistory h;
        h.pus = rng.below(40);
        h.nus = rng.below(40);
        h.h = h.pus + h.nus;
        const double ar = author_rating(h);
        const double urs = recommendation_score(h);
        if (ar == 0 ? urs != 0.0 : urs != 1 + std::log10(static_cast<double>(h.pus))) return false;
        return representativeness(h) == (ar + static_cast<double>(h.pus)) / 2;
    });
    o.check(seed == 0, "formula failing seed " + std::to_string(seed));
}

void labeling_fixture(Outcome& o) {
    const auto load = read_ohlcv_csv(std::filesystem::path(TMF_TEST_DATA) / "aapl_may2020.csv");
    const auto labeled = label_bars(load.bars);
    o.check(labeled.size() == 5, "expected 5 labeled rows");
    if (!o.ok) return;
    o.check(labeled[0].label == 0, "02/05 175.35->175.33");
    o.check(labeled[4].label == 0, "06/05 177.09->176.19");
    const std::vector<OhlcvBar> example{{Date(0), 99.8, 99.8, 99.8, 99.8, 99.8}, {Date(1), 100, 100, 100, 100, 100}};
    o.check(label_bars(example)[0].label == 1, "99.80->100");
    const auto mismatches = audit_labels(load.bars, load.golden_labels);
    std::string flagged;
    for (const auto& m : mismatches) flagged += (flagged.empty() ? "" : ",") + m.date.iso();
    o.check(!mismatches.empty(), "no inconsistencies flagged");
    o.note << (o.ok ? "" : "; ") << "flagged " << flagged;
}

void metric_identities(Outcome& o) {
    Rng rng(4200);
    for (int trial = 0; trial < 10000 && o.ok; ++trial) {
        const auto n = 1 + rng.below(30);
        std::vector<int> p(n), y(n);
        const double bias = rng.uniform();
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.bernoulli(bias) ? 1 : 0;
            y[i] = rng.bernoulli(bias) ? 1 : 0;
        }
        const auto t = oracle::tally(p, y);
        const auto c = confusion(p, y);
        const auto m = metrics(c);
        const auto want = oracle::metrics_of(t);
        o.check(c == ConfusionCounts{t.tp, t.tn, t.fp, t.fn}, "tally trial " + std::to_string(trial));
        o.check(m.accuracy == want.accuracy && m.precision == want.precision && m.recall == want.recall &&
                    m.f1 == want.f1,
                "metrics trial " + std::to_string(trial));
    }
    for (int trial = 0; trial < 10000 && o.ok; ++trial) {
        const Date day(18000);
        std::vector<std::pair<Date, int>> votes;
        std::vector<int> raw;
        const auto k = rng.below(10);
        for (std::size_t i = 0; i < k; ++i) {
            raw.push_back(rng.bernoulli(0.5) ? 1 : 0);
            votes.emplace_back(day, raw.back());
        }
        const auto rows = daily_aggregate(votes, {{day, 1}});
        o.check((rows.at(0).decision == DailyDecision::pos ? 1 : 0) == oracle::majority(raw),
                "daily trial " + std::to_string(trial));
    }
}

void learnability(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto corpus = gen::linear_corpus(2024, 2000, 0.05);
    DatasetLayout layout;
    layout.features = FeatureSet::parse("M,So,Se");
    layout.numeric_width = 14;
    const Hyperparams hp;  // 2 x 14, lr 0.001, 100 epochs, batch 128
    const auto a = train(layout, hp, corpus.train, corpus.test);
    const double s = seconds_since(t0);
    const double acc = a.log.back().valid_accuracy;
    const auto b = train(layout, hp, corpus.train, corpus.test);
    o.check(acc >= 0.90, "test accuracy below 0.90");
    o.check(checkpoint_hash(a) == checkpoint_hash(b), "same seed gave different checkpoints");
    o.check(s < 300, "runtime over 5 min");
    o.note << (o.ok ? "" : "; ") << "test accuracy " << acc << ", " << s << " s per run";
}

void batch_sweep(Outcome& o) {
    gen::Workspace ws("acceptance_sweep");
    ws.populate(77, 120, 400, {{"hyperparams", {{"epochs", 1}, {"hidden", 3}}}});
    for (const char* cmd : {"ingest", "features"}) {
        const auto r = ws.tmf(cmd);
        o.check(r.code == 0, std::string(cmd) + " failed: " + r.output);
    }
    if (!o.ok) return;
    const auto r = ws.tmf("train", "--sweep-batch");
    o.check(r.code == 0, "train --sweep-batch failed: " + r.output);
    if (!o.ok) return;
    std::istringstream csv(gen::slurp(ws.out() / "batch_sweep.csv"));
    std::string line;
    std::getline(csv, line);
    std::vector<long> batches, steps;
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string b, s;
        std::getline(row, b, ',');
        std::getline(row, s, ',');
        batches.push_back(std::stol(b));
        steps.push_back(std::stol(s));
    }
    o.check(batches == std::vector<long>{128, 256, 512, 1024, 2048, 4096}, "batch column");
    for (std::size_t i = 1; i < steps.size(); ++i) o.check(steps[i] <= steps[i - 1], "steps_per_epoch increased");
}

void normalization(Outcome& o) {
    const auto seed = gen::for_all(4300, 500, [](Rng& rng) {
        const auto rows_n = 2 + rng.below(30), width = 1 + rng.below(8);
        std::vector<std::vector<double>> train(rows_n, std::vector<double>(width));
        for (auto& r : train)
            for (auto& v : r) v = rng.uniform(-1e4, 1e4);
        const auto st = fit_normalizer(train);
        // Extrema land on exactly 0 and 1.
        for (std::size_t j = 0; j < width; ++j)
            for (const auto& r : train) {
                const double v = apply_normalizer(st, r)[j];
                if (r[j] == st.min[j] && v != 0.0) return false;
                if (r[j] == st.max[j] && v != 1.0) return false;
            }
        std::vector<double> scale(width), shift(width);
        for (std::size_t j = 0; j < width; ++j) {
            scale[j] = std::pow(10, rng.uniform(-3, 3));
            shift[j] = rng.uniform(-1e3, 1e3);
        }
        auto affine = [&](std::vector<double> r) {
            for (std::size_t j = 0; j < width; ++j) r[j] = scale[j] * r[j] + shift[j];
            return r;
        };
        std::vector<std::vector<double>> moved;
        for (const auto& r : train) moved.push_back(affine(r));
        const auto st2 = fit_normalizer(moved);
        for (int probe = 0; probe < 20; ++probe) {
            std::vector<double> x(width);
            for (auto& v : x) v = rng.uniform(-2e4, 2e4);
            const auto a = apply_normalizer(st, x);
            const auto b = apply_normalizer(st2, affine(x));
            for (std::size_t j = 0; j < width; ++j) {
                if (a[j] < 0 || a[j] > 1 || b[j] < 0 || b[j] > 1) return false;
                if (std::fabs(a[j] - b[j]) > 1e-9) return false;
            }
        }
        return true;
    });
    o.check(seed == 0, "failing seed " + std::to_string(seed));
}

} // namespace

int main() {
    const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
        {"indicator oracle equivalence", indicator_oracles},
        {"RSI boundary suite", rsi_boundaries},
        {"gradient checks", gradient_checks},
        {"IndRNN independence", indrnn_independence},
        {"user-history replay", user_history_replay},
        {"labeling fixture", labeling_fixture},
        {"metric identities", metric_identities},
        {"end-to-end learnability", learnability},
        {"batch-size sweep harness", batch_sweep},
        {"normalization properties", normalization},
    };
    int failed = 0;
    int i = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.note << "exception: " << e.what();
        }
        const auto note = o.note.str();
        std::printf("%s %d %s%s%s\n", o.ok ? "PASS" : "FAIL", ++i, name, note.empty() ? "" : " | ", note.c_str());
        std::fflush(stdout);
        failed += !o.ok;
    }
    return failed == 0 ? 0 : 1;
}
