#include "tmf/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fcntl.h>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include <spdlog/spdlog.h>

#include "hashing.hpp"
#include "tmf/checkpoint.hpp"
#include "tmf/dataset.hpp"
#include "tmf/dataset_io.hpp"
#include "tmf/errors.hpp"
#include "tmf/eval.hpp"
#include "tmf/market_data.hpp"
#include "tmf/sentiment.hpp"
#include "tmf/tweet_io.hpp"

namespace tmf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Exclusive marker file; a second writer into the same directory fails fast.
class OutputLock {
public:
    explicit OutputLock(const fs::path& dir) : path_(dir / ".tmf.lock") {
        fs::create_directories(dir);
        const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0)
            throw std::runtime_error("output directory is locked by another run (remove " + path_.string() +
                                     " if stale)");
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
        ::close(fd);
    }
    ~OutputLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    fs::path path_;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + p.string());
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

json diagnostics_json(const std::vector<Diagnostic>& ds) {
    auto arr = json::array();
    for (const auto& d : ds) arr.push_back({{"line", d.line}, {"message", d.message}});
    return arr;
}

bool same_ticker(const std::string& a, const std::string& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
        return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
    });
}

json run_manifest(const Session& s, std::string_view command, const std::vector<fs::path>& outputs) {
    json hashes = json::object();
    for (const auto& p : outputs) hashes[fs::relative(p, s.config.output_dir).generic_string()] = file_hash(p);
    json m = {{"schema_version", kSchemaVersion},
              {"command", command},
              {"config_file", s.options.config.string()},
              {"config", run_config_to_json(s.config)},
              {"overrides", s.overrides},
              {"outputs", hashes}};
    write_json(s.config.output_dir / ("run_" + std::string(command) + ".json"), m);
    return m;
}

fs::path dataset_dir(const Session& s) { return s.config.output_dir / "dataset"; }

Hyperparams effective_hyperparams(const Session& s) {
    Hyperparams hp = s.config.hyperparams;
    if (s.options.paper_literal) hp.paper_literal = true;
    return hp;
}

struct RawInputs {
    OhlcvLoad ohlcv;
    TweetLoad tweets;
};

RawInputs load_inputs(const Session& s) {
    // Strict-mode parse errors carry only the line number; add the file.
    auto located = [](const fs::path& path, auto&& read) {
        try {
            return read();
        } catch (const ParseError& e) {
            if (e.line() == 0) throw;
            const std::string what = e.what();
            throw ParseError(path.string() + ":" + std::to_string(e.line()) + what.substr(what.find(':')), 0);
        }
    };
    RawInputs r{located(s.config.paths.ohlcv, [&] { return read_ohlcv_csv(s.config.paths.ohlcv, s.options.lenient); }),
                located(s.config.paths.tweets,
                        [&] { return read_tweets_jsonl(s.config.paths.tweets, s.options.lenient); })};
    for (const auto& d : r.ohlcv.rejected)
        spdlog::warn("{}:{}: skipped: {}", s.config.paths.ohlcv.string(), d.line, d.message);
    for (const auto& d : r.tweets.rejected)
        spdlog::warn("{}:{}: skipped: {}", s.config.paths.tweets.string(), d.line, d.message);
    return r;
}

SampleFile load_split(const Session& s, const char* name) {
    const auto path = dataset_dir(s) / name;
    if (!fs::exists(path)) throw std::runtime_error(path.string() + " not found; run `tmf features` first");
    return read_samples(path);
}

void write_training_log(const fs::path& path, const std::vector<EpochLog>& log) {
    std::ostringstream out;
    out << "epoch,loss,accuracy,valid_loss,valid_accuracy\n";
    char buf[160];
    for (const auto& e : log) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g\n", e.epoch, e.loss, e.accuracy, e.valid_loss,
                      e.valid_accuracy);
        out << buf;
    }
    write_file(path, out.str());
}

} // namespace

std::string file_hash(const fs::path& path) { return hex64(detail::fnv1a(read_file(path))); }

Session open_session(const CliOptions& opts) {
    Session s;
    s.options = opts;
    s.config = load_run_config(opts.config);
    if (opts.seed) {
        s.overrides["seed"] = {{"config", s.config.seed}, {"flag", *opts.seed}};
        s.config.seed = *opts.seed;
        s.config.hyperparams.seed = *opts.seed;
    }
    if (opts.out) {
        s.overrides["output_dir"] = {{"config", s.config.output_dir.string()}, {"flag", opts.out->string()}};
        s.config.output_dir = *opts.out;
    }
    if (opts.lenient) s.overrides["lenient"] = true;
    if (opts.paper_literal)
        s.overrides["paper_literal"] = {{"config", s.config.hyperparams.paper_literal}, {"flag", true}};
    if (opts.sweep_batch) s.overrides["sweep_batch"] = true;
    if (opts.checkpoint) s.overrides["checkpoint"] = opts.checkpoint->string();
    return s;
}

json cmd_ingest(const Session& s) {
    const auto& c = s.config;
    OutputLock lock(c.output_dir);
    const auto in = load_inputs(s);
    const auto& bars = in.ohlcv.bars;
    const auto& tweets = in.tweets.tweets;

    json warnings = json::array();
    if (bars.empty()) throw std::runtime_error("no valid OHLCV rows in " + c.paths.ohlcv.string());
    if (tweets.empty()) {
        warnings.push_back("tweets file holds no tweets");
        spdlog::warn("{} holds no tweets", c.paths.tweets.string());
    }
    std::size_t matching = 0;
    for (const auto& t : tweets)
        if (t.ticker.empty() || same_ticker(t.ticker, c.ticker)) ++matching;
    const bool has_labels = std::any_of(in.ohlcv.golden_labels.begin(), in.ohlcv.golden_labels.end(),
                                        [](const auto& l) { return l.has_value(); });

    json tw = {{"path", c.paths.tweets.string()},
               {"hash", file_hash(c.paths.tweets)},
               {"count", tweets.size()},
               {"matching_ticker", matching},
               {"rejected", diagnostics_json(in.tweets.rejected)}};
    if (!tweets.empty()) {
        const auto [lo, hi] = std::minmax_element(tweets.begin(), tweets.end(), [](const auto& a, const auto& b) {
            return a.timestamp < b.timestamp;
        });
        tw["first"] = lo->timestamp.iso();
        tw["last"] = hi->timestamp.iso();
    }
    const json manifest = {{"schema_version", kSchemaVersion},
                           {"ticker", c.ticker},
                           {"lenient", s.options.lenient},
                           {"ohlcv",
                            {{"path", c.paths.ohlcv.string()},
                             {"hash", file_hash(c.paths.ohlcv)},
                             {"rows", bars.size()},
                             {"first_date", bars.front().date.iso()},
                             {"last_date", bars.back().date.iso()},
                             {"label_column", has_labels},
                             {"rejected", diagnostics_json(in.ohlcv.rejected)}}},
                           {"tweets", tw},
                           {"warnings", warnings}};
    const auto path = c.output_dir / "manifest.json";
    write_json(path, manifest);
    spdlog::info("ingest: {} bars ({} .. {}), {} tweets, {} rejected lines", bars.size(), bars.front().date.iso(),
                 bars.back().date.iso(), tweets.size(), in.ohlcv.rejected.size() + in.tweets.rejected.size());
    return run_manifest(s, "ingest", {path});
}

json cmd_features(const Session& s) {
    const auto& c = s.config;
    OutputLock lock(c.output_dir);
    const auto manifest_path = c.output_dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw std::runtime_error("no ingest manifest; run `tmf ingest` first");
    const auto manifest = read_json(manifest_path);
    if (manifest.at("ohlcv").at("hash") != file_hash(c.paths.ohlcv) ||
        manifest.at("tweets").at("hash") != file_hash(c.paths.tweets))
        throw std::runtime_error("input files changed since ingest; rerun `tmf ingest`");

    const auto in = load_inputs(s);

    std::optional<LexiconSentiment> custom_lexicon;
    if (c.paths.lexicon) custom_lexicon = LexiconSentiment::from_file(*c.paths.lexicon);
    const SentimentProvider& sentiment = custom_lexicon ? *custom_lexicon : LexiconSentiment::builtin();
    const StopWords stopwords = c.paths.stopwords ? load_stopwords(*c.paths.stopwords) : builtin_stopwords();
    const EmbeddingTable embeddings = c.paths.embedding
                                          ? EmbeddingTable::load_text(*c.paths.embedding, c.embedding_fallback, c.seed)
                                          : EmbeddingTable(c.embedding_dim, c.embedding_fallback, c.seed);

    DatasetConfig dc;
    dc.ticker = c.ticker;
    dc.features = c.feature_set;
    dc.label_field = c.label_field;
    dc.indicators = c.indicators;
    dc.train_fraction = c.train_fraction;
    dc.numeric_lookback = c.lookback;
    dc.max_len_override = c.max_len;
    const auto ds = build_dataset(in.tweets.tweets, in.ohlcv.bars, dc, sentiment, embeddings, stopwords,
                                  in.ohlcv.golden_labels);
    for (const auto& m : ds.report.label_mismatches)
        spdlog::warn("label column disagrees with the price rule on {} (file {}, rule {})", m.date.iso(), m.golden,
                     m.computed);

    const auto dir = dataset_dir(s);
    write_dataset_dir(dir, ds, c.ticker);
    spdlog::info("features: {} samples ({} train / {} test), numeric width {}, features {}", ds.report.samples,
                 ds.report.train, ds.report.test, ds.numeric_width, ds.features.str());
    return run_manifest(s, "features",
                        {dir / "train.bin", dir / "test.bin", dir / "normalizer.json", dir / "build_report.json"});
}

json cmd_train(const Session& s) {
    const auto& c = s.config;
    OutputLock lock(c.output_dir);
    const auto train_file = load_split(s, "train.bin");
    const auto test_file = load_split(s, "test.bin");
    if (!(train_file.layout == test_file.layout)) throw std::runtime_error("train.bin and test.bin layouts differ");
    const Hyperparams hp = effective_hyperparams(s);

    const auto run = [&](const Hyperparams& h) {
        try {
            return train(train_file.layout, h, train_file.samples, test_file.samples, [](const EpochLog& e) {
                spdlog::debug("epoch {:3d} loss {:.6f} acc {:.4f} | test loss {:.6f} acc {:.4f}", e.epoch, e.loss,
                              e.accuracy, e.valid_loss, e.valid_accuracy);
            });
        } catch (const DivergedError& e) {
            write_json(c.output_dir / "train_failure.json",
                       {{"schema_version", kSchemaVersion}, {"batch_size", h.batch_size}, {"error", e.what()}});
            throw;
        }
    };

    std::vector<fs::path> outputs;
    if (!s.options.sweep_batch) {
        const auto ckpt = run(hp);
        const auto path = c.output_dir / "checkpoint.json";
        save_checkpoint(path, ckpt);
        write_training_log(c.output_dir / "training_log.csv", ckpt.log);
        outputs = {path, c.output_dir / "training_log.csv"};
        const auto& last = ckpt.log.back();
        spdlog::info("train: {} epochs, final loss {:.6f}, test accuracy {:.4f}, checkpoint {}", ckpt.log.size(),
                     last.loss, last.valid_accuracy, checkpoint_hash(ckpt));
    } else {
        const auto sweep_dir = c.output_dir / "sweep";
        fs::create_directories(sweep_dir);
        std::string csv = sweep_csv_header();
        for (int b : kBatchSweep) {
            Hyperparams h = hp;
            h.batch_size = b;
            const auto ckpt = run(h);
            const auto path = sweep_dir / ("checkpoint_b" + std::to_string(b) + ".json");
            save_checkpoint(path, ckpt);
            outputs.push_back(path);
            const auto& last = ckpt.log.back();
            SweepRow row{b, steps_per_epoch(train_file.samples.size(), b), static_cast<int>(ckpt.log.size()),
                         last.loss, last.accuracy, last.valid_loss, last.valid_accuracy, checkpoint_hash(ckpt)};
            csv += sweep_csv_row(row);
            spdlog::info("sweep: batch {} ({} steps/epoch) test accuracy {:.4f}", b, row.steps_per_epoch,
                         row.test_accuracy);
        }
        const auto path = c.output_dir / "batch_sweep.csv";
        write_file(path, csv);
        outputs.push_back(path);
    }
    return run_manifest(s, "train", outputs);
}

json cmd_evaluate(const Session& s) {
    const auto& c = s.config;
    OutputLock lock(c.output_dir);
    const auto ckpt_path = s.options.checkpoint ? *s.options.checkpoint : c.output_dir / "checkpoint.json";
    if (!fs::exists(ckpt_path)) throw std::runtime_error(ckpt_path.string() + " not found; run `tmf train` first");
    const auto ckpt = load_checkpoint(ckpt_path);
    const auto test = load_split(s, "test.bin");
    if (!(ckpt.layout == test.layout))
        throw std::runtime_error("architecture mismatch: checkpoint expects features " + ckpt.layout.features.str() +
                                 " width " + std::to_string(ckpt.layout.numeric_width) + ", dataset has " +
                                 test.layout.features.str() + " width " + std::to_string(test.layout.numeric_width));

    std::vector<int> preds, labels;
    std::vector<std::pair<Date, int>> per_tweet;
    std::map<Date, int> actual;
    std::ostringstream pcsv;
    pcsv << "tweet_id,day,label,probability,prediction\n";
    char buf[64];
    for (const auto& sample : test.samples) {
        const auto p = predict(ckpt, sample);
        preds.push_back(p.label);
        labels.push_back(sample.label);
        const Date day = sample.day;
        per_tweet.emplace_back(day, p.label);
        const auto [it, fresh] = actual.emplace(day, sample.label);
        if (!fresh && it->second != sample.label)
            throw std::runtime_error("samples disagree on the label of " + day.iso());
        std::snprintf(buf, sizeof buf, "%.10g", p.probability);
        pcsv << sample.tweet_id << ',' << day.iso() << ',' << sample.label << ',' << buf << ',' << p.label << '\n';
    }
    const auto tweet_level = metrics(confusion(preds, labels));
    const auto days = daily_aggregate(per_tweet, actual);
    const auto daily_level = daily_metrics(days);

    const json report = {{"schema_version", kSchemaVersion},
                         {"ticker", c.ticker},
                         {"checkpoint", checkpoint_hash(ckpt)},
                         {"features", test.layout.features.str()},
                         {"samples", test.samples.size()},
                         {"tweet_level", metrics_to_json(tweet_level)},
                         {"daily_level", metrics_to_json(daily_level)},
                         {"daily", daily_to_json(days)}};
    const auto report_path = c.output_dir / "report.json";
    const auto confusion_path = c.output_dir / ("confusion_" + c.ticker + ".csv");
    const auto predictions_path = c.output_dir / "predictions.csv";
    write_json(report_path, report);
    write_file(confusion_path, confusion_csv(tweet_level, daily_level));
    write_file(predictions_path, pcsv.str());
    spdlog::info("evaluate: tweet accuracy {:.4f} f1 {:.4f}; daily accuracy {:.4f} over {} days", tweet_level.accuracy,
                 tweet_level.f1, daily_level.accuracy, days.size());
    return run_manifest(s, "evaluate", {report_path, confusion_path, predictions_path});
}

json cmd_report(const Session& s) {
    const auto& dir = s.config.output_dir;
    OutputLock lock(dir);
    json summary = {{"schema_version", kSchemaVersion}, {"ticker", s.config.ticker}};
    std::ostringstream text;
    text << "ticker " << s.config.ticker << "\n";
    bool any = false;
    if (fs::exists(dir / "manifest.json")) {
        const auto m = read_json(dir / "manifest.json");
        summary["ingest"] = {{"bars", m["ohlcv"]["rows"]}, {"tweets", m["tweets"]["count"]}};
        text << "ingest   " << m["ohlcv"]["rows"] << " bars, " << m["tweets"]["count"] << " tweets\n";
        any = true;
    }
    if (fs::exists(dataset_dir(s) / "build_report.json")) {
        const auto r = read_json(dataset_dir(s) / "build_report.json");
        summary["features"] = {{"features", r["features"]}, {"samples", r["samples"]}, {"train", r["train"]},
                               {"test", r["test"]},         {"label_mismatches", r["label_mismatches"].size()}};
        text << "features " << r["features"].get<std::string>() << ", " << r["samples"] << " samples ("
             << r["train"] << " train / " << r["test"] << " test)\n";
        any = true;
    }
    if (fs::exists(dir / "checkpoint.json")) {
        const auto ck = load_checkpoint(dir / "checkpoint.json");
        const auto& last = ck.log.back();
        summary["train"] = {{"epochs", ck.log.size()}, {"final_loss", last.loss},
                            {"final_test_accuracy", last.valid_accuracy}, {"checkpoint", checkpoint_hash(ck)}};
        text << "train    " << ck.log.size() << " epochs, final loss " << last.loss << ", test accuracy "
             << last.valid_accuracy << "\n";
        any = true;
    }
    if (fs::exists(dir / "batch_sweep.csv")) {
        summary["sweep"] = read_file(dir / "batch_sweep.csv");
        text << "sweep    batch_sweep.csv present\n";
        any = true;
    }
    if (fs::exists(dir / "report.json")) {
        const auto r = read_json(dir / "report.json");
        summary["evaluate"] = {{"tweet_level", r["tweet_level"]}, {"daily_level", r["daily_level"]}};
        const auto line = [&](const char* name, const json& m) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%-8s accuracy %.4f precision %.4f recall %.4f f1 %.4f\n", name,
                          m["accuracy"].get<double>(), m["precision"].get<double>(), m["recall"].get<double>(),
                          m["f1"].get<double>());
            text << buf;
        };
        line("tweet", r["tweet_level"]);
        line("daily", r["daily_level"]);
        any = true;
    }
    if (!any) throw std::runtime_error("nothing to report in " + dir.string());
    const auto path = dir / "summary.json";
    write_json(path, summary);
    std::cout << text.str();
    return run_manifest(s, "report", {path});
}

} // namespace tmf
