#include <fstream>

#include <gtest/gtest.h>

#include "../oracles/tally_oracle.hpp"
#include "../support/cli_run.hpp"

using nlohmann::json;
using gen::slurp;

namespace {

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

void run_ok(const gen::Workspace& ws, const std::string& cmd, const std::string& extra = "") {
    const auto r = ws.tmf(cmd, extra);
    ASSERT_EQ(r.code, 0) << cmd << ":\n" << r.output;
}

} // namespace

TEST(Cli, HelpListsFlagsAndUnknownFlagIsFatal) {
    gen::Workspace ws("help");
    const auto help = ws.run("train --help");
    EXPECT_EQ(help.code, 0);
    for (const char* flag : {"--config", "--seed", "--out", "--lenient", "--paper-literal", "--sweep-batch"})
        EXPECT_NE(help.output.find(flag), std::string::npos) << flag;
    EXPECT_NE(ws.run("evaluate --help").output.find("--checkpoint"), std::string::npos);

    ws.populate(1, 80, 100);
    EXPECT_NE(ws.tmf("ingest", "--bogus").code, 0);
    EXPECT_NE(ws.run("").code, 0);
    EXPECT_NE(ws.run("ingest --config /nonexistent.json").code, 0);
}

TEST(Cli, LabeledBarsIngestWithEmptyTweets) {
    gen::Workspace ws("labeled");
    std::ofstream(ws.dir() / "tweets.jsonl").close();
    ws.write_config({{"ticker", "AAPL"},
                     {"paths",
                      {{"ohlcv", (std::filesystem::path(TMF_TEST_DATA) / "aapl_may2020.csv").string()},
                       {"tweets", "tweets.jsonl"}}}});
    const auto r = ws.tmf("ingest");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("holds no tweets"), std::string::npos);
    const auto m = read_json(ws.out() / "manifest.json");
    EXPECT_EQ(m["ohlcv"]["rows"], 6);
    EXPECT_EQ(m["ohlcv"]["first_date"], "2020-05-02");
    EXPECT_EQ(m["ohlcv"]["label_column"], true);
    EXPECT_EQ(m["tweets"]["count"], 0);
    EXPECT_EQ(m["warnings"].size(), 1u);
    EXPECT_TRUE(std::filesystem::exists(ws.out() / "run_ingest.json"));
}

TEST(Cli, MalformedTweetNeedsLenient) {
    gen::Workspace ws("lenient");
    ws.populate(2, 80, 50);
    std::ofstream(ws.dir() / "tweets.jsonl", std::ios::app) << "{not json\n";
    const auto strict = ws.tmf("ingest");
    EXPECT_NE(strict.code, 0);
    EXPECT_NE(strict.output.find(":51"), std::string::npos) << strict.output;
    run_ok(ws, "ingest", "--lenient");
    const auto m = read_json(ws.out() / "manifest.json");
    EXPECT_EQ(m["tweets"]["count"], 50);
    EXPECT_EQ(m["tweets"]["rejected"].size(), 1u);
    EXPECT_EQ(m["lenient"], true);
}

TEST(Cli, FeaturesRequireIngestAndRebuildIdentically) {
    gen::Workspace ws("rebuild");
    ws.populate(3, 120, 300);
    EXPECT_NE(ws.tmf("features").code, 0);
    run_ok(ws, "ingest");
    run_ok(ws, "features");
    const auto report = read_json(ws.out() / "dataset" / "build_report.json");
    EXPECT_EQ(report["features"], "M,So,Se");
    const auto first = slurp(ws.out() / "dataset" / "train.bin");
    const auto test_first = slurp(ws.out() / "dataset" / "test.bin");
    run_ok(ws, "features");
    EXPECT_EQ(slurp(ws.out() / "dataset" / "train.bin"), first);
    EXPECT_EQ(slurp(ws.out() / "dataset" / "test.bin"), test_first);
    const auto run = read_json(ws.out() / "run_features.json");
    EXPECT_EQ(run["command"], "features");
    EXPECT_EQ(run["config"]["feature_set"], "M,So,Se");

    // Editing an input after ingest is caught.
    std::ofstream(ws.dir() / "tweets.jsonl", std::ios::app) << "\n";
    const auto stale = ws.tmf("features");
    EXPECT_NE(stale.code, 0);
    EXPECT_NE(stale.output.find("rerun `tmf ingest`"), std::string::npos);
}

TEST(Cli, TextOnlyDataset) {
    gen::Workspace ws("tw");
    ws.populate(4, 120, 200, {{"feature_set", "Tw"}});
    run_ok(ws, "ingest");
    run_ok(ws, "features");
    run_ok(ws, "train");
    run_ok(ws, "evaluate");
    EXPECT_EQ(read_json(ws.out() / "report.json")["features"], "Tw");
}

TEST(Cli, TrainEvaluateReport) {
    gen::Workspace ws("full");
    ws.populate(5, 150, 400, {{"hyperparams", {{"epochs", 3}}}});
    run_ok(ws, "ingest");
    run_ok(ws, "features");
    run_ok(ws, "train");
    const auto ck = read_json(ws.out() / "checkpoint.json");
    EXPECT_EQ(ck["training_log"].size(), 3u);
    EXPECT_EQ(ck["seed"], 42);
    const auto first = slurp(ws.out() / "checkpoint.json");
    run_ok(ws, "train");
    EXPECT_EQ(slurp(ws.out() / "checkpoint.json"), first);
    run_ok(ws, "train", "--seed 7");
    EXPECT_NE(slurp(ws.out() / "checkpoint.json"), first);
    EXPECT_EQ(read_json(ws.out() / "run_train.json")["overrides"]["seed"]["flag"], 7);
    run_ok(ws, "train");

    run_ok(ws, "evaluate");
    const auto report = read_json(ws.out() / "report.json");
    std::istringstream csv(slurp(ws.out() / "predictions.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "tweet_id,day,label,probability,prediction");
    std::vector<int> preds, labels;
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) f.push_back(cell);
        ASSERT_EQ(f.size(), 5u);
        labels.push_back(std::stoi(f[2]));
        preds.push_back(std::stoi(f[4]));
        EXPECT_EQ(preds.back(), std::stod(f[3]) >= 0.5 ? 1 : 0);
    }
    ASSERT_EQ(report["samples"], preds.size());
    const auto t = oracle::tally(preds, labels);
    const auto m = oracle::metrics_of(t);
    EXPECT_EQ(report["tweet_level"]["tp"], t.tp);
    EXPECT_EQ(report["tweet_level"]["fn"], t.fn);
    EXPECT_DOUBLE_EQ(report["tweet_level"]["accuracy"].get<double>(), m.accuracy);
    EXPECT_DOUBLE_EQ(report["tweet_level"]["f1"].get<double>(), m.f1);
    EXPECT_TRUE(std::filesystem::exists(ws.out() / "confusion_AAPL.csv"));

    const auto r = ws.tmf("report");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("daily"), std::string::npos);
    EXPECT_TRUE(read_json(ws.out() / "summary.json").contains("evaluate"));
}

TEST(Cli, SweepWritesSixRows) {
    gen::Workspace ws("sweep");
    ws.populate(6, 100, 200, {{"hyperparams", {{"epochs", 1}}}});
    run_ok(ws, "ingest");
    run_ok(ws, "features");
    run_ok(ws, "train", "--sweep-batch");
    const auto csv = slurp(ws.out() / "batch_sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    EXPECT_EQ(csv.rfind("batch_size,steps_per_epoch,", 0), 0u);
    for (int b : {128, 256, 512, 1024, 2048, 4096})
        EXPECT_TRUE(std::filesystem::exists(ws.out() / "sweep" / ("checkpoint_b" + std::to_string(b) + ".json")));
    run_ok(ws, "train", "--sweep-batch");
    EXPECT_EQ(slurp(ws.out() / "batch_sweep.csv"), csv);
}

TEST(Cli, LockAndArchitectureMismatch) {
    gen::Workspace ws("lock");
    ws.populate(7, 120, 200);
    run_ok(ws, "ingest");
    std::ofstream(ws.out() / ".tmf.lock").close();
    const auto locked = ws.tmf("features");
    EXPECT_NE(locked.code, 0);
    EXPECT_NE(locked.output.find("locked"), std::string::npos);
    std::filesystem::remove(ws.out() / ".tmf.lock");
    run_ok(ws, "features");
    run_ok(ws, "train");

    const auto other = ws.dir() / "other";
    run_ok(ws, "ingest", "--out \"" + other.string() + "\"");
    auto cfg = read_json(ws.config());
    cfg["feature_set"] = "M";
    ws.write_config(cfg);
    run_ok(ws, "features", "--out \"" + other.string() + "\"");
    const auto r = ws.tmf("evaluate", "--out \"" + other.string() + "\" --checkpoint \"" +
                                          (ws.out() / "checkpoint.json").string() + "\"");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.output.find("architecture mismatch"), std::string::npos) << r.output;
}
