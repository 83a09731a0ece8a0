#include <cstdlib>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tmf/pipeline.hpp"

namespace {

void add_common(CLI::App* sub, tmf::CliOptions& o, std::string& seed, std::string& out) {
    sub->add_option("--config", o.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out", out, "Override the output directory");
    sub->add_flag("--lenient", o.lenient, "Skip malformed input lines instead of failing");
    sub->add_flag("--paper-literal", o.paper_literal, "Use the literal cell equations (bias placement, GRU candidate)");
    sub->add_flag("--sweep-batch", o.sweep_batch, "train: repeat over batch sizes 128..4096 into batch_sweep.csv");
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("tmf");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("TMF_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to off; only accept real level names.
        if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
        else spdlog::warn("ignoring unknown TMF_LOG level '{}'", env);
    }
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"TM-vector stock movement pipeline"};
    app.require_subcommand(1);

    tmf::CliOptions opts;
    std::string seed, out;
    std::string checkpoint;
    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"ingest", "Validate raw OHLCV and tweets; write manifest.json"},
        {"features", "Build the labeled, normalized TM-vector dataset"},
        {"train", "Train the recurrent model; write checkpoint.json"},
        {"evaluate", "Tweet-level and daily metrics on the test split"},
        {"report", "Summarize the artifacts in the output directory"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, opts, seed, out);
        if (std::string(c.name) == "evaluate")
            sub->add_option("--checkpoint", checkpoint, "Checkpoint to evaluate (default <out>/checkpoint.json)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!seed.empty()) {
            std::size_t used = 0;
            const auto v = std::stoull(seed, &used);
            if (used != seed.size()) throw std::invalid_argument("--seed must be a non-negative integer");
            opts.seed = v;
        }
        if (!out.empty()) opts.out = out;
        if (!checkpoint.empty()) opts.checkpoint = checkpoint;

        const auto session = tmf::open_session(opts);
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "ingest") tmf::cmd_ingest(session);
        else if (cmd == "features") tmf::cmd_features(session);
        else if (cmd == "train") tmf::cmd_train(session);
        else if (cmd == "evaluate") tmf::cmd_evaluate(session);
        else tmf::cmd_report(session);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
