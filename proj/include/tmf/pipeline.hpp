#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "tmf/config.hpp"

namespace tmf {

/// Flags shared by every subcommand.
struct CliOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> checkpoint;  // evaluate only
    bool lenient = false;
    bool paper_literal = false;
    bool sweep_batch = false;
};

/// Config after flag overrides, plus a record of what the flags changed.
struct Session {
    RunConfig config;
    CliOptions options;
    nlohmann::json overrides = nlohmann::json::object();
};

Session open_session(const CliOptions& opts);

/// Each command writes its artifacts under the output directory, holds
/// `.tmf.lock` there while running, and writes `run_<command>.json` echoing
/// the effective config, overrides, and output hashes. Fatal problems throw.
nlohmann::json cmd_ingest(const Session& s);
nlohmann::json cmd_features(const Session& s);
nlohmann::json cmd_train(const Session& s);
nlohmann::json cmd_evaluate(const Session& s);
/// Also prints a plain-text summary to stdout.
nlohmann::json cmd_report(const Session& s);

/// FNV-1a of a file's bytes as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

} // namespace tmf
