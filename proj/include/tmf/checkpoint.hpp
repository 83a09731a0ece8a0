#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tmf/train.hpp"

namespace tmf {

/// JSON envelope: format_version, model config, hyperparams, seed, dataset
/// layout, training log, and weights. Each weight block is
/// {"name", "rows", "cols", "data"} where data is base64 of the row-major
/// values as little-endian IEEE-754 float64.
nlohmann::json checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

/// Serialized text; identical checkpoints give identical bytes.
std::string serialize_checkpoint(const Checkpoint& c);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a of the serialized bytes, as 16 hex digits.
std::string checkpoint_hash(const Checkpoint& c);

nlohmann::json hyperparams_to_json(const Hyperparams& hp);
/// Missing keys keep the defaults of `base`.
Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base = {});

} // namespace tmf
