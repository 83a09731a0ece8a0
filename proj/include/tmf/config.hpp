#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "tmf/indicators.hpp"
#include "tmf/labeling.hpp"
#include "tmf/text.hpp"
#include "tmf/tmvector.hpp"
#include "tmf/train.hpp"

namespace tmf {

struct RunPaths {
    std::filesystem::path ohlcv;
    std::filesystem::path tweets;
    std::optional<std::filesystem::path> embedding;
    std::optional<std::filesystem::path> lexicon;
    std::optional<std::filesystem::path> stopwords;
};

/// Everything a run depends on. Relative paths are resolved against the
/// directory holding the config file.
struct RunConfig {
    std::string ticker;
    RunPaths paths;
    FeatureSet feature_set = FeatureSet::full();
    IndicatorConfig indicators;
    PriceField label_field = PriceField::close;
    Hyperparams hyperparams;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "out";
    int embedding_dim = 300;
    EmbeddingFallback embedding_fallback = EmbeddingFallback::hashed;
    int lookback = 0;
    std::optional<int> max_len;
    double train_fraction = 0.8;

    /// Throws std::invalid_argument on bad values or missing input files.
    void validate() const;
};

/// Unknown keys are rejected. `base_dir` anchors relative paths.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json run_config_to_json(const RunConfig& c);

} // namespace tmf
