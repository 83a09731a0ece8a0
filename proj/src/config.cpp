#include "tmf/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "tmf/checkpoint.hpp"

namespace tmf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
    for (const auto& [key, v] : j.items())
        if (!known.count(key)) throw std::invalid_argument("unknown key '" + key + "' in " + where);
}

fs::path resolve(const fs::path& base, const json& v) {
    fs::path p = v.get<std::string>();
    return p.is_absolute() ? p : base / p;
}

BollingerScalar parse_bb_scalar(const std::string& s) {
    if (s == "percent_b") return BollingerScalar::percent_b;
    if (s == "bandwidth") return BollingerScalar::bandwidth;
    if (s == "middle") return BollingerScalar::middle;
    throw std::invalid_argument("unknown bb_scalar '" + s + "'");
}

std::string bb_scalar_name(BollingerScalar s) {
    switch (s) {
    case BollingerScalar::percent_b: return "percent_b";
    case BollingerScalar::bandwidth: return "bandwidth";
    case BollingerScalar::middle: return "middle";
    }
    return "?";
}

IndicatorConfig parse_indicators(const json& j) {
    reject_unknown(j, {"ma_period", "rsi_period", "macd_fast", "macd_slow", "cci_period", "bb_period",
                       "bb_sigma_mult", "bb_scalar"},
                   "indicators");
    IndicatorConfig c;
    c.ma_period = j.value("ma_period", c.ma_period);
    c.rsi_period = j.value("rsi_period", c.rsi_period);
    c.macd_fast = j.value("macd_fast", c.macd_fast);
    c.macd_slow = j.value("macd_slow", c.macd_slow);
    c.cci_period = j.value("cci_period", c.cci_period);
    c.bb_period = j.value("bb_period", c.bb_period);
    c.bb_sigma_mult = j.value("bb_sigma_mult", c.bb_sigma_mult);
    if (j.contains("bb_scalar")) c.bb_scalar_mode = parse_bb_scalar(j.at("bb_scalar").get<std::string>());
    c.validate();
    return c;
}

} // namespace

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
    reject_unknown(j, {"ticker", "paths", "feature_set", "indicators", "label_field", "hyperparams", "seed",
                       "output_dir", "embedding", "lookback", "max_len", "train_fraction"},
                   "config");
    RunConfig c;
    c.ticker = j.at("ticker").get<std::string>();

    const auto& p = j.at("paths");
    reject_unknown(p, {"ohlcv", "tweets", "embedding", "lexicon", "stopwords"}, "paths");
    c.paths.ohlcv = resolve(base_dir, p.at("ohlcv"));
    c.paths.tweets = resolve(base_dir, p.at("tweets"));
    if (p.contains("embedding")) c.paths.embedding = resolve(base_dir, p.at("embedding"));
    if (p.contains("lexicon")) c.paths.lexicon = resolve(base_dir, p.at("lexicon"));
    if (p.contains("stopwords")) c.paths.stopwords = resolve(base_dir, p.at("stopwords"));

    if (j.contains("feature_set")) c.feature_set = FeatureSet::parse(j.at("feature_set").get<std::string>());
    if (j.contains("indicators")) c.indicators = parse_indicators(j.at("indicators"));
    if (j.contains("label_field")) c.label_field = parse_price_field(j.at("label_field").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("hyperparams")) {
        if (j.at("hyperparams").contains("seed"))
            throw std::invalid_argument("set the seed at the top level, not inside hyperparams");
        c.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    }
    c.hyperparams.seed = c.seed;
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir"));
    else c.output_dir = base_dir / "out";
    if (j.contains("embedding")) {
        const auto& e = j.at("embedding");
        reject_unknown(e, {"dim", "fallback"}, "embedding");
        c.embedding_dim = e.value("dim", c.embedding_dim);
        if (e.contains("fallback")) {
            const auto f = e.at("fallback").get<std::string>();
            if (f == "zero") c.embedding_fallback = EmbeddingFallback::zero;
            else if (f == "hashed") c.embedding_fallback = EmbeddingFallback::hashed;
            else throw std::invalid_argument("unknown embedding fallback '" + f + "'");
        }
    }
    c.lookback = j.value("lookback", c.lookback);
    if (j.contains("max_len")) c.max_len = j.at("max_len").get<int>();
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.validate();
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return parse_run_config(j, base);
}

void RunConfig::validate() const {
    if (ticker.empty()) throw std::invalid_argument("ticker must not be empty");
    const auto need = [](const fs::path& p, const char* what) {
        if (!fs::is_regular_file(p)) throw std::invalid_argument(std::string(what) + " not found: " + p.string());
    };
    need(paths.ohlcv, "ohlcv file");
    need(paths.tweets, "tweets file");
    if (paths.embedding) need(*paths.embedding, "embedding file");
    if (paths.lexicon) need(*paths.lexicon, "lexicon file");
    if (paths.stopwords) need(*paths.stopwords, "stopwords file");
    indicators.validate();
    hyperparams.validate();
    if (embedding_dim < 1) throw std::invalid_argument("embedding dim must be >= 1");
    if (lookback < 0) throw std::invalid_argument("lookback must be >= 0");
    if (lookback > 0 && !feature_set.has(FeatureBlock::M))
        throw std::invalid_argument("lookback needs the M block");
    if (max_len && *max_len < 1) throw std::invalid_argument("max_len must be >= 1");
    if (!(train_fraction > 0 && train_fraction < 1)) throw std::invalid_argument("train_fraction must be in (0, 1)");
}

json run_config_to_json(const RunConfig& c) {
    json paths = {{"ohlcv", c.paths.ohlcv.string()}, {"tweets", c.paths.tweets.string()}};
    if (c.paths.embedding) paths["embedding"] = c.paths.embedding->string();
    if (c.paths.lexicon) paths["lexicon"] = c.paths.lexicon->string();
    if (c.paths.stopwords) paths["stopwords"] = c.paths.stopwords->string();
    auto hp = hyperparams_to_json(c.hyperparams);
    hp.erase("seed");
    json j = {{"ticker", c.ticker},
              {"paths", paths},
              {"feature_set", c.feature_set.str()},
              {"indicators",
               {{"ma_period", c.indicators.ma_period},
                {"rsi_period", c.indicators.rsi_period},
                {"macd_fast", c.indicators.macd_fast},
                {"macd_slow", c.indicators.macd_slow},
                {"cci_period", c.indicators.cci_period},
                {"bb_period", c.indicators.bb_period},
                {"bb_sigma_mult", c.indicators.bb_sigma_mult},
                {"bb_scalar", bb_scalar_name(c.indicators.bb_scalar_mode)}}},
              {"label_field", to_string(c.label_field)},
              {"hyperparams", hp},
              {"seed", c.seed},
              {"output_dir", c.output_dir.string()},
              {"embedding",
               {{"dim", c.embedding_dim},
                {"fallback", c.embedding_fallback == EmbeddingFallback::zero ? "zero" : "hashed"}}},
              {"lookback", c.lookback},
              {"train_fraction", c.train_fraction}};
    if (c.max_len) j["max_len"] = *c.max_len;
    return j;
}

} // namespace tmf
