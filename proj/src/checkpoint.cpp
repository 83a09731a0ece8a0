#include "tmf/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hashing.hpp"
#include "tmf/base64.hpp"

namespace tmf {
namespace {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
    return {{"architecture", to_string(c.architecture)},
            {"cell", to_string(c.cell)},
            {"layers", c.layers},
            {"hidden", c.hidden},
            {"text_dim", c.text_dim},
            {"numeric_dim", c.numeric_dim},
            {"activation", to_string(c.options.activation)},
            {"paper_literal", c.options.paper_literal}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.architecture = parse_architecture(j.at("architecture").get<std::string>());
    c.cell = parse_cell_kind(j.at("cell").get<std::string>());
    c.layers = j.at("layers").get<int>();
    c.hidden = j.at("hidden").get<int>();
    c.text_dim = j.at("text_dim").get<int>();
    c.numeric_dim = j.at("numeric_dim").get<int>();
    c.options.activation = parse_activation(j.at("activation").get<std::string>());
    c.options.paper_literal = j.at("paper_literal").get<bool>();
    c.validate();
    return c;
}

json layout_to_json(const DatasetLayout& l) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(l.schema_hash()));
    return {{"features", l.features.str()}, {"numeric_width", l.numeric_width}, {"lookback", l.lookback},
            {"max_len", l.max_len},         {"embed_dim", l.embed_dim},         {"schema_hash", hex}};
}

DatasetLayout layout_from_json(const json& j) {
    DatasetLayout l;
    l.features = FeatureSet::parse(j.at("features").get<std::string>());
    l.numeric_width = j.at("numeric_width").get<int>();
    l.lookback = j.at("lookback").get<int>();
    l.max_len = j.at("max_len").get<int>();
    l.embed_dim = j.at("embed_dim").get<int>();
    return l;
}

} // namespace

json hyperparams_to_json(const Hyperparams& hp) {
    return {{"epochs", hp.epochs},
            {"layers", hp.layers},
            {"hidden", hp.hidden},
            {"learning_rate", hp.learning_rate},
            {"activation", to_string(hp.activation)},
            {"recurrent_dropout", hp.recurrent_dropout},
            {"dropout", hp.dropout},
            {"l2", hp.l2},
            {"batch_size", hp.batch_size},
            {"seed", hp.seed},
            {"cell", to_string(hp.cell)},
            {"optimizer", to_string(hp.optimizer)},
            {"paper_literal", hp.paper_literal}};
}

Hyperparams hyperparams_from_json(const json& j, Hyperparams hp) {
    if (!j.is_object()) throw std::invalid_argument("hyperparams must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "epochs") hp.epochs = v.get<int>();
        else if (key == "layers") hp.layers = v.get<int>();
        else if (key == "hidden") hp.hidden = v.get<int>();
        else if (key == "learning_rate") hp.learning_rate = v.get<double>();
        else if (key == "activation") hp.activation = parse_activation(v.get<std::string>());
        else if (key == "recurrent_dropout") hp.recurrent_dropout = v.get<double>();
        else if (key == "dropout") hp.dropout = v.get<double>();
        else if (key == "l2") hp.l2 = v.get<double>();
        else if (key == "batch_size") hp.batch_size = v.get<int>();
        else if (key == "seed") hp.seed = v.get<std::uint64_t>();
        else if (key == "cell") hp.cell = parse_cell_kind(v.get<std::string>());
        else if (key == "optimizer") hp.optimizer = parse_optimizer(v.get<std::string>());
        else if (key == "paper_literal") hp.paper_literal = v.get<bool>();
        else throw std::invalid_argument("unknown hyperparameter '" + key + "'");
    }
    hp.validate();
    return hp;
}

json checkpoint_to_json(const Checkpoint& c) {
    json log = json::array();
    for (const auto& e : c.log)
        log.push_back({{"epoch", e.epoch},
                       {"loss", e.loss},
                       {"accuracy", e.accuracy},
                       {"valid_loss", e.valid_loss},
                       {"valid_accuracy", e.valid_accuracy}});
    json weights = json::array();
    c.model.weights.for_each([&](const std::string& name, const Eigen::MatrixXd& m) {
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(m.size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index col = 0; col < m.cols(); ++col) flat.push_back(m(r, col));
        weights.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", encode_f64(flat)}});
    });
    return {{"format_version", c.format_version},
            {"schema_version", kSchemaVersion},
            {"byte_order", "little-endian float64, row-major"},
            {"model", config_to_json(c.model.config)},
            {"hyperparams", hyperparams_to_json(c.hyperparams)},
            {"seed", c.hyperparams.seed},
            {"layout", layout_to_json(c.layout)},
            {"training_log", log},
            {"weights", weights}};
}

Checkpoint checkpoint_from_json(const json& j) {
    Checkpoint c;
    c.format_version = j.at("format_version").get<int>();
    if (c.format_version != kCheckpointFormatVersion)
        throw std::runtime_error("unsupported checkpoint format version " + std::to_string(c.format_version));
    c.hyperparams = hyperparams_from_json(j.at("hyperparams"));
    c.layout = layout_from_json(j.at("layout"));
    c.model = Model::zeros(config_from_json(j.at("model")));
    for (const auto& e : j.at("training_log"))
        c.log.push_back({e.at("epoch").get<int>(), e.at("loss").get<double>(), e.at("accuracy").get<double>(),
                         e.at("valid_loss").get<double>(), e.at("valid_accuracy").get<double>()});

    const auto& blocks = j.at("weights");
    std::size_t k = 0;
    c.model.weights.for_each([&](const std::string& name, Eigen::MatrixXd& m) {
        if (k >= blocks.size()) throw std::runtime_error("checkpoint is missing weight block " + name);
        const auto& b = blocks[k++];
        if (b.at("name").get<std::string>() != name || b.at("rows").get<Eigen::Index>() != m.rows() ||
            b.at("cols").get<Eigen::Index>() != m.cols())
            throw std::runtime_error("checkpoint weight block mismatch at " + name);
        const auto flat = decode_f64(b.at("data").get<std::string>());
        if (static_cast<Eigen::Index>(flat.size()) != m.size())
            throw std::runtime_error("checkpoint weight block " + name + " has wrong length");
        std::size_t i = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index col = 0; col < m.cols(); ++col) m(r, col) = flat[i++];
    });
    if (k != blocks.size()) throw std::runtime_error("checkpoint has unexpected extra weight blocks");
    for (const auto& stack : {&c.model.weights.text, &c.model.weights.numeric})
        for (const auto& cell : *stack) cell.validate();
    return c;
}

std::string serialize_checkpoint(const Checkpoint& c) { return checkpoint_to_json(c).dump(1) + "\n"; }

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << serialize_checkpoint(c);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return checkpoint_from_json(json::parse(in));
}

std::string checkpoint_hash(const Checkpoint& c) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(serialize_checkpoint(c))));
    return hex;
}

} // namespace tmf
