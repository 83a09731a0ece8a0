#include "tmf/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tmf/errors.hpp"

namespace tmf {
namespace {

std::vector<Eigen::MatrixXd*> block_ptrs(Weights& w) {
    std::vector<Eigen::MatrixXd*> out;
    w.for_each([&](const std::string&, Eigen::MatrixXd& m) { out.push_back(&m); });
    return out;
}

class AdamState {
public:
    explicit AdamState(const ModelConfig& cfg) : m_(Model::zeros(cfg).weights), v_(m_) {}

    void step(Weights& params, Weights& grads, double lr) {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-7;
        ++t_;
        const double c1 = 1.0 - std::pow(b1, t_);
        const double c2 = 1.0 - std::pow(b2, t_);
        auto p = block_ptrs(params), g = block_ptrs(grads), m = block_ptrs(m_), v = block_ptrs(v_);
        for (std::size_t k = 0; k < p.size(); ++k) {
            *m[k] = b1 * *m[k] + (1 - b1) * *g[k];
            *v[k] = b2 * *v[k] + (1 - b2) * g[k]->cwiseProduct(*g[k]);
            p[k]->array() -= lr * (m[k]->array() / c1) / ((v[k]->array() / c2).sqrt() + eps);
        }
    }

private:
    Weights m_, v_;
    int t_ = 0;
};

void sgd_step(Weights& params, Weights& grads, double lr) {
    auto p = block_ptrs(params), g = block_ptrs(grads);
    for (std::size_t k = 0; k < p.size(); ++k) *p[k] -= lr * *g[k];
}

} // namespace

Optimizer parse_optimizer(std::string_view name) {
    if (name == "adam") return Optimizer::adam;
    if (name == "sgd") return Optimizer::sgd;
    throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

std::string_view to_string(Optimizer o) { return o == Optimizer::adam ? "adam" : "sgd"; }

void Hyperparams::validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (layers < 1) throw std::invalid_argument("layers must be >= 1");
    if (hidden < 1) throw std::invalid_argument("hidden units must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
    if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning rate must be >= 0");
    if (!(l2 >= 0)) throw std::invalid_argument("l2 must be >= 0");
    if (!(dropout >= 0 && dropout < 1)) throw std::invalid_argument("dropout must lie in [0, 1)");
    if (!(recurrent_dropout >= 0 && recurrent_dropout < 1))
        throw std::invalid_argument("recurrent dropout must lie in [0, 1)");
}

ModelConfig model_config_for(const DatasetLayout& layout, const Hyperparams& hp) {
    ModelConfig cfg;
    cfg.architecture = architecture_for(layout.features);
    cfg.cell = hp.cell;
    cfg.layers = hp.layers;
    cfg.hidden = hp.hidden;
    cfg.text_dim = cfg.has_text() ? layout.embed_dim : 0;
    cfg.numeric_dim = cfg.has_numeric() ? layout.numeric_width : 0;
    cfg.options = {hp.activation, hp.paper_literal};
    return cfg;
}

std::size_t steps_per_epoch(std::size_t samples, int batch_size) {
    const auto b = static_cast<std::size_t>(batch_size);
    return (samples + b - 1) / b;
}

std::pair<double, double> evaluate_loss_accuracy(const Model& model, std::span<const TmVector> samples) {
    if (samples.empty()) return {0.0, 0.0};
    double loss = 0;
    std::size_t correct = 0;
    for (const auto& s : samples) {
        const auto tr = forward_trace(model, s);
        const double z = tr.logit;
        loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - s.label * z;
        if ((tr.probability >= 0.5 ? 1 : 0) == s.label) ++correct;
    }
    const auto n = static_cast<double>(samples.size());
    return {loss / n, static_cast<double>(correct) / n};
}

Checkpoint train(const DatasetLayout& layout, const Hyperparams& hp, std::span<const TmVector> train_set,
                 std::span<const TmVector> valid_set, const EpochCallback& on_epoch) {
    hp.validate();
    Rng init_rng(hp.seed);
    Model model = Model::random(model_config_for(layout, hp), init_rng);
    return train_from(std::move(model), layout, hp, train_set, valid_set, on_epoch);
}

Checkpoint train_from(Model model, const DatasetLayout& layout, const Hyperparams& hp,
                      std::span<const TmVector> train_set, std::span<const TmVector> valid_set,
                      const EpochCallback& on_epoch) {
    hp.validate();
    if (train_set.empty() || valid_set.empty()) throw std::invalid_argument("training and validation sets must be non-empty");
    for (const auto& s : train_set) check_sample(model.config, s);
    for (const auto& s : valid_set) check_sample(model.config, s);

    // Separate stream from the initializer so both are reproducible on their own.
    Rng rng(hp.seed ^ 0x5deece66dULL);
    AdamState adam(model.config);
    Checkpoint ck;
    ck.hyperparams = hp;
    ck.layout = layout;

    const std::size_t n = train_set.size();
    const auto batch = static_cast<std::size_t>(hp.batch_size);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<const TmVector*> members;
    std::vector<DropoutMasks> masks;

    for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        double loss_sum = 0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(n, start + batch);
            members.clear();
            masks.clear();
            for (std::size_t i = start; i < end; ++i) {
                members.push_back(&train_set[order[i]]);
                masks.push_back(draw_masks(model.config, hp.dropout, hp.recurrent_dropout, rng));
            }
            auto g = batch_gradients(model, members, masks, hp.l2);
            if (!std::isfinite(g.loss)) throw DivergedError(epoch);
            loss_sum += g.loss * static_cast<double>(end - start);
            correct += static_cast<std::size_t>(g.correct);
            if (hp.optimizer == Optimizer::adam)
                adam.step(model.weights, g.grad, hp.learning_rate);
            else
                sgd_step(model.weights, g.grad, hp.learning_rate);
        }
        EpochLog log;
        log.epoch = epoch;
        log.loss = loss_sum / static_cast<double>(n);
        log.accuracy = static_cast<double>(correct) / static_cast<double>(n);
        std::tie(log.valid_loss, log.valid_accuracy) = evaluate_loss_accuracy(model, valid_set);
        if (!std::isfinite(log.loss) || !std::isfinite(log.valid_loss)) throw DivergedError(epoch);
        ck.log.push_back(log);
        if (on_epoch) on_epoch(log);
    }
    ck.model = std::move(model);
    return ck;
}

Prediction predict(const Model& model, const TmVector& sample) {
    const double p = forward_model(model, sample);
    return {p >= 0.5 ? 1 : 0, p};
}

Prediction predict(const Checkpoint& c, const TmVector& sample) { return predict(c.model, sample); }

} // namespace tmf
