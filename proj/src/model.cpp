#include "tmf/model.hpp"

#include <cmath>
#include <stdexcept>

namespace tmf {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<CellParams> make_stack(CellKind kind, int input_dim, int hidden, int layers, Rng* rng) {
    std::vector<CellParams> stack;
    for (int l = 0; l < layers; ++l) {
        const int in = l == 0 ? input_dim : hidden;
        stack.push_back(rng ? CellParams::random(kind, in, hidden, *rng) : CellParams::zeros(kind, in, hidden));
    }
    return stack;
}

std::vector<LayerTrace> run_stack(const std::vector<CellParams>& stack, Sequence xs,
                                  const std::vector<VectorXd>* masks, const CellOptions& opts) {
    std::vector<LayerTrace> traces;
    traces.reserve(stack.size());
    for (std::size_t l = 0; l < stack.size(); ++l) {
        const int n = stack[l].hidden_dim;
        const VectorXd none;
        const VectorXd& mask = masks && l < masks->size() ? (*masks)[l] : none;
        traces.push_back(forward_layer(stack[l], xs, VectorXd::Zero(n), VectorXd::Zero(n), mask, opts));
        xs.assign(traces.back().h.begin() + 1, traces.back().h.end());
    }
    return traces;
}

void backprop_stack(const std::vector<CellParams>& stack, const std::vector<LayerTrace>& traces,
                    const VectorXd& d_final, const CellOptions& opts, std::vector<CellParams>& grads) {
    const auto steps = traces.back().x.size();
    Sequence dh(steps, VectorXd::Zero(d_final.size()));
    dh.back() = d_final;
    for (std::size_t l = stack.size(); l-- > 0;) dh = backward_layer(stack[l], traces[l], dh, opts, grads[l]);
}

} // namespace

Architecture parse_architecture(std::string_view name) {
    if (name == "text_only") return Architecture::text_only;
    if (name == "numeric_only") return Architecture::numeric_only;
    if (name == "fused") return Architecture::fused;
    throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

std::string_view to_string(Architecture a) {
    switch (a) {
    case Architecture::text_only: return "text_only";
    case Architecture::numeric_only: return "numeric_only";
    case Architecture::fused: return "fused";
    }
    return "fused";
}

Architecture architecture_for(FeatureSet fs) {
    if (!fs.has_text()) return Architecture::numeric_only;
    return fs.numeric_width() == 0 ? Architecture::text_only : Architecture::fused;
}

void ModelConfig::validate() const {
    if (layers < 1 || hidden < 1) throw std::invalid_argument("layers and hidden units must be >= 1");
    if (has_text() && text_dim < 1) throw std::invalid_argument("text branch needs a word-vector width >= 1");
    if (has_numeric() && numeric_dim < 1) throw std::invalid_argument("numeric branch needs a feature width >= 1");
}

void Weights::for_each(const std::function<void(const std::string&, MatrixXd&)>& fn) {
    auto visit = [&](const char* branch, std::vector<CellParams>& stack) {
        for (std::size_t l = 0; l < stack.size(); ++l) {
            const auto names = block_names(stack[l].kind);
            for (std::size_t b = 0; b < stack[l].blocks.size(); ++b)
                fn(std::string(branch) + "/" + std::to_string(l) + "/" + std::string(names[b]), stack[l].blocks[b]);
        }
    };
    visit("text", text);
    visit("numeric", numeric);
    fn("head/W_z", head_w);
    fn("head/b_z", head_b);
}

void Weights::for_each(const std::function<void(const std::string&, const MatrixXd&)>& fn) const {
    const_cast<Weights*>(this)->for_each([&](const std::string& name, MatrixXd& m) { fn(name, m); });
}

double Weights::squared_norm() const {
    double s = 0;
    for_each([&](const std::string&, const MatrixXd& m) { s += m.squaredNorm(); });
    return s;
}

Model Model::zeros(const ModelConfig& cfg) {
    cfg.validate();
    Model m{cfg, {}};
    if (cfg.has_text()) m.weights.text = make_stack(cfg.cell, cfg.text_dim, cfg.hidden, cfg.layers, nullptr);
    if (cfg.has_numeric()) m.weights.numeric = make_stack(cfg.cell, cfg.numeric_dim, cfg.hidden, cfg.layers, nullptr);
    m.weights.head_w = MatrixXd::Zero(1, cfg.head_dim());
    m.weights.head_b = MatrixXd::Zero(1, 1);
    return m;
}

Model Model::random(const ModelConfig& cfg, Rng& rng) {
    cfg.validate();
    Model m{cfg, {}};
    if (cfg.has_text()) m.weights.text = make_stack(cfg.cell, cfg.text_dim, cfg.hidden, cfg.layers, &rng);
    if (cfg.has_numeric()) m.weights.numeric = make_stack(cfg.cell, cfg.numeric_dim, cfg.hidden, cfg.layers, &rng);
    const double s = std::sqrt(6.0 / (cfg.head_dim() + 1.0));
    m.weights.head_w = MatrixXd(1, cfg.head_dim());
    for (Eigen::Index c = 0; c < m.weights.head_w.cols(); ++c) m.weights.head_w(0, c) = rng.uniform(-s, s);
    m.weights.head_b = MatrixXd::Zero(1, 1);
    return m;
}

DropoutMasks draw_masks(const ModelConfig& cfg, double dropout, double recurrent_dropout, Rng& rng) {
    auto mask = [&rng](int n, double rate) {
        VectorXd m(n);
        for (int i = 0; i < n; ++i) m(i) = rng.bernoulli(rate) ? 0.0 : 1.0 / (1.0 - rate);
        return m;
    };
    DropoutMasks out;
    if (recurrent_dropout > 0) {
        if (cfg.has_text())
            for (int l = 0; l < cfg.layers; ++l) out.text_recurrent.push_back(mask(cfg.hidden, recurrent_dropout));
        if (cfg.has_numeric())
            for (int l = 0; l < cfg.layers; ++l) out.numeric_recurrent.push_back(mask(cfg.hidden, recurrent_dropout));
    }
    if (dropout > 0) out.head = mask(cfg.head_dim(), dropout);
    return out;
}

Sequence text_steps(const TmVector& s) {
    Sequence xs;
    if (!s.text) return xs;
    xs.reserve(static_cast<std::size_t>(s.text->rows()));
    for (Eigen::Index r = 0; r < s.text->rows(); ++r) xs.emplace_back(s.text->row(r).transpose());
    return xs;
}

Sequence numeric_steps(const TmVector& s) {
    Sequence xs;
    xs.reserve(static_cast<std::size_t>(s.numeric_lookback.rows()) + 1);
    for (Eigen::Index r = 0; r < s.numeric_lookback.rows(); ++r) xs.emplace_back(s.numeric_lookback.row(r).transpose());
    xs.emplace_back(Eigen::Map<const VectorXd>(s.numeric.data(), static_cast<Eigen::Index>(s.numeric.size())));
    return xs;
}

void check_sample(const ModelConfig& cfg, const TmVector& s) {
    if (cfg.has_text()) {
        if (!s.text) throw std::invalid_argument("model expects a text matrix but the sample has none");
        if (s.text->cols() != cfg.text_dim || s.text->rows() < 1)
            throw std::invalid_argument("sample word-vector width does not match the model");
    } else if (s.text) {
        throw std::invalid_argument("sample carries text but the model has no text branch");
    }
    if (cfg.has_numeric()) {
        if (static_cast<int>(s.numeric.size()) != cfg.numeric_dim)
            throw std::invalid_argument("sample numeric width " + std::to_string(s.numeric.size()) +
                                        " does not match model width " + std::to_string(cfg.numeric_dim));
        if (s.numeric_lookback.rows() > 0 && s.numeric_lookback.cols() != cfg.numeric_dim)
            throw std::invalid_argument("lookback width does not match the model");
    } else if (!s.numeric.empty()) {
        throw std::invalid_argument("sample carries numeric features but the model has no numeric branch");
    }
}

ForwardTrace forward_trace(const Model& m, const TmVector& s, const DropoutMasks* masks) {
    const auto& cfg = m.config;
    check_sample(cfg, s);
    ForwardTrace tr;
    tr.features = VectorXd(cfg.head_dim());
    Eigen::Index off = 0;
    if (cfg.has_text()) {
        tr.text = run_stack(m.weights.text, text_steps(s), masks ? &masks->text_recurrent : nullptr, cfg.options);
        tr.features.segment(off, cfg.hidden) = tr.text.back().h.back();
        off += cfg.hidden;
    }
    if (cfg.has_numeric()) {
        tr.numeric =
            run_stack(m.weights.numeric, numeric_steps(s), masks ? &masks->numeric_recurrent : nullptr, cfg.options);
        tr.features.segment(off, cfg.hidden) = tr.numeric.back().h.back();
    }
    tr.head_in = masks && masks->head.size() ? VectorXd(tr.features.cwiseProduct(masks->head)) : tr.features;
    tr.logit = (m.weights.head_w * tr.head_in)(0) + m.weights.head_b(0, 0);
    tr.probability = sigmoid(tr.logit);
    return tr;
}

double forward_model(const Model& m, const TmVector& s, const DropoutMasks* masks) {
    return forward_trace(m, s, masks).probability;
}

BatchGradients batch_gradients(const Model& m, std::span<const TmVector* const> batch,
                               std::span<const DropoutMasks> masks, double l2) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    if (!masks.empty() && masks.size() != batch.size()) throw std::invalid_argument("one dropout mask set per sample");
    const auto& cfg = m.config;
    BatchGradients out;
    out.grad = Model::zeros(cfg).weights;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double bce = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const TmVector& s = *batch[i];
        const DropoutMasks* mk = masks.empty() ? nullptr : &masks[i];
        const ForwardTrace tr = forward_trace(m, s, mk);
        const double y = s.label;
        bce += softplus(tr.logit) - y * tr.logit;
        if ((tr.probability >= 0.5 ? 1 : 0) == s.label) ++out.correct;

        const double dz = (tr.probability - y) * inv_b;
        out.grad.head_w += dz * tr.head_in.transpose();
        out.grad.head_b(0, 0) += dz;
        VectorXd d_features = dz * m.weights.head_w.row(0).transpose();
        if (mk && mk->head.size()) d_features = d_features.cwiseProduct(mk->head);

        Eigen::Index off = 0;
        if (cfg.has_text()) {
            backprop_stack(m.weights.text, tr.text, d_features.segment(off, cfg.hidden), cfg.options, out.grad.text);
            off += cfg.hidden;
        }
        if (cfg.has_numeric())
            backprop_stack(m.weights.numeric, tr.numeric, d_features.segment(off, cfg.hidden), cfg.options,
                           out.grad.numeric);
    }
    out.loss = bce * inv_b + 0.5 * l2 * m.weights.squared_norm();
    if (l2 != 0) {
        // Both visits walk blocks in the same order.
        std::vector<const MatrixXd*> params;
        m.weights.for_each([&](const std::string&, const MatrixXd& w) { params.push_back(&w); });
        std::size_t k = 0;
        out.grad.for_each([&](const std::string&, MatrixXd& g) { g += l2 * *params[k++]; });
    }
    return out;
}

double batch_loss(const Model& m, std::span<const TmVector* const> batch, std::span<const DropoutMasks> masks,
                  double l2) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    double bce = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double z = forward_trace(m, *batch[i], masks.empty() ? nullptr : &masks[i]).logit;
        bce += softplus(z) - batch[i]->label * z;
    }
    return bce / static_cast<double>(batch.size()) + 0.5 * l2 * m.weights.squared_norm();
}

} // namespace tmf
