#include "tmf/cells.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tmf {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::array<std::string_view, indrnn_block::count> kIndrnnNames{"W", "u", "b"};
constexpr std::array<std::string_view, lstm_block::count> kLstmNames{
    "W_f", "W_i", "W_g", "W_o", "U_f", "U_i", "U_g", "U_o", "b_f", "b_i", "b_g", "b_o"};
constexpr std::array<std::string_view, gru_block::count> kGruNames{"W_z", "W_r", "W_h", "U_z", "U_r",
                                                                   "U_h", "b_z", "b_r", "b_h"};
constexpr std::array<std::string_view, simple_block::count> kSimpleNames{"W_hx", "W_hh", "b_h"};

enum class Shape { input, recurrent, vector };

Shape shape_of(CellKind kind, int block) {
    switch (kind) {
    case CellKind::indrnn: return block == indrnn_block::W ? Shape::input : Shape::vector;
    case CellKind::simple:
        return block == simple_block::W_hx ? Shape::input
               : block == simple_block::W_hh ? Shape::recurrent
                                             : Shape::vector;
    case CellKind::lstm:
        return block < lstm_block::U_f ? Shape::input : block < lstm_block::b_f ? Shape::recurrent : Shape::vector;
    case CellKind::gru:
        return block < gru_block::U_z ? Shape::input : block < gru_block::b_z ? Shape::recurrent : Shape::vector;
    }
    return Shape::vector;
}

VectorXd sigmoid(const VectorXd& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

VectorXd activate(const VectorXd& a, Activation act) {
    switch (act) {
    case Activation::sigmoid: return sigmoid(a);
    case Activation::tanh: return a.array().tanh().matrix();
    case Activation::relu: return a.cwiseMax(0.0);
    }
    return a;
}

// Derivative expressed through the activation's output y.
VectorXd activation_slope(const VectorXd& y, Activation act) {
    switch (act) {
    case Activation::sigmoid: return (y.array() * (1.0 - y.array())).matrix();
    case Activation::tanh: return (1.0 - y.array().square()).matrix();
    case Activation::relu: return (y.array() > 0.0).cast<double>().matrix();
    }
    return VectorXd::Ones(y.size());
}

Activation candidate_activation(const CellOptions& opts) {
    return opts.paper_literal ? Activation::sigmoid : Activation::tanh;
}

void check_dim(const VectorXd& v, int n, const char* what) {
    if (v.size() != n)
        throw std::invalid_argument(std::string(what) + " has size " + std::to_string(v.size()) + ", expected " +
                                    std::to_string(n));
}

} // namespace

CellKind parse_cell_kind(std::string_view name) {
    if (name == "indrnn") return CellKind::indrnn;
    if (name == "lstm") return CellKind::lstm;
    if (name == "gru") return CellKind::gru;
    if (name == "simple") return CellKind::simple;
    throw std::invalid_argument("unknown cell kind '" + std::string(name) + "'");
}

std::string_view to_string(CellKind k) {
    switch (k) {
    case CellKind::indrnn: return "indrnn";
    case CellKind::lstm: return "lstm";
    case CellKind::gru: return "gru";
    case CellKind::simple: return "simple";
    }
    return "indrnn";
}

Activation parse_activation(std::string_view name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    }
    return "sigmoid";
}

std::span<const std::string_view> block_names(CellKind kind) {
    switch (kind) {
    case CellKind::indrnn: return kIndrnnNames;
    case CellKind::lstm: return kLstmNames;
    case CellKind::gru: return kGruNames;
    case CellKind::simple: return kSimpleNames;
    }
    return {};
}

CellParams CellParams::zeros(CellKind kind, int input_dim, int hidden_dim) {
    if (input_dim < 1 || hidden_dim < 1) throw std::invalid_argument("cell dimensions must be >= 1");
    CellParams p{kind, input_dim, hidden_dim, {}};
    const auto n = static_cast<int>(block_names(kind).size());
    for (int b = 0; b < n; ++b) {
        switch (shape_of(kind, b)) {
        case Shape::input: p.blocks.push_back(MatrixXd::Zero(hidden_dim, input_dim)); break;
        case Shape::recurrent: p.blocks.push_back(MatrixXd::Zero(hidden_dim, hidden_dim)); break;
        case Shape::vector: p.blocks.push_back(MatrixXd::Zero(hidden_dim, 1)); break;
        }
    }
    return p;
}

CellParams CellParams::random(CellKind kind, int input_dim, int hidden_dim, Rng& rng) {
    CellParams p = zeros(kind, input_dim, hidden_dim);
    for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b) {
        auto& m = p[b];
        const Shape shape = shape_of(kind, b);
        if (kind == CellKind::indrnn && b == indrnn_block::u) {
            for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(0.0, 1.0);
            continue;
        }
        if (shape == Shape::vector) continue;
        const double s = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-s, s);
    }
    return p;
}

void CellParams::validate() const {
    const auto expected = block_names(kind).size();
    if (blocks.size() != expected) throw std::invalid_argument("wrong number of weight blocks for cell");
    for (int b = 0; b < static_cast<int>(expected); ++b) {
        const auto& m = (*this)[b];
        Eigen::Index rows = hidden_dim, cols = 1;
        switch (shape_of(kind, b)) {
        case Shape::input: cols = input_dim; break;
        case Shape::recurrent: cols = hidden_dim; break;
        case Shape::vector: break;
        }
        if (m.rows() != rows || m.cols() != cols)
            throw std::invalid_argument("weight block " + std::string(block_names(kind)[static_cast<std::size_t>(b)]) +
                                        " has wrong shape");
        if (!m.allFinite()) throw std::invalid_argument("non-finite weights in cell");
    }
}

LayerTrace forward_layer(const CellParams& p, const Sequence& xs, const VectorXd& h0, const VectorXd& q0,
                         const VectorXd& mask, const CellOptions& opts) {
    const int n = p.hidden_dim;
    check_dim(h0, n, "h0");
    if (p.kind == CellKind::lstm) check_dim(q0, n, "q0");
    if (mask.size() != 0) check_dim(mask, n, "recurrent mask");
    for (const auto& x : xs) check_dim(x, p.input_dim, "input step");

    LayerTrace tr;
    tr.kind = p.kind;
    tr.x = xs;
    tr.mask = mask;
    tr.h.reserve(xs.size() + 1);
    tr.h.push_back(h0);
    if (p.kind == CellKind::lstm) tr.q.push_back(q0);

    for (const auto& x : xs) {
        const VectorXd& h_prev = tr.h.back();
        const VectorXd hm = mask.size() ? VectorXd(h_prev.cwiseProduct(mask)) : h_prev;
        switch (p.kind) {
        case CellKind::indrnn: {
            using namespace indrnn_block;
            VectorXd a = p[W] * x + p[u].col(0).cwiseProduct(hm);
            if (!opts.paper_literal) a += p[b].col(0);
            VectorXd y = activate(a, opts.activation);
            tr.h.push_back(opts.paper_literal ? VectorXd(y + p[b].col(0)) : y);
            tr.act.push_back(std::move(y));
            break;
        }
        case CellKind::simple: {
            using namespace simple_block;
            VectorXd y = activate(p[W_hx] * x + p[W_hh] * hm + p[b_h].col(0), opts.activation);
            tr.h.push_back(y);
            tr.act.push_back(std::move(y));
            break;
        }
        case CellKind::lstm: {
            using namespace lstm_block;
            VectorXd f = sigmoid(p[W_f] * x + p[U_f] * hm + p[b_f].col(0));
            VectorXd i = sigmoid(p[W_i] * x + p[U_i] * hm + p[b_i].col(0));
            VectorXd g = (p[W_g] * x + p[U_g] * hm + p[b_g].col(0)).array().tanh().matrix();
            VectorXd o = sigmoid(p[W_o] * x + p[U_o] * hm + p[b_o].col(0));
            VectorXd q = f.cwiseProduct(tr.q.back()) + i.cwiseProduct(g);
            tr.h.push_back(o.cwiseProduct(q.array().tanh().matrix()));
            tr.q.push_back(std::move(q));
            tr.gate1.push_back(std::move(f));
            tr.gate2.push_back(std::move(i));
            tr.act.push_back(std::move(g));
            tr.gate3.push_back(std::move(o));
            break;
        }
        case CellKind::gru: {
            using namespace gru_block;
            VectorXd z = sigmoid(p[W_z] * x + p[U_z] * hm + p[b_z].col(0));
            VectorXd r = sigmoid(p[W_r] * x + p[U_r] * hm + p[b_r].col(0));
            VectorXd c = activate(p[W_h] * x + p[U_h] * r.cwiseProduct(hm) + p[b_h].col(0),
                                  candidate_activation(opts));
            tr.h.push_back((1.0 - z.array()).matrix().cwiseProduct(h_prev) + z.cwiseProduct(c));
            tr.gate1.push_back(std::move(z));
            tr.gate2.push_back(std::move(r));
            tr.act.push_back(std::move(c));
            break;
        }
        }
    }
    return tr;
}

Sequence backward_layer(const CellParams& p, const LayerTrace& tr, const Sequence& dh_out, const CellOptions& opts,
                        CellParams& grad, VectorXd* dh0, VectorXd* dq0) {
    const auto steps = tr.x.size();
    if (dh_out.size() != steps) throw std::invalid_argument("output gradient length mismatch");
    const int n = p.hidden_dim;
    Sequence dxs(steps);
    VectorXd dh_next = VectorXd::Zero(n);
    VectorXd dq_next = VectorXd::Zero(n);
    const bool masked = tr.mask.size() != 0;

    for (std::size_t k = steps; k-- > 0;) {
        const VectorXd dh = dh_out[k] + dh_next;
        const VectorXd& x = tr.x[k];
        const VectorXd& h_prev = tr.h[k];
        const VectorXd hm = masked ? VectorXd(h_prev.cwiseProduct(tr.mask)) : h_prev;
        VectorXd dhm;
        VectorXd dh_prev_direct = VectorXd::Zero(n);

        switch (p.kind) {
        case CellKind::indrnn: {
            using namespace indrnn_block;
            const VectorXd da = dh.cwiseProduct(activation_slope(tr.act[k], opts.activation));
            grad[W] += da * x.transpose();
            grad[u].col(0) += da.cwiseProduct(hm);
            grad[b].col(0) += opts.paper_literal ? dh : da;
            dxs[k] = p[W].transpose() * da;
            dhm = da.cwiseProduct(p[u].col(0));
            break;
        }
        case CellKind::simple: {
            using namespace simple_block;
            const VectorXd da = dh.cwiseProduct(activation_slope(tr.act[k], opts.activation));
            grad[W_hx] += da * x.transpose();
            grad[W_hh] += da * hm.transpose();
            grad[b_h].col(0) += da;
            dxs[k] = p[W_hx].transpose() * da;
            dhm = p[W_hh].transpose() * da;
            break;
        }
        case CellKind::lstm: {
            using namespace lstm_block;
            const VectorXd& f = tr.gate1[k];
            const VectorXd& i = tr.gate2[k];
            const VectorXd& g = tr.act[k];
            const VectorXd& o = tr.gate3[k];
            const VectorXd tq = tr.q[k + 1].array().tanh().matrix();
            const VectorXd d_o = dh.cwiseProduct(tq);
            const VectorXd dq = dq_next + dh.cwiseProduct(o).cwiseProduct((1.0 - tq.array().square()).matrix());
            const VectorXd da_f = dq.cwiseProduct(tr.q[k]).cwiseProduct(activation_slope(f, Activation::sigmoid));
            const VectorXd da_i = dq.cwiseProduct(g).cwiseProduct(activation_slope(i, Activation::sigmoid));
            const VectorXd da_g = dq.cwiseProduct(i).cwiseProduct(activation_slope(g, Activation::tanh));
            const VectorXd da_o = d_o.cwiseProduct(activation_slope(o, Activation::sigmoid));
            dq_next = dq.cwiseProduct(f);
            const std::array<std::pair<int, const VectorXd*>, 4> gates{
                {{0, &da_f}, {1, &da_i}, {2, &da_g}, {3, &da_o}}};
            dxs[k] = VectorXd::Zero(p.input_dim);
            dhm = VectorXd::Zero(n);
            for (const auto& [gi, da] : gates) {
                grad[W_f + gi] += *da * x.transpose();
                grad[U_f + gi] += *da * hm.transpose();
                grad[b_f + gi].col(0) += *da;
                dxs[k] += p[W_f + gi].transpose() * *da;
                dhm += p[U_f + gi].transpose() * *da;
            }
            break;
        }
        case CellKind::gru: {
            using namespace gru_block;
            const VectorXd& z = tr.gate1[k];
            const VectorXd& r = tr.gate2[k];
            const VectorXd& c = tr.act[k];
            const VectorXd dz = dh.cwiseProduct(c - h_prev);
            const VectorXd da_c = dh.cwiseProduct(z).cwiseProduct(activation_slope(c, candidate_activation(opts)));
            dh_prev_direct = dh.cwiseProduct((1.0 - z.array()).matrix());
            const VectorXd rhm = r.cwiseProduct(hm);
            grad[W_h] += da_c * x.transpose();
            grad[U_h] += da_c * rhm.transpose();
            grad[b_h].col(0) += da_c;
            const VectorXd d_rhm = p[U_h].transpose() * da_c;
            const VectorXd da_r = d_rhm.cwiseProduct(hm).cwiseProduct(activation_slope(r, Activation::sigmoid));
            const VectorXd da_z = dz.cwiseProduct(activation_slope(z, Activation::sigmoid));
            grad[W_z] += da_z * x.transpose();
            grad[U_z] += da_z * hm.transpose();
            grad[b_z].col(0) += da_z;
            grad[W_r] += da_r * x.transpose();
            grad[U_r] += da_r * hm.transpose();
            grad[b_r].col(0) += da_r;
            dhm = d_rhm.cwiseProduct(r) + p[U_z].transpose() * da_z + p[U_r].transpose() * da_r;
            dxs[k] = p[W_z].transpose() * da_z + p[W_r].transpose() * da_r + p[W_h].transpose() * da_c;
            break;
        }
        }
        dh_next = (masked ? VectorXd(dhm.cwiseProduct(tr.mask)) : dhm) + dh_prev_direct;
    }
    if (dh0) *dh0 = dh_next;
    if (dq0) *dq0 = dq_next;
    return dxs;
}

namespace {

Sequence outputs(const LayerTrace& tr) { return Sequence(tr.h.begin() + 1, tr.h.end()); }

void require_kind(const CellParams& p, CellKind k) {
    if (p.kind != k) throw std::invalid_argument("cell kind mismatch: expected " + std::string(to_string(k)));
}

} // namespace

Sequence indrnn_forward(const CellParams& p, const Sequence& xs, const VectorXd& h0, const CellOptions& opts) {
    require_kind(p, CellKind::indrnn);
    return outputs(forward_layer(p, xs, h0, VectorXd{}, VectorXd{}, opts));
}

LstmOutput lstm_forward(const CellParams& p, const Sequence& xs, const VectorXd& h0, const VectorXd& q0) {
    require_kind(p, CellKind::lstm);
    const auto tr = forward_layer(p, xs, h0, q0, VectorXd{}, CellOptions{});
    return {outputs(tr), Sequence(tr.q.begin() + 1, tr.q.end())};
}

Sequence gru_forward(const CellParams& p, const Sequence& xs, const VectorXd& h0, const CellOptions& opts) {
    require_kind(p, CellKind::gru);
    return outputs(forward_layer(p, xs, h0, VectorXd{}, VectorXd{}, opts));
}

Sequence simple_forward(const CellParams& p, const Sequence& xs, const VectorXd& h0, const CellOptions& opts) {
    require_kind(p, CellKind::simple);
    return outputs(forward_layer(p, xs, h0, VectorXd{}, VectorXd{}, opts));
}

} // namespace tmf
