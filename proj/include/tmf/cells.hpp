#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tmf/rng.hpp"

namespace tmf {

enum class CellKind { indrnn, lstm, gru, simple };
enum class Activation { sigmoid, tanh, relu };

CellKind parse_cell_kind(std::string_view name);
std::string_view to_string(CellKind k);
Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

struct CellOptions {
    /// Hidden activation of IndRNN and simple cells (LSTM/GRU gates are fixed).
    Activation activation = Activation::sigmoid;
    /// IndRNN adds its bias after the activation; GRU candidate uses sigmoid.
    bool paper_literal = false;
};

// Block indices inside CellParams::blocks. Matrices are N x M (input),
// N x N (recurrent); vectors are stored as N x 1.
namespace indrnn_block { enum : int { W, u, b, count }; }
namespace lstm_block { enum : int { W_f, W_i, W_g, W_o, U_f, U_i, U_g, U_o, b_f, b_i, b_g, b_o, count }; }
namespace gru_block { enum : int { W_z, W_r, W_h, U_z, U_r, U_h, b_z, b_r, b_h, count }; }
namespace simple_block { enum : int { W_hx, W_hh, b_h, count }; }

std::span<const std::string_view> block_names(CellKind kind);

struct CellParams {
    CellKind kind = CellKind::indrnn;
    int input_dim = 0;
    int hidden_dim = 0;
    std::vector<Eigen::MatrixXd> blocks;

    static CellParams zeros(CellKind kind, int input_dim, int hidden_dim);
    /// Input/recurrent matrices uniform in +-sqrt(6/(fan_in+fan_out)), IndRNN
    /// recurrent weights uniform in [0, 1], biases zero.
    static CellParams random(CellKind kind, int input_dim, int hidden_dim, Rng& rng);

    Eigen::MatrixXd& operator[](int i) { return blocks[static_cast<std::size_t>(i)]; }
    const Eigen::MatrixXd& operator[](int i) const { return blocks[static_cast<std::size_t>(i)]; }

    /// Throws std::invalid_argument if block shapes disagree with (M, N) or values are non-finite.
    void validate() const;
};

using Sequence = std::vector<Eigen::VectorXd>;

/// Everything one layer's forward pass records for BPTT.
struct LayerTrace {
    CellKind kind = CellKind::indrnn;
    Sequence x;      // inputs
    Sequence h;      // h[0] = h0, h[t+1] = output at step t
    Sequence q;      // LSTM cell state, q[0] = q0
    Sequence act;    // IndRNN/simple activation outputs; LSTM g; GRU candidate
    Sequence gate1;  // LSTM f, GRU z
    Sequence gate2;  // LSTM i, GRU r
    Sequence gate3;  // LSTM o
    Eigen::VectorXd mask;  // recurrent dropout mask (empty = none)
};

/// Runs one layer. `mask`, when non-empty, multiplies h_{t-1} on every
/// recurrent path (inverted dropout scaling is the caller's job).
LayerTrace forward_layer(const CellParams& p, const Sequence& xs, const Eigen::VectorXd& h0,
                         const Eigen::VectorXd& q0, const Eigen::VectorXd& mask, const CellOptions& opts);

/// Accumulates parameter gradients into `grad` (same shapes as `p`) given
/// dL/dh_t for every output step, and returns dL/dx_t. Gradients with
/// respect to h0/q0 are written to `dh0`/`dq0` when non-null.
Sequence backward_layer(const CellParams& p, const LayerTrace& trace, const Sequence& dh_out,
                        const CellOptions& opts, CellParams& grad, Eigen::VectorXd* dh0 = nullptr,
                        Eigen::VectorXd* dq0 = nullptr);

/// h_t = act(W x_t + u * h_{t-1} + b), per neuron. Returns h_1..h_T.
Sequence indrnn_forward(const CellParams& p, const Sequence& xs, const Eigen::VectorXd& h0,
                        const CellOptions& opts = {});

struct LstmOutput {
    Sequence h;  // h_1..h_T
    Sequence q;  // q_1..q_T
};
LstmOutput lstm_forward(const CellParams& p, const Sequence& xs, const Eigen::VectorXd& h0,
                        const Eigen::VectorXd& q0);

/// h_t = (1 - z) h_{t-1} + z h'_t with tanh candidate (sigmoid when paper_literal).
Sequence gru_forward(const CellParams& p, const Sequence& xs, const Eigen::VectorXd& h0,
                     const CellOptions& opts = {});

Sequence simple_forward(const CellParams& p, const Sequence& xs, const Eigen::VectorXd& h0,
                        const CellOptions& opts = {});

} // namespace tmf
