#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tmf/cells.hpp"
#include "tmf/rng.hpp"
#include "tmf/tmvector.hpp"

namespace tmf {

/// Which branches feed the dense head.
enum class Architecture { text_only, numeric_only, fused };

Architecture parse_architecture(std::string_view name);
std::string_view to_string(Architecture a);
/// Tw alone -> text_only, no Tw -> numeric_only, otherwise fused.
Architecture architecture_for(FeatureSet fs);

struct ModelConfig {
    Architecture architecture = Architecture::numeric_only;
    CellKind cell = CellKind::indrnn;
    int layers = 2;
    int hidden = 14;
    int text_dim = 0;     // word-vector width k
    int numeric_dim = 0;  // numeric feature width
    CellOptions options;

    bool has_text() const { return architecture != Architecture::numeric_only; }
    bool has_numeric() const { return architecture != Architecture::text_only; }
    /// Concatenated final hidden width seen by the head.
    int head_dim() const { return (has_text() ? hidden : 0) + (has_numeric() ? hidden : 0); }
    void validate() const;
};

/// All learnable blocks; doubles as the gradient container.
struct Weights {
    std::vector<CellParams> text;     // one per stacked layer
    std::vector<CellParams> numeric;
    Eigen::MatrixXd head_w;           // 1 x head_dim
    Eigen::MatrixXd head_b;           // 1 x 1

    /// Visits blocks in a fixed order with stable names like "text/0/W_f".
    void for_each(const std::function<void(const std::string&, Eigen::MatrixXd&)>& fn);
    void for_each(const std::function<void(const std::string&, const Eigen::MatrixXd&)>& fn) const;
    double squared_norm() const;
};

struct Model {
    ModelConfig config;
    Weights weights;

    static Model zeros(const ModelConfig& cfg);
    static Model random(const ModelConfig& cfg, Rng& rng);
};

/// Inverted-dropout masks for one sample; empty vectors mean "no dropout".
struct DropoutMasks {
    std::vector<Eigen::VectorXd> text_recurrent;
    std::vector<Eigen::VectorXd> numeric_recurrent;
    Eigen::VectorXd head;
};

DropoutMasks draw_masks(const ModelConfig& cfg, double dropout, double recurrent_dropout, Rng& rng);

/// Input sequences for each branch. Text rows are timesteps; the numeric
/// branch sees lookback rows followed by the sample's own vector.
Sequence text_steps(const TmVector& s);
Sequence numeric_steps(const TmVector& s);

/// Throws std::invalid_argument when the sample cannot feed the model.
void check_sample(const ModelConfig& cfg, const TmVector& s);

struct ForwardTrace {
    std::vector<LayerTrace> text;
    std::vector<LayerTrace> numeric;
    Eigen::VectorXd features;  // concatenated final hidden states
    Eigen::VectorXd head_in;   // after dropout
    double logit = 0;
    double probability = 0.5;
};

ForwardTrace forward_trace(const Model& m, const TmVector& s, const DropoutMasks* masks = nullptr);

/// Probability of class 1. Dropout is applied only when masks are given.
double forward_model(const Model& m, const TmVector& s, const DropoutMasks* masks = nullptr);

struct BatchGradients {
    double loss = 0;  // mean BCE + (l2/2)|w|^2
    Weights grad;
    int correct = 0;  // predictions at threshold 0.5 matching labels
};

/// Exact gradients of the batch objective. `masks` is empty (no dropout) or one per sample.
BatchGradients batch_gradients(const Model& m, std::span<const TmVector* const> batch,
                               std::span<const DropoutMasks> masks, double l2);

/// Objective value only; used by finite-difference checks.
double batch_loss(const Model& m, std::span<const TmVector* const> batch, std::span<const DropoutMasks> masks,
                  double l2);

} // namespace tmf
