#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tmf/dataset_io.hpp"
#include "tmf/model.hpp"

namespace tmf {

enum class Optimizer { adam, sgd };

Optimizer parse_optimizer(std::string_view name);
std::string_view to_string(Optimizer o);

inline constexpr int kBatchSweep[] = {128, 256, 512, 1024, 2048, 4096};

struct Hyperparams {
    int epochs = 100;
    int layers = 2;
    int hidden = 14;
    double learning_rate = 0.001;
    Activation activation = Activation::sigmoid;
    double recurrent_dropout = 0.5;
    double dropout = 0.5;
    double l2 = 0.0001;
    int batch_size = 128;
    std::uint64_t seed = 42;
    CellKind cell = CellKind::indrnn;
    Optimizer optimizer = Optimizer::adam;
    bool paper_literal = false;

    void validate() const;
};

struct EpochLog {
    int epoch = 0;
    double loss = 0;
    double accuracy = 0;
    double valid_loss = 0;
    double valid_accuracy = 0;
};

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
    int format_version = kCheckpointFormatVersion;
    Model model;
    Hyperparams hyperparams;
    DatasetLayout layout;
    std::vector<EpochLog> log;
};

ModelConfig model_config_for(const DatasetLayout& layout, const Hyperparams& hp);

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch training from a seeded initialization. Each epoch reshuffles,
/// draws fresh dropout masks per sample, and logs loss/accuracy on both sets.
/// Throws DivergedError when the loss turns non-finite.
Checkpoint train(const DatasetLayout& layout, const Hyperparams& hp, std::span<const TmVector> train_set,
                 std::span<const TmVector> valid_set, const EpochCallback& on_epoch = {});

/// Same, starting from the given weights.
Checkpoint train_from(Model initial, const DatasetLayout& layout, const Hyperparams& hp,
                      std::span<const TmVector> train_set, std::span<const TmVector> valid_set,
                      const EpochCallback& on_epoch = {});

struct Prediction {
    int label = 1;
    double probability = 0.5;
};

/// Class 1 iff probability >= 0.5; dropout off.
Prediction predict(const Model& model, const TmVector& sample);
Prediction predict(const Checkpoint& c, const TmVector& sample);

/// Mean BCE (no regularizer) and accuracy without dropout.
std::pair<double, double> evaluate_loss_accuracy(const Model& model, std::span<const TmVector> samples);

std::size_t steps_per_epoch(std::size_t samples, int batch_size);

} // namespace tmf
