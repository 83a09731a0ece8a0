#include <filesystem>

#include <gtest/gtest.h>

#include "../support/generators.hpp"
#include "tmf/checkpoint.hpp"
#include "tmf/errors.hpp"
#include "tmf/train.hpp"

using namespace tmf;

namespace {

DatasetLayout numeric_layout() {
    DatasetLayout l;
    l.features = FeatureSet::parse("M,So,Se");
    l.numeric_width = 14;
    return l;
}

Hyperparams quick(int epochs = 3) {
    Hyperparams hp;
    hp.epochs = epochs;
    hp.batch_size = 32;
    hp.hidden = 5;
    return hp;
}

} // namespace

TEST(Train, ZeroLearningRateKeepsInitialWeights) {
    const auto c = gen::linear_corpus(1, 200);
    auto hp = quick();
    hp.learning_rate = 0;
    const auto ckpt = train(numeric_layout(), hp, c.train, c.test);
    Rng rng(hp.seed);
    const auto init = Model::random(model_config_for(numeric_layout(), hp), rng);
    std::vector<Eigen::MatrixXd> a, b;
    ckpt.model.weights.for_each([&](const std::string&, const Eigen::MatrixXd& m) { a.push_back(m); });
    init.weights.for_each([&](const std::string&, const Eigen::MatrixXd& m) { b.push_back(m); });
    EXPECT_EQ(a, b);
    EXPECT_EQ(ckpt.log.size(), 3u);
}

TEST(Train, SameSeedSameCheckpoint) {
    const auto c = gen::linear_corpus(2, 200);
    for (CellKind k : {CellKind::indrnn, CellKind::lstm, CellKind::gru}) {
        auto hp = quick();
        hp.cell = k;
        const auto a = train(numeric_layout(), hp, c.train, c.test);
        const auto b = train(numeric_layout(), hp, c.train, c.test);
        EXPECT_EQ(serialize_checkpoint(a), serialize_checkpoint(b));
        EXPECT_EQ(checkpoint_hash(a), checkpoint_hash(b));
        hp.seed = 43;
        EXPECT_NE(checkpoint_hash(train(numeric_layout(), hp, c.train, c.test)), checkpoint_hash(a));
    }
}

TEST(Train, SgdAlsoSupported) {
    const auto c = gen::linear_corpus(3, 200);
    auto hp = quick(2);
    hp.optimizer = Optimizer::sgd;
    const auto ckpt = train(numeric_layout(), hp, c.train, c.test);
    EXPECT_EQ(ckpt.hyperparams.optimizer, Optimizer::sgd);
    EXPECT_EQ(ckpt.log.size(), 2u);
}

TEST(Train, DivergenceNamesEpoch) {
    const auto c = gen::linear_corpus(4, 100);
    auto hp = quick(5);
    hp.optimizer = Optimizer::sgd;
    hp.learning_rate = 1e300;
    try {
        train(numeric_layout(), hp, c.train, c.test);
        FAIL() << "expected DivergedError";
    } catch (const DivergedError& e) {
        EXPECT_GE(e.epoch(), 1);
    }
}

TEST(Train, RejectsBadInput) {
    const auto c = gen::linear_corpus(5, 100);
    auto hp = quick();
    hp.batch_size = 0;
    EXPECT_THROW(train(numeric_layout(), hp, c.train, c.test), std::invalid_argument);
    EXPECT_THROW(train(numeric_layout(), quick(), {}, c.test), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsByteIdentical) {
    const auto c = gen::linear_corpus(6, 200);
    const auto ckpt = train(numeric_layout(), quick(), c.train, c.test);
    const auto path = std::filesystem::temp_directory_path() / "tmf_ckpt_test.json";
    save_checkpoint(path, ckpt);
    const auto back = load_checkpoint(path);
    EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(ckpt));
    for (const auto& s : c.test) {
        const auto p = predict(ckpt, s), q = predict(back, s);
        EXPECT_EQ(p.probability, q.probability);
        EXPECT_EQ(p.label, q.label);
    }
    std::filesystem::remove(path);

    auto j = checkpoint_to_json(ckpt);
    j["format_version"] = 99;
    EXPECT_THROW(checkpoint_from_json(j), std::runtime_error);
    j = checkpoint_to_json(ckpt);
    j["weights"][0]["rows"] = 1000;
    EXPECT_THROW(checkpoint_from_json(j), std::runtime_error);
}

TEST(Predict, ThresholdAndPurity) {
    ModelConfig cfg;
    cfg.numeric_dim = 14;
    const auto m = Model::zeros(cfg);
    const auto c = gen::linear_corpus(7, 50);
    const auto p = predict(m, c.test[0]);
    EXPECT_EQ(p.probability, 0.5);
    EXPECT_EQ(p.label, 1);
    EXPECT_EQ(predict(m, c.test[0]).probability, p.probability);
}

TEST(Train, StepsPerEpochAcrossSweep) {
    std::size_t prev = SIZE_MAX;
    for (int b : kBatchSweep) {
        const auto s = steps_per_epoch(5000, b);
        EXPECT_LE(s, prev);
        prev = s;
    }
    EXPECT_EQ(steps_per_epoch(5000, 128), 40u);
    EXPECT_EQ(steps_per_epoch(5000, 4096), 2u);
    EXPECT_EQ(steps_per_epoch(10, 4096), 1u);
}

TEST(Hyperparams, JsonRoundTripAndDefaults) {
    const Hyperparams d;
    EXPECT_EQ(d.epochs, 100);
    EXPECT_EQ(d.layers, 2);
    EXPECT_EQ(d.hidden, 14);
    EXPECT_EQ(d.learning_rate, 0.001);
    EXPECT_EQ(d.activation, Activation::sigmoid);
    EXPECT_EQ(d.recurrent_dropout, 0.5);
    EXPECT_EQ(d.dropout, 0.5);
    EXPECT_EQ(d.l2, 0.0001);
    EXPECT_EQ(d.batch_size, 128);
    auto hp = quick();
    hp.cell = CellKind::gru;
    const auto back = hyperparams_from_json(hyperparams_to_json(hp));
    EXPECT_EQ(hyperparams_to_json(back), hyperparams_to_json(hp));
    EXPECT_THROW(hyperparams_from_json({{"epoch", 3}}), std::invalid_argument);
}
