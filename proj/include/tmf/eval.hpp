#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tmf/date.hpp"

namespace tmf {

/// Class 1 (price up) is the positive class.
struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + tn + fp + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricReport {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    ConfusionCounts counts;
};

/// Throws std::invalid_argument on length mismatch, empty input, or labels outside {0, 1}.
ConfusionCounts confusion(std::span<const int> preds, std::span<const int> labels);

/// A zero denominator yields 0. Throws std::invalid_argument when total is 0.
MetricReport metrics(const ConfusionCounts& c);

enum class DailyDecision { neg, pos };

struct DailyPrediction {
    Date day;
    std::int64_t pos_count = 0;
    std::int64_t neg_count = 0;
    DailyDecision decision = DailyDecision::neg;
    int actual = 0;
};

/// Majority vote per day; ties and days without tweets are Neg. Every day in
/// `actual_by_day` gets a row, in date order. Throws std::invalid_argument
/// naming the day when a prediction's day has no actual label.
std::vector<DailyPrediction> daily_aggregate(std::span<const std::pair<Date, int>> per_tweet,
                                             const std::map<Date, int>& actual_by_day);

/// Throws std::invalid_argument when empty.
MetricReport daily_metrics(std::span<const DailyPrediction> days);

nlohmann::json metrics_to_json(const MetricReport& r);
nlohmann::json daily_to_json(std::span<const DailyPrediction> days);

/// `level,tp,tn,fp,fn,accuracy,precision,recall,f1` rows.
std::string confusion_csv(const MetricReport& tweet_level, const MetricReport& daily_level);

struct SweepRow {
    int batch_size = 0;
    std::size_t steps_per_epoch = 0;
    int epochs = 0;
    double train_loss = 0;
    double train_accuracy = 0;
    double test_loss = 0;
    double test_accuracy = 0;
    std::string checkpoint_hash;
};

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& r);

} // namespace tmf
