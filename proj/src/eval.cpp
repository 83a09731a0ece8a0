#include "tmf/eval.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace tmf {
namespace {

double ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

ConfusionCounts confusion(std::span<const int> preds, std::span<const int> labels) {
    if (preds.size() != labels.size())
        throw std::invalid_argument("confusion: " + std::to_string(preds.size()) + " predictions vs " +
                                    std::to_string(labels.size()) + " labels");
    if (preds.empty()) throw std::invalid_argument("confusion: no samples");
    ConfusionCounts c;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int p = preds[i], y = labels[i];
        if ((p != 0 && p != 1) || (y != 0 && y != 1))
            throw std::invalid_argument("confusion: values must be 0 or 1 (index " + std::to_string(i) + ")");
        if (p == 1) (y == 1 ? c.tp : c.fp)++;
        else (y == 0 ? c.tn : c.fn)++;
    }
    return c;
}

MetricReport metrics(const ConfusionCounts& c) {
    if (c.tp < 0 || c.tn < 0 || c.fp < 0 || c.fn < 0) throw std::invalid_argument("metrics: negative count");
    if (c.total() == 0) throw std::invalid_argument("metrics: no samples");
    MetricReport r;
    r.counts = c;
    r.accuracy = ratio(c.tp + c.tn, c.total());
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    const double s = r.precision + r.recall;
    r.f1 = s == 0 ? 0.0 : 2 * r.precision * r.recall / s;
    return r;
}

std::vector<DailyPrediction> daily_aggregate(std::span<const std::pair<Date, int>> per_tweet,
                                             const std::map<Date, int>& actual_by_day) {
    std::map<Date, DailyPrediction> days;
    for (const auto& [day, actual] : actual_by_day) {
        if (actual != 0 && actual != 1)
            throw std::invalid_argument("daily_aggregate: actual label for " + day.iso() + " must be 0 or 1");
        DailyPrediction d;
        d.day = day;
        d.actual = actual;
        days.emplace(day, d);
    }
    for (const auto& [day, pred] : per_tweet) {
        auto it = days.find(day);
        if (it == days.end()) throw std::invalid_argument("daily_aggregate: no actual label for " + day.iso());
        if (pred == 1) ++it->second.pos_count;
        else if (pred == 0) ++it->second.neg_count;
        else throw std::invalid_argument("daily_aggregate: prediction must be 0 or 1 on " + day.iso());
    }
    std::vector<DailyPrediction> out;
    out.reserve(days.size());
    for (auto& [day, d] : days) {
        d.decision = d.pos_count > d.neg_count ? DailyDecision::pos : DailyDecision::neg;
        out.push_back(d);
    }
    return out;
}

MetricReport daily_metrics(std::span<const DailyPrediction> days) {
    if (days.empty()) throw std::invalid_argument("daily_metrics: no days");
    std::vector<int> preds, actual;
    preds.reserve(days.size());
    actual.reserve(days.size());
    for (const auto& d : days) {
        preds.push_back(d.decision == DailyDecision::pos ? 1 : 0);
        actual.push_back(d.actual);
    }
    return metrics(confusion(preds, actual));
}

nlohmann::json metrics_to_json(const MetricReport& r) {
    return {{"accuracy", r.accuracy},
            {"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"tp", r.counts.tp},
            {"tn", r.counts.tn},
            {"fp", r.counts.fp},
            {"fn", r.counts.fn}};
}

nlohmann::json daily_to_json(std::span<const DailyPrediction> days) {
    auto arr = nlohmann::json::array();
    for (const auto& d : days)
        arr.push_back({{"day", d.day.iso()},
                       {"pos", d.pos_count},
                       {"neg", d.neg_count},
                       {"decision", d.decision == DailyDecision::pos ? "Pos" : "Neg"},
                       {"actual", d.actual}});
    return arr;
}

std::string confusion_csv(const MetricReport& tweet_level, const MetricReport& daily_level) {
    std::ostringstream out;
    out << "level,tp,tn,fp,fn,accuracy,precision,recall,f1\n";
    for (const auto& [name, r] : {std::pair{"tweet", &tweet_level}, std::pair{"daily", &daily_level}}) {
        out << name << ',' << r->counts.tp << ',' << r->counts.tn << ',' << r->counts.fp << ',' << r->counts.fn
            << ',' << fmt(r->accuracy) << ',' << fmt(r->precision) << ',' << fmt(r->recall) << ','
            << fmt(r->f1) << '\n';
    }
    return out.str();
}

std::string sweep_csv_header() {
    return "batch_size,steps_per_epoch,epochs,train_loss,train_accuracy,test_loss,test_accuracy,checkpoint_hash\n";
}

std::string sweep_csv_row(const SweepRow& r) {
    std::ostringstream out;
    out << r.batch_size << ',' << r.steps_per_epoch << ',' << r.epochs << ',' << fmt(r.train_loss) << ','
        << fmt(r.train_accuracy) << ',' << fmt(r.test_loss) << ',' << fmt(r.test_accuracy) << ','
        << r.checkpoint_hash << '\n';
    return out.str();
}

} // namespace tmf
