#include "tmf/dataset_io.hpp"

#include <fstream>
#include <stdexcept>

#include "binary_io.hpp"
#include "hashing.hpp"

namespace tmf {
namespace {

constexpr char kMagic[8] = {'T', 'M', 'F', 'D', 'S', 'E', 'T', '\0'};

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

} // namespace

std::uint64_t DatasetLayout::schema_hash() const {
    const std::string desc = "tmf-dataset/v" + std::to_string(kDatasetFormatVersion) +
                             ";features=" + features.str() + ";order=M,So,Se,Sc" +
                             ";numeric_width=" + std::to_string(numeric_width) +
                             ";lookback=" + std::to_string(lookback) + ";max_len=" + std::to_string(max_len) +
                             ";k=" + std::to_string(embed_dim);
    return detail::fnv1a(desc);
}

DatasetLayout layout_of(const Dataset& ds) {
    return {ds.features, ds.numeric_width, ds.lookback, ds.max_len, ds.embed_dim};
}

void write_samples(const std::filesystem::path& path, const DatasetLayout& layout,
                   const std::vector<TmVector>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    detail::LeWriter w(out);
    w.raw(kMagic, sizeof kMagic);
    w.u32(kDatasetFormatVersion);
    w.u64(layout.schema_hash());
    w.u32(layout.features.bits());
    w.u32(static_cast<std::uint32_t>(layout.numeric_width));
    w.u32(static_cast<std::uint32_t>(layout.lookback));
    w.u32(static_cast<std::uint32_t>(layout.max_len));
    w.u32(static_cast<std::uint32_t>(layout.embed_dim));
    w.u64(samples.size());
    const bool text = layout.features.has_text();
    for (const auto& s : samples) {
        if (static_cast<int>(s.numeric.size()) != layout.numeric_width ||
            s.numeric_lookback.rows() != layout.lookback ||
            (layout.lookback > 0 && s.numeric_lookback.cols() != layout.numeric_width) ||
            text != s.text.has_value() ||
            (text && (s.text->rows() != layout.max_len || s.text->cols() != layout.embed_dim)))
            throw std::invalid_argument("sample " + s.tweet_id + " does not match the dataset layout");
        w.u8(static_cast<std::uint8_t>(s.label));
        w.i32(s.day.days());
        w.i64(s.timestamp.seconds());
        w.str(s.ticker);
        w.str(s.author);
        w.str(s.tweet_id);
        for (double x : s.numeric) w.f64(x);
        for (Eigen::Index r = 0; r < s.numeric_lookback.rows(); ++r)
            for (Eigen::Index c = 0; c < s.numeric_lookback.cols(); ++c) w.f64(s.numeric_lookback(r, c));
        if (text)
            for (Eigen::Index r = 0; r < s.text->rows(); ++r)
                for (Eigen::Index c = 0; c < s.text->cols(); ++c) w.f64((*s.text)(r, c));
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

SampleFile read_samples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    detail::LeReader r(in);
    char magic[8];
    r.raw(magic, sizeof magic);
    if (!std::equal(magic, magic + 8, kMagic)) throw std::runtime_error(path.string() + ": not a dataset file");
    if (const auto v = r.u32(); v != kDatasetFormatVersion)
        throw std::runtime_error(path.string() + ": unsupported dataset format version " + std::to_string(v));
    const auto hash = r.u64();
    SampleFile f;
    f.layout.features = FeatureSet(r.u32());
    f.layout.numeric_width = static_cast<int>(r.u32());
    f.layout.lookback = static_cast<int>(r.u32());
    f.layout.max_len = static_cast<int>(r.u32());
    f.layout.embed_dim = static_cast<int>(r.u32());
    if (hash != f.layout.schema_hash()) throw std::runtime_error(path.string() + ": schema hash mismatch");
    const auto count = r.u64();
    const bool text = f.layout.features.has_text();
    f.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        TmVector s;
        s.label = r.u8();
        s.day = Date{r.i32()};
        s.timestamp = Timestamp{r.i64()};
        s.ticker = r.str();
        s.author = r.str();
        s.tweet_id = r.str();
        s.numeric.resize(static_cast<std::size_t>(f.layout.numeric_width));
        for (auto& x : s.numeric) x = r.f64();
        s.numeric_lookback.resize(f.layout.lookback, f.layout.numeric_width);
        for (Eigen::Index rr = 0; rr < s.numeric_lookback.rows(); ++rr)
            for (Eigen::Index c = 0; c < s.numeric_lookback.cols(); ++c) s.numeric_lookback(rr, c) = r.f64();
        if (text) {
            Eigen::MatrixXd m(f.layout.max_len, f.layout.embed_dim);
            for (Eigen::Index rr = 0; rr < m.rows(); ++rr)
                for (Eigen::Index c = 0; c < m.cols(); ++c) m(rr, c) = r.f64();
            s.text = std::move(m);
        }
        f.samples.push_back(std::move(s));
    }
    return f;
}

nlohmann::json normalizer_to_json(const NormalizerState& s) {
    return {{"schema_version", kSchemaVersion}, {"min", s.min}, {"max", s.max}};
}

NormalizerState normalizer_from_json(const nlohmann::json& j) {
    NormalizerState s{j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>()};
    if (s.min.size() != s.max.size()) throw std::runtime_error("normalizer min/max width mismatch");
    return s;
}

nlohmann::json report_to_json(const Dataset& ds, const std::string& ticker) {
    const auto& r = ds.report;
    nlohmann::json mismatches = nlohmann::json::array();
    for (const auto& m : r.label_mismatches)
        mismatches.push_back({{"date", m.date.iso()}, {"golden", m.golden}, {"computed", m.computed}});
    return {{"schema_version", kSchemaVersion},
            {"ticker", ticker},
            {"features", ds.features.str()},
            {"numeric_width", ds.numeric_width},
            {"lookback", ds.lookback},
            {"max_len", ds.max_len},
            {"embed_dim", ds.embed_dim},
            {"tweets_total", r.tweets_total},
            {"tweets_other_ticker", r.tweets_other_ticker},
            {"tweets_before_first_bar", r.tweets_before_first_bar},
            {"tweets_unlabeled_day", r.tweets_unlabeled_day},
            {"tweets_in_warmup", r.tweets_in_warmup},
            {"non_trading_day_joins", r.non_trading_day_joins},
            {"samples", r.samples},
            {"train", r.train},
            {"test", r.test},
            {"label_mismatches", mismatches},
            {"leakage_audit_hash", r.leakage_audit_hash}};
}

void write_dataset_dir(const std::filesystem::path& dir, const Dataset& ds, const std::string& ticker) {
    std::filesystem::create_directories(dir);
    const auto layout = layout_of(ds);
    write_samples(dir / "train.bin", layout, ds.train);
    write_samples(dir / "test.bin", layout, ds.test);
    write_text_file(dir / "normalizer.json", normalizer_to_json(ds.normalizer).dump(2) + "\n");
    write_text_file(dir / "build_report.json", report_to_json(ds, ticker).dump(2) + "\n");
}

} // namespace tmf
