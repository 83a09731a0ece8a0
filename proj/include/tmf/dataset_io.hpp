#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "tmf/dataset.hpp"

namespace tmf {

inline constexpr std::uint32_t kDatasetFormatVersion = 1;
inline constexpr int kSchemaVersion = 1;

/// Shape information carried in every dataset file header.
struct DatasetLayout {
    FeatureSet features = FeatureSet::full();
    int numeric_width = 0;
    int lookback = 0;
    int max_len = 0;
    int embed_dim = 0;

    /// FNV-1a of the textual layout descriptor.
    std::uint64_t schema_hash() const;
    friend bool operator==(const DatasetLayout&, const DatasetLayout&) = default;
};

DatasetLayout layout_of(const Dataset& ds);

/// Binary layout (all integers and floats little-endian):
///   magic "TMFDSET\0", u32 format version, u64 schema hash, u32 feature flags,
///   u32 numeric width, u32 lookback, u32 max_len, u32 k, u64 record count;
///   then per record: u8 label, i32 day (days since 1970-01-01), i64 unix
///   seconds, ticker/author/tweet id as u32 length + bytes, numeric f64[width],
///   lookback f64[lookback*width] row-major, text f64[max_len*k] row-major
///   (text present iff the Tw flag is set).
void write_samples(const std::filesystem::path& path, const DatasetLayout& layout,
                   const std::vector<TmVector>& samples);

struct SampleFile {
    DatasetLayout layout;
    std::vector<TmVector> samples;
};

/// Throws std::runtime_error on bad magic, version, or schema hash.
SampleFile read_samples(const std::filesystem::path& path);

nlohmann::json normalizer_to_json(const NormalizerState& s);
NormalizerState normalizer_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const Dataset& ds, const std::string& ticker);

/// Writes train.bin, test.bin, normalizer.json and build_report.json into `dir`.
void write_dataset_dir(const std::filesystem::path& dir, const Dataset& ds, const std::string& ticker);

} // namespace tmf
