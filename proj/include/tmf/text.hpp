#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

namespace tmf {

using StopWords = std::unordered_set<std::string>;

/// Whitespace split, URLs dropped, ASCII punctuation removed, ASCII lowercased.
/// Empty tokens are discarded; bytes >= 0x80 pass through unchanged.
std::vector<std::string> word_tokens(std::string_view text);

/// word_tokens minus stop-words, order preserved.
std::vector<std::string> tokenize_clean(std::string_view text, const StopWords& stopwords);

/// One word per line; blank lines and `#` comments ignored.
StopWords parse_stopwords(std::string_view text);
StopWords load_stopwords(const std::filesystem::path& path);
const StopWords& builtin_stopwords();

enum class EmbeddingFallback { zero, hashed };

/// Word vectors of a fixed dimension with a fallback for unknown words.
class EmbeddingTable {
public:
    EmbeddingTable(int dim, EmbeddingFallback fallback, std::uint64_t seed = 0);

    /// Text format: optional `count dim` header, then `word v1 ... vk` per line.
    static EmbeddingTable load_text(const std::filesystem::path& path, EmbeddingFallback fallback,
                                    std::uint64_t seed = 0);

    int dim() const { return dim_; }
    EmbeddingFallback fallback() const { return fallback_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t vocabulary_size() const { return vectors_.size(); }

    void add(std::string word, std::vector<double> vec);
    bool contains(const std::string& word) const { return vectors_.count(word) != 0; }

    /// Writes the vector for `word` into `out` (size dim). Unknown words get
    /// zeros or a deterministic hash of the word in [-0.05, 0.05]^dim.
    void lookup(const std::string& word, std::span<double> out) const;

private:
    int dim_;
    EmbeddingFallback fallback_;
    std::uint64_t seed_;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// (max_len x dim) matrix; row i holds token i, rows past the sentence are zero.
/// Tokens beyond max_len are truncated.
Eigen::MatrixXd embed_sequence(std::span<const std::string> tokens, const EmbeddingTable& table,
                               int max_len);

} // namespace tmf
