#include "tmf/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hashing.hpp"
#include "text_util.hpp"
#include "tmf/resources.hpp"

namespace tmf {

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        const std::string_view raw = text.substr(i, j - i);
        i = j;
        if (raw.empty()) continue;
        if (raw.starts_with("http://") || raw.starts_with("https://")) continue;
        std::string tok;
        tok.reserve(raw.size());
        for (char c : raw) {
            const auto u = static_cast<unsigned char>(c);
            if (u < 0x80 && std::ispunct(u)) continue;
            tok.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
        }
        if (!tok.empty()) out.push_back(std::move(tok));
    }
    return out;
}

std::vector<std::string> tokenize_clean(std::string_view text, const StopWords& stopwords) {
    auto tokens = word_tokens(text);
    std::erase_if(tokens, [&](const std::string& t) { return stopwords.count(t) != 0; });
    return tokens;
}

StopWords parse_stopwords(std::string_view text) {
    StopWords out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const std::string w = detail::trim(line);
        if (w.empty() || w.front() == '#') continue;
        // Normalized like tokens, so "don't" matches "dont".
        for (auto& t : word_tokens(w)) out.insert(std::move(t));
    }
    return out;
}

StopWords load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_stopwords(ss.str());
}

const StopWords& builtin_stopwords() {
    static const StopWords words = parse_stopwords(builtin_stopwords_text());
    return words;
}

EmbeddingTable::EmbeddingTable(int dim, EmbeddingFallback fallback, std::uint64_t seed)
    : dim_(dim), fallback_(fallback), seed_(seed) {
    if (dim < 1) throw std::invalid_argument("embedding dimension must be >= 1");
}

EmbeddingTable EmbeddingTable::load_text(const std::filesystem::path& path, EmbeddingFallback fallback,
                                         std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<std::string, std::vector<double>>> rows;
    int dim = -1;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        std::vector<double> vec;
        std::string tok;
        while (ls >> tok) vec.push_back(detail::parse_double(tok));
        // word2vec text files may open with a "<count> <dim>" header
        if (lineno == 1 && vec.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos)
            continue;
        if (dim < 0) dim = static_cast<int>(vec.size());
        if (static_cast<int>(vec.size()) != dim || dim == 0)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": inconsistent embedding dimension");
        rows.emplace_back(std::move(word), std::move(vec));
    }
    if (dim <= 0) throw std::runtime_error(path.string() + ": no embedding vectors");
    EmbeddingTable table(dim, fallback, seed);
    for (auto& [w, v] : rows) table.add(std::move(w), std::move(v));
    return table;
}

void EmbeddingTable::add(std::string word, std::vector<double> vec) {
    if (static_cast<int>(vec.size()) != dim_)
        throw std::invalid_argument("embedding for '" + word + "' has wrong dimension");
    vectors_.insert_or_assign(std::move(word), std::move(vec));
}

void EmbeddingTable::lookup(const std::string& word, std::span<double> out) const {
    if (static_cast<int>(out.size()) != dim_) throw std::invalid_argument("lookup buffer has wrong size");
    if (auto it = vectors_.find(word); it != vectors_.end()) {
        std::copy(it->second.begin(), it->second.end(), out.begin());
        return;
    }
    if (fallback_ == EmbeddingFallback::zero) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    std::uint64_t state = detail::fnv1a(word) ^ seed_;
    for (auto& v : out) v = (detail::unit_double(detail::splitmix64(state)) * 2.0 - 1.0) * 0.05;
}

Eigen::MatrixXd embed_sequence(std::span<const std::string> tokens, const EmbeddingTable& table,
                               int max_len) {
    if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(max_len, table.dim());
    std::vector<double> buf(static_cast<std::size_t>(table.dim()));
    const auto rows = std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(max_len));
    for (std::size_t i = 0; i < rows; ++i) {
        table.lookup(tokens[i], buf);
        for (int c = 0; c < table.dim(); ++c) m(static_cast<Eigen::Index>(i), c) = buf[static_cast<std::size_t>(c)];
    }
    return m;
}

} // namespace tmf
