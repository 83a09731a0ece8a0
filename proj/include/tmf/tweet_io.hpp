#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "tmf/market_data.hpp"
#include "tmf/social.hpp"

namespace tmf {

struct TweetLoad {
    std::vector<TweetRecord> tweets;
    std::vector<Diagnostic> rejected;
};

/// JSON-lines, one TweetRecord object per line; unknown fields ignored.
/// `timestamp` is an ISO-8601 UTC string. Malformed lines throw ParseError
/// unless `lenient`, in which case they are recorded and skipped.
TweetLoad read_tweets_jsonl(std::istream& in, bool lenient = false);
TweetLoad read_tweets_jsonl(const std::filesystem::path& path, bool lenient = false);

/// Inverse of the reader, one compact object per line.
void write_tweets_jsonl(std::ostream& out, const std::vector<TweetRecord>& tweets);

} // namespace tmf
