#include "tmf/tweet_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "text_util.hpp"
#include "tmf/errors.hpp"

namespace tmf {
namespace {

std::uint64_t counter(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) return 0;
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
        throw std::invalid_argument(std::string("field '") + key + "' must be a non-negative integer");
    return it->get<std::uint64_t>();
}

TweetRecord parse_tweet(const std::string& line) {
    const auto obj = nlohmann::json::parse(line);
    if (!obj.is_object()) throw std::invalid_argument("line is not a JSON object");
    TweetRecord t;
    t.id = obj.at("id").get<std::string>();
    if (t.id.empty()) throw std::invalid_argument("empty tweet id");
    t.username = obj.at("username").get<std::string>();
    t.timestamp = Timestamp::parse(obj.at("timestamp").get<std::string>());
    t.text = obj.value("text", std::string{});
    t.ticker = obj.value("ticker", std::string{});
    t.retweets = counter(obj, "retweets");
    t.favorites = counter(obj, "favorites");
    t.replies = counter(obj, "replies");
    t.follower_count = counter(obj, "follower_count");
    t.friends_count = counter(obj, "friends_count");
    if (auto it = obj.find("hashtags"); it != obj.end() && !it->is_null())
        t.hashtags = it->get<std::vector<std::string>>();
    return t;
}

} // namespace

TweetLoad read_tweets_jsonl(std::istream& in, bool lenient) {
    TweetLoad out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        try {
            out.tweets.push_back(parse_tweet(line));
        } catch (const std::exception& e) {
            if (!lenient) throw ParseError(e.what(), lineno);
            out.rejected.push_back({lineno, e.what()});
        }
    }
    return out;
}

TweetLoad read_tweets_jsonl(const std::filesystem::path& path, bool lenient) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_tweets_jsonl(in, lenient);
}

void write_tweets_jsonl(std::ostream& out, const std::vector<TweetRecord>& tweets) {
    for (const auto& t : tweets) {
        nlohmann::json obj{{"id", t.id},
                           {"username", t.username},
                           {"timestamp", t.timestamp.iso()},
                           {"text", t.text},
                           {"ticker", t.ticker},
                           {"retweets", t.retweets},
                           {"favorites", t.favorites},
                           {"replies", t.replies},
                           {"follower_count", t.follower_count},
                           {"friends_count", t.friends_count},
                           {"hashtags", t.hashtags}};
        out << obj.dump() << '\n';
    }
}

} // namespace tmf
