#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "tmf/date.hpp"

namespace tmf {

struct TweetRecord {
    std::string id;
    std::string username;
    Timestamp timestamp;
    std::string text;
    std::string ticker;
    std::uint64_t retweets = 0;
    std::uint64_t favorites = 0;
    std::uint64_t replies = 0;
    std::uint64_t follower_count = 0;
    std::uint64_t friends_count = 0;
    std::vector<std::string> hashtags;
};

/// [followers, friends, replies, retweets, favorites, author tweets so far].
using SocialVector = std::array<double, 6>;

SocialVector social_vector(const TweetRecord& t, std::uint64_t author_tweet_count);

/// Running per-author tweet counter feeding the sixth social slot.
class SocialTracker {
public:
    /// Counts `t` and returns its social vector (the count includes `t`).
    SocialVector observe(const TweetRecord& t);
    std::uint64_t count(const std::string& username) const;

private:
    std::unordered_map<std::string, std::uint64_t> counts_;
};

/// Scores one tweet against the realized direction: neutral (0) and +1
/// predict class 1, -1 predicts class 0. Returns 1 on a match, -1 otherwise.
int tweet_score(int predicted_label, int actual_label);

struct UserHistory {
    std::string username;
    std::uint64_t pus = 0;
    std::uint64_t nus = 0;
    std::uint64_t h = 0;
    Timestamp last_updated = Timestamp::min();
};

/// Applies one tweet score. Throws OrderingError if `at` precedes the last
/// update, std::invalid_argument if score is not +-1.
UserHistory update_user_history(UserHistory hist, int score, Timestamp at);

/// PUS / H, or 0 for an empty history.
double author_rating(const UserHistory& hist);
/// 0 when the author rating is 0, otherwise 1 + log10(PUS).
double recommendation_score(const UserHistory& hist);
/// (AR + PUS) / 2.
double representativeness(const UserHistory& hist);

/// [PUS, NUS, URS, RA].
using ScVector = std::array<double, 4>;

ScVector user_history_vector(const UserHistory& hist);

/// Histories keyed by username. Each author's updates must arrive in time order.
class UserHistoryStore {
public:
    const UserHistory& get(const std::string& username) const;
    void apply(const std::string& username, int score, Timestamp at);
    ScVector vector_for(const std::string& username) const { return user_history_vector(get(username)); }
    std::size_t size() const { return histories_.size(); }
    const std::map<std::string, UserHistory>& all() const { return histories_; }

private:
    std::map<std::string, UserHistory> histories_;
};

} // namespace tmf
