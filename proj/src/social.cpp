#include "tmf/social.hpp"

#include <cmath>
#include <stdexcept>

#include "tmf/errors.hpp"

namespace tmf {

SocialVector social_vector(const TweetRecord& t, std::uint64_t author_tweet_count) {
    return {static_cast<double>(t.follower_count), static_cast<double>(t.friends_count),
            static_cast<double>(t.replies),        static_cast<double>(t.retweets),
            static_cast<double>(t.favorites),      static_cast<double>(author_tweet_count)};
}

SocialVector SocialTracker::observe(const TweetRecord& t) {
    return social_vector(t, ++counts_[t.username]);
}

std::uint64_t SocialTracker::count(const std::string& username) const {
    const auto it = counts_.find(username);
    return it == counts_.end() ? 0 : it->second;
}

int tweet_score(int predicted_label, int actual_label) {
    const int predicted_class = predicted_label < 0 ? 0 : 1;
    return predicted_class == actual_label ? 1 : -1;
}

UserHistory update_user_history(UserHistory hist, int score, Timestamp at) {
    if (score != 1 && score != -1) throw std::invalid_argument("tweet score must be +1 or -1");
    if (at < hist.last_updated)
        throw OrderingError("history update for '" + hist.username + "' at " + at.iso() +
                            " precedes last update " + hist.last_updated.iso());
    if (score == 1)
        ++hist.pus;
    else
        ++hist.nus;
    ++hist.h;
    hist.last_updated = at;
    return hist;
}

double author_rating(const UserHistory& hist) {
    return hist.h == 0 ? 0.0 : static_cast<double>(hist.pus) / static_cast<double>(hist.h);
}

double recommendation_score(const UserHistory& hist) {
    if (author_rating(hist) == 0.0) return 0.0;
    return 1.0 + std::log10(static_cast<double>(hist.pus));
}

double representativeness(const UserHistory& hist) {
    return (author_rating(hist) + static_cast<double>(hist.pus)) / 2.0;
}

ScVector user_history_vector(const UserHistory& hist) {
    return {static_cast<double>(hist.pus), static_cast<double>(hist.nus), recommendation_score(hist),
            representativeness(hist)};
}

const UserHistory& UserHistoryStore::get(const std::string& username) const {
    static const UserHistory empty{};
    const auto it = histories_.find(username);
    return it == histories_.end() ? empty : it->second;
}

void UserHistoryStore::apply(const std::string& username, int score, Timestamp at) {
    auto it = histories_.find(username);
    if (it == histories_.end()) {
        UserHistory fresh;
        fresh.username = username;
        it = histories_.emplace(username, std::move(fresh)).first;
    }
    it->second = update_user_history(std::move(it->second), score, at);
}

} // namespace tmf
