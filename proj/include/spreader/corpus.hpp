// Corpus model: tweet/user/label files, spreader tagging, and per-user
// document construction.
//
// Tweets and users arrive as newline-delimited JSON, news labels as CSV.
// Loaders skip malformed lines and report a warning tally instead of
// failing the whole file; only an unreadable file or a missing CSV header
// is fatal.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "spreader/csv.hpp"
#include "spreader/time.hpp"

namespace spreader {

struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  std::string text;
  EpochSeconds created_at = 0;
  std::int64_t retweet_count = 0;
  std::int64_t like_count = 0;
  std::optional<std::string> news_id;
};

struct UserRecord {
  std::string user_id;
  std::int64_t followers_count = 0;
  std::int64_t followees_count = 0;
  std::int64_t statuses_count = 0;
  EpochSeconds account_created_at = 0;
};

enum class Veracity { Fake, Real };

struct NewsLabel {
  std::string news_id;
  Veracity veracity = Veracity::Real;
};

enum class Spreader { FakeSpreader, RealSpreader };

inline const char* to_string(Spreader s) {
  return s == Spreader::FakeSpreader ? "fake" : "real";
}

struct SpreaderLabel {
  std::string user_id;
  Spreader label = Spreader::RealSpreader;
  std::int64_t fake_share_count = 0;
};

struct UserDocument {
  std::string user_id;
  std::vector<TweetRecord> tweets;  // most recent first
  std::int64_t word_count = 0;
};

template <typename T>
struct Loaded {
  std::vector<T> records;
  std::size_t warnings = 0;
};

// Whitespace word count on the raw text, before any lexicon preprocessing.
inline std::int64_t whitespace_word_count(std::string_view text) {
  std::int64_t words = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

namespace detail {

inline std::optional<TweetRecord> tweet_from_json(const nlohmann::json& j) {
  TweetRecord t;
  if (!j.is_object()) return std::nullopt;
  if (!j.contains("tweet_id") || !j["tweet_id"].is_string()) return std::nullopt;
  if (!j.contains("user_id") || !j["user_id"].is_string()) return std::nullopt;
  if (!j.contains("text") || !j["text"].is_string()) return std::nullopt;
  if (!j.contains("created_at") || !j["created_at"].is_string()) return std::nullopt;
  if (!j.contains("retweet_count") || !j["retweet_count"].is_number_integer()) return std::nullopt;
  if (!j.contains("like_count") || !j["like_count"].is_number_integer()) return std::nullopt;
  if (!j.contains("news_id")) return std::nullopt;
  t.tweet_id = j["tweet_id"].get<std::string>();
  t.user_id = j["user_id"].get<std::string>();
  t.text = j["text"].get<std::string>();
  const auto ts = parse_rfc3339(j["created_at"].get<std::string>());
  if (!ts) return std::nullopt;
  t.created_at = *ts;
  t.retweet_count = j["retweet_count"].get<std::int64_t>();
  t.like_count = j["like_count"].get<std::int64_t>();
  if (t.retweet_count < 0 || t.like_count < 0) return std::nullopt;
  if (t.tweet_id.empty() || t.user_id.empty()) return std::nullopt;
  if (j["news_id"].is_string()) {
    t.news_id = j["news_id"].get<std::string>();
  } else if (!j["news_id"].is_null()) {
    return std::nullopt;
  }
  return t;
}

inline std::optional<UserRecord> user_from_json(const nlohmann::json& j) {
  UserRecord u;
  if (!j.is_object()) return std::nullopt;
  for (const char* key : {"user_id", "account_created_at"}) {
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  }
  for (const char* key : {"followers_count", "followees_count", "statuses_count"}) {
    if (!j.contains(key) || !j[key].is_number_integer()) return std::nullopt;
  }
  u.user_id = j["user_id"].get<std::string>();
  if (u.user_id.empty()) return std::nullopt;
  u.followers_count = j["followers_count"].get<std::int64_t>();
  u.followees_count = j["followees_count"].get<std::int64_t>();
  u.statuses_count = j["statuses_count"].get<std::int64_t>();
  if (u.followers_count < 0 || u.followees_count < 0 || u.statuses_count < 0) return std::nullopt;
  const auto ts = parse_rfc3339(j["account_created_at"].get<std::string>());
  if (!ts) return std::nullopt;
  u.account_created_at = *ts;
  return u;
}

template <typename T, typename Parse, typename Id>
Loaded<T> load_ndjson(const std::string& path, Parse parse, Id id_of) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  Loaded<T> out;
  std::unordered_map<std::string, std::size_t> by_id;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      ++out.warnings;
      continue;
    }
    auto rec = parse(j);
    if (!rec) {
      ++out.warnings;
      continue;
    }
    // Duplicate ids: the later line wins, replacing the earlier record in
    // place so positions stay stable.
    const auto [it, inserted] = by_id.try_emplace(id_of(*rec), out.records.size());
    if (inserted) {
      out.records.push_back(std::move(*rec));
    } else {
      out.records[it->second] = std::move(*rec);
      ++out.warnings;
    }
  }
  return out;
}

}  // namespace detail

inline Loaded<TweetRecord> load_tweets(const std::string& path) {
  return detail::load_ndjson<TweetRecord>(
      path, detail::tweet_from_json, [](const TweetRecord& t) { return t.tweet_id; });
}

inline Loaded<UserRecord> load_users(const std::string& path) {
  return detail::load_ndjson<UserRecord>(
      path, detail::user_from_json, [](const UserRecord& u) { return u.user_id; });
}

// CSV with a "news_id,veracity" header; veracity is case-insensitive
// fake/real. Rows with unknown veracity are rejected with a warning.
inline Loaded<NewsLabel> load_news_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("missing header in labels file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (trim(line) != "news_id,veracity") {
    throw std::runtime_error("labels file must start with 'news_id,veracity' header: " + path);
  }

  Loaded<NewsLabel> out;
  std::unordered_map<std::string, std::size_t> by_id;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      ++out.warnings;
      continue;
    }
    NewsLabel n;
    n.news_id = trim(fields[0]);
    std::string v = trim(fields[1]);
    for (char& c : v) c = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    if (n.news_id.empty()) {
      ++out.warnings;
      continue;
    }
    if (v == "fake") {
      n.veracity = Veracity::Fake;
    } else if (v == "real") {
      n.veracity = Veracity::Real;
    } else {
      ++out.warnings;
      continue;
    }
    const auto [it, inserted] = by_id.try_emplace(n.news_id, out.records.size());
    if (inserted) {
      out.records.push_back(std::move(n));
    } else {
      out.records[it->second] = std::move(n);
      ++out.warnings;
    }
  }
  return out;
}

struct LabelingResult {
  std::vector<SpreaderLabel> labels;  // sorted by user_id
  std::size_t warnings = 0;           // tweets referencing unknown stories
};

// Tags every user appearing in `tweets`. fake_share_count counts DISTINCT
// fake stories the user shared; a user is a FakeSpreader iff that count
// reaches the threshold. Tweets pointing at stories absent from `labels`
// are ignored for counting and tallied as warnings.
inline LabelingResult label_spreaders(const std::vector<TweetRecord>& tweets,
                                      const std::vector<NewsLabel>& labels,
                                      std::int64_t threshold = 3) {
  if (threshold < 1) throw std::invalid_argument("spreader threshold must be >= 1");

  std::unordered_map<std::string, Veracity> veracity;
  for (const auto& n : labels) veracity[n.news_id] = n.veracity;

  std::map<std::string, std::set<std::string>> fake_stories;
  LabelingResult out;
  for (const auto& t : tweets) {
    auto& stories = fake_stories[t.user_id];
    if (!t.news_id) continue;
    const auto it = veracity.find(*t.news_id);
    if (it == veracity.end()) {
      ++out.warnings;
      continue;
    }
    if (it->second == Veracity::Fake) stories.insert(*t.news_id);
  }

  out.labels.reserve(fake_stories.size());
  for (const auto& [user_id, stories] : fake_stories) {
    SpreaderLabel l;
    l.user_id = user_id;
    l.fake_share_count = static_cast<std::int64_t>(stories.size());
    l.label = l.fake_share_count >= threshold ? Spreader::FakeSpreader : Spreader::RealSpreader;
    out.labels.push_back(std::move(l));
  }
  return out;
}

// Builds one document per user: tweets most-recent-first, accumulating
// whitespace word counts until the target is reached or tweets run out.
// The tweet that crosses the target is included. Ties on created_at break
// on tweet_id so input order never matters.
inline std::vector<UserDocument> build_documents(const std::vector<TweetRecord>& tweets,
                                                 std::int64_t target_words = 150) {
  if (target_words < 1) throw std::invalid_argument("target_words must be >= 1");

  std::map<std::string, std::vector<const TweetRecord*>> by_user;
  for (const auto& t : tweets) by_user[t.user_id].push_back(&t);

  std::vector<UserDocument> docs;
  docs.reserve(by_user.size());
  for (auto& [user_id, list] : by_user) {
    std::sort(list.begin(), list.end(), [](const TweetRecord* a, const TweetRecord* b) {
      if (a->created_at != b->created_at) return a->created_at > b->created_at;
      return a->tweet_id < b->tweet_id;
    });
    UserDocument doc;
    doc.user_id = user_id;
    for (const TweetRecord* t : list) {
      doc.tweets.push_back(*t);
      doc.word_count += whitespace_word_count(t->text);
      if (doc.word_count >= target_words) break;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace spreader
