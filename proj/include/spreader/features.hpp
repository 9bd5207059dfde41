// The ten per-user motivational features, in the fixed report order:
//
//   0 tentat       1 discrep      2 certain      3 anx       4 futurefocus
//   5 engagement   6 influence    7 popularity   8 boost_rt  9 boost_like
//
// Indices 0-4 are per-tweet lexicon rates averaged over the user's
// document. 5-7 come from the account record, 8-9 from engagement on the
// user's news-sharing tweets. A feature that cannot be computed is masked,
// stored as 0, and excluded from downstream statistics.
#pragma once

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "spreader/corpus.hpp"
#include "spreader/csv.hpp"
#include "spreader/lexicon.hpp"

namespace spreader {

inline constexpr std::size_t kFeatureCount = 10;

inline constexpr std::array<const char*, kFeatureCount> kFeatureKeys = {
    "tentat",     "discrep",   "certain",    "anx",      "futurefocus",
    "engagement", "influence", "popularity", "boost_rt", "boost_like"};

inline constexpr std::array<const char*, kFeatureCount> kFeatureDisplayNames = {
    "Tentativeness",     "Discrepancy", "Certainty",  "Anxiety",          "Lack of Control",
    "Social Engagement", "Influence",   "Popularity", "Boosting #tweets", "Boosting #likes"};

// The five lexicon categories backing features 0-4, in feature order.
inline constexpr std::array<const char*, 5> kLinguisticCategories = {
    "tentat", "discrep", "certain", "anx", "futurefocus"};

inline constexpr const char* kFeatureCsvHeader =
    "user_id,label,tentat,discrep,certain,anx,futurefocus,engagement,influence,"
    "popularity,boost_rt,boost_like,mask";

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::array<bool, kFeatureCount> missing{};

  void set(std::size_t i, double v) {
    values[i] = v;
    missing[i] = false;
  }
  void mask(std::size_t i) {
    values[i] = 0.0;
    missing[i] = true;
  }
};

struct LabeledFeatureRow {
  std::string user_id;
  SpreaderLabel label;
  FeatureVector features;
};

// Mean per-tweet category rate for the five linguistic categories, in
// feature order. Tweets that tokenize to nothing rate 0. A document with
// no tweets has no rates at all and returns nullopt.
inline std::optional<std::array<double, 5>> linguistic_features(const UserDocument& doc,
                                                                const CategoryLexicon& lexicon) {
  std::array<const Category*, 5> cats{};
  for (std::size_t i = 0; i < 5; ++i) cats[i] = &lexicon.require(kLinguisticCategories[i]);
  if (doc.tweets.empty()) return std::nullopt;

  std::array<double, 5> sums{};
  for (const auto& tweet : doc.tweets) {
    const TokenList toks = tokenize(tweet.text);
    if (toks.empty()) continue;  // contributes 0 to each sum
    for (std::size_t i = 0; i < 5; ++i) {
      std::size_t hits = 0;
      for (const auto& tok : toks.tokens) {
        if (cats[i]->matches(tok)) ++hits;
      }
      sums[i] += 100.0 * static_cast<double>(hits) / static_cast<double>(toks.size());
    }
  }
  std::array<double, 5> rates{};
  for (std::size_t i = 0; i < 5; ++i) rates[i] = sums[i] / static_cast<double>(doc.tweets.size());
  return rates;
}

// Average tweets per day over the account lifetime, with the lifetime
// floored to one day so brand-new accounts stay finite.
inline double social_engagement(const UserRecord& user, EpochSeconds now) {
  if (user.account_created_at > now) {
    throw std::invalid_argument("account_created_at is after the reference time for user " +
                                user.user_id);
  }
  const std::int64_t days = std::max<std::int64_t>(1, floor_days_between(user.account_created_at, now));
  return static_cast<double>(user.statuses_count) / static_cast<double>(days);
}

inline double influence(const UserRecord& user) { return static_cast<double>(user.followees_count); }

inline double popularity(const UserRecord& user) { return static_cast<double>(user.followers_count); }

// Mean retweet/like counts over the user's news-sharing tweets minus the
// means over all their tweets. Undefined (nullopt) when the user has no
// tweets or no news-sharing tweets.
inline std::optional<std::pair<double, double>> boosting_features(
    const std::vector<TweetRecord>& user_tweets,
    const std::unordered_set<std::string>& news_tweet_ids) {
  if (user_tweets.empty()) return std::nullopt;

  double all_rt = 0.0, all_like = 0.0;
  double news_rt = 0.0, news_like = 0.0;
  std::size_t news_n = 0;
  for (const auto& t : user_tweets) {
    all_rt += static_cast<double>(t.retweet_count);
    all_like += static_cast<double>(t.like_count);
    if (news_tweet_ids.count(t.tweet_id) != 0) {
      news_rt += static_cast<double>(t.retweet_count);
      news_like += static_cast<double>(t.like_count);
      ++news_n;
    }
  }
  if (news_n == 0) return std::nullopt;

  const double n_all = static_cast<double>(user_tweets.size());
  const double n_news = static_cast<double>(news_n);
  return std::make_pair(news_rt / n_news - all_rt / n_all,
                        news_like / n_news - all_like / n_all);
}

// Assembles the full ten-feature vector for one labeled user. `user_tweets`
// must be all of the user's collected tweets (the document holds only the
// capped recent subset) and `news_tweet_ids` the ids among them that share
// a known story.
inline LabeledFeatureRow assemble(const SpreaderLabel& label,
                                  const std::optional<UserRecord>& user,
                                  const UserDocument& doc,
                                  const CategoryLexicon& lexicon,
                                  const std::vector<TweetRecord>& user_tweets,
                                  const std::unordered_set<std::string>& news_tweet_ids,
                                  EpochSeconds now) {
  LabeledFeatureRow row;
  row.user_id = label.user_id;
  row.label = label;

  const auto rates = linguistic_features(doc, lexicon);
  for (std::size_t i = 0; i < 5; ++i) {
    if (rates) {
      row.features.set(i, (*rates)[i]);
    } else {
      row.features.mask(i);
    }
  }

  if (user) {
    row.features.set(5, social_engagement(*user, now));
    row.features.set(6, influence(*user));
    row.features.set(7, popularity(*user));
  } else {
    row.features.mask(5);
    row.features.mask(6);
    row.features.mask(7);
  }

  const auto boosts = boosting_features(user_tweets, news_tweet_ids);
  if (boosts) {
    row.features.set(8, boosts->first);
    row.features.set(9, boosts->second);
  } else {
    row.features.mask(8);
    row.features.mask(9);
  }
  return row;
}

// --- feature matrix CSV (the handoff format between pipeline stages) ---

// mask is a 10-character string, '1' marking a missing feature.
inline std::string feature_row_to_csv(const LabeledFeatureRow& row) {
  std::string line = row.user_id;
  line += ',';
  line += to_string(row.label.label);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    line += ',';
    line += format_value(row.features.values[i]);
  }
  line += ',';
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    line += row.features.missing[i] ? '1' : '0';
  }
  return line;
}

inline std::string write_feature_csv(const std::vector<LabeledFeatureRow>& rows) {
  std::string out = kFeatureCsvHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += feature_row_to_csv(row);
    out += '\n';
  }
  return out;
}

inline std::vector<LabeledFeatureRow> parse_feature_csv(const std::string& text) {
  std::vector<LabeledFeatureRow> rows;
  size_t pos = 0;
  bool first = true;
  size_t line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (first) {
      if (line != kFeatureCsvHeader) {
        throw std::runtime_error("unexpected feature CSV header: '" + line + "'");
      }
      first = false;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 2 + kFeatureCount + 1) {
      throw std::runtime_error("feature CSV line " + std::to_string(line_no) +
                               ": expected " + std::to_string(2 + kFeatureCount + 1) + " fields");
    }
    LabeledFeatureRow row;
    row.user_id = fields[0];
    row.label.user_id = fields[0];
    if (fields[1] == "fake") {
      row.label.label = Spreader::FakeSpreader;
    } else if (fields[1] == "real") {
      row.label.label = Spreader::RealSpreader;
    } else {
      throw std::runtime_error("feature CSV line " + std::to_string(line_no) +
                               ": unknown label '" + fields[1] + "'");
    }
    const std::string& mask = fields[2 + kFeatureCount];
    if (mask.size() != kFeatureCount) {
      throw std::runtime_error("feature CSV line " + std::to_string(line_no) +
                               ": mask must be " + std::to_string(kFeatureCount) + " characters");
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (mask[i] == '1') {
        row.features.mask(i);
      } else if (mask[i] == '0') {
        row.features.set(i, parse_double(fields[2 + i]));
      } else {
        throw std::runtime_error("feature CSV line " + std::to_string(line_no) +
                                 ": mask characters must be 0 or 1");
      }
    }
    rows.push_back(std::move(row));
  }
  if (first) throw std::runtime_error("feature CSV is empty (missing header)");
  return rows;
}

}  // namespace spreader
