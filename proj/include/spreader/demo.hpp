// Shipped demo corpus: a small synthetic community of 50 users whose
// share counts are known by construction (user i shares i mod 6 distinct
// fake stories), so labeling is hand-checkable at any threshold. Text,
// engagement, and account stats carry a class-dependent signal to make
// every downstream stage produce something non-trivial.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spreader/config.hpp"
#include "spreader/corpus.hpp"
#include "spreader/csv.hpp"
#include "spreader/rng.hpp"
#include "spreader/time.hpp"

#include <json.hpp>

namespace spreader {

inline std::string starter_lexicon_text() {
  return
      "# Starter psycholinguistic lexicon. A trailing * matches any word\n"
      "# beginning with the stem.\n"
      "[tentat]\n"
      "maybe\nperhaps\nguess*\npossib*\nunsure\nhopeful*\n"
      "[discrep]\n"
      "should*\nwould*\ncould*\nwish\nlack*\n"
      "[certain]\n"
      "always\nnever\ndefinite*\ncertain*\nsure\n"
      "[anx]\n"
      "nervous\nafraid\ntense\nworri*\nfear*\n"
      "[futurefocus]\n"
      "may\nwill\nsoon\ngonna\ntomorrow\n";
}

struct DemoCorpus {
  std::vector<TweetRecord> tweets;
  std::vector<UserRecord> users;
  std::string news_csv;
  std::string lexicon;
};

namespace demo_detail {

inline const std::vector<std::string>& common_words() {
  static const std::vector<std::string> words = {
      "the",    "a",     "news",  "story",  "about", "today",  "people", "city",
      "team",   "game",  "report", "update", "link",  "read",   "this",   "that",
      "share",  "big",   "local", "vote",   "market", "rain",   "sunny",  "school",
      "road",   "music", "film",  "week",   "year",   "coffee", "photo",  "friend"};
  return words;
}

inline const std::vector<std::string>& fake_leaning_words() {
  // tentat + discrep + anx vocabulary
  static const std::vector<std::string> words = {
      "maybe",  "perhaps", "guessing", "possibly", "unsure",  "should", "would",
      "couldnt", "wish",    "lacking",  "nervous",  "afraid",  "tense",  "worried",
      "fearful"};
  return words;
}

inline const std::vector<std::string>& real_leaning_words() {
  // certain + futurefocus vocabulary
  static const std::vector<std::string> words = {
      "always", "never", "definitely", "certainly", "sure",
      "may",    "will",  "soon",       "gonna",     "tomorrow"};
  return words;
}

inline std::string make_text(Rng& rng, bool fake_leaning, const std::string& prefix) {
  std::string text = prefix;
  const std::size_t n_words = 10 + rng.below(8);
  for (std::size_t w = 0; w < n_words; ++w) {
    if (!text.empty()) text += ' ';
    const double roll = rng.uniform();
    if (fake_leaning ? roll < 0.25 : roll < 0.05) {
      const auto& pool = fake_leaning_words();
      text += pool[rng.below(pool.size())];
    } else if (roll < 0.30) {
      const auto& pool = real_leaning_words();
      text += pool[rng.below(pool.size())];
    } else {
      const auto& pool = common_words();
      text += pool[rng.below(pool.size())];
    }
  }
  // decorations the tokenizer is expected to strip
  if (rng.uniform() < 0.20) text += " https://t.co/x" + std::to_string(rng.below(1000));
  if (rng.uniform() < 0.15) text += " #breaking";
  if (rng.uniform() < 0.15) text = "@newsdesk " + text;
  if (rng.uniform() < 0.25) text += "!";
  return text;
}

}  // namespace demo_detail

// Deterministic under the seed. Structural facts are seed-independent:
// user i (1-based, ids u01..u50) shares exactly i%6 distinct fake stories
// (users divisible by 4 repeat their first fake story, which must not
// change the distinct count); u17 and u34 have no user record; u42 shares
// no news at all; u07 has one tweet pointing at an unlisted story.
inline DemoCorpus generate_demo_corpus(std::uint64_t seed) {
  DemoCorpus out;
  Rng rng(seed);
  const EpochSeconds base = *parse_rfc3339("2021-01-01T00:00:00Z");

  out.news_csv = "news_id,veracity\n";
  for (int s = 1; s <= 5; ++s) out.news_csv += "f" + std::to_string(s) + ",fake\n";
  for (int s = 1; s <= 3; ++s) out.news_csv += "r" + std::to_string(s) + ",real\n";
  out.lexicon = starter_lexicon_text();

  for (int i = 1; i <= 50; ++i) {
    char uid[8];
    std::snprintf(uid, sizeof(uid), "u%02d", i);
    const std::string user_id(uid);
    const int distinct_fake = i % 6;
    const bool fake_leaning = distinct_fake >= 3;

    if (i != 17 && i != 34) {
      UserRecord u;
      u.user_id = user_id;
      u.followers_count = 40 + 17 * i + (fake_leaning ? 0 : 350);
      u.followees_count = 90 + 23 * i + (fake_leaning ? 400 : 0);
      u.statuses_count = 300 + 41 * i + (fake_leaning ? 900 : 0);
      u.account_created_at = base - static_cast<EpochSeconds>((120 + 10 * i)) * 86400;
      out.users.push_back(std::move(u));
    }

    int seq = 0;
    auto add_tweet = [&](const std::string& text, std::optional<std::string> news_id,
                         std::int64_t rt, std::int64_t likes) {
      TweetRecord t;
      ++seq;
      char tid[16];
      std::snprintf(tid, sizeof(tid), "%s-t%03d", uid, seq);
      t.tweet_id = tid;
      t.user_id = user_id;
      t.text = text;
      t.created_at = base + static_cast<EpochSeconds>(i) * 1000 +
                     static_cast<EpochSeconds>(seq) * 3600;
      t.retweet_count = rt;
      t.like_count = likes;
      t.news_id = std::move(news_id);
      out.tweets.push_back(std::move(t));
    };

    auto news_rt = [&](bool boosted) {
      return static_cast<std::int64_t>(2 + i % 5 + (boosted ? 9 : 0) + rng.below(4));
    };
    auto news_likes = [&](bool boosted) {
      return static_cast<std::int64_t>(5 + i % 7 + (boosted ? 14 : 0) + rng.below(6));
    };

    for (int s = 1; s <= distinct_fake; ++s) {
      const std::string nid = "f" + std::to_string(s);
      add_tweet(demo_detail::make_text(rng, fake_leaning, "sharing " + nid + " everyone look"),
                nid, news_rt(fake_leaning), news_likes(fake_leaning));
    }
    if (i % 4 == 0 && distinct_fake >= 1) {
      // duplicate share of the first fake story: distinct count unchanged
      add_tweet(demo_detail::make_text(rng, fake_leaning, "sharing f1 once more"), "f1",
                news_rt(fake_leaning), news_likes(fake_leaning));
    }
    if (i != 42) {
      const int n_real = i % 3 + 1;
      for (int s = 1; s <= n_real; ++s) {
        const std::string nid = "r" + std::to_string(s);
        add_tweet(demo_detail::make_text(rng, fake_leaning, "sharing " + nid + " worth a read"),
                  nid, news_rt(false), news_likes(false));
      }
    }
    if (i == 7) {
      add_tweet(demo_detail::make_text(rng, fake_leaning, "sharing zz9 strange one"), "zz9",
                news_rt(false), news_likes(false));
    }
    const int n_plain = (i == 5 || i == 23) ? 3 : 12;
    for (int p = 0; p < n_plain; ++p) {
      add_tweet(demo_detail::make_text(rng, fake_leaning, ""), std::nullopt,
                static_cast<std::int64_t>(rng.below(3)), static_cast<std::int64_t>(rng.below(5)));
    }
  }
  return out;
}

inline std::string tweets_to_ndjson(const std::vector<TweetRecord>& tweets) {
  std::string out;
  for (const auto& t : tweets) {
    nlohmann::json j{{"tweet_id", t.tweet_id},
                     {"user_id", t.user_id},
                     {"text", t.text},
                     {"created_at", format_rfc3339(t.created_at)},
                     {"retweet_count", t.retweet_count},
                     {"like_count", t.like_count},
                     {"news_id", nullptr}};
    if (t.news_id) j["news_id"] = *t.news_id;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::string users_to_ndjson(const std::vector<UserRecord>& users) {
  std::string out;
  for (const auto& u : users) {
    nlohmann::json j{{"user_id", u.user_id},
                     {"followers_count", u.followers_count},
                     {"followees_count", u.followees_count},
                     {"statuses_count", u.statuses_count},
                     {"account_created_at", format_rfc3339(u.account_created_at)}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

// Writes the generated corpus to the paths named in the config.
inline void write_demo_corpus(const PipelineConfig& cfg, std::uint64_t seed) {
  if (cfg.tweets.empty() || cfg.users.empty() || cfg.labels.empty() || cfg.lexicon.empty()) {
    throw ConfigError("demo requires tweets=, users=, labels= and lexicon= paths in the config");
  }
  const DemoCorpus corpus = generate_demo_corpus(seed);
  for (const std::string& p : {cfg.tweets, cfg.users, cfg.labels, cfg.lexicon}) {
    const auto dir = std::filesystem::path(p).parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
  }
  write_text_file(cfg.tweets, tweets_to_ndjson(corpus.tweets));
  write_text_file(cfg.users, users_to_ndjson(corpus.users));
  write_text_file(cfg.labels, corpus.news_csv);
  write_text_file(cfg.lexicon, corpus.lexicon);
}

}  // namespace spreader
