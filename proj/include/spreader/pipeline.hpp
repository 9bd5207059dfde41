// Glue between the configuration and the library modules: lazy corpus
// loading, feature-row computation, and the CSV stage handoffs that let
// each subcommand rerun independently.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "spreader/classifier.hpp"
#include "spreader/config.hpp"
#include "spreader/corpus.hpp"
#include "spreader/features.hpp"
#include "spreader/lexicon.hpp"

namespace spreader {

struct CorpusBundle {
  std::vector<TweetRecord> tweets;
  std::unordered_map<std::string, UserRecord> users;
  std::vector<NewsLabel> news;
};

// Lazily loads the heavyweight inputs so subcommands that run entirely
// from a stage CSV (e.g. stats after features) never touch the corpus.
struct PipelineContext {
  PipelineConfig cfg;
  std::vector<std::string> warnings;

  explicit PipelineContext(PipelineConfig c) : cfg(std::move(c)) {}

  CorpusBundle& corpus() {
    if (!corpus_) {
      CorpusBundle b;
      auto tweets = load_tweets(cfg.tweets);
      if (tweets.warnings > 0) {
        warnings.push_back(std::to_string(tweets.warnings) +
                           " tweet record(s) skipped or replaced while reading " + cfg.tweets);
      }
      b.tweets = std::move(tweets.records);

      auto users = load_users(cfg.users);
      if (users.warnings > 0) {
        warnings.push_back(std::to_string(users.warnings) +
                           " user record(s) skipped or replaced while reading " + cfg.users);
      }
      for (auto& u : users.records) b.users[u.user_id] = std::move(u);

      auto news = load_news_labels(cfg.labels);
      if (news.warnings > 0) {
        warnings.push_back(std::to_string(news.warnings) +
                           " news label(s) skipped or replaced while reading " + cfg.labels);
      }
      b.news = std::move(news.records);
      corpus_ = std::move(b);
    }
    return *corpus_;
  }

  const CategoryLexicon& lexicon() {
    if (!lexicon_) lexicon_ = parse_lexicon(read_text_file(cfg.lexicon));
    return *lexicon_;
  }

  std::string features_path() const {
    return (std::filesystem::path(cfg.out_dir) / "features.csv").string();
  }

 private:
  std::optional<CorpusBundle> corpus_;
  std::optional<CategoryLexicon> lexicon_;
};

inline LabelingResult compute_labels(PipelineContext& ctx) {
  auto& bundle = ctx.corpus();
  LabelingResult result = label_spreaders(bundle.tweets, bundle.news, ctx.cfg.spreader_threshold);
  if (result.warnings > 0) {
    ctx.warnings.push_back(std::to_string(result.warnings) +
                           " tweet(s) reference a news_id missing from " + ctx.cfg.labels);
  }
  return result;
}

// Full feature extraction from the raw corpus: label, build documents,
// assemble the ten features per user. Rows come out sorted by user_id.
inline std::vector<LabeledFeatureRow> compute_feature_rows(PipelineContext& ctx) {
  if (!ctx.cfg.reference_now) {
    throw ConfigError("reference_now is required to compute features");
  }
  const LabelingResult labeling = compute_labels(ctx);
  auto& bundle = ctx.corpus();
  const CategoryLexicon& lex = ctx.lexicon();

  std::vector<UserDocument> docs = build_documents(bundle.tweets,
                                                   static_cast<std::int64_t>(ctx.cfg.target_words));
  std::unordered_map<std::string, const UserDocument*> doc_by_user;
  for (const auto& d : docs) doc_by_user[d.user_id] = &d;

  std::unordered_map<std::string, std::vector<TweetRecord>> tweets_by_user;
  std::unordered_map<std::string, std::unordered_set<std::string>> news_ids_by_user;
  for (const auto& t : bundle.tweets) {
    tweets_by_user[t.user_id].push_back(t);
    if (t.news_id) news_ids_by_user[t.user_id].insert(t.tweet_id);
  }

  static const std::vector<TweetRecord> kNoTweets;
  static const std::unordered_set<std::string> kNoNewsIds;
  static const UserDocument kEmptyDoc;

  std::vector<LabeledFeatureRow> rows;
  rows.reserve(labeling.labels.size());
  for (const auto& label : labeling.labels) {
    std::optional<UserRecord> user;
    if (auto it = bundle.users.find(label.user_id); it != bundle.users.end()) user = it->second;

    const auto doc_it = doc_by_user.find(label.user_id);
    const UserDocument& doc = doc_it != doc_by_user.end() ? *doc_it->second : kEmptyDoc;
    const auto tw_it = tweets_by_user.find(label.user_id);
    const auto& tweets = tw_it != tweets_by_user.end() ? tw_it->second : kNoTweets;
    const auto ni_it = news_ids_by_user.find(label.user_id);
    const auto& news_ids = ni_it != news_ids_by_user.end() ? ni_it->second : kNoNewsIds;

    rows.push_back(assemble(label, user, doc, lex, tweets, news_ids, *ctx.cfg.reference_now));
  }
  return rows;
}

struct FeatureStage {
  std::vector<LabeledFeatureRow> rows;
  bool from_file = false;
};

// Stage handoff: reuse out_dir/features.csv when it exists, otherwise
// compute, write it, and work from the parsed file text so a later run
// that reads the file sees bit-identical values.
inline FeatureStage obtain_feature_rows(PipelineContext& ctx, bool force_recompute = false) {
  FeatureStage stage;
  const std::string path = ctx.features_path();
  if (!force_recompute && std::filesystem::exists(path)) {
    stage.rows = parse_feature_csv(read_text_file(path));
    stage.from_file = true;
    return stage;
  }
  const std::string csv = write_feature_csv(compute_feature_rows(ctx));
  std::filesystem::create_directories(ctx.cfg.out_dir);
  write_text_file(path, csv);
  stage.rows = parse_feature_csv(csv);
  return stage;
}

// Embedding source: external CSV table, or the hashed term-frequency
// baseline computed from each user's document.
inline EmbeddingTable obtain_embeddings(PipelineContext& ctx,
                                        const std::vector<LabeledFeatureRow>& rows) {
  if (ctx.cfg.baseline_embed) {
    auto& bundle = ctx.corpus();
    const std::vector<UserDocument> docs =
        build_documents(bundle.tweets, static_cast<std::int64_t>(ctx.cfg.target_words));
    EmbeddingTable table;
    table.dim = ctx.cfg.embedding_dim;
    for (const auto& d : docs) {
      table.vectors[d.user_id] = baseline_embed(d, ctx.cfg.embedding_dim);
    }
    return table;
  }
  if (ctx.cfg.embeddings.empty()) {
    throw std::runtime_error(
        "no embedding source: set embeddings= in the config or pass --baseline-embed");
  }
  LoadedEmbeddings loaded = load_embeddings(ctx.cfg.embeddings);
  if (loaded.warnings > 0) {
    ctx.warnings.push_back(std::to_string(loaded.warnings) + " duplicate embedding row(s) in " +
                           ctx.cfg.embeddings);
  }
  (void)rows;
  return loaded.table;
}

// Shared backbone of cmd_train / cmd_eval / cmd_export.
inline ExperimentResult run_configured_experiment(PipelineContext& ctx) {
  if (!ctx.cfg.seed) {
    throw ConfigError("seed is required (set seed= in the config or pass --seed)");
  }
  FeatureStage stage = obtain_feature_rows(ctx);
  EmbeddingTable embeddings = obtain_embeddings(ctx, stage.rows);

  ExperimentConfig ec;
  ec.split_ratio = ctx.cfg.split_ratio;
  ec.seed = *ctx.cfg.seed;
  ec.train.epochs = ctx.cfg.epochs;
  ec.train.batch_size = ctx.cfg.batch_size;
  ec.train.learning_rate = ctx.cfg.learning_rate;
  ec.train.class_weighting = ctx.cfg.class_weighting;
  ec.train.hidden = ctx.cfg.hidden;

  ExperimentResult result = run_experiment(stage.rows, embeddings, ec);
  if (result.dropped_missing_embedding > 0) {
    ctx.warnings.push_back(std::to_string(result.dropped_missing_embedding) +
                           " user(s) dropped: no embedding vector");
  }
  return result;
}

inline std::string labels_to_csv(const LabelingResult& labeling) {
  std::string out = "user_id,label,fake_share_count\n";
  for (const auto& l : labeling.labels) {
    out += l.user_id;
    out += ',';
    out += to_string(l.label);
    out += ',';
    out += std::to_string(l.fake_share_count);
    out += '\n';
  }
  return out;
}

}  // namespace spreader
