// spreader: batch pipeline for profiling fake-news vs real-news spreaders.
//
// Subcommands map 1:1 to pipeline stages; every stage reads the flat
// key=value config, writes plain CSV into out_dir, and is deterministic
// given the configured seed. Exit codes: 0 ok, 1 fatal input error,
// 2 invalid configuration.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spreader/classifier.hpp"
#include "spreader/config.hpp"
#include "spreader/demo.hpp"
#include "spreader/pipeline.hpp"
#include "spreader/stats.hpp"

namespace {

using namespace spreader;

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threshold;
  std::optional<std::string> out;
  bool baseline_embed = false;
  bool class_weights = false;
};

void apply_overrides(PipelineConfig& cfg, const CliOptions& opt) {
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threshold) {
    if (*opt.threshold < 1) throw ConfigError("--threshold must be >= 1");
    cfg.spreader_threshold = *opt.threshold;
  }
  if (opt.out) cfg.out_dir = *opt.out;
  if (opt.baseline_embed) cfg.baseline_embed = true;
  if (opt.class_weights) cfg.class_weighting = true;
}

std::string out_file(const PipelineConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void write_output(const PipelineConfig& cfg, const char* name, const std::string& text) {
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(out_file(cfg, name), text);
}

void print_metrics(const ExperimentResult& r) {
  char line[128];
  std::snprintf(line, sizeof(line), "embedding            accuracy %.4f  F1 %.4f",
                r.baseline.accuracy, r.baseline.f1);
  std::cout << line << "\n";
  std::snprintf(line, sizeof(line), "embedding+features   accuracy %.4f  F1 %.4f",
                r.fusion.accuracy, r.fusion.f1);
  std::cout << line << "\n";
}

int cmd_label(PipelineContext& ctx) {
  const LabelingResult labeling = compute_labels(ctx);
  std::size_t fake = 0;
  for (const auto& l : labeling.labels) fake += l.label == Spreader::FakeSpreader ? 1 : 0;
  write_output(ctx.cfg, "spreader_labels.csv", labels_to_csv(labeling));
  std::cout << "wrote " << out_file(ctx.cfg, "spreader_labels.csv") << " (" << fake << " fake, "
            << labeling.labels.size() - fake << " real)\n";
  return 0;
}

int cmd_features(PipelineContext& ctx) {
  const FeatureStage stage = obtain_feature_rows(ctx, /*force_recompute=*/true);
  std::cout << "wrote " << ctx.features_path() << " (" << stage.rows.size() << " users)\n";
  return 0;
}

int cmd_stats(PipelineContext& ctx) {
  const FeatureStage stage = obtain_feature_rows(ctx);
  const auto results = significance_table(stage.rows);
  write_output(ctx.cfg, "stats.csv", stats_to_csv(results));
  const std::string table = stats_to_text(results);
  write_output(ctx.cfg, "stats.txt", table);
  std::cout << table;
  return 0;
}

int cmd_train(PipelineContext& ctx) {
  const ExperimentResult r = run_configured_experiment(ctx);
  write_output(ctx.cfg, "model_fusion.txt", save_model(r.fusion_model));
  write_output(ctx.cfg, "model_baseline.txt", save_model(r.baseline_model));
  print_metrics(r);
  std::cout << "wrote " << out_file(ctx.cfg, "model_fusion.txt") << " and "
            << out_file(ctx.cfg, "model_baseline.txt") << "\n";
  return 0;
}

int cmd_eval(PipelineContext& ctx) {
  const ExperimentResult r = run_configured_experiment(ctx);
  write_output(ctx.cfg, "eval.csv", write_eval_csv(r.baseline, r.fusion));
  print_metrics(r);
  return 0;
}

int cmd_export(PipelineContext& ctx) {
  const ExperimentResult r = run_configured_experiment(ctx);
  write_output(ctx.cfg, "vectors.csv", write_vectors_csv(r.vectors));
  const std::size_t dim = r.vectors.empty() ? 0 : r.vectors.front().h.size();
  std::cout << "wrote " << out_file(ctx.cfg, "vectors.csv") << " (" << r.vectors.size()
            << " users, " << dim << " columns of H)\n";
  return 0;
}

int cmd_demo(PipelineContext& ctx) {
  write_demo_corpus(ctx.cfg, ctx.cfg.seed.value_or(0));
  std::cout << "wrote demo corpus:\n  " << ctx.cfg.tweets << "\n  " << ctx.cfg.users << "\n  "
            << ctx.cfg.labels << "\n  " << ctx.cfg.lexicon << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spreader: profile fake-news vs real-news spreaders from tweet corpora"};
  app.require_subcommand(1);

  CliOptions opt;
  const struct {
    const char* name;
    const char* help;
    int (*run)(PipelineContext&);
  } commands[] = {
      {"label", "tag every user as fake/real spreader by distinct fake stories shared", cmd_label},
      {"features", "extract the ten motivational features per user", cmd_features},
      {"stats", "Welch t-tests between the fake and real groups", cmd_stats},
      {"train", "train the fusion and embedding-only models, write model files", cmd_train},
      {"eval", "train and evaluate both models on the held-out split", cmd_eval},
      {"export", "write the fused per-user vectors for external projection", cmd_export},
      {"demo", "generate the synthetic demo corpus at the configured paths", cmd_demo},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config_path, "path to key=value config file")->required();
    sub->add_option("--seed", opt.seed, "override the configured RNG seed");
    sub->add_option("--threshold", opt.threshold, "override spreader_threshold");
    sub->add_option("--out", opt.out, "override out_dir");
    sub->add_flag("--baseline-embed", opt.baseline_embed,
                  "use the hashed term-frequency embedding instead of an embeddings file");
    sub->add_flag("--class-weights", opt.class_weights,
                  "weight the loss by inverse class frequency");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  std::optional<PipelineContext> ctx;
  try {
    PipelineConfig cfg = load_config(opt.config_path);
    apply_overrides(cfg, opt);
    ctx.emplace(std::move(cfg));
    int rc = 0;
    for (const auto& c : commands) {
      if (name == c.name) rc = c.run(*ctx);
    }
    for (const auto& w : ctx->warnings) std::cerr << "warning: " << w << "\n";
    return rc;
  } catch (const ConfigError& e) {
    if (ctx) {
      for (const auto& w : ctx->warnings) std::cerr << "warning: " << w << "\n";
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    if (ctx) {
      for (const auto& w : ctx->warnings) std::cerr << "warning: " << w << "\n";
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
