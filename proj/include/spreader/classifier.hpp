// Fusion classifier: a user embedding concatenated with the normalized
// ten-feature vector, pushed through a one-hidden-layer feed-forward
// network (ReLU hidden, sigmoid output, binary cross-entropy).
//
// Training is plain seeded mini-batch gradient descent, single-threaded so
// a fixed seed reproduces parameters bit for bit. The embedding side is
// pluggable: either an external CSV table or the built-in hashed
// term-frequency baseline.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "spreader/corpus.hpp"
#include "spreader/csv.hpp"
#include "spreader/features.hpp"
#include "spreader/lexicon.hpp"
#include "spreader/rng.hpp"

namespace spreader {

// ---------------------------------------------------------------- embeddings

struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

struct LoadedEmbeddings {
  EmbeddingTable table;
  std::size_t warnings = 0;
};

// CSV without header: user_id followed by the vector entries. Every row
// must have the same width and finite values; anything else is fatal.
inline LoadedEmbeddings load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  LoadedEmbeddings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 2) {
      throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                               ": expected user_id plus at least one value");
    }
    std::vector<double> v;
    v.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const double x = parse_double(fields[i]);
      if (!std::isfinite(x)) {
        throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                                 ": non-finite entry");
      }
      v.push_back(x);
    }
    if (out.table.dim == 0) {
      out.table.dim = v.size();
    } else if (v.size() != out.table.dim) {
      throw std::runtime_error("embeddings line " + std::to_string(line_no) +
                               ": dimension " + std::to_string(v.size()) +
                               " does not match table dimension " + std::to_string(out.table.dim));
    }
    auto [it, inserted] = out.table.vectors.try_emplace(fields[0]);
    if (!inserted) ++out.warnings;  // later row wins
    it->second = std::move(v);
  }
  if (out.table.dim == 0) throw std::runtime_error("embeddings file has no rows: " + path);
  return out;
}

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

// Hashed term-frequency embedding: every token lands in a signed bucket,
// then the vector is L2-normalized. A document with no tokens maps to the
// zero vector.
inline std::vector<double> baseline_embed(const UserDocument& doc, std::size_t dim = 256) {
  if (dim < 1) throw std::invalid_argument("baseline_embed: dim must be >= 1");
  std::vector<double> v(dim, 0.0);
  for (const auto& tweet : doc.tweets) {
    const TokenList toks = tokenize(tweet.text);
    for (const auto& tok : toks.tokens) {
      const std::uint64_t h = detail::fnv1a64(tok);
      const double sign = (h & 1) ? 1.0 : -1.0;
      v[(h >> 1) % dim] += sign;
    }
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
  }
  return v;
}

// ------------------------------------------------------------- normalization

struct NormalizationParams {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> stddev{};

  NormalizationParams() {
    stddev.fill(1.0);
  }
};

struct NormalizedFeatures {
  std::vector<std::array<double, kFeatureCount>> rows;  // aligned with input rows
  NormalizationParams params;
};

// Z-scores every row using mean/std fitted on the training users only.
// Masked entries take the training mean, i.e. 0 after normalization, and
// a feature with no training variance keeps std 1.
inline NormalizedFeatures normalize_features(const std::vector<LabeledFeatureRow>& rows,
                                             const std::set<std::string>& training_ids) {
  if (training_ids.empty()) {
    throw std::invalid_argument("normalize_features: training set is empty");
  }
  NormalizedFeatures out;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : rows) {
      if (row.features.missing[f] || training_ids.count(row.user_id) == 0) continue;
      sum += row.features.values[f];
      ++n;
    }
    const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
    double ss = 0.0;
    for (const auto& row : rows) {
      if (row.features.missing[f] || training_ids.count(row.user_id) == 0) continue;
      const double d = row.features.values[f] - mean;
      ss += d * d;
    }
    double sd = n > 0 ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
    if (sd == 0.0) sd = 1.0;
    out.params.mean[f] = mean;
    out.params.stddev[f] = sd;
  }

  out.rows.reserve(rows.size());
  for (const auto& row : rows) {
    std::array<double, kFeatureCount> z{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      z[f] = row.features.missing[f]
                 ? 0.0
                 : (row.features.values[f] - out.params.mean[f]) / out.params.stddev[f];
    }
    out.rows.push_back(z);
  }
  return out;
}

// --------------------------------------------------------------------- split

struct SplitResult {
  std::vector<LabeledFeatureRow> train;
  std::vector<LabeledFeatureRow> test;
};

// Stratified split: each class is shuffled with the seeded generator and
// cut at round(ratio * n), clamped so both sides keep at least one row per
// class. Output rows are sorted by user_id.
inline SplitResult split(const std::vector<LabeledFeatureRow>& rows, double ratio,
                         std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split ratio must be in (0,1)");
  }
  std::vector<std::size_t> fake_idx, real_idx;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    (rows[i].label.label == Spreader::FakeSpreader ? fake_idx : real_idx).push_back(i);
  }
  if (fake_idx.size() < 2 || real_idx.size() < 2) {
    throw std::invalid_argument("split requires at least 2 rows per class");
  }

  Rng rng(seed);
  SplitResult out;
  for (auto* group : {&fake_idx, &real_idx}) {
    rng.shuffle(*group);
    const auto n = static_cast<double>(group->size());
    auto n_train = static_cast<std::size_t>(std::llround(ratio * n));
    n_train = std::clamp<std::size_t>(n_train, 1, group->size() - 1);
    for (std::size_t k = 0; k < group->size(); ++k) {
      (k < n_train ? out.train : out.test).push_back(rows[(*group)[k]]);
    }
  }
  auto by_user = [](const LabeledFeatureRow& a, const LabeledFeatureRow& b) {
    return a.user_id < b.user_id;
  };
  std::sort(out.train.begin(), out.train.end(), by_user);
  std::sort(out.test.begin(), out.test.end(), by_user);
  return out;
}

// ------------------------------------------------------------------- network

struct FusionModel {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  bool with_features = true;  // false for the embedding-only baseline
  std::uint64_t seed = 0;
  NormalizationParams norm;

  std::vector<double> w1;  // hidden_dim x input_dim, row-major
  std::vector<double> b1;  // hidden_dim
  std::vector<double> w2;  // hidden_dim
  double b2 = 0.0;
};

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  bool class_weighting = false;
  std::size_t hidden = 64;
};

struct Gradients {
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;

  explicit Gradients(const FusionModel& m)
      : w1(m.w1.size(), 0.0), b1(m.b1.size(), 0.0), w2(m.w2.size(), 0.0) {}
};

inline FusionModel init_model(std::size_t input_dim, std::size_t hidden_dim,
                              std::uint64_t seed, bool with_features) {
  FusionModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.with_features = with_features;
  m.seed = seed;
  m.w1.resize(hidden_dim * input_dim);
  m.b1.assign(hidden_dim, 0.0);
  m.w2.resize(hidden_dim);

  Rng rng(seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden_dim));
  for (double& w : m.w1) w = rng.uniform(-a1, a1);
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden_dim + 1));
  for (double& w : m.w2) w = rng.uniform(-a2, a2);
  return m;
}

namespace detail {

// Pre-activation of the output unit; fills `hidden` with the ReLU layer.
inline double forward_logit(const FusionModel& m, std::span<const double> x,
                            std::vector<double>& hidden) {
  hidden.assign(m.hidden_dim, 0.0);
  for (std::size_t j = 0; j < m.hidden_dim; ++j) {
    const double* wrow = m.w1.data() + j * m.input_dim;
    double z = m.b1[j];
    for (std::size_t i = 0; i < m.input_dim; ++i) z += wrow[i] * x[i];
    hidden[j] = z > 0.0 ? z : 0.0;
  }
  double z2 = m.b2;
  for (std::size_t j = 0; j < m.hidden_dim; ++j) z2 += m.w2[j] * hidden[j];
  return z2;
}

// Numerically stable weighted binary cross-entropy on the logit.
inline double bce_on_logit(double z, double y, double weight) {
  const double loss = std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
  return weight * loss;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace detail

// Probability that the input belongs to the positive (fake spreader)
// class. Clamped a hair inside (0,1) so saturation never rounds to an
// endpoint.
inline double predict(const FusionModel& m, std::span<const double> input) {
  if (input.size() != m.input_dim) {
    throw std::invalid_argument("predict: input length " + std::to_string(input.size()) +
                                " does not match model input_dim " + std::to_string(m.input_dim));
  }
  std::vector<double> hidden;
  const double p = detail::sigmoid(detail::forward_logit(m, input, hidden));
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

inline Spreader classify(double probability) {
  return probability >= 0.5 ? Spreader::FakeSpreader : Spreader::RealSpreader;
}

// Mean weighted loss over a set of examples. `weights` are per-class
// {w_real, w_fake}; pass {1,1} for the plain unweighted loss.
inline double batch_loss(const FusionModel& m, const std::vector<std::vector<double>>& inputs,
                         const std::vector<int>& labels, const std::array<double, 2>& weights) {
  if (inputs.empty()) throw std::invalid_argument("batch_loss: empty batch");
  std::vector<double> hidden;
  double total = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double z = detail::forward_logit(m, inputs[i], hidden);
    total += detail::bce_on_logit(z, labels[i], weights[labels[i]]);
  }
  return total / static_cast<double>(inputs.size());
}

// Gradient of batch_loss with respect to every parameter, by
// backpropagation. Mean over the batch, matching batch_loss exactly.
inline Gradients batch_gradients(const FusionModel& m,
                                 const std::vector<std::vector<double>>& inputs,
                                 const std::vector<int>& labels,
                                 const std::array<double, 2>& weights) {
  if (inputs.empty()) throw std::invalid_argument("batch_gradients: empty batch");
  Gradients g(m);
  std::vector<double> hidden;
  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& x = inputs[i];
    const double z2 = detail::forward_logit(m, x, hidden);
    const double y = labels[i];
    const double dz2 = weights[labels[i]] * (detail::sigmoid(z2) - y) * inv_n;

    g.b2 += dz2;
    for (std::size_t j = 0; j < m.hidden_dim; ++j) {
      g.w2[j] += dz2 * hidden[j];
      if (hidden[j] > 0.0) {  // ReLU gate
        const double dz1 = dz2 * m.w2[j];
        g.b1[j] += dz1;
        double* grow = g.w1.data() + j * m.input_dim;
        for (std::size_t k = 0; k < m.input_dim; ++k) grow[k] += dz1 * x[k];
      }
    }
  }
  return g;
}

struct TrainResult {
  FusionModel model;
  std::vector<double> epoch_losses;  // running mean of batch losses per epoch
};

inline std::array<double, 2> class_weights(const std::vector<int>& labels, bool enabled) {
  if (!enabled) return {1.0, 1.0};
  double n_pos = 0.0;
  for (int y : labels) n_pos += y;
  const double n = static_cast<double>(labels.size());
  const double n_neg = n - n_pos;
  return {n / (2.0 * n_neg), n / (2.0 * n_pos)};
}

// Seeded mini-batch gradient descent. With zero epochs the returned model
// is exactly the initialization.
inline TrainResult train(const std::vector<std::vector<double>>& inputs,
                         const std::vector<int>& labels, const TrainConfig& config,
                         bool with_features = true) {
  if (inputs.size() != labels.size()) {
    throw std::invalid_argument("train: inputs and labels differ in length");
  }
  if (inputs.empty()) throw std::invalid_argument("train: no examples");
  if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("train: learning_rate must be > 0");
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument("train: labels must be 0 or 1");
    n_pos += static_cast<std::size_t>(y);
  }
  if (n_pos == 0 || n_pos == labels.size()) {
    throw std::invalid_argument("train: need at least one example of each class");
  }
  const std::size_t input_dim = inputs.front().size();
  for (const auto& x : inputs) {
    if (x.size() != input_dim) throw std::invalid_argument("train: ragged input matrix");
  }

  TrainResult result;
  result.model = init_model(input_dim, config.hidden, config.seed, with_features);
  FusionModel& m = result.model;
  const auto weights = class_weights(labels, config.class_weighting);

  // One RNG stream drives init and the epoch shuffles; reseeding here
  // would make every epoch reuse the init permutation.
  Rng rng(config.seed + 1);
  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<std::vector<double>> batch_x;
  std::vector<int> batch_y;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch_x.clear();
      batch_y.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch_x.push_back(inputs[order[k]]);
        batch_y.push_back(labels[order[k]]);
      }
      const double loss = batch_loss(m, batch_x, batch_y, weights);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train: loss diverged at epoch " + std::to_string(epoch) +
                                 "; the learning rate is likely too high");
      }
      epoch_loss += loss;
      ++n_batches;

      const Gradients g = batch_gradients(m, batch_x, batch_y, weights);
      const double lr = config.learning_rate;
      for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= lr * g.w1[i];
      for (std::size_t i = 0; i < m.b1.size(); ++i) m.b1[i] -= lr * g.b1[i];
      for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2[i] -= lr * g.w2[i];
      m.b2 -= lr * g.b2;
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(n_batches));
  }
  return result;
}

// ---------------------------------------------------------------- evaluation

struct EvalReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  // positive class is FakeSpreader
};

inline EvalReport evaluate(const std::vector<Spreader>& predicted,
                           const std::vector<Spreader>& actual) {
  if (predicted.size() != actual.size()) {
    throw std::invalid_argument("evaluate: length mismatch");
  }
  if (predicted.empty()) throw std::invalid_argument("evaluate: empty input");
  EvalReport r;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool pred_fake = predicted[i] == Spreader::FakeSpreader;
    const bool is_fake = actual[i] == Spreader::FakeSpreader;
    if (pred_fake && is_fake) ++r.tp;
    if (pred_fake && !is_fake) ++r.fp;
    if (!pred_fake && !is_fake) ++r.tn;
    if (!pred_fake && is_fake) ++r.fn;
  }
  const double total = static_cast<double>(predicted.size());
  r.accuracy = static_cast<double>(r.tp + r.tn) / total;
  const double precision = r.tp + r.fp > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  const double recall = r.tp + r.fn > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return r;
}

// ---------------------------------------------------------------- experiment

struct ExperimentConfig {
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  TrainConfig train;
};

struct ExportVector {
  std::string user_id;
  Spreader label;
  std::vector<double> h;  // embedding followed by normalized features
};

struct ExperimentResult {
  EvalReport baseline;  // embedding only
  EvalReport fusion;    // embedding + features
  FusionModel baseline_model;
  FusionModel fusion_model;
  std::vector<double> baseline_losses;
  std::vector<double> fusion_losses;
  std::vector<ExportVector> vectors;  // fused inputs for every user, sorted
  std::size_t dropped_missing_embedding = 0;
};

// Trains the embedding-only and embedding+features models on the same
// split with the same seed and evaluates both on the held-out rows. The
// baseline input is just the embedding (no padded feature slots), so the
// two models honestly differ in parameter count.
inline ExperimentResult run_experiment(const std::vector<LabeledFeatureRow>& all_rows,
                                       const EmbeddingTable& embeddings,
                                       const ExperimentConfig& config) {
  ExperimentResult result;

  std::vector<LabeledFeatureRow> rows;
  rows.reserve(all_rows.size());
  for (const auto& row : all_rows) {
    if (embeddings.vectors.count(row.user_id) == 0) {
      ++result.dropped_missing_embedding;
      continue;
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw std::runtime_error("run_experiment: no users with embeddings");

  const SplitResult parts = split(rows, config.split_ratio, config.seed);
  std::set<std::string> train_ids;
  for (const auto& row : parts.train) train_ids.insert(row.user_id);

  const NormalizedFeatures norm = normalize_features(rows, train_ids);
  std::unordered_map<std::string, std::size_t> row_index;
  for (std::size_t i = 0; i < rows.size(); ++i) row_index[rows[i].user_id] = i;

  auto fused_input = [&](const LabeledFeatureRow& row) {
    const auto& emb = embeddings.vectors.at(row.user_id);
    std::vector<double> h;
    h.reserve(embeddings.dim + kFeatureCount);
    h.insert(h.end(), emb.begin(), emb.end());
    const auto& z = norm.rows[row_index.at(row.user_id)];
    h.insert(h.end(), z.begin(), z.end());
    return h;
  };
  auto embed_input = [&](const LabeledFeatureRow& row) {
    return embeddings.vectors.at(row.user_id);
  };

  auto make_xy = [&](const std::vector<LabeledFeatureRow>& group, bool fused,
                     std::vector<std::vector<double>>& xs, std::vector<int>& ys) {
    xs.clear();
    ys.clear();
    for (const auto& row : group) {
      xs.push_back(fused ? fused_input(row) : embed_input(row));
      ys.push_back(row.label.label == Spreader::FakeSpreader ? 1 : 0);
    }
  };

  TrainConfig tc = config.train;
  tc.seed = config.seed;

  std::vector<std::vector<double>> xs;
  std::vector<int> ys;

  make_xy(parts.train, true, xs, ys);
  TrainResult fusion = train(xs, ys, tc, /*with_features=*/true);
  fusion.model.norm = norm.params;

  make_xy(parts.train, false, xs, ys);
  TrainResult baseline = train(xs, ys, tc, /*with_features=*/false);

  auto eval_on = [&](const FusionModel& m, bool fused) {
    std::vector<Spreader> pred, actual;
    for (const auto& row : parts.test) {
      const auto x = fused ? fused_input(row) : embed_input(row);
      pred.push_back(classify(predict(m, x)));
      actual.push_back(row.label.label);
    }
    return evaluate(pred, actual);
  };
  result.fusion = eval_on(fusion.model, true);
  result.baseline = eval_on(baseline.model, false);
  result.fusion_losses = std::move(fusion.epoch_losses);
  result.baseline_losses = std::move(baseline.epoch_losses);
  result.fusion_model = std::move(fusion.model);
  result.baseline_model = std::move(baseline.model);

  for (const auto& row : rows) {
    result.vectors.push_back({row.user_id, row.label.label, fused_input(row)});
  }
  std::sort(result.vectors.begin(), result.vectors.end(),
            [](const ExportVector& a, const ExportVector& b) { return a.user_id < b.user_id; });
  return result;
}

// --------------------------------------------------------------- model file

// Versioned text dump. Parameters are written as hex floats, so the
// round trip is bit-exact.
inline std::string save_model(const FusionModel& m) {
  std::ostringstream out;
  out << "spreader-model v1\n";
  out << "with_features " << (m.with_features ? 1 : 0) << "\n";
  out << "input_dim " << m.input_dim << "\n";
  out << "hidden_dim " << m.hidden_dim << "\n";
  out << "seed " << m.seed << "\n";
  char buf[48];
  auto emit = [&](const char* name, const double* data, std::size_t n) {
    out << name;
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), " %a", data[i]);
      out << buf;
    }
    out << "\n";
  };
  emit("norm_mean", m.norm.mean.data(), m.norm.mean.size());
  emit("norm_std", m.norm.stddev.data(), m.norm.stddev.size());
  emit("w1", m.w1.data(), m.w1.size());
  emit("b1", m.b1.data(), m.b1.size());
  emit("w2", m.w2.data(), m.w2.size());
  emit("b2", &m.b2, 1);
  return out.str();
}

inline FusionModel load_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "spreader-model v1") {
    throw std::runtime_error("unrecognized model file header");
  }
  FusionModel m;
  auto read_kv = [&](const char* key) {
    if (!std::getline(in, line)) throw std::runtime_error(std::string("model file truncated at ") + key);
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw std::runtime_error("model file: expected '" + std::string(key) + "', got '" + k + "'");
    return ls;
  };
  {
    auto ls = read_kv("with_features");
    int v = 0;
    ls >> v;
    m.with_features = v != 0;
  }
  {
    auto ls = read_kv("input_dim");
    ls >> m.input_dim;
  }
  {
    auto ls = read_kv("hidden_dim");
    ls >> m.hidden_dim;
  }
  {
    auto ls = read_kv("seed");
    ls >> m.seed;
  }
  auto read_vec = [&](const char* key, double* data, std::size_t n) {
    auto ls = read_kv(key);
    std::string tok;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(ls >> tok)) throw std::runtime_error(std::string("model file: short vector ") + key);
      data[i] = std::strtod(tok.c_str(), nullptr);
    }
  };
  m.w1.resize(m.hidden_dim * m.input_dim);
  m.b1.resize(m.hidden_dim);
  m.w2.resize(m.hidden_dim);
  read_vec("norm_mean", m.norm.mean.data(), m.norm.mean.size());
  read_vec("norm_std", m.norm.stddev.data(), m.norm.stddev.size());
  read_vec("w1", m.w1.data(), m.w1.size());
  read_vec("b1", m.b1.data(), m.b1.size());
  read_vec("w2", m.w2.data(), m.w2.size());
  read_vec("b2", &m.b2, 1);
  return m;
}

// --------------------------------------------------------------- CSV output

// Projection export: the fused vector of every user, one column per
// dimension of H.
inline std::string write_vectors_csv(const std::vector<ExportVector>& vectors) {
  std::string out = "user_id,label";
  if (!vectors.empty()) {
    for (std::size_t i = 0; i < vectors.front().h.size(); ++i) {
      out += ",h" + std::to_string(i);
    }
  }
  out += '\n';
  for (const auto& v : vectors) {
    out += v.user_id;
    out += ',';
    out += to_string(v.label);
    for (double x : v.h) {
      out += ',';
      out += format_value(x);
    }
    out += '\n';
  }
  return out;
}

inline std::string write_eval_csv(const EvalReport& baseline, const EvalReport& fusion) {
  std::string out = "model,accuracy,f1,tp,fp,tn,fn\n";
  auto add = [&](const char* name, const EvalReport& r) {
    out += name;
    out += ',';
    out += format_value(r.accuracy);
    out += ',';
    out += format_value(r.f1);
    out += ',' + std::to_string(r.tp) + ',' + std::to_string(r.fp) + ',' + std::to_string(r.tn) +
           ',' + std::to_string(r.fn) + '\n';
  };
  add("embedding", baseline);
  add("embedding+features", fusion);
  return out;
}

}  // namespace spreader
