#include "tablabel/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tablabel/features.hpp"
#include "tablabel/rng.hpp"
#include "tablabel/training.hpp"

namespace tablabel {

std::vector<int> rank_labels(const std::vector<double>& probs) {
  std::vector<int> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return probs[static_cast<size_t>(a)] > probs[static_cast<size_t>(b)];
  });
  return order;
}

MetricsReport compute_metrics(const std::vector<PredictionRecord>& records, int num_labels) {
  if (records.empty()) throw std::invalid_argument("compute_metrics: no records");
  if (num_labels < 1) throw std::invalid_argument("compute_metrics: num_labels must be >= 1");

  const auto L = static_cast<size_t>(num_labels);
  std::vector<size_t> tp(L, 0), fp(L, 0), fn(L, 0), gold(L, 0);
  size_t correct = 0;
  double reciprocal_sum = 0;
  std::vector<size_t> rank_hits(L, 0);  // rank_hits[r]: columns whose true rank is r+1

  for (const auto& rec : records) {
    if (rec.true_label < 0 || rec.true_label >= num_labels)
      throw std::invalid_argument("compute_metrics: true label out of range");
    if (rec.ranked.size() != L)
      throw std::invalid_argument("compute_metrics: ranking must cover all labels");
    const auto truth = static_cast<size_t>(rec.true_label);
    const auto top = static_cast<size_t>(rec.ranked.front());
    ++gold[truth];
    if (top == truth) {
      ++tp[truth];
      ++correct;
    } else {
      ++fp[top];
      ++fn[truth];
    }
    auto pos = std::find(rec.ranked.begin(), rec.ranked.end(), rec.true_label);
    if (pos == rec.ranked.end())
      throw std::invalid_argument("compute_metrics: true label missing from ranking");
    auto rank = static_cast<size_t>(pos - rec.ranked.begin());  // 0-based
    reciprocal_sum += 1.0 / static_cast<double>(rank + 1);
    ++rank_hits[rank];
  }

  MetricsReport report;
  report.count = records.size();
  size_t gold_labels = 0;
  for (size_t l = 0; l < L; ++l) {
    if (gold[l] == 0) continue;
    ++gold_labels;
    double predicted = static_cast<double>(tp[l] + fp[l]);
    double p = predicted > 0 ? static_cast<double>(tp[l]) / predicted : 0.0;
    double r = static_cast<double>(tp[l]) / static_cast<double>(tp[l] + fn[l]);
    double f = (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
    report.macro_p += p;
    report.macro_r += r;
    report.macro_f += f;
  }
  report.macro_p /= static_cast<double>(gold_labels);
  report.macro_r /= static_cast<double>(gold_labels);
  report.macro_f /= static_cast<double>(gold_labels);
  report.micro_f = static_cast<double>(correct) / static_cast<double>(records.size());
  report.mrr = reciprocal_sum / static_cast<double>(records.size());

  report.topk.resize(L);
  size_t cumulative = 0;
  for (size_t k = 0; k < L; ++k) {
    cumulative += rank_hits[k];
    report.topk[k] = static_cast<double>(cumulative) / static_cast<double>(records.size());
  }
  return report;
}

ColumnKind column_kind(const std::vector<std::string>& values) {
  if (values.empty()) throw std::invalid_argument("column_kind: need at least one value");
  size_t numeric = 0;
  for (const auto& v : values)
    if (parse_numeric(v)) ++numeric;
  return numeric * 2 > values.size() ? ColumnKind::numeric : ColumnKind::text;
}

std::vector<MaskedSweepPoint> run_masked_sweep(const Model& model,
                                               const std::vector<Table>& tables,
                                               const std::vector<double>& percentages,
                                               int repeats, int value_cap, uint64_t seed,
                                               const InferenceOptions& options) {
  if (repeats < 1) throw std::invalid_argument("run_masked_sweep: repeats must be >= 1");
  for (double p : percentages)
    if (!(p > 0.0 && p <= 100.0))
      throw std::invalid_argument("run_masked_sweep: percentages must lie in (0, 100]");

  // Values are sampled once per column; only the mask varies across repeats.
  std::vector<std::vector<std::vector<std::string>>> sampled(tables.size());
  for (size_t t = 0; t < tables.size(); ++t) {
    uint64_t tag = fnv1a64(tables[t].id);
    for (size_t c = 0; c < tables[t].columns.size(); ++c) {
      Rng rng = rng_at(seed, {0x20, tag, c});
      sampled[t].push_back(sample_values(tables[t].columns[c],
                                         static_cast<size_t>(value_cap), rng.next()));
    }
  }

  std::vector<MaskedSweepPoint> points;
  for (size_t pi = 0; pi < percentages.size(); ++pi) {
    const double pct = percentages[pi];
    std::vector<double> per_repeat;
    for (int r = 0; r < repeats; ++r) {
      size_t masked_total = 0, masked_correct = 0;
      for (size_t t = 0; t < tables.size(); ++t) {
        const Table& table = tables[t];
        const size_t m = table.columns.size();
        auto k = static_cast<size_t>(
            std::ceil(pct * static_cast<double>(m) / 100.0));
        k = std::clamp<size_t>(k, 1, m);
        Rng rng = rng_at(seed, {0x21, pi, static_cast<uint64_t>(r), fnv1a64(table.id)});
        auto mask = sample_indices(m, k, rng);

        std::vector<std::optional<std::string>> known(m);
        for (size_t c = 0; c < m; ++c) known[c] = table.columns[c].label;
        for (size_t c : mask) known[c].reset();

        auto result = label_table_masked(model, sampled[t], known, options);
        for (const auto& entry : result.trace.entries) {
          ++masked_total;
          if (table.columns[entry.column].label == entry.final) ++masked_correct;
        }
      }
      per_repeat.push_back(static_cast<double>(masked_correct) /
                           static_cast<double>(masked_total));
    }
    double mean_acc = std::accumulate(per_repeat.begin(), per_repeat.end(), 0.0) /
                      static_cast<double>(per_repeat.size());
    double var = 0;
    for (double a : per_repeat) var += (a - mean_acc) * (a - mean_acc);
    var /= static_cast<double>(per_repeat.size());
    points.push_back({pct, mean_acc, std::sqrt(var)});
  }
  return points;
}

BaselineKind baseline_kind_from_name(const std::string& name) {
  if (name == "global_stats") return BaselineKind::global_stats;
  if (name == "char_dist") return BaselineKind::char_dist;
  if (name == "char_emb") return BaselineKind::char_emb;
  if (name == "word_emb") return BaselineKind::word_emb;
  if (name == "para_emb") return BaselineKind::para_emb;
  if (name == "all_features") return BaselineKind::all_features;
  if (name == "values_only_model") return BaselineKind::values_only_model;
  throw std::invalid_argument("unknown baseline kind: " + name);
}

const char* baseline_kind_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::global_stats: return "global_stats";
    case BaselineKind::char_dist: return "char_dist";
    case BaselineKind::char_emb: return "char_emb";
    case BaselineKind::word_emb: return "word_emb";
    case BaselineKind::para_emb: return "para_emb";
    case BaselineKind::all_features: return "all_features";
    case BaselineKind::values_only_model: return "values_only_model";
  }
  throw std::logic_error("unknown baseline kind");
}

void LinearSoftmaxClassifier::fit(const std::vector<std::vector<double>>& features,
                                  const std::vector<int>& labels, int num_labels) {
  if (features.empty() || features.size() != labels.size())
    throw std::invalid_argument("classifier fit: empty or mismatched training data");
  num_labels_ = num_labels;
  dim_ = features.front().size();
  const size_t n = features.size();
  const auto L = static_cast<size_t>(num_labels);

  mean_.assign(dim_, 0.0);
  scale_.assign(dim_, 1.0);
  for (const auto& x : features)
    for (size_t j = 0; j < dim_; ++j) mean_[j] += x[j];
  for (double& m : mean_) m /= static_cast<double>(n);
  std::vector<double> var(dim_, 0.0);
  for (const auto& x : features)
    for (size_t j = 0; j < dim_; ++j) var[j] += (x[j] - mean_[j]) * (x[j] - mean_[j]);
  for (size_t j = 0; j < dim_; ++j) {
    double sd = std::sqrt(var[j] / static_cast<double>(n));
    scale_[j] = sd > 0 ? 1.0 / sd : 1.0;
  }

  std::vector<std::vector<double>> X(n, std::vector<double>(dim_));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < dim_; ++j) X[i][j] = (features[i][j] - mean_[j]) * scale_[j];

  weights_.assign(L * dim_, 0.0);
  bias_.assign(L, 0.0);

  // Full-batch Adam on the mean cross-entropy.
  std::vector<double> mw(weights_.size(), 0.0), vw(weights_.size(), 0.0);
  std::vector<double> mb(L, 0.0), vb(L, 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> logits(L), probs(L);
  std::vector<double> gw(weights_.size()), gb(L);

  for (int it = 1; it <= config_.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t l = 0; l < L; ++l) {
        double z = bias_[l];
        const double* wrow = weights_.data() + l * dim_;
        for (size_t j = 0; j < dim_; ++j) z += wrow[j] * X[i][j];
        logits[l] = z;
      }
      double zmax = *std::max_element(logits.begin(), logits.end());
      double sum = 0;
      for (size_t l = 0; l < L; ++l) sum += (probs[l] = std::exp(logits[l] - zmax));
      for (size_t l = 0; l < L; ++l) {
        double dz = (probs[l] / sum - (static_cast<int>(l) == labels[i] ? 1.0 : 0.0)) /
                    static_cast<double>(n);
        gb[l] += dz;
        double* gwrow = gw.data() + l * dim_;
        for (size_t j = 0; j < dim_; ++j) gwrow[j] += dz * X[i][j];
      }
    }
    double bc1 = 1.0 - std::pow(beta1, it), bc2 = 1.0 - std::pow(beta2, it);
    auto adam = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                    const std::vector<double>& g) {
      for (size_t j = 0; j < p.size(); ++j) {
        m[j] = beta1 * m[j] + (1 - beta1) * g[j];
        v[j] = beta2 * v[j] + (1 - beta2) * g[j] * g[j];
        p[j] -= config_.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps);
      }
    };
    adam(weights_, mw, vw, gw);
    adam(bias_, mb, vb, gb);
  }
}

std::vector<double> LinearSoftmaxClassifier::predict_proba(
    const std::vector<double>& features) const {
  if (features.size() != dim_)
    throw std::invalid_argument("classifier predict: feature dimension mismatch");
  const auto L = static_cast<size_t>(num_labels_);
  std::vector<double> logits(L);
  for (size_t l = 0; l < L; ++l) {
    double z = bias_[l];
    const double* wrow = weights_.data() + l * dim_;
    for (size_t j = 0; j < dim_; ++j) z += wrow[j] * (features[j] - mean_[j]) * scale_[j];
    logits[l] = z;
  }
  double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (double& z : logits) sum += (z = std::exp(z - zmax));
  for (double& z : logits) z /= sum;
  return logits;
}

namespace {

std::vector<std::string> sampled_column(const Column& column, int value_cap, uint64_t seed,
                                        const std::string& table_id, size_t col) {
  Rng rng = rng_at(seed, {0x22, fnv1a64(table_id), col});
  return sample_values(column, static_cast<size_t>(value_cap), rng.next());
}

std::vector<double> baseline_features(BaselineKind kind, const std::vector<std::string>& values,
                                      const FeatureProviders& providers) {
  switch (kind) {
    case BaselineKind::global_stats: return global_statistics(values).data;
    case BaselineKind::char_dist: return character_distributions(values).data;
    case BaselineKind::char_emb:
      return embedding_statistics(values, *providers.character).data;
    case BaselineKind::word_emb: return embedding_statistics(values, *providers.word).data;
    case BaselineKind::para_emb: return paragraph_embedding(values, *providers.paragraph).data;
    case BaselineKind::all_features: return all_features(values, providers).data;
    case BaselineKind::values_only_model: break;
  }
  throw std::logic_error("baseline_features: not a feature baseline");
}

BaselineResult run_model_baseline(const std::vector<Table>& train_tables,
                                  const std::vector<Table>& test_tables,
                                  const LabelVocabulary& vocabulary,
                                  const BaselineConfig& config) {
  ModelConfig model_config = config.model;
  model_config.values_only = true;
  Model model(model_config, vocabulary, config.seed);
  AdamState optimizer = AdamState::for_model(model);
  TrainConfig train_config;
  train_config.epochs = config.model_epochs;
  train_config.learning_rate = config.model_learning_rate;
  train_config.seed = config.seed;
  train_config.value_cap = config.value_cap;
  train_config.values_only = true;
  fit(model, optimizer, train_tables, train_config);

  BaselineResult result;
  for (const auto& table : test_tables) {
    for (size_t c = 0; c < table.columns.size(); ++c) {
      const Column& column = table.columns[c];
      if (!column.label) continue;
      int truth = vocabulary.find(*column.label);
      if (truth < 0) continue;
      auto values = sampled_column(column, config.value_cap, config.seed, table.id, c);
      auto dist = model.forward(model.make_input(values, {}));
      result.records.push_back({truth, rank_labels(dist.probs)});
    }
  }
  if (result.records.empty())
    throw std::runtime_error("run_baseline: no labeled test columns to evaluate");
  result.metrics = compute_metrics(result.records, vocabulary.size());
  return result;
}

}  // namespace

BaselineResult run_baseline(BaselineKind kind, const std::vector<Table>& train_tables,
                            const std::vector<Table>& test_tables,
                            const LabelVocabulary& vocabulary, const BaselineConfig& config,
                            ColumnClassifier* classifier) {
  if (kind == BaselineKind::values_only_model)
    return run_model_baseline(train_tables, test_tables, vocabulary, config);

  CharNgramProvider char_provider;
  SubwordWordProvider word_provider = SubwordWordProvider::from_tables(train_tables);
  BagParagraphProvider paragraph_provider;
  FeatureProviders providers{&char_provider, &word_provider, &paragraph_provider};

  std::vector<std::vector<double>> X;
  std::vector<int> y;
  for (const auto& table : train_tables) {
    for (size_t c = 0; c < table.columns.size(); ++c) {
      const Column& column = table.columns[c];
      if (!column.label) continue;
      int truth = vocabulary.find(*column.label);
      if (truth < 0) continue;
      auto values = sampled_column(column, config.value_cap, config.seed, table.id, c);
      X.push_back(baseline_features(kind, values, providers));
      y.push_back(truth);
    }
  }
  if (X.empty()) throw std::runtime_error("run_baseline: no labeled training columns");

  LinearSoftmaxClassifier built_in(config.classifier);
  ColumnClassifier& clf = classifier ? *classifier : built_in;
  clf.fit(X, y, vocabulary.size());

  BaselineResult result;
  for (const auto& table : test_tables) {
    for (size_t c = 0; c < table.columns.size(); ++c) {
      const Column& column = table.columns[c];
      if (!column.label) continue;
      int truth = vocabulary.find(*column.label);
      if (truth < 0) continue;
      auto values = sampled_column(column, config.value_cap, config.seed, table.id, c);
      result.records.push_back({truth, rank_labels(clf.predict_proba(
                                            baseline_features(kind, values, providers)))});
    }
  }
  if (result.records.empty())
    throw std::runtime_error("run_baseline: no labeled test columns to evaluate");
  result.metrics = compute_metrics(result.records, vocabulary.size());
  return result;
}

}  // namespace tablabel
