#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tablabel/corpus.hpp"
#include "tablabel/encoder.hpp"
#include "tablabel/inference.hpp"

namespace tablabel {

/// One evaluated column: the gold label id and the full predicted ranking
/// (best first; ties broken toward the lowest label index).
struct PredictionRecord {
  int true_label = 0;
  std::vector<int> ranked;
};

struct MetricsReport {
  double macro_p = 0, macro_r = 0, macro_f = 0;
  double micro_f = 0;  // equals plain accuracy in single-label multiclass
  double mrr = 0;
  std::vector<double> topk;  // topk[k-1] = top-k accuracy, k = 1..|L|
  size_t count = 0;
};

/// Label ids ordered by probability, descending; equal probabilities keep
/// ascending id order.
std::vector<int> rank_labels(const std::vector<double>& probs);

/// Macro metrics average per-label P/R/F over the labels present in the
/// gold set; a gold label that is never predicted contributes precision 0.
MetricsReport compute_metrics(const std::vector<PredictionRecord>& records, int num_labels);

enum class ColumnKind { numeric, text };

/// numeric iff strictly more than half of the cells parse as numbers.
ColumnKind column_kind(const std::vector<std::string>& values);

struct MaskedSweepPoint {
  double percentage;
  double mean_top1;
  double std_top1;
};

/// For each percentage p, masks ceil(p*m/100) random headers per table,
/// `repeats` times, and scores the masked predictions only. Deterministic
/// given the seed. At p = 100 every repeat masks the same (full) set, so
/// the std is exactly 0.
std::vector<MaskedSweepPoint> run_masked_sweep(const Model& model,
                                               const std::vector<Table>& tables,
                                               const std::vector<double>& percentages,
                                               int repeats, int value_cap, uint64_t seed,
                                               const InferenceOptions& options);

enum class BaselineKind {
  global_stats,
  char_dist,
  char_emb,
  word_emb,
  para_emb,
  all_features,
  values_only_model,
};

BaselineKind baseline_kind_from_name(const std::string& name);
const char* baseline_kind_name(BaselineKind kind);

/// Plug-in point for the feature-baseline classifier. The built-in is a
/// multinomial linear softmax trained by gradient descent; an external
/// implementation (e.g. a random forest) can be slotted in instead.
class ColumnClassifier {
 public:
  virtual ~ColumnClassifier() = default;
  virtual void fit(const std::vector<std::vector<double>>& features,
                   const std::vector<int>& labels, int num_labels) = 0;
  virtual std::vector<double> predict_proba(const std::vector<double>& features) const = 0;
};

class LinearSoftmaxClassifier : public ColumnClassifier {
 public:
  struct Config {
    int iterations = 300;
    double learning_rate = 0.05;
    uint64_t seed = 0;
  };
  LinearSoftmaxClassifier() : LinearSoftmaxClassifier(Config{}) {}
  explicit LinearSoftmaxClassifier(Config config) : config_(config) {}

  void fit(const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
           int num_labels) override;
  std::vector<double> predict_proba(const std::vector<double>& features) const override;

 private:
  Config config_;
  int num_labels_ = 0;
  size_t dim_ = 0;
  std::vector<double> mean_, scale_;  // per-dimension standardization
  std::vector<double> weights_, bias_;
};

struct BaselineConfig {
  int value_cap = 100;
  uint64_t seed = 0;
  int model_epochs = 10;           // values_only_model baseline
  double model_learning_rate = 1e-3;
  ModelConfig model;
  LinearSoftmaxClassifier::Config classifier;
};

struct BaselineResult {
  MetricsReport metrics;
  std::vector<PredictionRecord> records;  // iteration order: test tables, then columns
};

/// Trains the requested baseline on the train tables and scores it on the
/// labeled test columns. Feature baselines go through `classifier` when
/// given, otherwise the built-in linear softmax.
BaselineResult run_baseline(BaselineKind kind, const std::vector<Table>& train_tables,
                            const std::vector<Table>& test_tables,
                            const LabelVocabulary& vocabulary, const BaselineConfig& config,
                            ColumnClassifier* classifier = nullptr);

}  // namespace tablabel
