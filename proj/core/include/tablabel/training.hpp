#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tablabel/corpus.hpp"
#include "tablabel/encoder.hpp"

namespace tablabel {

struct TrainConfig {
  int epochs = 10;
  double learning_rate = 1e-3;
  uint64_t seed = 0;
  int value_cap = 100;
  bool shuffle_context = false;  // permute each context per table pass
  bool values_only = false;      // first-pass-only baseline training
};

struct FirstPassResult {
  std::vector<LabelDistribution> distributions;
  std::vector<std::string> predicted;  // argmax label strings
};

/// Values-only prediction round over the (already sampled) columns of one
/// table. Runs no gradient computation.
FirstPassResult first_pass(const Model& model,
                           const std::vector<std::vector<std::string>>& columns);

/// Per-column training context: the other columns' first-pass predictions,
/// order preserving, deduplicated, with the column's own true label removed
/// so the model cannot copy the answer.
std::vector<std::vector<std::string>> build_contexts(
    const std::vector<std::string>& predictions, const std::vector<std::string>& true_labels);

/// Test-time variant: true labels are unknown, so only deduplication applies.
std::vector<std::vector<std::string>> build_contexts_unsupervised(
    const std::vector<std::string>& predictions);

/// The three-phase step for one table: first pass, context construction,
/// contextual forward for all columns, one optimizer step on the mean
/// cross-entropy of the contextual predictions only. Returns that loss.
/// `epoch_index` feeds the per-epoch sampling/shuffling streams.
double train_on_table(Model& model, AdamState& optimizer, const Table& table,
                      const TrainConfig& config, int epoch_index);

/// One pass over the corpus in seeded shuffled order; returns the mean
/// per-table loss. Aborts with diagnostics when the loss turns non-finite.
double train_epoch(Model& model, AdamState& optimizer, const std::vector<Table>& tables,
                   const TrainConfig& config, int epoch_index);

struct FitResult {
  std::vector<double> epoch_losses;
};

FitResult fit(Model& model, AdamState& optimizer, const std::vector<Table>& tables,
              const TrainConfig& config);

/// How many per-column leakage assertions have run in this process. The
/// assertions throw on violation; the counter lets test harnesses confirm
/// they were actually exercised.
uint64_t leakage_checks_count();

}  // namespace tablabel
