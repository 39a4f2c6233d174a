#include "tablabel/training.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "tablabel/rng.hpp"

namespace tablabel {

namespace {

std::atomic<uint64_t> g_leakage_checks{0};

std::vector<std::vector<std::string>> sample_table_columns(const Table& table,
                                                           const TrainConfig& config,
                                                           int epoch_index) {
  std::vector<std::vector<std::string>> columns;
  columns.reserve(table.columns.size());
  uint64_t table_tag = fnv1a64(table.id);
  for (size_t c = 0; c < table.columns.size(); ++c) {
    Rng rng = rng_at(config.seed, {0x10, static_cast<uint64_t>(epoch_index), table_tag, c});
    columns.push_back(
        sample_values(table.columns[c], static_cast<size_t>(config.value_cap), rng.next()));
  }
  return columns;
}

std::vector<std::vector<std::string>> dedup_contexts(
    const std::vector<std::string>& predictions) {
  const size_t m = predictions.size();
  std::vector<std::vector<std::string>> contexts(m);
  for (size_t i = 0; i < m; ++i) {
    std::unordered_set<std::string> seen;
    for (size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      if (seen.insert(predictions[j]).second) contexts[i].push_back(predictions[j]);
    }
  }
  return contexts;
}

}  // namespace

uint64_t leakage_checks_count() { return g_leakage_checks.load(); }

FirstPassResult first_pass(const Model& model,
                           const std::vector<std::vector<std::string>>& columns) {
  if (columns.empty()) throw std::invalid_argument("first_pass: table has no columns");
  FirstPassResult result;
  result.distributions.reserve(columns.size());
  result.predicted.reserve(columns.size());
  for (const auto& values : columns) {
    result.distributions.push_back(model.forward(model.make_input(values, {})));
    result.predicted.push_back(model.vocabulary().label(result.distributions.back().argmax_label));
  }
  return result;
}

std::vector<std::vector<std::string>> build_contexts_unsupervised(
    const std::vector<std::string>& predictions) {
  return dedup_contexts(predictions);
}

std::vector<std::vector<std::string>> build_contexts(
    const std::vector<std::string>& predictions, const std::vector<std::string>& true_labels) {
  if (predictions.size() != true_labels.size())
    throw std::invalid_argument("build_contexts: predictions/labels length mismatch");
  auto contexts = dedup_contexts(predictions);
  for (size_t i = 0; i < contexts.size(); ++i)
    std::erase(contexts[i], true_labels[i]);
  return contexts;
}

double train_on_table(Model& model, AdamState& optimizer, const Table& table,
                      const TrainConfig& config, int epoch_index) {
  if (table.columns.empty()) throw std::invalid_argument("training table has no columns");
  const auto& vocab = model.vocabulary();

  std::vector<std::string> true_labels;
  std::vector<int> label_ids;
  for (const auto& col : table.columns) {
    if (!col.label || col.label->empty())
      throw std::runtime_error("table '" + table.id + "': unlabeled column in training corpus");
    int id = vocab.find(*col.label);
    if (id < 0)
      throw std::runtime_error("table '" + table.id + "': label '" + *col.label +
                               "' missing from vocabulary");
    true_labels.push_back(*col.label);
    label_ids.push_back(id);
  }

  auto columns = sample_table_columns(table, config, epoch_index);
  std::vector<std::pair<ColumnInput, int>> batch;
  batch.reserve(columns.size());

  if (config.values_only) {
    // Baseline mode: the first-pass predictions themselves carry the loss.
    for (size_t i = 0; i < columns.size(); ++i)
      batch.emplace_back(model.make_input(columns[i], {}), label_ids[i]);
  } else {
    FirstPassResult fp = first_pass(model, columns);  // no gradient flows from here
    auto contexts = build_contexts(fp.predicted, true_labels);
    uint64_t table_tag = fnv1a64(table.id);
    for (size_t i = 0; i < columns.size(); ++i) {
      if (config.shuffle_context) {
        Rng rng = rng_at(config.seed, {0x11, static_cast<uint64_t>(epoch_index), table_tag, i});
        shuffle(contexts[i], rng);
      }
      for (const auto& label : contexts[i]) {
        g_leakage_checks.fetch_add(1, std::memory_order_relaxed);
        if (label == true_labels[i])
          throw std::logic_error("leakage: true label '" + label + "' in context of column " +
                                 std::to_string(i) + " of table '" + table.id + "'");
      }
      batch.emplace_back(model.make_input(columns[i], contexts[i]), label_ids[i]);
    }
  }

  Gradients grads = loss_and_gradients(model, batch);
  if (!std::isfinite(grads.loss))
    throw std::runtime_error("training diverged: non-finite loss on table '" + table.id +
                             "' (epoch " + std::to_string(epoch_index) + ")");
  optimizer.apply(model, grads, AdamConfig{.learning_rate = config.learning_rate});
  return grads.loss;
}

double train_epoch(Model& model, AdamState& optimizer, const std::vector<Table>& tables,
                   const TrainConfig& config, int epoch_index) {
  if (tables.empty()) throw std::invalid_argument("train_epoch: empty corpus");
  std::vector<size_t> order(tables.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = rng_at(config.seed, {0x12, static_cast<uint64_t>(epoch_index)});
  shuffle(order, rng);

  double total = 0;
  for (size_t idx : order)
    total += train_on_table(model, optimizer, tables[idx], config, epoch_index);
  return total / static_cast<double>(tables.size());
}

FitResult fit(Model& model, AdamState& optimizer, const std::vector<Table>& tables,
              const TrainConfig& config) {
  if (config.epochs < 1) throw std::invalid_argument("fit: epochs must be >= 1");
  FitResult result;
  result.epoch_losses.reserve(static_cast<size_t>(config.epochs));
  for (int epoch = 1; epoch <= config.epochs; ++epoch)
    result.epoch_losses.push_back(train_epoch(model, optimizer, tables, config, epoch));
  return result;
}

}  // namespace tablabel
