#include "tablabel/inference.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace tablabel {

UniqueHeadersChoice unique_headers_select(const std::vector<LabelDistribution>& distributions,
                                          int top_k,
                                          const std::unordered_set<int>& predicted) {
  if (distributions.empty())
    throw std::invalid_argument("unique_headers_select: no distributions");
  if (top_k < 1) throw std::invalid_argument("unique_headers_select: top_k must be >= 1");

  const size_t num_labels = distributions[0].probs.size();
  const size_t depth = std::min<size_t>(static_cast<size_t>(top_k), num_labels);

  // Per-column candidate lists: label ids by probability desc, label asc.
  std::vector<std::vector<int>> candidates(distributions.size());
  std::vector<size_t> front(distributions.size(), 0);
  for (size_t s = 0; s < distributions.size(); ++s) {
    std::vector<int> order(num_labels);
    for (size_t l = 0; l < num_labels; ++l) order[l] = static_cast<int>(l);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return distributions[s].probs[static_cast<size_t>(a)] >
             distributions[s].probs[static_cast<size_t>(b)];
    });
    order.resize(depth);
    candidates[s] = std::move(order);
  }

  bool have_first = false;
  UniqueHeadersChoice first{0, 0, true};
  for (;;) {
    size_t c = distributions.size();
    double best = -std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < distributions.size(); ++s) {
      if (front[s] >= depth) continue;
      double p = distributions[s].probs[static_cast<size_t>(candidates[s][front[s]])];
      if (p > best) {
        best = p;
        c = s;
      }
    }
    if (c == distributions.size()) break;  // every candidate list exhausted

    int label = candidates[c][front[c]];
    if (!have_first) {
      first = {c, label, true};
      have_first = true;
    }
    ++front[c];
    if (!predicted.count(label)) return {c, label, false};
  }
  // Only already-used labels within the search depth: fall back to the
  // highest-confidence candidate even though it duplicates.
  return first;
}

namespace {

struct ContextEntry {
  std::string label;
  bool known;
};

std::vector<std::string> context_labels(const std::vector<ContextEntry>& entries) {
  std::vector<std::string> labels;
  labels.reserve(entries.size());
  for (const auto& e : entries) labels.push_back(e.label);
  return labels;
}

}  // namespace

LabelingResult label_table_masked(const Model& model,
                                  const std::vector<std::vector<std::string>>& columns,
                                  const std::vector<std::optional<std::string>>& known,
                                  const InferenceOptions& options) {
  const size_t m = columns.size();
  if (m == 0) throw std::invalid_argument("label_table: table has no columns");
  if (known.size() != m)
    throw std::invalid_argument("label_table_masked: known/columns length mismatch");
  if (options.unique_headers && options.top_k < 1)
    throw std::invalid_argument("label_table: top_k must be >= 1 with unique_headers");

  std::vector<size_t> masked;
  for (size_t i = 0; i < m; ++i)
    if (!known[i]) masked.push_back(i);
  if (masked.empty()) throw std::invalid_argument("label_table_masked: no masked columns");

  const auto& vocab = model.vocabulary();

  // Phase 1: values-only predictions for the masked columns.
  std::vector<std::string> first_pass_label(m);
  for (size_t i : masked) {
    auto dist = model.forward(model.make_input(columns[i], {}));
    first_pass_label[i] = vocab.label(dist.argmax_label);
  }

  // Phase 2: per-masked-column contexts. Known labels enter verbatim (even
  // when duplicated); predicted labels are deduplicated among themselves.
  std::vector<std::vector<ContextEntry>> contexts(m);
  for (size_t i : masked) {
    std::unordered_set<std::string> seen_predicted;
    for (size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      if (known[j]) {
        contexts[i].push_back({*known[j], true});
      } else if (seen_predicted.insert(first_pass_label[j]).second) {
        contexts[i].push_back({first_pass_label[j], false});
      }
    }
  }

  std::unordered_set<int> predicted_ids;
  for (size_t j = 0; j < m; ++j)
    if (known[j]) {
      int id = vocab.find(*known[j]);
      if (id >= 0) predicted_ids.insert(id);
    }

  // Phase 3: one column fixed per pass, highest confidence first.
  LabelingResult result;
  result.trace.entries.resize(masked.size());
  std::vector<size_t> remaining = masked;  // ascending
  std::unordered_map<size_t, size_t> entry_of;  // column -> slot in trace
  for (size_t slot = 0; slot < masked.size(); ++slot) entry_of[masked[slot]] = slot;

  const size_t total_passes = masked.size();
  for (size_t pass = 1; pass <= total_passes; ++pass) {
    if (options.record_contexts) {
      auto& snapshot = result.trace.pass_contexts.emplace_back();
      for (size_t i : remaining) snapshot.emplace_back(i, context_labels(contexts[i]));
    }
    std::vector<LabelDistribution> dists;
    dists.reserve(remaining.size());
    for (size_t i : remaining)
      dists.push_back(model.forward(model.make_input(columns[i], context_labels(contexts[i]))));

    auto& confidences = result.trace.pass_confidences.emplace_back();
    for (size_t s = 0; s < remaining.size(); ++s)
      confidences.emplace_back(remaining[s], dists[s].confidence);

    size_t idx = 0;
    int label_id;
    bool fallback = false;
    if (options.unique_headers) {
      auto choice = unique_headers_select(dists, options.top_k, predicted_ids);
      idx = choice.index;
      label_id = choice.label;
      fallback = choice.fallback;
    } else {
      for (size_t s = 1; s < dists.size(); ++s)
        if (dists[s].confidence > dists[idx].confidence) idx = s;
      label_id = dists[idx].argmax_label;
    }

    size_t h = remaining[idx];
    const std::string final_label = vocab.label(label_id);
    TraceEntry& entry = result.trace.entries[entry_of[h]];
    entry.column = h;
    entry.first_pass = first_pass_label[h];
    entry.final = final_label;
    entry.confidence = dists[idx].probs[static_cast<size_t>(label_id)];
    entry.pass = static_cast<int>(pass);
    entry.fallback = fallback;
    entry.final_probs = std::move(dists[idx].probs);

    predicted_ids.insert(label_id);
    remaining.erase(remaining.begin() + static_cast<long>(idx));

    // Replace the chosen column's first-pass label with its final label in
    // every remaining context; append when the slot was deduplicated away.
    for (size_t i : remaining) {
      auto& entries = contexts[i];
      auto slot = std::find_if(entries.begin(), entries.end(), [&](const ContextEntry& e) {
        return !e.known && e.label == first_pass_label[h];
      });
      if (slot != entries.end()) {
        slot->label = final_label;
      } else if (std::none_of(entries.begin(), entries.end(), [&](const ContextEntry& e) {
                   return e.label == final_label;
                 })) {
        entries.push_back({final_label, false});
      }
    }
  }

  result.labels.reserve(masked.size());
  for (const auto& entry : result.trace.entries) result.labels.push_back(entry.final);
  return result;
}

LabelingResult label_table(const Model& model,
                           const std::vector<std::vector<std::string>>& columns,
                           const InferenceOptions& options) {
  std::vector<std::optional<std::string>> known(columns.size());
  return label_table_masked(model, columns, known, options);
}

}  // namespace tablabel
