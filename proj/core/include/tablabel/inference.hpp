#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "tablabel/encoder.hpp"

namespace tablabel {

struct InferenceOptions {
  bool unique_headers = true;
  int top_k = 5;
  bool record_contexts = false;  // keep per-pass context snapshots in the trace
};

/// Per-column record of how a label was reached, for first-vs-final
/// inspection and for the prediction output files.
struct TraceEntry {
  size_t column = 0;
  std::string first_pass;
  std::string final;
  double confidence = 0;  // probability of the final label when it was fixed
  int pass = 0;           // 1-based pass at which the column was fixed
  bool fallback = false;  // duplicate admitted through the exhaustion path
  std::vector<double> final_probs;
};

struct InferenceTrace {
  std::vector<TraceEntry> entries;  // ascending column order, predicted columns only
  /// pass_confidences[j]: (column, p_max) for every column still unlabeled
  /// during pass j+1, before that pass's selection.
  std::vector<std::vector<std::pair<size_t, double>>> pass_confidences;
  /// With record_contexts: pass_contexts[j] holds (column, context labels)
  /// for every remaining column as pass j+1 begins.
  std::vector<std::vector<std::pair<size_t, std::vector<std::string>>>> pass_contexts;
};

struct LabelingResult {
  /// Final label per predicted column, ascending column order (parallel to
  /// trace.entries).
  std::vector<std::string> labels;
  InferenceTrace trace;
};

struct UniqueHeadersChoice {
  size_t index;  // position in the distributions list
  int label;
  bool fallback;
};

/// The constrained selection routine: repeatedly takes the globally highest
/// current candidate (search depth top_k per column); candidates whose label
/// is already used are popped. If every candidate list exhausts on used
/// labels, the very first (highest-confidence) candidate is returned even
/// though it duplicates. Ties: lowest list index, then lowest label id.
UniqueHeadersChoice unique_headers_select(const std::vector<LabelDistribution>& distributions,
                                          int top_k,
                                          const std::unordered_set<int>& predicted);

/// Sequential confidence-ordered labeling of a headerless table. `columns`
/// holds the (already sampled) cell values per column.
LabelingResult label_table(const Model& model,
                           const std::vector<std::vector<std::string>>& columns,
                           const InferenceOptions& options);

/// Partially masked variant: known[i], when set, is ground truth that
/// enters every context verbatim and is never re-predicted. The sequential
/// loop runs over the masked columns only. Requires at least one masked
/// column.
LabelingResult label_table_masked(const Model& model,
                                  const std::vector<std::vector<std::string>>& columns,
                                  const std::vector<std::optional<std::string>>& known,
                                  const InferenceOptions& options);

}  // namespace tablabel
