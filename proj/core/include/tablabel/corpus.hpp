#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tablabel {

/// One table column: an optional schema label and the cell values, top to
/// bottom. Cells are raw strings; the empty string is a valid cell.
struct Column {
  std::optional<std::string> label;  // normalized when present
  std::vector<std::string> values;
};

/// A data table. Invariants: at least one column, every column non-empty,
/// all columns with equal row count. Enforced by the loaders.
struct Table {
  std::string id;
  std::vector<Column> columns;

  size_t rows() const { return columns.empty() ? 0 : columns.front().values.size(); }
};

/// Bidirectional mapping between normalized schema-label strings and dense
/// indices. Index order is first-appearance order, which keeps vocabularies
/// reproducible for a fixed corpus.
class LabelVocabulary {
 public:
  int add(const std::string& label);              // returns existing id if present
  int find(const std::string& label) const;       // -1 when absent
  const std::string& label(int id) const;
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const LabelVocabulary& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

struct CorpusSplit {
  std::vector<std::string> train;  // table ids
  std::vector<std::string> test;
  uint64_t seed = 0;
};

/// Label hygiene: trim, collapse internal whitespace runs to one space,
/// lowercase (ASCII). Idempotent. No synonym merging.
std::string normalize_label(const std::string& raw);

/// min(cap, |values|) cells sampled uniformly without replacement, in
/// shuffled order. Deterministic for a given seed.
std::vector<std::string> sample_values(const Column& column, size_t cap, uint64_t seed);

/// Random unstratified split. |train| = round(ratio * n); deterministic for
/// a given seed. Requires at least 2 tables and 0 < ratio < 1.
CorpusSplit split_corpus(const std::vector<Table>& tables, double ratio, uint64_t seed);

/// Vocabulary over the labeled columns of `tables`, in first-appearance
/// order. Labels occurring fewer than min_count times are excluded.
LabelVocabulary build_vocabulary(const std::vector<Table>& tables, int min_count = 1);

}  // namespace tablabel
