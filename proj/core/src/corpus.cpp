#include "tablabel/corpus.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "tablabel/rng.hpp"

namespace tablabel {

int LabelVocabulary::add(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(labels_.size());
  labels_.push_back(label);
  index_.emplace(label, id);
  return id;
}

int LabelVocabulary::find(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

const std::string& LabelVocabulary::label(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("label id " + std::to_string(id));
  return labels_[static_cast<size_t>(id)];
}

std::string normalize_label(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  return out;
}

std::vector<std::string> sample_values(const Column& column, size_t cap, uint64_t seed) {
  if (cap == 0) throw std::invalid_argument("sample_values: cap must be >= 1");
  Rng rng(seed);
  auto idx = sample_indices(column.values.size(), cap, rng);
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(column.values[i]);
  return out;
}

CorpusSplit split_corpus(const std::vector<Table>& tables, double ratio, uint64_t seed) {
  if (tables.size() < 2) throw std::invalid_argument("split_corpus: need at least 2 tables");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("split_corpus: ratio must be in (0, 1)");
  std::vector<std::string> ids;
  ids.reserve(tables.size());
  for (const auto& t : tables) ids.push_back(t.id);
  Rng rng(seed);
  shuffle(ids, rng);
  size_t n_train = static_cast<size_t>(
      std::llround(ratio * static_cast<double>(ids.size())));
  CorpusSplit split;
  split.seed = seed;
  split.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
  split.test.assign(ids.begin() + static_cast<long>(n_train), ids.end());
  return split;
}

LabelVocabulary build_vocabulary(const std::vector<Table>& tables, int min_count) {
  std::unordered_map<std::string, int> counts;
  for (const auto& t : tables)
    for (const auto& c : t.columns)
      if (c.label) ++counts[*c.label];
  LabelVocabulary vocab;
  for (const auto& t : tables)
    for (const auto& c : t.columns)
      if (c.label && counts[*c.label] >= min_count) vocab.add(*c.label);
  return vocab;
}

}  // namespace tablabel
