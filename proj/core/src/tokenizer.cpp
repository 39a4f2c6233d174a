#include "tablabel/tokenizer.hpp"

#include <stdexcept>

#include "tablabel/embedding.hpp"
#include "tablabel/hash.hpp"

namespace tablabel {

Tokenizer::Tokenizer(TokenizerConfig config) : config_(config) {
  if (config_.buckets == 0) throw std::invalid_argument("tokenizer: buckets must be positive");
  if (config_.ngram_min == 0 || config_.ngram_min > config_.ngram_max)
    throw std::invalid_argument("tokenizer: invalid n-gram range");
  uint64_t h = fnv1a64("tablabel.tokenizer.v1");
  h = hash_combine(h, config_.buckets);
  h = hash_combine(h, config_.ngram_min);
  h = hash_combine(h, config_.ngram_max);
  fingerprint_ = h;
}

void Tokenizer::append_word(const std::string& word, std::vector<uint32_t>& out) const {
  std::string wrapped = "<" + word + ">";
  std::string_view sv(wrapped);
  for (size_t n = config_.ngram_min; n <= config_.ngram_max; ++n)
    for (size_t i = 0; i + n <= sv.size(); ++i)
      out.push_back(static_cast<uint32_t>(fnv1a64(sv.substr(i, n)) % config_.buckets));
}

std::vector<uint32_t> Tokenizer::text_ids(const std::string& text) const {
  std::vector<uint32_t> out;
  for (const auto& word : whitespace_tokens(text)) append_word(word, out);
  return out;
}

ColumnInput Tokenizer::serialize_input(const std::vector<std::string>& values,
                                       const std::vector<std::string>& context,
                                       size_t max_tokens) const {
  if (values.empty())
    throw std::invalid_argument("serialize_input: need at least one value");
  if (max_tokens < 4) throw std::invalid_argument("serialize_input: token budget too small");
  size_t budget = max_tokens - 3;  // CLS and the two SEPs

  ColumnInput input;
  input.fingerprint = fingerprint_;
  for (const auto& label : context) {
    auto ids = text_ids(label);
    input.context_ids.insert(input.context_ids.end(), ids.begin(), ids.end());
  }
  if (input.context_ids.size() > budget) input.context_ids.resize(budget);

  size_t value_budget = budget - input.context_ids.size();
  for (const auto& cell : values) {
    if (input.value_ids.size() >= value_budget) break;
    auto ids = text_ids(cell);
    input.value_ids.insert(input.value_ids.end(), ids.begin(), ids.end());
  }
  if (input.value_ids.size() > value_budget) input.value_ids.resize(value_budget);

  input.form = input.context_ids.empty() ? InputForm::values_only : InputForm::contextual;
  return input;
}

}  // namespace tablabel
