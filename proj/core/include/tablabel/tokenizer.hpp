#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tablabel {

struct TokenizerConfig {
  uint32_t buckets = 65536;  // subword id space
  uint32_t ngram_min = 3;
  uint32_t ngram_max = 5;
};

enum class InputForm { values_only, contextual };

/// Serialized encoder input: CLS + value tokens + SEP + context tokens +
/// SEP. The context segment is empty exactly in the values-only form. The
/// fingerprint ties the token ids to the tokenizer that produced them.
struct ColumnInput {
  InputForm form = InputForm::values_only;
  std::vector<uint32_t> value_ids;
  std::vector<uint32_t> context_ids;
  uint64_t fingerprint = 0;

  size_t token_count() const { return value_ids.size() + context_ids.size() + 3; }
};

/// Lowercasing whitespace tokenizer with boundary-wrapped character
/// n-gram subword hashing, fastText style. Deterministic; handles
/// out-of-vocabulary log strings gracefully because every string always
/// has subwords.
class Tokenizer {
 public:
  explicit Tokenizer(TokenizerConfig config = {});

  const TokenizerConfig& config() const { return config_; }
  uint64_t fingerprint() const { return fingerprint_; }

  /// Subword ids of one whitespace-split text, in order.
  std::vector<uint32_t> text_ids(const std::string& text) const;

  /// Builds the two-segment input. The value segment is truncated before
  /// the context segment: context labels are short and carry the
  /// disambiguating signal. Total token count (with the three specials)
  /// never exceeds max_tokens.
  ColumnInput serialize_input(const std::vector<std::string>& values,
                              const std::vector<std::string>& context,
                              size_t max_tokens) const;

 private:
  void append_word(const std::string& word, std::vector<uint32_t>& out) const;

  TokenizerConfig config_;
  uint64_t fingerprint_;
};

}  // namespace tablabel
