#pragma once

#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "tablabel/corpus.hpp"

namespace tablabel {

enum class EmbeddingKind { character_sequence, word, paragraph };

/// A frozen text-embedding backend. The built-ins are deterministic
/// feature-hashed stand-ins for trained char-LSTM / subword-word / doc
/// embedding models; anything honoring this contract (finite vector of
/// exactly dim() entries, deterministic) can be plugged in instead.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual EmbeddingKind kind() const = 0;
  virtual size_t dim() const = 0;
  virtual std::vector<double> embed(const std::string& value) const = 0;

  /// Whole-column embedding. Only meaningful for paragraph providers.
  virtual std::vector<double> embed_document(const std::vector<std::string>& values) const;

  /// Word providers report whether the value shares a token with the
  /// training vocabulary; other kinds have no vocabulary.
  virtual bool in_vocabulary(const std::string& value) const {
    (void)value;
    return false;
  }
};

/// Character n-grams (n = 1..3) of the raw value, hashed into `dim`
/// buckets with +-1 signs.
class CharNgramProvider : public EmbeddingProvider {
 public:
  explicit CharNgramProvider(size_t dim = 100) : dim_(dim) {}
  EmbeddingKind kind() const override { return EmbeddingKind::character_sequence; }
  size_t dim() const override { return dim_; }
  std::vector<double> embed(const std::string& value) const override;

 private:
  size_t dim_;
};

/// Whitespace tokens embedded through boundary-wrapped subword n-grams
/// (3..5 chars) hashed into `dim` buckets; a value's embedding is the sum
/// over its tokens. Carries the training-corpus token set so the
/// out-of-vocabulary flag has something to consult.
class SubwordWordProvider : public EmbeddingProvider {
 public:
  explicit SubwordWordProvider(std::unordered_set<std::string> vocabulary, size_t dim = 100)
      : vocabulary_(std::move(vocabulary)), dim_(dim) {}

  static SubwordWordProvider from_tables(const std::vector<Table>& tables, size_t dim = 100);

  EmbeddingKind kind() const override { return EmbeddingKind::word; }
  size_t dim() const override { return dim_; }
  std::vector<double> embed(const std::string& value) const override;
  bool in_vocabulary(const std::string& value) const override;
  size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  std::unordered_set<std::string> vocabulary_;
  size_t dim_;
};

/// Token-unigram bag over the whole column, hashed into `dim` buckets and
/// L2-normalized. Invariant under any reordering of the values.
class BagParagraphProvider : public EmbeddingProvider {
 public:
  explicit BagParagraphProvider(size_t dim = 400) : dim_(dim) {}
  EmbeddingKind kind() const override { return EmbeddingKind::paragraph; }
  size_t dim() const override { return dim_; }
  std::vector<double> embed(const std::string& value) const override;
  std::vector<double> embed_document(const std::vector<std::string>& values) const override;

 private:
  size_t dim_;
};

/// Lowercased whitespace tokens of a cell value.
std::vector<std::string> whitespace_tokens(const std::string& text);

}  // namespace tablabel
