#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tablabel/embedding.hpp"

namespace tablabel {

enum class FeatureCategory { global_stats, char_dist, char_emb, word_emb, para_emb, all };

constexpr size_t kGlobalStatsDim = 52;
constexpr size_t kCharDistDim = 960;
constexpr size_t kCharEmbDim = 400;
constexpr size_t kWordEmbDim = 401;
constexpr size_t kParaEmbDim = 400;
constexpr size_t kAllFeaturesDim = 2213;  // 52 + 960 + 400 + 401 + 400

size_t feature_dim(FeatureCategory category);
size_t feature_offset(FeatureCategory category);  // slice start inside the all-vector
const char* feature_category_name(FeatureCategory category);

struct FeatureVector {
  FeatureCategory category;
  std::vector<double> data;
};

/// Fixed character set for the distribution features: the 96 contiguous
/// bytes 0x20..0x7F. (The classic "printable ASCII" range 0x20..0x7E has
/// only 95 members; the set is padded with 0x7F to honor the 96-character,
/// 960-dimension layout. That slot is all-zero on real text.)
constexpr unsigned char kCharsetFirst = 0x20;
constexpr size_t kCharsetSize = 96;

/// Numeric cell interpretation: trimmed cell parsed as a finite decimal
/// float (scientific notation allowed, thousands separators not).
std::optional<double> parse_numeric(const std::string& cell);

/// Cells counted as missing by the None-value statistics (case-insensitive,
/// trimmed): "", "null", "none", "na", "n/a", "nan".
bool is_none_token(const std::string& cell);

/// 17-feature global statistics block, dimension 52.
FeatureVector global_statistics(const std::vector<std::string>& values);

/// The 20-bin "content shape" histogram feeding the DFT: numeric cell
/// interpretations (falling back to string lengths when fewer than half the
/// cells parse) are min-max normalized, binned, and mass-normalized.
std::array<double, 20> content_histogram(const std::vector<std::string>& values);

/// Magnitudes of the 20-point DFT of content_histogram.
std::array<double, 20> content_histogram_fft(const std::vector<std::string>& values);

/// Per-character StatSet10 blocks over the 96-character set, dimension 960.
FeatureVector character_distributions(const std::vector<std::string>& values);

/// Per-dimension mean, mode, median, variance of the per-value embeddings
/// (provider dim must be 100), concatenated to 400 entries; word providers
/// append the in-vocabulary flag (401).
FeatureVector embedding_statistics(const std::vector<std::string>& values,
                                   const EmbeddingProvider& provider);

/// Whole-column embedding, dimension 400. No statistics layer.
FeatureVector paragraph_embedding(const std::vector<std::string>& values,
                                  const EmbeddingProvider& provider);

struct FeatureProviders {
  const EmbeddingProvider* character = nullptr;  // kind character_sequence, dim 100
  const EmbeddingProvider* word = nullptr;       // kind word, dim 100
  const EmbeddingProvider* paragraph = nullptr;  // kind paragraph, dim 400
};

/// Concatenation of all five categories, dimension 2213. Throws if any
/// sub-extractor produces a non-finite entry.
FeatureVector all_features(const std::vector<std::string>& values,
                           const FeatureProviders& providers);

/// One CSV row per call: table_id,column,category,offset,dim,v0,v1,...
void write_feature_dump_row(std::ostream& out, const std::string& table_id, size_t column,
                            const FeatureVector& features);

}  // namespace tablabel
