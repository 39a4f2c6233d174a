#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tablabel/corpus.hpp"
#include "tablabel/csv.hpp"

namespace tablabel {

/// One line of a JSONL manifest: {"id": ..., "path": ..., "dialect":
/// {"delimiter": ",", "has_header": true}}. Paths are resolved relative to
/// the manifest's directory.
struct ManifestEntry {
  std::string id;
  std::string path;
  Dialect dialect;
};

struct LoadOptions {
  /// Labels occurring fewer than this many times are dropped together with
  /// their columns. 1 disables the filter (desk-scale default); 10 mirrors
  /// the usual frequency cutoff for large corpora.
  int min_count = 1;
};

struct Corpus {
  std::vector<Table> tables;
  LabelVocabulary vocabulary;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);

/// Loads every table in the manifest, normalizes labels, drops columns that
/// are entirely empty strings, applies the min_count label filter, and
/// builds the vocabulary over the remaining labeled columns. Tables left
/// without columns are dropped. Throws on missing files, malformed rows
/// (message names the table id and row number) and an empty result.
Corpus load_corpus(const std::filesystem::path& manifest_path, const LoadOptions& options = {});

/// Writes tables as CSV files plus a manifest.jsonl into `dir`. Labeled
/// columns produce a header row. Inverse of load_corpus up to the load-time
/// cleanup (which is idempotent).
void save_corpus(const std::vector<Table>& tables, const std::filesystem::path& dir);

/// Corpus-level experiment knobs, stored as a small JSON file.
struct CorpusConfig {
  double ratio = 0.8;
  uint64_t seed = 0;
  int value_cap = 100;
  int min_count = 1;
};

CorpusConfig read_corpus_config(const std::filesystem::path& path);
void write_corpus_config(const CorpusConfig& config, const std::filesystem::path& path);

void write_split(const CorpusSplit& split, double ratio, const std::filesystem::path& path);
CorpusSplit read_split(const std::filesystem::path& path);

}  // namespace tablabel
