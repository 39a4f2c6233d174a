#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tablabel/corpus.hpp"

namespace tablabel {

/// Generator blueprint for a desk-scale corpus with controlled label
/// ambiguity. Each ambiguous pair owns one shared value pool; its members
/// draw cells from that pool and are distinguishable only through the
/// companion labels they co-occur with. Plain families produce unambiguous
/// tables.
struct SyntheticSpec {
  struct Member {
    std::string label;
    std::vector<std::string> companions;  // labels with private value pools
  };
  struct Pair {
    std::vector<std::string> pool;  // shared cell values for all members
    std::vector<Member> members;
  };
  struct Family {
    std::vector<std::string> labels;  // co-occurring labels, private pools
  };

  int num_tables = 160;
  int rows_per_table = 20;
  int companion_pool_size = 30;
  bool require_ambiguity = true;
  std::vector<Pair> pairs;
  std::vector<Family> families;  // optional extra unambiguous tables
};

/// The built-in blueprint: four ambiguous pairs (two string-valued, two
/// numeric-valued), three companions per member.
SyntheticSpec default_synthetic_spec();

SyntheticSpec read_synthetic_spec(const std::filesystem::path& path);
void write_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path);

/// Deterministic for a given (spec, seed). Tables cycle round-robin through
/// every pair member and family so label frequencies stay balanced. Column
/// order is shuffled per table.
std::vector<Table> generate_synthetic_corpus(const SyntheticSpec& spec, uint64_t seed);

/// Private value pool for a companion label: "<label>_v00" .. with spaces
/// replaced by underscores. Exposed for tests.
std::vector<std::string> companion_pool(const std::string& label, int size);

}  // namespace tablabel
