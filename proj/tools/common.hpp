#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tablabel/corpus.hpp"

namespace tablabel::cli {

/// Canonical per-column value sampling for prediction-side commands: one
/// stream per (seed, table, column) so reruns are byte-identical.
std::vector<std::vector<std::string>> sample_for_inference(const Table& table, int value_cap,
                                                           uint64_t seed);

std::unordered_map<std::string, const Table*> index_tables(const std::vector<Table>& tables);

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Every command drops an immutable snapshot of its effective parameters
/// next to its outputs.
void write_config_snapshot(const std::string& command, const nlohmann::json& params,
                           const std::filesystem::path& out_dir);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
/// written to per-index slots; the call returns after all work finishes.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

}  // namespace tablabel::cli
