#include "common.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tablabel/rng.hpp"

namespace tablabel::cli {

std::vector<std::vector<std::string>> sample_for_inference(const Table& table, int value_cap,
                                                           uint64_t seed) {
  std::vector<std::vector<std::string>> columns;
  columns.reserve(table.columns.size());
  uint64_t tag = fnv1a64(table.id);
  for (size_t c = 0; c < table.columns.size(); ++c) {
    Rng rng = rng_at(seed, {0x30, tag, c});
    columns.push_back(
        sample_values(table.columns[c], static_cast<size_t>(value_cap), rng.next()));
  }
  return columns;
}

std::unordered_map<std::string, const Table*> index_tables(const std::vector<Table>& tables) {
  std::unordered_map<std::string, const Table*> index;
  for (const auto& t : tables) index.emplace(t.id, &t);
  return index;
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_config_snapshot(const std::string& command, const nlohmann::json& params,
                           const std::filesystem::path& out_dir) {
  nlohmann::json snapshot;
  snapshot["command"] = command;
  snapshot["params"] = params;
  write_json_file(snapshot, out_dir / "config.json");
}

void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  size_t count = std::min<size_t>(static_cast<size_t>(threads), n);
  pool.reserve(count);
  for (size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace tablabel::cli
