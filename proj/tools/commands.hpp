#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tablabel::cli {

struct GenerateArgs {
  std::string out_dir;
  std::string spec_path;  // optional; built-in blueprint otherwise
  uint64_t seed = 42;
  int num_tables = -1;  // <0: keep the spec's value
  int rows = -1;
  int companion_pool = -1;
};
int cmd_generate(const GenerateArgs& args);

struct TrainArgs {
  std::string manifest;
  std::string out_dir;
  std::string corpus_config;  // optional JSON with ratio/seed/value_cap/min_count
  int epochs = 10;
  double learning_rate = 1e-3;
  int value_cap = 100;
  uint64_t seed = 42;
  double ratio = 0.8;
  int min_count = 1;
  bool values_only = false;
  bool shuffle_context = false;
  int hidden_dim = 256;
  int emb_dim = 64;
  int max_seq_len = 256;
  int buckets = 65536;
  bool checkpoints = true;
};
int cmd_train(const TrainArgs& args);

struct PredictArgs {
  std::string model_path;
  std::string manifest;
  std::string out_dir;
  std::string split_path;  // use its test side
  std::vector<std::string> table_ids;
  std::string mask_file;  // JSONL {"table_id", "masked": [indices]}
  bool unique_headers = true;
  int top_k = 5;
  int value_cap = 100;
  uint64_t seed = 42;
  int rank_depth = 0;  // 0 = full ranking
  int threads = 1;
};
int cmd_predict(const PredictArgs& args);

struct EvaluateArgs {
  std::string predictions;
  std::string manifest;
  std::string out_dir;
  std::string split_path;
  std::string model_path;  // needed for the masked sweep
  bool masked_sweep = false;
  std::vector<double> percentages = {20, 40, 60, 80, 100};
  int repeats = 5;
  uint64_t seed = 42;
  int value_cap = 100;
  bool unique_headers = true;
  int top_k = 5;
  std::vector<std::string> baselines;
  std::string baseline_model;  // values-only model file scored as a baseline
  int baseline_iterations = 300;
  int min_count = 1;
  int threads = 1;
};
int cmd_evaluate(const EvaluateArgs& args);

}  // namespace tablabel::cli
