#include <cstdio>
#include <exception>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"

namespace {

// CLI11 config files are INI/TOML by default; runs here snapshot their
// parameters as JSON, so accept flat JSON objects as config input too.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j = nlohmann::json::parse(input);
    if (!j.is_object()) throw CLI::FileError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value)
          item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      } else if (value.is_string()) {
        item.inputs.push_back(value.get<std::string>());
      } else {
        item.inputs.push_back(value.dump());
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

void enable_json_config(CLI::App* cmd) {
  cmd->config_formatter(std::make_shared<JsonConfig>());
  cmd->set_config("--config", "", "JSON config file; explicit flags take precedence");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schema-label prediction for tables with missing headers"};
  app.require_subcommand(1);

  using namespace tablabel::cli;

  GenerateArgs gen;
  auto* generate = app.add_subcommand(
      "generate", "Write a synthetic ambiguity corpus (manifest + CSV tables)");
  generate->add_option("--out", gen.out_dir, "Output corpus directory")->required();
  generate->add_option("--spec", gen.spec_path, "Generator blueprint JSON (built-in default)");
  generate->add_option("--seed", gen.seed, "Generator seed");
  generate->add_option("--num-tables", gen.num_tables, "Override the blueprint's table count");
  generate->add_option("--rows", gen.rows, "Override rows per table");
  generate->add_option("--companion-pool", gen.companion_pool,
                       "Override companion value-pool size");
  enable_json_config(generate);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Split a corpus and train the model");
  train_cmd->add_option("--manifest", train.manifest, "Corpus manifest (JSONL)")->required();
  train_cmd->add_option("--out", train.out_dir, "Run directory")->required();
  train_cmd->add_option("--corpus-config", train.corpus_config,
                        "Corpus config JSON (ratio/seed/value_cap/min_count)");
  train_cmd->add_option("--epochs", train.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.learning_rate, "Adam learning rate");
  train_cmd->add_option("--value-cap", train.value_cap, "Sampled values per column");
  train_cmd->add_option("--seed", train.seed, "Split/sampling/init seed");
  train_cmd->add_option("--ratio", train.ratio, "Train fraction of the table split");
  train_cmd->add_option("--min-count", train.min_count,
                        "Drop labels rarer than this at load time");
  train_cmd->add_flag("--values-only", train.values_only,
                      "Train the values-only baseline mode (no context)");
  train_cmd->add_flag("--shuffle-context", train.shuffle_context,
                      "Randomly permute each column's context per table");
  train_cmd->add_option("--hidden", train.hidden_dim, "Hidden layer width");
  train_cmd->add_option("--emb-dim", train.emb_dim, "Embedding dimension");
  train_cmd->add_option("--max-seq-len", train.max_seq_len, "Token budget per input");
  train_cmd->add_option("--buckets", train.buckets, "Subword hash space");
  train_cmd->add_flag("!--no-checkpoints", train.checkpoints,
                      "Skip the per-epoch checkpoint files");
  enable_json_config(train_cmd);

  PredictArgs predict;
  auto* predict_cmd =
      app.add_subcommand("predict", "Sequentially label headerless tables");
  predict_cmd->add_option("--model", predict.model_path, "Trained model file")->required();
  predict_cmd->add_option("--manifest", predict.manifest, "Corpus manifest")->required();
  predict_cmd->add_option("--out", predict.out_dir, "Run directory")->required();
  predict_cmd->add_option("--split", predict.split_path,
                          "split.json from train; predicts its test side");
  predict_cmd->add_option("--tables", predict.table_ids, "Explicit table ids")
      ->delimiter(',');
  predict_cmd->add_option("--mask-file", predict.mask_file,
                          "JSONL {table_id, masked:[col,...]} for partially known headers");
  predict_cmd->add_flag("--unique-headers,!--no-unique-headers", predict.unique_headers,
                        "Forbid duplicate headers within a table (default on)");
  predict_cmd->add_option("--top-k", predict.top_k, "Search depth per column");
  predict_cmd->add_option("--value-cap", predict.value_cap, "Sampled values per column");
  predict_cmd->add_option("--seed", predict.seed, "Sampling seed");
  predict_cmd->add_option("--rank-depth", predict.rank_depth,
                          "Truncate emitted rankings (0 = full; truncation blocks MRR/top-k "
                          "evaluation)");
  predict_cmd->add_option("--threads", predict.threads, "Worker threads across tables");
  enable_json_config(predict_cmd);

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold labels");
  eval_cmd->add_option("--predictions", evaluate.predictions, "predictions.jsonl")->required();
  eval_cmd->add_option("--manifest", evaluate.manifest, "Gold corpus manifest")->required();
  eval_cmd->add_option("--out", evaluate.out_dir, "Run directory")->required();
  eval_cmd->add_option("--split", evaluate.split_path,
                       "split.json; enables baselines and the frequency CSV");
  eval_cmd->add_option("--model", evaluate.model_path, "Model file for the masked sweep");
  eval_cmd->add_flag("--masked-sweep", evaluate.masked_sweep,
                     "Run the masked-headers sweep over the predicted tables");
  eval_cmd->add_option("--percentages", evaluate.percentages, "Masked percentages")
      ->delimiter(',');
  eval_cmd->add_option("--repeats", evaluate.repeats, "Random maskings per percentage");
  eval_cmd->add_option("--seed", evaluate.seed, "Sweep/baseline seed");
  eval_cmd->add_option("--value-cap", evaluate.value_cap, "Sampled values per column");
  eval_cmd->add_flag("--unique-headers,!--no-unique-headers", evaluate.unique_headers,
                     "Constraint used by sweep/baseline inference");
  eval_cmd->add_option("--top-k", evaluate.top_k, "Search depth per column");
  eval_cmd->add_option("--baselines", evaluate.baselines,
                       "Feature baselines to train and score (e.g. global_stats,all_features)")
      ->delimiter(',');
  eval_cmd->add_option("--baseline-model", evaluate.baseline_model,
                       "Values-only model file scored as a baseline");
  eval_cmd->add_option("--baseline-iterations", evaluate.baseline_iterations,
                       "Gradient steps for the feature-baseline classifier");
  eval_cmd->add_option("--min-count", evaluate.min_count, "Label filter for corpus loading");
  eval_cmd->add_option("--threads", evaluate.threads, "Worker threads");
  enable_json_config(eval_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (train_cmd->parsed()) return cmd_train(train);
    if (predict_cmd->parsed()) return cmd_predict(predict);
    if (eval_cmd->parsed()) return cmd_evaluate(evaluate);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
