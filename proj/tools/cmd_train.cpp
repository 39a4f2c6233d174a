#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "commands.hpp"
#include "common.hpp"
#include "tablabel/corpus_io.hpp"
#include "tablabel/training.hpp"

namespace tablabel::cli {

int cmd_train(const TrainArgs& raw_args) {
  TrainArgs args = raw_args;
  if (!args.corpus_config.empty()) {
    CorpusConfig cc = read_corpus_config(args.corpus_config);
    args.ratio = cc.ratio;
    args.seed = cc.seed;
    args.value_cap = cc.value_cap;
    args.min_count = cc.min_count;
  }

  LoadOptions load_options;
  load_options.min_count = args.min_count;
  Corpus corpus = load_corpus(args.manifest, load_options);
  std::printf("loaded %zu tables, %d labels\n", corpus.tables.size(),
              corpus.vocabulary.size());

  CorpusSplit split = split_corpus(corpus.tables, args.ratio, args.seed);
  std::unordered_set<std::string> train_ids(split.train.begin(), split.train.end());
  std::vector<Table> train_tables;
  for (const auto& t : corpus.tables)
    if (train_ids.count(t.id)) train_tables.push_back(t);

  ModelConfig model_config;
  model_config.tokenizer.buckets = static_cast<uint32_t>(args.buckets);
  model_config.emb_dim = static_cast<uint32_t>(args.emb_dim);
  model_config.hidden_dim = static_cast<uint32_t>(args.hidden_dim);
  model_config.max_seq_len = static_cast<uint32_t>(args.max_seq_len);
  model_config.values_only = args.values_only;

  TrainConfig train_config;
  train_config.epochs = args.epochs;
  train_config.learning_rate = args.learning_rate;
  train_config.seed = args.seed;
  train_config.value_cap = args.value_cap;
  train_config.shuffle_context = args.shuffle_context;
  train_config.values_only = args.values_only;

  std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  write_split(split, args.ratio, out / "split.json");
  write_config_snapshot("train",
                        {{"manifest", args.manifest},
                         {"out", args.out_dir},
                         {"epochs", args.epochs},
                         {"learning_rate", args.learning_rate},
                         {"value_cap", args.value_cap},
                         {"seed", args.seed},
                         {"ratio", args.ratio},
                         {"min_count", args.min_count},
                         {"values_only", args.values_only},
                         {"shuffle_context", args.shuffle_context},
                         {"hidden_dim", args.hidden_dim},
                         {"emb_dim", args.emb_dim},
                         {"max_seq_len", args.max_seq_len},
                         {"buckets", args.buckets},
                         {"checkpoints", args.checkpoints}},
                        out);

  Model model(model_config, corpus.vocabulary, args.seed);
  AdamState optimizer = AdamState::for_model(model);
  if (args.checkpoints) std::filesystem::create_directories(out / "checkpoints");

  std::ofstream loss_csv(out / "loss_curve.csv", std::ios::binary);
  loss_csv << "epoch,mean_loss\n";
  for (int epoch = 1; epoch <= args.epochs; ++epoch) {
    double loss = train_epoch(model, optimizer, train_tables, train_config, epoch);
    loss_csv << epoch << ',' << loss << '\n';
    loss_csv.flush();
    std::printf("epoch %d/%d mean loss %.6f\n", epoch, args.epochs, loss);
    if (args.checkpoints) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%03d.bin", epoch);
      save_model(model, out / "checkpoints" / name, &optimizer);
    }
  }

  save_model(model, out / "model.bin");
  std::printf("model written to %s (train %zu / test %zu tables)\n",
              (out / "model.bin").c_str(), split.train.size(), split.test.size());
  return 0;
}

}  // namespace tablabel::cli
