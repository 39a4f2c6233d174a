#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "commands.hpp"
#include "common.hpp"
#include "tablabel/corpus_io.hpp"
#include "tablabel/evaluation.hpp"

namespace tablabel::cli {

namespace {

using nlohmann::json;

json metrics_to_json(const MetricsReport& report) {
  json topk;
  for (size_t k = 0; k < report.topk.size(); ++k)
    topk[std::to_string(k + 1)] = report.topk[k];
  return {{"count", report.count},  {"macro_p", report.macro_p},
          {"macro_r", report.macro_r}, {"macro_f", report.macro_f},
          {"micro_f", report.micro_f}, {"mrr", report.mrr},
          {"topk", std::move(topk)}};
}

struct ScoredColumn {
  PredictionRecord record;
  ColumnKind kind;
  std::string gold_label;
};

}  // namespace

int cmd_evaluate(const EvaluateArgs& args) {
  LoadOptions load_options;
  load_options.min_count = args.min_count;
  Corpus corpus = load_corpus(args.manifest, load_options);
  auto by_id = index_tables(corpus.tables);

  std::ifstream in(args.predictions);
  if (!in) throw std::runtime_error("cannot open predictions: " + args.predictions);

  // The ranked lists define the label universe; give them stable ids.
  LabelVocabulary eval_vocab;
  std::vector<ScoredColumn> scored;
  std::unordered_set<std::string> prediction_table_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line);
    const std::string table_id = record.at("table_id").get<std::string>();
    auto table_it = by_id.find(table_id);
    if (table_it == by_id.end())
      throw std::runtime_error("predictions line " + std::to_string(line_no) +
                               ": unknown table id '" + table_id + "'");
    const Table& table = *table_it->second;
    prediction_table_ids.insert(table_id);

    for (const auto& col : record.at("columns")) {
      auto index = col.at("index").get<size_t>();
      if (index >= table.columns.size())
        throw std::runtime_error("predictions for table '" + table_id +
                                 "': column index out of range");
      if (!table.columns[index].label)
        throw std::runtime_error("table '" + table_id + "' column " +
                                 std::to_string(index) + " has no gold label");
      auto ranked_labels = col.at("ranked").get<std::vector<std::string>>();
      if (ranked_labels.empty())
        throw std::runtime_error("predictions carry no ranking; re-run predict");

      if (eval_vocab.size() == 0) {
        auto sorted = ranked_labels;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& l : sorted) eval_vocab.add(l);
      }
      if (ranked_labels.size() != static_cast<size_t>(eval_vocab.size()))
        throw std::runtime_error(
            "predictions hold truncated rankings (rank_depth was set); full rankings are "
            "required for MRR and top-k");

      ScoredColumn sc;
      sc.gold_label = *table.columns[index].label;
      int truth = eval_vocab.find(sc.gold_label);
      if (truth < 0)
        throw std::runtime_error("gold label '" + sc.gold_label +
                                 "' is outside the model's label set");
      sc.record.true_label = truth;
      for (const auto& l : ranked_labels) {
        int id = eval_vocab.find(l);
        if (id < 0)
          throw std::runtime_error("ranking mentions unknown label '" + l + "'");
        sc.record.ranked.push_back(id);
      }
      sc.kind = column_kind(table.columns[index].values);
      scored.push_back(std::move(sc));
    }
  }
  if (scored.empty()) throw std::runtime_error("predictions file has no scorable columns");

  std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);

  std::vector<PredictionRecord> all_records, numeric_records, text_records;
  for (const auto& sc : scored) {
    all_records.push_back(sc.record);
    (sc.kind == ColumnKind::numeric ? numeric_records : text_records).push_back(sc.record);
  }
  MetricsReport overall = compute_metrics(all_records, eval_vocab.size());
  json metrics = metrics_to_json(overall);
  json by_kind;
  if (!numeric_records.empty())
    by_kind["numeric"] = metrics_to_json(compute_metrics(numeric_records, eval_vocab.size()));
  if (!text_records.empty())
    by_kind["string"] = metrics_to_json(compute_metrics(text_records, eval_vocab.size()));
  metrics["by_kind"] = std::move(by_kind);
  write_json_file(metrics, out / "metrics.json");
  std::printf("micro-F %.4f  macro-F %.4f  MRR %.4f  (%zu columns)\n", overall.micro_f,
              overall.macro_f, overall.mrr, overall.count);

  // Raw material for accuracy-vs-frequency plots.
  if (!args.split_path.empty()) {
    CorpusSplit split = read_split(args.split_path);
    std::unordered_set<std::string> train_ids(split.train.begin(), split.train.end());
    std::unordered_map<std::string, size_t> train_counts;
    for (const auto& t : corpus.tables)
      if (train_ids.count(t.id))
        for (const auto& c : t.columns)
          if (c.label) ++train_counts[*c.label];
    std::ofstream freq_csv(out / "accuracy_vs_frequency.csv", std::ios::binary);
    freq_csv << "label,train_count,correct\n";
    for (const auto& sc : scored)
      freq_csv << sc.gold_label << ',' << train_counts[sc.gold_label] << ','
               << (sc.record.ranked.front() == sc.record.true_label ? 1 : 0) << '\n';
  }

  InferenceOptions inference_options;
  inference_options.unique_headers = args.unique_headers;
  inference_options.top_k = args.top_k;

  if (args.masked_sweep) {
    if (args.model_path.empty())
      throw std::runtime_error("--masked-sweep needs --model");
    Model model = load_model(args.model_path).model;
    std::vector<Table> sweep_tables;
    for (const auto& t : corpus.tables)
      if (prediction_table_ids.count(t.id)) sweep_tables.push_back(t);
    auto points = run_masked_sweep(model, sweep_tables, args.percentages, args.repeats,
                                   args.value_cap, args.seed, inference_options);
    std::ofstream sweep_csv(out / "masked_sweep.csv", std::ios::binary);
    sweep_csv << "percentage,mean,std\n";
    for (const auto& p : points) {
      sweep_csv << p.percentage << ',' << p.mean_top1 << ',' << p.std_top1 << '\n';
      std::printf("masked %.0f%%: top-1 %.4f (std %.4f)\n", p.percentage, p.mean_top1,
                  p.std_top1);
    }
  }

  if (!args.baselines.empty() || !args.baseline_model.empty()) {
    if (args.split_path.empty())
      throw std::runtime_error("baseline comparisons need --split");
    CorpusSplit split = read_split(args.split_path);
    std::unordered_set<std::string> train_ids(split.train.begin(), split.train.end());
    std::unordered_set<std::string> test_ids(split.test.begin(), split.test.end());
    std::vector<Table> train_tables, test_tables;
    for (const auto& t : corpus.tables) {
      if (train_ids.count(t.id)) train_tables.push_back(t);
      if (test_ids.count(t.id)) test_tables.push_back(t);
    }

    BaselineConfig config;
    config.value_cap = args.value_cap;
    config.seed = args.seed;
    config.classifier.iterations = args.baseline_iterations;
    config.classifier.seed = args.seed;

    json results;
    for (const auto& name : args.baselines) {
      BaselineKind kind = baseline_kind_from_name(name);
      auto result = run_baseline(kind, train_tables, test_tables, corpus.vocabulary, config);
      results[name] = metrics_to_json(result.metrics);
      std::printf("baseline %-18s micro-F %.4f macro-F %.4f MRR %.4f\n", name.c_str(),
                  result.metrics.micro_f, result.metrics.macro_f, result.metrics.mrr);
    }

    if (!args.baseline_model.empty()) {
      Model baseline_model = load_model(args.baseline_model).model;
      std::vector<PredictionRecord> records;
      for (const auto& table : test_tables) {
        auto columns = sample_for_inference(table, args.value_cap, args.seed);
        auto result = label_table(baseline_model, columns, inference_options);
        for (const auto& entry : result.trace.entries) {
          int truth = baseline_model.vocabulary().find(*table.columns[entry.column].label);
          if (truth < 0) continue;
          records.push_back({truth, rank_labels(entry.final_probs)});
        }
      }
      if (records.empty()) throw std::runtime_error("baseline model scored no columns");
      results["baseline_model"] =
          metrics_to_json(compute_metrics(records, baseline_model.vocabulary().size()));
      std::printf("baseline %-18s micro-F %.4f\n", "model file",
                  results["baseline_model"]["micro_f"].get<double>());
    }
    write_json_file(results, out / "baselines.json");
  }

  write_config_snapshot("evaluate",
                        {{"predictions", args.predictions},
                         {"manifest", args.manifest},
                         {"out", args.out_dir},
                         {"split", args.split_path},
                         {"model", args.model_path},
                         {"masked_sweep", args.masked_sweep},
                         {"percentages", args.percentages},
                         {"repeats", args.repeats},
                         {"seed", args.seed},
                         {"value_cap", args.value_cap},
                         {"unique_headers", args.unique_headers},
                         {"top_k", args.top_k},
                         {"baselines", args.baselines},
                         {"baseline_model", args.baseline_model},
                         {"min_count", args.min_count},
                         {"threads", args.threads}},
                        out);
  return 0;
}

}  // namespace tablabel::cli
