#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "commands.hpp"
#include "common.hpp"
#include "tablabel/corpus_io.hpp"
#include "tablabel/evaluation.hpp"
#include "tablabel/inference.hpp"

namespace tablabel::cli {

namespace {

using nlohmann::json;

std::unordered_map<std::string, std::vector<size_t>> read_mask_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mask file: " + path.string());
  std::unordered_map<std::string, std::vector<size_t>> masks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    masks[j.at("table_id").get<std::string>()] = j.at("masked").get<std::vector<size_t>>();
  }
  if (masks.empty()) throw std::runtime_error("mask file has no entries: " + path.string());
  return masks;
}

json trace_to_json(const Model& model, const LabelingResult& result, int rank_depth) {
  json columns = json::array();
  for (const auto& entry : result.trace.entries) {
    json col;
    col["index"] = entry.column;
    col["first_pass"] = entry.first_pass;
    col["final"] = entry.final;
    col["confidence"] = entry.confidence;
    col["pass"] = entry.pass;
    col["fallback"] = entry.fallback;
    auto ranked_ids = rank_labels(entry.final_probs);
    if (rank_depth > 0 && static_cast<size_t>(rank_depth) < ranked_ids.size())
      ranked_ids.resize(static_cast<size_t>(rank_depth));
    json ranked = json::array();
    for (int id : ranked_ids) ranked.push_back(model.vocabulary().label(id));
    col["ranked"] = std::move(ranked);
    columns.push_back(std::move(col));
  }
  return columns;
}

}  // namespace

int cmd_predict(const PredictArgs& args) {
  Model model = load_model(args.model_path).model;
  Corpus corpus = load_corpus(args.manifest);
  auto by_id = index_tables(corpus.tables);

  std::vector<const Table*> targets;
  if (!args.split_path.empty()) {
    CorpusSplit split = read_split(args.split_path);
    for (const auto& id : split.test) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw std::runtime_error("split names unknown table id: " + id);
      targets.push_back(it->second);
    }
  } else if (!args.table_ids.empty()) {
    for (const auto& id : args.table_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw std::runtime_error("unknown table id: " + id);
      targets.push_back(it->second);
    }
  } else {
    for (const auto& t : corpus.tables) targets.push_back(&t);
  }

  std::unordered_map<std::string, std::vector<size_t>> masks;
  if (!args.mask_file.empty()) {
    masks = read_mask_file(args.mask_file);
    std::erase_if(targets, [&](const Table* t) { return !masks.count(t->id); });
    if (targets.empty())
      throw std::runtime_error("mask file matches none of the selected tables");
  }

  InferenceOptions options;
  options.unique_headers = args.unique_headers;
  options.top_k = args.top_k;

  std::vector<json> lines(targets.size());
  parallel_for(targets.size(), args.threads, [&](size_t i) {
    const Table& table = *targets[i];
    auto columns = sample_for_inference(table, args.value_cap, args.seed);

    LabelingResult result;
    if (!args.mask_file.empty()) {
      const auto& masked = masks.at(table.id);
      std::vector<std::optional<std::string>> known(table.columns.size());
      for (size_t c = 0; c < table.columns.size(); ++c) known[c] = table.columns[c].label;
      for (size_t c : masked) {
        if (c >= known.size())
          throw std::runtime_error("mask index out of range for table " + table.id);
        known[c].reset();
      }
      for (size_t c = 0; c < known.size(); ++c)
        if (known[c] && known[c]->empty()) known[c].reset();
      result = label_table_masked(model, columns, known, options);
    } else {
      result = label_table(model, columns, options);
    }

    json record;
    record["table_id"] = table.id;
    record["columns"] = trace_to_json(model, result, args.rank_depth);
    lines[i] = std::move(record);
  });

  std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  std::ofstream jsonl(out / "predictions.jsonl", std::ios::binary);
  if (!jsonl) throw std::runtime_error("cannot write predictions.jsonl");
  size_t total_columns = 0;
  for (const auto& line : lines) {
    jsonl << line.dump() << '\n';
    total_columns += line.at("columns").size();
  }

  write_config_snapshot("predict",
                        {{"model", args.model_path},
                         {"manifest", args.manifest},
                         {"out", args.out_dir},
                         {"split", args.split_path},
                         {"tables", args.table_ids},
                         {"mask_file", args.mask_file},
                         {"unique_headers", args.unique_headers},
                         {"top_k", args.top_k},
                         {"value_cap", args.value_cap},
                         {"seed", args.seed},
                         {"rank_depth", args.rank_depth},
                         {"threads", args.threads}},
                        out);

  std::printf("predicted %zu columns across %zu tables -> %s\n", total_columns, lines.size(),
              (out / "predictions.jsonl").c_str());
  return 0;
}

}  // namespace tablabel::cli
