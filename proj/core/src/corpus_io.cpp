#include "tablabel/corpus_io.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace tablabel {

using nlohmann::json;

static Dialect dialect_from_json(const json& j) {
  Dialect d;
  if (j.contains("delimiter")) {
    std::string delim = j.at("delimiter").get<std::string>();
    if (delim.size() != 1)
      throw std::runtime_error("manifest dialect delimiter must be a single character");
    d.delimiter = delim[0];
  }
  if (j.contains("has_header")) d.has_header = j.at("has_header").get<bool>();
  return d;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": invalid JSON");
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.path = j.at("path").get<std::string>();
    if (j.contains("dialect")) e.dialect = dialect_from_json(j.at("dialect"));
    entries.push_back(std::move(e));
  }
  return entries;
}

static Table load_table(const ManifestEntry& entry, const std::filesystem::path& base_dir) {
  std::filesystem::path file = base_dir / entry.path;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("table '" + entry.id + "': cannot open " + file.string());

  std::vector<std::vector<std::string>> rows;
  try {
    rows = read_csv(in, entry.dialect.delimiter);
  } catch (const CsvError& e) {
    throw std::runtime_error("table '" + entry.id + "': " + e.what());
  }
  if (rows.empty()) throw std::runtime_error("table '" + entry.id + "': file is empty");

  size_t width = rows.front().size();
  size_t first_data = entry.dialect.has_header ? 1 : 0;
  if (rows.size() <= first_data)
    throw std::runtime_error("table '" + entry.id + "': no data rows");

  Table table;
  table.id = entry.id;
  table.columns.resize(width);
  if (entry.dialect.has_header) {
    for (size_t c = 0; c < width; ++c) {
      std::string label = normalize_label(rows[0][c]);
      if (!label.empty()) table.columns[c].label = std::move(label);
    }
  }
  for (size_t c = 0; c < width; ++c) table.columns[c].values.reserve(rows.size() - first_data);
  for (size_t r = first_data; r < rows.size(); ++r)
    for (size_t c = 0; c < width; ++c) table.columns[c].values.push_back(std::move(rows[r][c]));
  return table;
}

static bool all_empty(const Column& column) {
  for (const auto& v : column.values)
    if (!v.empty()) return false;
  return true;
}

Corpus load_corpus(const std::filesystem::path& manifest_path, const LoadOptions& options) {
  auto entries = read_manifest(manifest_path);
  if (entries.empty()) throw std::runtime_error("empty corpus: manifest has no entries");
  std::filesystem::path base = manifest_path.parent_path();

  std::vector<Table> tables;
  tables.reserve(entries.size());
  for (const auto& e : entries) {
    Table t = load_table(e, base);
    // §cleanup: columns that carry no content at all are useless for both
    // training and prediction.
    std::erase_if(t.columns, [](const Column& c) { return all_empty(c); });
    if (!t.columns.empty()) tables.push_back(std::move(t));
  }
  if (tables.empty()) throw std::runtime_error("empty corpus: no usable tables");

  if (options.min_count > 1) {
    std::unordered_map<std::string, int> counts;
    for (const auto& t : tables)
      for (const auto& c : t.columns)
        if (c.label) ++counts[*c.label];
    for (auto& t : tables) {
      std::erase_if(t.columns, [&](const Column& c) {
        return c.label && counts[*c.label] < options.min_count;
      });
    }
    std::erase_if(tables, [](const Table& t) { return t.columns.empty(); });
    if (tables.empty())
      throw std::runtime_error("empty corpus: min_count filter removed every column");
  }

  Corpus corpus;
  corpus.tables = std::move(tables);
  corpus.vocabulary = build_vocabulary(corpus.tables);
  return corpus;
}

void save_corpus(const std::vector<Table>& tables, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "tables");
  std::ofstream manifest(dir / "manifest.jsonl", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write manifest in " + dir.string());

  for (const auto& t : tables) {
    bool labeled = false;
    for (const auto& c : t.columns)
      if (c.label) labeled = true;

    std::vector<std::vector<std::string>> rows;
    size_t n_rows = t.rows();
    rows.reserve(n_rows + (labeled ? 1 : 0));
    if (labeled) {
      std::vector<std::string> header;
      for (const auto& c : t.columns) header.push_back(c.label.value_or(""));
      rows.push_back(std::move(header));
    }
    for (size_t r = 0; r < n_rows; ++r) {
      std::vector<std::string> row;
      row.reserve(t.columns.size());
      for (const auto& c : t.columns) row.push_back(c.values[r]);
      rows.push_back(std::move(row));
    }

    std::string rel = "tables/" + t.id + ".csv";
    std::ofstream out(dir / rel, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write table file " + (dir / rel).string());
    write_csv(out, rows, ',');

    json j;
    j["id"] = t.id;
    j["path"] = rel;
    j["dialect"] = {{"delimiter", ","}, {"has_header", labeled}};
    manifest << j.dump() << '\n';
  }
}

CorpusConfig read_corpus_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus config: " + path.string());
  json j = json::parse(in);
  CorpusConfig c;
  if (j.contains("ratio")) c.ratio = j.at("ratio").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
  if (j.contains("value_cap")) c.value_cap = j.at("value_cap").get<int>();
  if (j.contains("min_count")) c.min_count = j.at("min_count").get<int>();
  return c;
}

void write_corpus_config(const CorpusConfig& config, const std::filesystem::path& path) {
  json j{{"ratio", config.ratio},
         {"seed", config.seed},
         {"value_cap", config.value_cap},
         {"min_count", config.min_count}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus config: " + path.string());
  out << j.dump(2) << '\n';
}

void write_split(const CorpusSplit& split, double ratio, const std::filesystem::path& path) {
  json j{{"seed", split.seed}, {"ratio", ratio}, {"train", split.train}, {"test", split.test}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write split file: " + path.string());
  out << j.dump(2) << '\n';
}

CorpusSplit read_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open split file: " + path.string());
  json j = json::parse(in);
  CorpusSplit s;
  s.seed = j.value("seed", uint64_t{0});
  s.train = j.at("train").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

}  // namespace tablabel
