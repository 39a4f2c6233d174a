#include "tablabel/synthetic.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tablabel/rng.hpp"

namespace tablabel {

using nlohmann::json;

std::vector<std::string> companion_pool(const std::string& label, int size) {
  std::string stem = label;
  for (char& c : stem)
    if (c == ' ') c = '_';
  std::vector<std::string> pool;
  pool.reserve(static_cast<size_t>(size));
  char buf[16];
  for (int i = 0; i < size; ++i) {
    std::snprintf(buf, sizeof(buf), "_v%02d", i);
    pool.push_back(stem + buf);
  }
  return pool;
}

SyntheticSpec default_synthetic_spec() {
  SyntheticSpec spec;

  SyntheticSpec::Pair countries;
  countries.pool = {"france",  "spain",   "brazil",  "germany", "italy",  "japan",
                    "canada",  "mexico",  "egypt",   "kenya",   "india",  "china",
                    "norway",  "sweden",  "poland",  "greece",  "chile",  "peru",
                    "morocco", "nigeria", "vietnam", "thailand", "portugal", "austria"};
  countries.members = {{"nationality", {"player", "team", "position"}},
                       {"location", {"driver", "car", "tournament"}}};
  spec.pairs.push_back(std::move(countries));

  SyntheticSpec::Pair years;
  for (int i = 0; i < 24; ++i) years.pool.push_back(std::to_string(1850 + 6 * i));
  years.members = {{"founded", {"company", "industry", "ceo"}},
                   {"dissolved", {"empire", "ruler", "capital"}}};
  spec.pairs.push_back(std::move(years));

  SyntheticSpec::Pair dates;
  {
    char buf[16];
    for (int i = 0; i < 24; ++i) {
      std::snprintf(buf, sizeof(buf), "19%02d-%02d-%02d", 20 + 3 * i, 1 + (i % 12),
                    1 + (i * 7) % 28);
      dates.pool.push_back(buf);
    }
  }
  dates.members = {{"birth date", {"name", "occupation", "birthplace"}},
                   {"death date", {"cemetery", "cause", "successor"}}};
  spec.pairs.push_back(std::move(dates));

  SyntheticSpec::Pair money;
  {
    char buf[16];
    for (int i = 0; i < 24; ++i) {
      std::snprintf(buf, sizeof(buf), "%d.%02d", 110 + 37 * i, (13 * i) % 100);
      money.pool.push_back(buf);
    }
  }
  money.members = {{"price", {"product", "brand", "category"}},
                   {"salary", {"employee", "department", "title"}}};
  spec.pairs.push_back(std::move(money));

  return spec;
}

SyntheticSpec read_synthetic_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generator spec: " + path.string());
  json j = json::parse(in);
  SyntheticSpec spec;
  spec.num_tables = j.value("num_tables", spec.num_tables);
  spec.rows_per_table = j.value("rows_per_table", spec.rows_per_table);
  spec.companion_pool_size = j.value("companion_pool_size", spec.companion_pool_size);
  spec.require_ambiguity = j.value("require_ambiguity", spec.require_ambiguity);
  for (const auto& jp : j.value("pairs", json::array())) {
    SyntheticSpec::Pair pair;
    pair.pool = jp.at("pool").get<std::vector<std::string>>();
    for (const auto& jm : jp.at("members")) {
      SyntheticSpec::Member m;
      m.label = jm.at("label").get<std::string>();
      m.companions = jm.at("companions").get<std::vector<std::string>>();
      pair.members.push_back(std::move(m));
    }
    spec.pairs.push_back(std::move(pair));
  }
  for (const auto& jf : j.value("families", json::array())) {
    SyntheticSpec::Family f;
    f.labels = jf.at("labels").get<std::vector<std::string>>();
    spec.families.push_back(std::move(f));
  }
  return spec;
}

void write_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path) {
  json j;
  j["num_tables"] = spec.num_tables;
  j["rows_per_table"] = spec.rows_per_table;
  j["companion_pool_size"] = spec.companion_pool_size;
  j["require_ambiguity"] = spec.require_ambiguity;
  j["pairs"] = json::array();
  for (const auto& p : spec.pairs) {
    json jp;
    jp["pool"] = p.pool;
    jp["members"] = json::array();
    for (const auto& m : p.members)
      jp["members"].push_back({{"label", m.label}, {"companions", m.companions}});
    j["pairs"].push_back(std::move(jp));
  }
  j["families"] = json::array();
  for (const auto& f : spec.families) j["families"].push_back({{"labels", f.labels}});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write generator spec: " + path.string());
  out << j.dump(2) << '\n';
}

namespace {

// A template is one member of one pair (companion columns + the ambiguous
// column) or one plain family.
struct TableTemplate {
  std::vector<std::string> labels;
  std::vector<const std::vector<std::string>*> pools;  // parallel to labels
};

}  // namespace

std::vector<Table> generate_synthetic_corpus(const SyntheticSpec& spec, uint64_t seed) {
  if (spec.require_ambiguity && spec.pairs.empty())
    throw std::invalid_argument(
        "synthetic spec requests ambiguity but declares no ambiguous pairs");
  if (spec.num_tables < 1 || spec.rows_per_table < 1)
    throw std::invalid_argument("synthetic spec needs at least 1 table and 1 row");
  if (spec.pairs.empty() && spec.families.empty())
    throw std::invalid_argument("synthetic spec declares no labels at all");

  // Materialize private pools once; templates hold pointers into this store.
  std::vector<std::vector<std::string>> pool_store;
  pool_store.reserve(256);
  auto private_pool = [&](const std::string& label) -> const std::vector<std::string>* {
    pool_store.push_back(companion_pool(label, spec.companion_pool_size));
    return &pool_store.back();
  };

  std::vector<TableTemplate> templates;
  for (const auto& pair : spec.pairs) {
    if (pair.pool.empty()) throw std::invalid_argument("ambiguous pair with empty pool");
    if (pair.members.size() < 2)
      throw std::invalid_argument("ambiguous pair needs at least 2 members");
    for (const auto& member : pair.members) {
      TableTemplate t;
      t.labels.push_back(normalize_label(member.label));
      t.pools.push_back(&pair.pool);
      for (const auto& companion : member.companions) {
        t.labels.push_back(normalize_label(companion));
        t.pools.push_back(private_pool(companion));
      }
      templates.push_back(std::move(t));
    }
  }
  for (const auto& family : spec.families) {
    if (family.labels.empty()) throw std::invalid_argument("family with no labels");
    TableTemplate t;
    for (const auto& label : family.labels) {
      t.labels.push_back(normalize_label(label));
      t.pools.push_back(private_pool(label));
    }
    templates.push_back(std::move(t));
  }

  std::vector<Table> tables;
  tables.reserve(static_cast<size_t>(spec.num_tables));
  char idbuf[16];
  for (int ti = 0; ti < spec.num_tables; ++ti) {
    const TableTemplate& tmpl = templates[static_cast<size_t>(ti) % templates.size()];
    std::snprintf(idbuf, sizeof(idbuf), "t%05d", ti);

    std::vector<size_t> order(tmpl.labels.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng order_rng = rng_at(seed, {0x01, static_cast<uint64_t>(ti)});
    shuffle(order, order_rng);

    Table table;
    table.id = idbuf;
    table.columns.reserve(order.size());
    for (size_t pos = 0; pos < order.size(); ++pos) {
      size_t src = order[pos];
      Column col;
      col.label = tmpl.labels[src];
      const auto& pool = *tmpl.pools[src];
      Rng cell_rng = rng_at(seed, {0x02, static_cast<uint64_t>(ti), src});
      col.values.reserve(static_cast<size_t>(spec.rows_per_table));
      for (int r = 0; r < spec.rows_per_table; ++r)
        col.values.push_back(pool[cell_rng.uniform(pool.size())]);
      table.columns.push_back(std::move(col));
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

}  // namespace tablabel
