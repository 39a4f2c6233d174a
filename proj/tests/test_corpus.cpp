#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "tablabel/corpus.hpp"
#include "tablabel/corpus_io.hpp"
#include "tablabel/csv.hpp"
#include "tablabel/rng.hpp"
#include "tablabel/synthetic.hpp"
#include "test_util.hpp"

using namespace tablabel;

TEST_CASE("normalize_label merges case and whitespace variants") {
  CHECK(normalize_label("Date of Birth") == "date of birth");
  CHECK(normalize_label("date  of birth") == "date of birth");
  CHECK(normalize_label("  TEAM\t name ") == "team name");
  CHECK(normalize_label("") == "");
  CHECK(normalize_label("   ") == "");
}

TEST_CASE("normalize_label is idempotent") {
  Rng rng(7);
  const std::string alphabet = "aA zZ\t09!-_";
  for (int i = 0; i < 200; ++i) {
    std::string s;
    size_t len = rng.uniform(20);
    for (size_t j = 0; j < len; ++j) s.push_back(alphabet[rng.uniform(alphabet.size())]);
    std::string once = normalize_label(s);
    CHECK(normalize_label(once) == once);
  }
}

TEST_CASE("csv round trip with quoting") {
  std::vector<std::vector<std::string>> rows = {
      {"plain", "with,comma", "with\"quote"},
      {"multi\nline", "", "tab\tkept"},
  };
  std::ostringstream out;
  write_csv(out, rows, ',');
  std::istringstream in(out.str());
  CHECK(read_csv(in, ',') == rows);
}

TEST_CASE("csv arity error names the offending row") {
  std::istringstream in("a,b,c\n1,2,3\n4,5\n");
  try {
    read_csv(in, ',');
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(e.row() == 3);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("sample_values basics") {
  Column column;
  column.values = {"x", "y", "z"};

  SUBCASE("cap above size returns a permutation") {
    auto out = sample_values(column, 100, 1);
    CHECK(out.size() == 3);
    std::multiset<std::string> got(out.begin(), out.end());
    CHECK(got == std::multiset<std::string>{"x", "y", "z"});
  }
  SUBCASE("determinism") {
    CHECK(sample_values(column, 2, 99) == sample_values(column, 2, 99));
  }
  SUBCASE("large column sampled without replacement") {
    Column big;
    for (int i = 0; i < 500; ++i) big.values.push_back(std::to_string(i));
    auto out = sample_values(big, 200, 5);
    CHECK(out.size() == 200);
    std::set<std::string> distinct(out.begin(), out.end());
    CHECK(distinct.size() == 200);  // values are unique, so positions must be too
  }
  SUBCASE("output is a sub-multiset of the column") {
    Column dup;
    dup.values = {"a", "a", "b", "b", "b", "c"};
    for (uint64_t seed = 0; seed < 20; ++seed) {
      auto out = sample_values(dup, 4, seed);
      std::multiset<std::string> got(out.begin(), out.end());
      std::multiset<std::string> all(dup.values.begin(), dup.values.end());
      CHECK(std::includes(all.begin(), all.end(), got.begin(), got.end()));
    }
  }
}

static std::vector<Table> make_tables(int n) {
  std::vector<Table> tables;
  for (int i = 0; i < n; ++i) {
    Table t;
    t.id = "tbl" + std::to_string(i);
    Column c;
    c.label = "label" + std::to_string(i % 3);
    c.values = {"v"};
    t.columns.push_back(c);
    tables.push_back(t);
  }
  return tables;
}

TEST_CASE("split_corpus counts and determinism") {
  auto ten = make_tables(10);
  auto split = split_corpus(ten, 0.8, 3);
  CHECK(split.train.size() == 8);
  CHECK(split.test.size() == 2);

  auto two = make_tables(2);
  auto half = split_corpus(two, 0.5, 3);
  CHECK(half.train.size() == 1);
  CHECK(half.test.size() == 1);

  auto again = split_corpus(ten, 0.8, 3);
  CHECK(again.train == split.train);
  CHECK(again.test == split.test);

  CHECK_THROWS_AS(split_corpus(make_tables(1), 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(split_corpus(ten, 0.0, 0), std::invalid_argument);
}

TEST_CASE("split_corpus is a partition for every ratio and seed") {
  auto tables = make_tables(13);
  std::set<std::string> all;
  for (const auto& t : tables) all.insert(t.id);
  for (double ratio : {0.2, 0.5, 0.8}) {
    for (uint64_t seed = 0; seed < 10; ++seed) {
      auto split = split_corpus(tables, ratio, seed);
      std::set<std::string> seen;
      for (const auto& id : split.train) CHECK(seen.insert(id).second);
      for (const auto& id : split.test) CHECK(seen.insert(id).second);
      CHECK(seen == all);
    }
  }
}

TEST_CASE("load_corpus parses manifests and normalizes labels") {
  test_util::TempDir dir("load");
  test_util::write_file(dir.path() / "t1.csv",
                        "Date of Birth,Team\n1990-01-01,arsenal\n1991-02-02,chelsea\n");
  test_util::write_file(dir.path() / "t2.csv", "date  of birth\tcity\n2000-05-05\tparis\n");
  test_util::write_file(dir.path() / "manifest.jsonl",
                        R"({"id": "t1", "path": "t1.csv", "dialect": {"delimiter": ",", "has_header": true}})"
                        "\n"
                        R"({"id": "t2", "path": "t2.csv", "dialect": {"delimiter": "\t", "has_header": true}})"
                        "\n");

  auto corpus = load_corpus(dir.path() / "manifest.jsonl");
  CHECK(corpus.tables.size() == 2);
  CHECK(corpus.tables[0].columns.size() == 2);
  // "Date of Birth" and "date  of birth" collapse to one vocabulary entry
  CHECK(corpus.vocabulary.find("date of birth") >= 0);
  CHECK(corpus.vocabulary.size() == 3);
  CHECK(corpus.tables[0].columns[0].label == "date of birth");
  CHECK(corpus.tables[1].columns[0].label == "date of birth");
}

TEST_CASE("load_corpus error paths") {
  test_util::TempDir dir("errs");

  SUBCASE("missing table file") {
    test_util::write_file(dir.path() / "manifest.jsonl", R"({"id": "x", "path": "gone.csv"})" "\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir.path() / "manifest.jsonl"),
                         doctest::Contains("'x'"), std::runtime_error);
  }
  SUBCASE("arity error reports table id and row") {
    test_util::write_file(dir.path() / "bad.csv", "a,b\n1,2\n3\n");
    test_util::write_file(dir.path() / "manifest.jsonl",
                          R"({"id": "badtable", "path": "bad.csv"})" "\n");
    try {
      load_corpus(dir.path() / "manifest.jsonl");
      FAIL("expected error");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("badtable") != std::string::npos);
      CHECK(msg.find("3") != std::string::npos);
    }
  }
  SUBCASE("empty manifest") {
    test_util::write_file(dir.path() / "manifest.jsonl", "");
    CHECK_THROWS_AS(load_corpus(dir.path() / "manifest.jsonl"), std::runtime_error);
  }
  SUBCASE("missing manifest") {
    CHECK_THROWS_AS(load_corpus(dir.path() / "nope.jsonl"), std::runtime_error);
  }
}

TEST_CASE("load_corpus drops all-empty columns and rare labels") {
  test_util::TempDir dir("clean");
  test_util::write_file(dir.path() / "t.csv", "keep,blank\nv1,\nv2,\n");
  test_util::write_file(dir.path() / "t2.csv", "keep,rare\na,b\nc,d\n");
  test_util::write_file(dir.path() / "manifest.jsonl",
                        R"({"id": "t", "path": "t.csv"})" "\n"
                        R"({"id": "t2", "path": "t2.csv"})" "\n");

  auto corpus = load_corpus(dir.path() / "manifest.jsonl");
  CHECK(corpus.tables[0].columns.size() == 1);  // the all-empty column is gone

  LoadOptions strict;
  strict.min_count = 2;
  auto filtered = load_corpus(dir.path() / "manifest.jsonl", strict);
  CHECK(filtered.vocabulary.size() == 1);
  CHECK(filtered.vocabulary.find("keep") >= 0);
  for (const auto& t : filtered.tables)
    for (const auto& c : t.columns) CHECK(c.label == "keep");
}

TEST_CASE("save/load round trip preserves structure") {
  auto tables = generate_synthetic_corpus(default_synthetic_spec(), 11);
  test_util::TempDir dir("roundtrip");
  save_corpus(tables, dir.path());
  auto corpus = load_corpus(dir.path() / "manifest.jsonl");

  REQUIRE(corpus.tables.size() == tables.size());
  for (size_t t = 0; t < tables.size(); ++t) {
    CHECK(corpus.tables[t].id == tables[t].id);
    REQUIRE(corpus.tables[t].columns.size() == tables[t].columns.size());
    for (size_t c = 0; c < tables[t].columns.size(); ++c) {
      CHECK(corpus.tables[t].columns[c].label == tables[t].columns[c].label);
      CHECK(corpus.tables[t].columns[c].values == tables[t].columns[c].values);
    }
  }
  CHECK(corpus.vocabulary == build_vocabulary(tables));
}

TEST_CASE("synthetic generator is deterministic on disk") {
  auto spec = default_synthetic_spec();
  spec.num_tables = 24;
  test_util::TempDir a("gen_a"), b("gen_b");
  save_corpus(generate_synthetic_corpus(spec, 5), a.path());
  save_corpus(generate_synthetic_corpus(spec, 5), b.path());
  CHECK(test_util::read_file(a.path() / "manifest.jsonl") ==
        test_util::read_file(b.path() / "manifest.jsonl"));
  CHECK(test_util::read_file(a.path() / "tables" / "t00000.csv") ==
        test_util::read_file(b.path() / "tables" / "t00000.csv"));
  CHECK(test_util::read_file(a.path() / "tables" / "t00023.csv") ==
        test_util::read_file(b.path() / "tables" / "t00023.csv"));
}

TEST_CASE("synthetic generator realizes ambiguous pairs") {
  auto spec = default_synthetic_spec();
  spec.num_tables = 16;
  auto tables = generate_synthetic_corpus(spec, 9);
  auto vocab = build_vocabulary(tables);
  for (const auto& pair : spec.pairs)
    for (const auto& member : pair.members) CHECK(vocab.find(member.label) >= 0);

  // Members of a pair draw cells from the shared pool only.
  const auto& pair = spec.pairs.front();
  std::set<std::string> pool(pair.pool.begin(), pair.pool.end());
  int member_columns = 0;
  for (const auto& t : tables)
    for (const auto& c : t.columns)
      for (const auto& member : pair.members)
        if (c.label == normalize_label(member.label)) {
          ++member_columns;
          for (const auto& v : c.values) CHECK(pool.count(v) == 1);
        }
  CHECK(member_columns > 0);
}

TEST_CASE("synthetic generator degenerate family") {
  SyntheticSpec spec;
  spec.num_tables = 3;
  spec.rows_per_table = 4;
  spec.require_ambiguity = false;
  spec.families.push_back({{"only"}});
  auto tables = generate_synthetic_corpus(spec, 1);
  CHECK(tables.size() == 3);
  for (const auto& t : tables) {
    CHECK(t.columns.size() == 1);
    CHECK(t.columns[0].label == "only");
  }
}

TEST_CASE("synthetic generator rejects missing ambiguity") {
  SyntheticSpec spec;
  spec.require_ambiguity = true;
  spec.families.push_back({{"a", "b"}});
  CHECK_THROWS_AS(generate_synthetic_corpus(spec, 0), std::invalid_argument);
}

TEST_CASE("synthetic spec json round trip") {
  test_util::TempDir dir("spec");
  auto spec = default_synthetic_spec();
  spec.families.push_back({{"alpha", "beta"}});
  write_synthetic_spec(spec, dir.path() / "spec.json");
  auto back = read_synthetic_spec(dir.path() / "spec.json");
  CHECK(back.num_tables == spec.num_tables);
  CHECK(back.pairs.size() == spec.pairs.size());
  CHECK(back.pairs[0].pool == spec.pairs[0].pool);
  CHECK(back.pairs[2].members[1].companions == spec.pairs[2].members[1].companions);
  CHECK(back.families.size() == 1);
  // regenerating from the round-tripped spec yields the same corpus
  test_util::TempDir a("spec_a"), b("spec_b");
  save_corpus(generate_synthetic_corpus(spec, 3), a.path());
  save_corpus(generate_synthetic_corpus(back, 3), b.path());
  CHECK(test_util::read_file(a.path() / "tables" / "t00000.csv") ==
        test_util::read_file(b.path() / "tables" / "t00000.csv"));
}
