#include <doctest.h>

#include <cmath>

#include "tablabel/encoder.hpp"
#include "tablabel/rng.hpp"
#include "tablabel/training.hpp"
#include "test_util.hpp"

using namespace tablabel;

namespace {

LabelVocabulary vocab_of(std::initializer_list<std::string> labels) {
  LabelVocabulary v;
  for (const auto& l : labels) v.add(l);
  return v;
}

// Small-bucket toy so finite differences can sweep every parameter.
ModelConfig toy_config() {
  ModelConfig c;
  c.tokenizer.buckets = 64;
  c.emb_dim = 8;
  c.hidden_dim = 16;
  c.max_seq_len = 64;
  return c;
}

std::vector<std::vector<double>*> parameter_blocks(Parameters& p) {
  return {&p.emb_value, &p.emb_context, &p.w1, &p.b1, &p.w2, &p.b2};
}

double batch_loss(const Model& model, const std::vector<std::pair<ColumnInput, int>>& batch) {
  return loss_and_gradients(model, batch).loss;
}

// Densifies the sparse embedding gradients for block-by-block comparison.
std::vector<std::vector<double>> dense_gradients(const Model& model, const Gradients& g) {
  uint32_t d = model.config().emb_dim;
  auto densify = [&](const std::unordered_map<uint32_t, std::vector<double>>& rows,
                     size_t size) {
    std::vector<double> dense(size, 0.0);
    for (const auto& [row, grad] : rows)
      for (uint32_t k = 0; k < d; ++k) dense[static_cast<size_t>(row) * d + k] = grad[k];
    return dense;
  };
  return {densify(g.emb_value_rows, model.params().emb_value.size()),
          densify(g.emb_context_rows, model.params().emb_context.size()),
          g.w1, g.b1, g.w2, g.b2};
}

void randomize_head(Model& model, uint64_t seed) {
  Rng rng(seed);
  for (double& w : model.params().w2) w = rng.real() - 0.5;
  for (double& b : model.params().b2) b = rng.real() - 0.5;
}

}  // namespace

TEST_CASE("serialize_input builds the two forms") {
  Tokenizer tok{TokenizerConfig{}};

  SUBCASE("values only") {
    auto input = tok.serialize_input({"Paris", "Lyon"}, {}, 256);
    CHECK(input.form == InputForm::values_only);
    CHECK(input.context_ids.empty());
    std::vector<uint32_t> expected = tok.text_ids("paris");
    auto lyon = tok.text_ids("lyon");
    expected.insert(expected.end(), lyon.begin(), lyon.end());
    CHECK(input.value_ids == expected);
  }
  SUBCASE("context tokens keep their order") {
    auto input = tok.serialize_input({"Paris", "Lyon"}, {"player", "team"}, 256);
    CHECK(input.form == InputForm::contextual);
    std::vector<uint32_t> expected = tok.text_ids("player");
    auto team = tok.text_ids("team");
    expected.insert(expected.end(), team.begin(), team.end());
    CHECK(input.context_ids == expected);
  }
  SUBCASE("tokenization lowercases") {
    CHECK(tok.text_ids("TEAM") == tok.text_ids("team"));
  }
}

TEST_CASE("value segment is truncated before the context segment") {
  Tokenizer tok{TokenizerConfig{}};
  std::vector<std::string> huge_values(10000, "abcdefgh");
  std::vector<std::string> context = {"nationality", "player", "team"};

  auto input = tok.serialize_input(huge_values, context, 64);
  CHECK(input.token_count() <= 64);
  std::vector<uint32_t> full_context;
  for (const auto& label : context) {
    auto ids = tok.text_ids(label);
    full_context.insert(full_context.end(), ids.begin(), ids.end());
  }
  CHECK(input.context_ids == full_context);  // context intact
  CHECK(input.value_ids.size() == 64 - 3 - full_context.size());

  // Only when the context alone overflows the budget is it cut.
  std::vector<std::string> huge_context(200, "verylonglabelname");
  auto squeezed = tok.serialize_input({"v"}, huge_context, 64);
  CHECK(squeezed.token_count() <= 64);
  CHECK(squeezed.context_ids.size() == 61);
  CHECK(squeezed.value_ids.empty());
}

TEST_CASE("fresh model with zero head predicts uniformly") {
  Model model(toy_config(), vocab_of({"a", "b", "c"}), 7);
  auto dist = model.forward(model.make_input({"anything"}, {}));
  REQUIRE(dist.probs.size() == 3);
  for (double p : dist.probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(dist.argmax_label == 0);  // tie breaks toward the lowest index
  CHECK(dist.confidence == doctest::Approx(1.0 / 3));
}

TEST_CASE("forward outputs a normalized distribution") {
  Model model(toy_config(), vocab_of({"a", "b", "c", "d"}), 3);
  randomize_head(model, 11);
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> values = {std::to_string(rng.next() % 1000),
                                       std::to_string(rng.next() % 1000)};
    std::vector<std::string> context;
    if (trial % 2) context = {"b", "d"};
    auto dist = model.forward(model.make_input(values, context));
    REQUIRE(dist.probs.size() == 4);
    double sum = 0;
    for (double p : dist.probs) {
      CHECK(p >= 0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
    CHECK(dist.confidence == dist.probs[static_cast<size_t>(dist.argmax_label)]);
  }
}

TEST_CASE("forward rejects inputs from a different tokenizer") {
  Model model(toy_config(), vocab_of({"a", "b"}), 0);
  TokenizerConfig other;
  other.buckets = 32;
  Tokenizer alien(other);
  auto input = alien.serialize_input({"x"}, {}, 64);
  CHECK_THROWS_AS(model.forward(input), std::runtime_error);
}

TEST_CASE("analytic gradients match central finite differences") {
  Model model(toy_config(), vocab_of({"a", "b", "c"}), 21);
  randomize_head(model, 22);

  std::vector<std::pair<ColumnInput, int>> batch = {
      {model.make_input({"12", "15", "9"}, {}), 0},
      {model.make_input({"red", "blue"}, {"a", "c"}), 1},
      {model.make_input({"x1 y2", ""}, {"b"}), 2},
  };

  Gradients g = loss_and_gradients(model, batch);
  auto analytic = dense_gradients(model, g);
  auto blocks = parameter_blocks(model.params());
  const double h = 1e-6;

  for (size_t b = 0; b < blocks.size(); ++b) {
    auto& block = *blocks[b];
    for (size_t i = 0; i < block.size(); ++i) {
      double saved = block[i];
      block[i] = saved + h;
      double up = batch_loss(model, batch);
      block[i] = saved - h;
      double down = batch_loss(model, batch);
      block[i] = saved;
      double fd = (up - down) / (2 * h);
      double rel = std::abs(analytic[b][i] - fd) /
                   std::max({1.0, std::abs(analytic[b][i]), std::abs(fd)});
      CAPTURE(b);
      CAPTURE(i);
      CHECK(rel <= 1e-4);
    }
  }
}

TEST_CASE("cross entropy analytic values") {
  Model model(toy_config(), vocab_of({"a", "b", "c"}), 4);
  auto input = model.make_input({"v"}, {});

  SUBCASE("uniform prediction costs ln L") {
    // fresh zero head -> uniform
    auto g = loss_and_gradients(model, {{input, 1}});
    CHECK(g.loss == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  }
  SUBCASE("a confident correct prediction costs nearly zero") {
    model.params().b2[2] = 50.0;
    auto g = loss_and_gradients(model, {{input, 2}});
    CHECK(g.loss == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("out-of-range labels are rejected") {
    CHECK_THROWS_AS(loss_and_gradients(model, {{input, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(loss_and_gradients(model, {{input, -1}}), std::invalid_argument);
    CHECK_THROWS_AS(loss_and_gradients(model, {}), std::invalid_argument);
  }
}

TEST_CASE("model files round trip bit-exactly") {
  test_util::TempDir dir("model");
  Model model(toy_config(), vocab_of({"x", "y", "z"}), 31);
  randomize_head(model, 32);
  auto path = dir.path() / "m.bin";
  save_model(model, path);

  auto loaded = load_model(path);
  CHECK(loaded.model.fingerprint() == model.fingerprint());
  CHECK_FALSE(loaded.optimizer.has_value());

  auto input = model.make_input({"42", "abc"}, {"y"});
  auto a = model.forward(input);
  auto b = loaded.model.forward(input);
  REQUIRE(a.probs.size() == b.probs.size());
  for (size_t i = 0; i < a.probs.size(); ++i) CHECK(a.probs[i] == b.probs[i]);
  CHECK(a.argmax_label == b.argmax_label);
}

TEST_CASE("model loading rejects bad files") {
  test_util::TempDir dir("badmodel");

  SUBCASE("wrong magic") {
    test_util::write_file(dir.path() / "m.bin", "NOPE stuff");
    CHECK_THROWS_WITH_AS(load_model(dir.path() / "m.bin"), doctest::Contains("magic"),
                         std::runtime_error);
  }
  SUBCASE("truncated") {
    Model model(toy_config(), vocab_of({"x", "y"}), 0);
    save_model(model, dir.path() / "m.bin");
    auto bytes = test_util::read_file(dir.path() / "m.bin");
    test_util::write_file(dir.path() / "cut.bin", bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(load_model(dir.path() / "cut.bin"), std::runtime_error);
  }
  SUBCASE("missing") {
    CHECK_THROWS_AS(load_model(dir.path() / "absent.bin"), std::runtime_error);
  }
}

TEST_CASE("training resumes across a round trip") {
  test_util::TempDir dir("resume");
  Table table;
  table.id = "t";
  table.columns = {{"a", {"1", "2", "3"}}, {"b", {"x", "y", "z"}}};
  TrainConfig config;
  config.value_cap = 10;
  config.seed = 5;

  auto make = [&] { return Model(toy_config(), vocab_of({"a", "b"}), 77); };

  // straight-through: two steps
  Model direct = make();
  AdamState direct_opt = AdamState::for_model(direct);
  train_on_table(direct, direct_opt, table, config, 1);
  train_on_table(direct, direct_opt, table, config, 2);

  // interrupted: one step, save with optimizer, load, one more step
  Model first = make();
  AdamState first_opt = AdamState::for_model(first);
  train_on_table(first, first_opt, table, config, 1);
  save_model(first, dir.path() / "ckpt.bin", &first_opt);
  auto resumed = load_model(dir.path() / "ckpt.bin");
  REQUIRE(resumed.optimizer.has_value());
  train_on_table(resumed.model, *resumed.optimizer, table, config, 2);

  CHECK(resumed.model.params().emb_value == direct.params().emb_value);
  CHECK(resumed.model.params().emb_context == direct.params().emb_context);
  CHECK(resumed.model.params().w1 == direct.params().w1);
  CHECK(resumed.model.params().b1 == direct.params().b1);
  CHECK(resumed.model.params().w2 == direct.params().w2);
  CHECK(resumed.model.params().b2 == direct.params().b2);
}

TEST_CASE("a context token can flip the prediction") {
  // Same values with different contexts map to different labels; train until
  // the context decides the argmax.
  auto vocab = vocab_of({"nationality", "location", "player", "driver"});
  ModelConfig config = toy_config();
  config.tokenizer.buckets = 512;
  Model model(config, vocab, 3);
  AdamState opt = AdamState::for_model(model);

  std::vector<std::pair<ColumnInput, int>> batch = {
      {model.make_input({"france", "spain"}, {"player"}), 0},
      {model.make_input({"france", "spain"}, {"driver"}), 1},
  };
  AdamConfig adam{.learning_rate = 0.05};
  for (int step = 0; step < 60; ++step)
    opt.apply(model, loss_and_gradients(model, batch), adam);

  auto with_player = model.forward(model.make_input({"france", "spain"}, {"player"}));
  auto with_driver = model.forward(model.make_input({"france", "spain"}, {"driver"}));
  CHECK(with_player.argmax_label == 0);
  CHECK(with_driver.argmax_label == 1);
  CHECK(with_player.probs != with_driver.probs);
}

TEST_CASE("values-only mode drops the context segment") {
  ModelConfig config = toy_config();
  config.values_only = true;
  Model model(config, vocab_of({"a", "b"}), 1);
  auto with_ctx = model.make_input({"v1", "v2"}, {"a"});
  auto without = model.make_input({"v1", "v2"}, {});
  CHECK(with_ctx.form == InputForm::values_only);
  CHECK(with_ctx.context_ids.empty());
  CHECK(with_ctx.value_ids == without.value_ids);
}
