#include <doctest.h>

#include <cmath>
#include <complex>

#include "tablabel/features.hpp"
#include "tablabel/rng.hpp"
#include "tablabel/stats.hpp"

using namespace tablabel;

namespace {

// Independent oracle: plain O(n^2) complex DFT of the 20-bin histogram.
std::array<double, 20> naive_dft_magnitudes(const std::array<double, 20>& hist) {
  std::array<double, 20> mags{};
  constexpr double kTau = 6.283185307179586476925286766559;
  for (size_t k = 0; k < 20; ++k) {
    std::complex<double> acc{0, 0};
    for (size_t j = 0; j < 20; ++j) {
      double angle = -kTau * static_cast<double>(k * j) / 20.0;
      acc += hist[j] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    mags[k] = std::abs(acc);
  }
  return mags;
}

std::string random_cell(Rng& rng) {
  switch (rng.uniform(5)) {
    case 0: return std::to_string(static_cast<int64_t>(rng.uniform(100000)) - 50000);
    case 1: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", rng.real() * 2000.0 - 1000.0);
      return buf;
    }
    case 2: {
      std::string s;
      size_t len = rng.uniform(12);
      for (size_t i = 0; i < len; ++i)
        s.push_back(static_cast<char>('a' + rng.uniform(26)));
      return s;
    }
    case 3: return "";
    default: {
      std::string s;
      size_t len = 1 + rng.uniform(8);
      const std::string pool = "ab 01-._/!";
      for (size_t i = 0; i < len; ++i) s.push_back(pool[rng.uniform(pool.size())]);
      return s;
    }
  }
}

std::vector<std::string> random_column(Rng& rng, size_t max_len = 40) {
  size_t n = 1 + rng.uniform(max_len);
  std::vector<std::string> values;
  values.reserve(n);
  for (size_t i = 0; i < n; ++i) values.push_back(random_cell(rng));
  return values;
}

const CharNgramProvider kCharProvider;
const BagParagraphProvider kParaProvider;

SubwordWordProvider word_provider_with(std::initializer_list<std::string> vocab) {
  return SubwordWordProvider(std::unordered_set<std::string>(vocab), 100);
}

}  // namespace

TEST_CASE("parse_numeric boundary") {
  CHECK(parse_numeric("42") == 42.0);
  CHECK(parse_numeric(" 42 ") == 42.0);
  CHECK(parse_numeric("-3.5") == -3.5);
  CHECK(parse_numeric("+7") == 7.0);
  CHECK(parse_numeric("1e3") == 1000.0);
  CHECK(parse_numeric("2.5E-2") == 0.025);
  CHECK(!parse_numeric("1,000"));
  CHECK(!parse_numeric("abc"));
  CHECK(!parse_numeric("12abc"));
  CHECK(!parse_numeric(""));
  CHECK(!parse_numeric("  "));
  CHECK(!parse_numeric("inf"));
  CHECK(!parse_numeric("nan"));
}

TEST_CASE("global statistics on a tiny numeric column") {
  auto fv = global_statistics({"1", "2", "3"}).data;
  REQUIRE(fv.size() == kGlobalStatsDim);
  CHECK(fv[0] == 1.0);   // min
  CHECK(fv[1] == 3.0);   // max
  CHECK(fv[2] == 2.0);   // mean
  CHECK(fv[4] == 1.0);   // all cells numeric
  CHECK(fv[27] == 1.0);  // all values unique
}

TEST_CASE("global statistics golden vector for [a, a]") {
  auto fv = global_statistics({"a", "a"}).data;
  std::vector<double> expected = {
      0, 0, 0, 0,                                    // 1-4: no numeric cells
      0,                                             // 5: numeric fraction
      1, 1, 1, 1, 1, 1, 1, 1, 1, 1,                  // 6: one-hot histogram DFT...
      1, 1, 1, 1, 1, 1, 1, 1, 1, 1,                  //    ...has all-ones magnitudes
      2,                                             // 7: count
      0,                                             // 8: entropy
      0.5,                                           // 9: unique fraction
      0, 1,                                          // 10-11: digit/letter fractions
      0, 0,                                          // 12: digit count mean/std
      1, 0,                                          // 13: letter count mean/std
      0, 0,                                          // 14: special count mean/std
      1, 0,                                          // 15: word count mean/std
      0, 0, 0, 0,                                    // 16: None stats
      1, 1, 2, 1, 1, 0, 1, 1, 0, 0,                  // 17: length stats
  };
  REQUIRE(fv.size() == expected.size());
  for (size_t i = 0; i < fv.size(); ++i) {
    CAPTURE(i);
    CHECK(fv[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("content histogram spectra of simple shapes") {
  SUBCASE("constant column: one-hot histogram, all-ones magnitudes") {
    auto mags = content_histogram_fft({"5", "5", "5"});
    for (double m : mags) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("uniform histogram: unit DC component, zero elsewhere") {
    std::vector<std::string> values;
    for (int i = 0; i < 20; ++i) values.push_back(std::to_string(i));
    auto hist = content_histogram(values);
    for (double h : hist) CHECK(h == doctest::Approx(0.05).epsilon(1e-12));
    auto mags = content_histogram_fft(values);
    CHECK(mags[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (size_t k = 1; k < 20; ++k) CHECK(mags[k] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("length fallback when most cells are not numeric") {
    auto hist = content_histogram({"a", "bb", "ccc", "1"});  // 1/4 numeric -> lengths
    double sum = 0;
    for (double h : hist) sum += h;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(hist[0] > 0);   // length 1
    CHECK(hist[19] > 0);  // length 3 = max
  }
}

TEST_CASE("content_histogram_fft matches the naive DFT oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    auto values = random_column(rng);
    auto got = content_histogram_fft(values);
    auto expected = naive_dft_magnitudes(content_histogram(values));
    for (size_t k = 0; k < 20; ++k) {
      CAPTURE(trial);
      CAPTURE(k);
      CHECK(std::abs(got[k] - expected[k]) <= 1e-9);
    }
  }
}

TEST_CASE("character distributions golden blocks") {
  SUBCASE("single 'a'") {
    auto fv = character_distributions({"a"}).data;
    REQUIRE(fv.size() == kCharDistDim);
    size_t base = static_cast<size_t>('a' - 0x20) * 10;
    std::vector<double> block(fv.begin() + base, fv.begin() + base + 10);
    // any, all, mean, var, min, max, median, sum, kurtosis, skewness
    CHECK(block == std::vector<double>{1, 1, 1, 0, 1, 1, 1, 1, 0, 0});
    for (size_t i = 0; i < fv.size(); ++i)
      if (i < base || i >= base + 10) CHECK(fv[i] == 0.0);
  }
  SUBCASE("empty strings give all zeros") {
    auto fv = character_distributions({"", ""}).data;
    REQUIRE(fv.size() == kCharDistDim);
    for (double x : fv) CHECK(x == 0.0);
  }
}

TEST_CASE("embedding statistics shapes and degenerate samples") {
  auto word = word_provider_with({"paris"});

  SUBCASE("single value: mean=mode=median=embedding, zero variance") {
    auto fv = embedding_statistics({"paris"}, kCharProvider).data;
    REQUIRE(fv.size() == kCharEmbDim);
    auto emb = kCharProvider.embed("paris");
    for (size_t k = 0; k < 100; ++k) {
      CHECK(fv[k] == emb[k]);          // mean
      CHECK(fv[100 + k] == emb[k]);    // mode
      CHECK(fv[200 + k] == emb[k]);    // median
      CHECK(fv[300 + k] == 0.0);       // variance
    }
  }
  SUBCASE("two identical values: zero variance") {
    auto fv = embedding_statistics({"x y", "x y"}, word).data;
    REQUIRE(fv.size() == kWordEmbDim);
    for (size_t k = 300; k < 400; ++k) CHECK(fv[k] == 0.0);
  }
  SUBCASE("vocabulary flag") {
    CHECK(embedding_statistics({"paris", "zzz"}, word).data[400] == 1.0);
    CHECK(embedding_statistics({"zzz"}, word).data[400] == 0.0);
  }
  SUBCASE("paragraph output length") {
    auto fv = paragraph_embedding({"a b", "c"}, kParaProvider);
    CHECK(fv.data.size() == kParaEmbDim);
  }
  SUBCASE("provider contract violations") {
    CHECK_THROWS_AS(embedding_statistics({"a"}, kParaProvider), std::invalid_argument);
    BagParagraphProvider small(100);
    CHECK_THROWS_AS(paragraph_embedding({"a"}, small), std::invalid_argument);
  }
}

TEST_CASE("paragraph embedding is order invariant") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto values = random_column(rng, 15);
    auto base = paragraph_embedding(values, kParaProvider).data;
    auto shuffled = values;
    shuffle(shuffled, rng);
    CHECK(paragraph_embedding(shuffled, kParaProvider).data == base);
  }
}

TEST_CASE("dimension law and finiteness across randomized columns") {
  auto word = word_provider_with({"alpha", "beta"});
  FeatureProviders providers{&kCharProvider, &word, &kParaProvider};
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    auto values = trial == 0   ? std::vector<std::string>{"", ""}
                  : trial == 1 ? std::vector<std::string>{"same", "same", "same"}
                               : random_column(rng);
    auto all = all_features(values, providers);
    REQUIRE(all.data.size() == kAllFeaturesDim);
    for (double x : all.data) CHECK(std::isfinite(x));
  }
}

TEST_CASE("all-features slices match the individual extractors") {
  auto word = word_provider_with({"alpha"});
  FeatureProviders providers{&kCharProvider, &word, &kParaProvider};
  std::vector<std::string> values = {"alpha", "17", "x y z"};
  auto all = all_features(values, providers).data;

  auto check_slice = [&](FeatureCategory cat, const std::vector<double>& part) {
    size_t offset = feature_offset(cat);
    REQUIRE(part.size() == feature_dim(cat));
    for (size_t i = 0; i < part.size(); ++i) CHECK(all[offset + i] == part[i]);
  };
  check_slice(FeatureCategory::global_stats, global_statistics(values).data);
  check_slice(FeatureCategory::char_dist, character_distributions(values).data);
  check_slice(FeatureCategory::char_emb, embedding_statistics(values, kCharProvider).data);
  check_slice(FeatureCategory::word_emb, embedding_statistics(values, word).data);
  check_slice(FeatureCategory::para_emb, paragraph_embedding(values, kParaProvider).data);
}

namespace {
class NanProvider : public EmbeddingProvider {
 public:
  EmbeddingKind kind() const override { return EmbeddingKind::character_sequence; }
  size_t dim() const override { return 100; }
  std::vector<double> embed(const std::string&) const override {
    return std::vector<double>(100, std::nan(""));
  }
};
}  // namespace

TEST_CASE("a NaN from a sub-extractor is an error, never embedded") {
  NanProvider bad;
  auto word = word_provider_with({"a"});
  FeatureProviders providers{&bad, &word, &kParaProvider};
  CHECK_THROWS_AS(all_features({"a"}, providers), std::runtime_error);
}

TEST_CASE("extractors are invariant to value order") {
  auto word = word_provider_with({"alpha", "beta"});
  Rng rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    auto values = random_column(rng, 25);
    auto shuffled = values;
    shuffle(shuffled, rng);

    auto close = [&](const std::vector<double>& a, const std::vector<double>& b) {
      REQUIRE(a.size() == b.size());
      for (size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    };
    close(global_statistics(values).data, global_statistics(shuffled).data);
    close(character_distributions(values).data, character_distributions(shuffled).data);
    close(embedding_statistics(values, word).data, embedding_statistics(shuffled, word).data);
  }
}

TEST_CASE("empty input is rejected everywhere") {
  auto word = word_provider_with({});
  CHECK_THROWS_AS(global_statistics({}), std::invalid_argument);
  CHECK_THROWS_AS(content_histogram_fft({}), std::invalid_argument);
  CHECK_THROWS_AS(character_distributions({}), std::invalid_argument);
  CHECK_THROWS_AS(embedding_statistics({}, word), std::invalid_argument);
  CHECK_THROWS_AS(paragraph_embedding({}, kParaProvider), std::invalid_argument);
}

TEST_CASE("disjoint samples of an iid column produce compatible mean features") {
  // 10,000 draws from one distribution; two disjoint 100-value samples must
  // agree on mean-type features within 3 pooled standard errors.
  Rng rng(4242);
  std::vector<std::string> population;
  population.reserve(10000);
  for (int i = 0; i < 10000; ++i)
    population.push_back(std::to_string(100.0 + 50.0 * rng.real()).substr(0, 8));

  std::vector<size_t> idx = sample_indices(population.size(), population.size(), rng);
  std::vector<std::string> sample_a, sample_b;
  for (size_t i = 0; i < 100; ++i) sample_a.push_back(population[idx[i]]);
  for (size_t i = 100; i < 200; ++i) sample_b.push_back(population[idx[i]]);

  auto fa = global_statistics(sample_a).data;
  auto fb = global_statistics(sample_b).data;
  auto check_within_3se = [&](size_t mean_idx, size_t std_idx) {
    double pooled_se = std::sqrt((fa[std_idx] * fa[std_idx] + fb[std_idx] * fb[std_idx]) / 100.0);
    CHECK(std::abs(fa[mean_idx] - fb[mean_idx]) <= 3.0 * pooled_se);
  };
  check_within_3se(2, 3);    // numeric mean vs numeric std
  check_within_3se(30, 31);  // digit-count mean vs std
}
