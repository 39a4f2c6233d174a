#include "tablabel/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <fftw3.h>

#include "tablabel/stats.hpp"

namespace tablabel {

size_t feature_dim(FeatureCategory category) {
  switch (category) {
    case FeatureCategory::global_stats: return kGlobalStatsDim;
    case FeatureCategory::char_dist: return kCharDistDim;
    case FeatureCategory::char_emb: return kCharEmbDim;
    case FeatureCategory::word_emb: return kWordEmbDim;
    case FeatureCategory::para_emb: return kParaEmbDim;
    case FeatureCategory::all: return kAllFeaturesDim;
  }
  throw std::logic_error("unknown feature category");
}

size_t feature_offset(FeatureCategory category) {
  switch (category) {
    case FeatureCategory::global_stats: return 0;
    case FeatureCategory::char_dist: return 52;
    case FeatureCategory::char_emb: return 1012;
    case FeatureCategory::word_emb: return 1412;
    case FeatureCategory::para_emb: return 1813;
    case FeatureCategory::all: return 0;
  }
  throw std::logic_error("unknown feature category");
}

const char* feature_category_name(FeatureCategory category) {
  switch (category) {
    case FeatureCategory::global_stats: return "global_stats";
    case FeatureCategory::char_dist: return "char_dist";
    case FeatureCategory::char_emb: return "char_emb";
    case FeatureCategory::word_emb: return "word_emb";
    case FeatureCategory::para_emb: return "para_emb";
    case FeatureCategory::all: return "all";
  }
  throw std::logic_error("unknown feature category");
}

std::optional<double> parse_numeric(const std::string& cell) {
  size_t begin = 0, end = cell.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(cell[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(cell[end - 1]))) --end;
  if (begin == end) return std::nullopt;
  const char* first = cell.data() + begin;
  const char* last = cell.data() + end;
  if (*first == '+') ++first;  // from_chars rejects a leading '+'
  double value = 0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;  // "inf"/"nan" don't count
  return value;
}

bool is_none_token(const std::string& cell) {
  std::string t;
  for (unsigned char c : cell)
    if (!std::isspace(c)) t.push_back(static_cast<char>(std::tolower(c)));
    else if (!t.empty() && t.back() != ' ') t.push_back(' ');
  while (!t.empty() && t.back() == ' ') t.pop_back();
  return t.empty() || t == "null" || t == "none" || t == "na" || t == "n/a" || t == "nan";
}

static void ensure_finite(const std::vector<double>& data, const char* what) {
  for (double x : data)
    if (!std::isfinite(x))
      throw std::runtime_error(std::string("non-finite entry in ") + what + " features");
}

static void require_values(const std::vector<std::string>& values, const char* op) {
  if (values.empty())
    throw std::invalid_argument(std::string(op) + ": need at least one value");
}

std::array<double, 20> content_histogram(const std::vector<std::string>& values) {
  require_values(values, "content_histogram");
  std::vector<double> points;
  points.reserve(values.size());
  for (const auto& v : values)
    if (auto x = parse_numeric(v)) points.push_back(*x);
  if (points.size() * 2 < values.size()) {
    points.clear();
    for (const auto& v : values) points.push_back(static_cast<double>(v.size()));
  }

  double lo = *std::min_element(points.begin(), points.end());
  double hi = *std::max_element(points.begin(), points.end());
  std::array<double, 20> hist{};
  double scale = hi > lo ? 1.0 / (hi - lo) : 0.0;
  for (double x : points) {
    auto bin = static_cast<size_t>((x - lo) * scale * 20.0);
    hist[std::min<size_t>(bin, 19)] += 1.0;
  }
  for (double& h : hist) h /= static_cast<double>(points.size());
  return hist;
}

std::array<double, 20> content_histogram_fft(const std::vector<std::string>& values) {
  auto hist = content_histogram(values);

  // 20-point real DFT via FFTW. Plan creation is not thread-safe, and
  // fftw_execute on a shared plan isn't either; the transform is tiny, so
  // one lock around the whole thing is fine.
  static std::mutex mutex;
  std::array<double, 20> magnitude{};
  {
    std::lock_guard<std::mutex> lock(mutex);
    static double* in = fftw_alloc_real(20);
    static fftw_complex* out = fftw_alloc_complex(11);
    static fftw_plan plan = fftw_plan_dft_r2c_1d(20, in, out, FFTW_ESTIMATE);
    std::copy(hist.begin(), hist.end(), in);
    fftw_execute(plan);
    for (size_t k = 0; k <= 10; ++k) magnitude[k] = std::hypot(out[k][0], out[k][1]);
  }
  for (size_t k = 11; k < 20; ++k) magnitude[k] = magnitude[20 - k];  // hermitian half
  return magnitude;
}

FeatureVector global_statistics(const std::vector<std::string>& values) {
  require_values(values, "global_statistics");
  const double n = static_cast<double>(values.size());

  std::vector<double> numeric;
  std::vector<double> digit_counts, letter_counts, special_counts, word_counts, lengths;
  digit_counts.reserve(values.size());
  size_t with_digit = 0, with_letter = 0, none_count = 0;
  std::unordered_map<std::string, size_t> value_counts;

  for (const auto& v : values) {
    if (auto x = parse_numeric(v)) numeric.push_back(*x);
    double digits = 0, letters = 0, specials = 0;
    for (unsigned char c : v) {
      if (std::isdigit(c)) ++digits;
      else if (std::isalpha(c)) ++letters;
      else if (c >= 0x21 && c <= 0x7e) ++specials;  // printable, not alnum, not space
    }
    digit_counts.push_back(digits);
    letter_counts.push_back(letters);
    special_counts.push_back(specials);
    word_counts.push_back(static_cast<double>(whitespace_tokens(v).size()));
    lengths.push_back(static_cast<double>(v.size()));
    if (digits > 0) ++with_digit;
    if (letters > 0) ++with_letter;
    if (is_none_token(v)) ++none_count;
    ++value_counts[v];
  }

  std::vector<double> out;
  out.reserve(kGlobalStatsDim);

  // 1-4: numeric interpretation extremes/moments, zero when nothing parses
  if (numeric.empty()) {
    out.insert(out.end(), {0.0, 0.0, 0.0, 0.0});
  } else {
    out.push_back(*std::min_element(numeric.begin(), numeric.end()));
    out.push_back(*std::max_element(numeric.begin(), numeric.end()));
    out.push_back(mean(numeric));
    out.push_back(std::sqrt(population_variance(numeric)));
  }
  // 5: fraction of numeric cells
  out.push_back(static_cast<double>(numeric.size()) / n);
  // 6: 20-dim content histogram signature
  auto spectrum = content_histogram_fft(values);
  out.insert(out.end(), spectrum.begin(), spectrum.end());
  // 7: count of values
  out.push_back(n);
  // 8: entropy of the value-frequency distribution (nats)
  double entropy = 0;
  for (const auto& [value, count] : value_counts) {
    double p = static_cast<double>(count) / n;
    entropy -= p * std::log(p);
  }
  out.push_back(entropy < 0 ? 0.0 : entropy);
  // 9: fraction of distinct values
  out.push_back(static_cast<double>(value_counts.size()) / n);
  // 10-11: fraction of cells containing digits / letters
  out.push_back(static_cast<double>(with_digit) / n);
  out.push_back(static_cast<double>(with_letter) / n);
  // 12-15: mean and std of per-cell digit/letter/special/word counts
  for (const auto* counts : {&digit_counts, &letter_counts, &special_counts, &word_counts}) {
    out.push_back(mean(*counts));
    out.push_back(std::sqrt(population_variance(*counts)));
  }
  // 16: None-value statistics
  out.push_back(static_cast<double>(none_count));
  out.push_back(static_cast<double>(none_count) / n);
  out.push_back(none_count > 0 ? 1.0 : 0.0);
  out.push_back(none_count == values.size() ? 1.0 : 0.0);
  // 17: length statistics
  bool any_nonzero = false, all_nonzero = true;
  double length_sum = 0;
  for (double len : lengths) {
    any_nonzero |= len > 0;
    all_nonzero &= len > 0;
    length_sum += len;
  }
  out.push_back(any_nonzero ? 1.0 : 0.0);
  out.push_back(all_nonzero ? 1.0 : 0.0);
  out.push_back(length_sum);
  out.push_back(*std::min_element(lengths.begin(), lengths.end()));
  out.push_back(*std::max_element(lengths.begin(), lengths.end()));
  out.push_back(population_variance(lengths));
  out.push_back(median(lengths));
  out.push_back(mode_smallest(lengths));
  out.push_back(excess_kurtosis(lengths));
  out.push_back(skewness(lengths));

  ensure_finite(out, "global_stats");
  return {FeatureCategory::global_stats, std::move(out)};
}

FeatureVector character_distributions(const std::vector<std::string>& values) {
  require_values(values, "character_distributions");
  const size_t n = values.size();

  // counts[v][c]: occurrences of charset character c in value v
  std::vector<std::array<double, kCharsetSize>> counts(n);
  for (size_t v = 0; v < n; ++v) {
    counts[v].fill(0.0);
    for (unsigned char c : values[v])
      if (c >= kCharsetFirst && c < kCharsetFirst + kCharsetSize)
        counts[v][c - kCharsetFirst] += 1.0;
  }

  std::vector<double> out;
  out.reserve(kCharDistDim);
  std::vector<double> column(n);
  for (size_t c = 0; c < kCharsetSize; ++c) {
    for (size_t v = 0; v < n; ++v) column[v] = counts[v][c];
    StatSet10::of(column).append_to(out);
  }
  ensure_finite(out, "char_dist");
  return {FeatureCategory::char_dist, std::move(out)};
}

FeatureVector embedding_statistics(const std::vector<std::string>& values,
                                   const EmbeddingProvider& provider) {
  require_values(values, "embedding_statistics");
  if (provider.dim() != 100)
    throw std::invalid_argument("embedding_statistics: provider dimension must be 100");
  if (provider.kind() == EmbeddingKind::paragraph)
    throw std::invalid_argument("embedding_statistics: paragraph providers take no statistics");

  const size_t n = values.size(), d = provider.dim();
  std::vector<std::vector<double>> emb;
  emb.reserve(n);
  for (const auto& v : values) {
    emb.push_back(provider.embed(v));
    if (emb.back().size() != d)
      throw std::runtime_error("embedding provider returned wrong dimension");
  }

  std::vector<double> means(d), modes(d), medians(d), variances(d);
  std::vector<double> column(n);
  for (size_t k = 0; k < d; ++k) {
    for (size_t v = 0; v < n; ++v) column[v] = emb[v][k];
    means[k] = mean(column);
    modes[k] = mode_smallest(column);
    medians[k] = median(column);
    variances[k] = population_variance(column);
  }

  std::vector<double> out;
  out.reserve(provider.kind() == EmbeddingKind::word ? kWordEmbDim : kCharEmbDim);
  out.insert(out.end(), means.begin(), means.end());
  out.insert(out.end(), modes.begin(), modes.end());
  out.insert(out.end(), medians.begin(), medians.end());
  out.insert(out.end(), variances.begin(), variances.end());

  FeatureCategory category = FeatureCategory::char_emb;
  if (provider.kind() == EmbeddingKind::word) {
    category = FeatureCategory::word_emb;
    bool any_known = false;
    for (const auto& v : values) any_known = any_known || provider.in_vocabulary(v);
    out.push_back(any_known ? 1.0 : 0.0);
  }
  ensure_finite(out, feature_category_name(category));
  return {category, std::move(out)};
}

FeatureVector paragraph_embedding(const std::vector<std::string>& values,
                                  const EmbeddingProvider& provider) {
  require_values(values, "paragraph_embedding");
  if (provider.kind() != EmbeddingKind::paragraph || provider.dim() != kParaEmbDim)
    throw std::invalid_argument("paragraph_embedding: need a paragraph provider of dim 400");
  auto out = provider.embed_document(values);
  if (out.size() != kParaEmbDim)
    throw std::runtime_error("paragraph provider returned wrong dimension");
  ensure_finite(out, "para_emb");
  return {FeatureCategory::para_emb, std::move(out)};
}

FeatureVector all_features(const std::vector<std::string>& values,
                           const FeatureProviders& providers) {
  if (!providers.character || !providers.word || !providers.paragraph)
    throw std::invalid_argument("all_features: all three embedding providers are required");

  std::vector<double> out;
  out.reserve(kAllFeaturesDim);
  auto append = [&](FeatureVector part) {
    if (part.data.size() != feature_dim(part.category))
      throw std::runtime_error("feature extractor returned wrong dimension");
    out.insert(out.end(), part.data.begin(), part.data.end());
  };
  append(global_statistics(values));
  append(character_distributions(values));
  append(embedding_statistics(values, *providers.character));
  append(embedding_statistics(values, *providers.word));
  append(paragraph_embedding(values, *providers.paragraph));
  return {FeatureCategory::all, std::move(out)};
}

void write_feature_dump_row(std::ostream& out, const std::string& table_id, size_t column,
                            const FeatureVector& features) {
  out << table_id << ',' << column << ',' << feature_category_name(features.category) << ','
      << feature_offset(features.category) << ',' << features.data.size();
  char buf[32];
  for (double x : features.data) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    out << ',' << std::string_view(buf, static_cast<size_t>(ptr - buf));
    (void)ec;
  }
  out << '\n';
}

}  // namespace tablabel
