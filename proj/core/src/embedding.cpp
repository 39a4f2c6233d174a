#include "tablabel/embedding.hpp"

#include <cctype>
#include <cmath>
#include <unordered_map>

#include "tablabel/hash.hpp"

namespace tablabel {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current)), current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<double> EmbeddingProvider::embed_document(
    const std::vector<std::string>& values) const {
  std::string joined;
  for (const auto& v : values) {
    if (!joined.empty()) joined.push_back(' ');
    joined += v;
  }
  return embed(joined);
}

static void add_hashed(std::vector<double>& out, std::string_view ngram, double weight = 1.0) {
  uint64_t h = fnv1a64(ngram);
  size_t bucket = h % out.size();
  double sign = ((h >> 33) & 1) ? 1.0 : -1.0;
  out[bucket] += sign * weight;
}

std::vector<double> CharNgramProvider::embed(const std::string& value) const {
  std::vector<double> out(dim_, 0.0);
  std::string_view sv(value);
  for (size_t n = 1; n <= 3; ++n)
    for (size_t i = 0; i + n <= sv.size(); ++i) add_hashed(out, sv.substr(i, n));
  return out;
}

// fastText-style boundary wrapping so short tokens still produce n-grams.
static void add_subwords(std::vector<double>& out, const std::string& token) {
  std::string wrapped = "<" + token + ">";
  std::string_view sv(wrapped);
  for (size_t n = 3; n <= 5; ++n)
    for (size_t i = 0; i + n <= sv.size(); ++i) add_hashed(out, sv.substr(i, n));
}

SubwordWordProvider SubwordWordProvider::from_tables(const std::vector<Table>& tables,
                                                     size_t dim) {
  std::unordered_set<std::string> vocab;
  for (const auto& t : tables)
    for (const auto& c : t.columns)
      for (const auto& v : c.values)
        for (auto& tok : whitespace_tokens(v)) vocab.insert(std::move(tok));
  return SubwordWordProvider(std::move(vocab), dim);
}

std::vector<double> SubwordWordProvider::embed(const std::string& value) const {
  std::vector<double> out(dim_, 0.0);
  for (const auto& token : whitespace_tokens(value)) add_subwords(out, token);
  return out;
}

bool SubwordWordProvider::in_vocabulary(const std::string& value) const {
  for (const auto& token : whitespace_tokens(value))
    if (vocabulary_.count(token)) return true;
  return false;
}

std::vector<double> BagParagraphProvider::embed(const std::string& value) const {
  return embed_document({value});
}

std::vector<double> BagParagraphProvider::embed_document(
    const std::vector<std::string>& values) const {
  std::unordered_map<std::string, double> counts;
  for (const auto& v : values)
    for (auto& token : whitespace_tokens(v)) counts[std::move(token)] += 1.0;

  std::vector<double> out(dim_, 0.0);
  for (const auto& [token, count] : counts) add_hashed(out, token, count);

  double norm2 = 0;
  for (double x : out) norm2 += x * x;
  if (norm2 > 0) {
    double inv = 1.0 / std::sqrt(norm2);
    for (double& x : out) x *= inv;
  }
  return out;
}

}  // namespace tablabel
