#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tablabel/corpus.hpp"
#include "tablabel/tokenizer.hpp"

namespace tablabel {

struct ModelConfig {
  TokenizerConfig tokenizer;
  uint32_t emb_dim = 64;
  uint32_t hidden_dim = 256;
  uint32_t max_seq_len = 256;
  bool values_only = false;  // baseline mode: context segment is always dropped
};

/// Probability distribution over the label vocabulary for one column.
/// Entries are non-negative and sum to 1; argmax ties break toward the
/// lowest label index.
struct LabelDistribution {
  std::vector<double> probs;
  int argmax_label = 0;
  double confidence = 0;
};

/// All trainable parameters. Each segment owns its embedding table; the
/// encoder mean-pools the value segment, adds the mean-pooled context
/// segment as a residual (zero when the context is empty, so the
/// values-only form sits exactly on the trained operating point), then one
/// tanh hidden layer and a linear softmax head over the vocabulary.
struct Parameters {
  std::vector<double> emb_value;    // buckets x emb_dim
  std::vector<double> emb_context;  // buckets x emb_dim
  std::vector<double> w1;           // hidden x emb_dim
  std::vector<double> b1;           // hidden
  std::vector<double> w2;           // labels x hidden
  std::vector<double> b2;           // labels
};

/// Gradients of the mean batch loss. Embedding gradients are sparse: only
/// rows touched by the batch appear.
struct Gradients {
  std::unordered_map<uint32_t, std::vector<double>> emb_value_rows;
  std::unordered_map<uint32_t, std::vector<double>> emb_context_rows;
  std::vector<double> w1, b1, w2, b2;
  double loss = 0;
};

class Model {
 public:
  Model(ModelConfig config, LabelVocabulary vocabulary, uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  const LabelVocabulary& vocabulary() const { return vocab_; }
  const Tokenizer& tokenizer() const { return tokenizer_; }
  uint64_t fingerprint() const { return fingerprint_; }
  int num_labels() const { return vocab_.size(); }

  Parameters& params() { return params_; }
  const Parameters& params() const { return params_; }

  /// Serializes a column for this model. In values-only mode the context is
  /// dropped, so inference ignores it by construction.
  ColumnInput make_input(const std::vector<std::string>& values,
                         const std::vector<std::string>& context) const;

  /// Deterministic inference. Throws on tokenizer fingerprint mismatch and
  /// on non-finite activations.
  LabelDistribution forward(const ColumnInput& input) const;

 private:
  ModelConfig config_;
  LabelVocabulary vocab_;
  Tokenizer tokenizer_;
  uint64_t fingerprint_;
  Parameters params_;

  friend Gradients loss_and_gradients(const Model&,
                                      const std::vector<std::pair<ColumnInput, int>>&);
};

/// Mean cross-entropy over the batch plus gradients for every parameter
/// block. Labels must be valid vocabulary ids.
Gradients loss_and_gradients(const Model& model,
                             const std::vector<std::pair<ColumnInput, int>>& batch);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with lazy (touched-rows-only) embedding updates. Serialized with
/// the model so interrupted training resumes bit-exactly.
struct AdamState {
  uint64_t step = 0;
  Parameters m, v;

  static AdamState for_model(const Model& model);
  void apply(Model& model, const Gradients& grads, const AdamConfig& config);
};

/// Versioned binary model file; bit-exact round trip. Optimizer state is
/// included when provided.
void save_model(const Model& model, const std::filesystem::path& path,
                const AdamState* optimizer = nullptr);

struct LoadedModel {
  Model model;
  std::optional<AdamState> optimizer;
};

/// Refuses files with the wrong magic or version and truncated or
/// corrupted payloads.
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace tablabel
