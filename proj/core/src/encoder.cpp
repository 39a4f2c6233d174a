#include "tablabel/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "tablabel/hash.hpp"
#include "tablabel/rng.hpp"

namespace tablabel {

namespace {

constexpr char kMagic[4] = {'T', 'B', 'L', 'M'};
constexpr uint32_t kVersion = 1;

void mean_pool(const std::vector<double>& emb, uint32_t emb_dim,
               const std::vector<uint32_t>& ids, double* out) {
  std::fill(out, out + emb_dim, 0.0);
  if (ids.empty()) return;
  for (uint32_t id : ids) {
    const double* row = emb.data() + static_cast<size_t>(id) * emb_dim;
    for (uint32_t k = 0; k < emb_dim; ++k) out[k] += row[k];
  }
  double inv = 1.0 / static_cast<double>(ids.size());
  for (uint32_t k = 0; k < emb_dim; ++k) out[k] *= inv;
}

struct Activations {
  std::vector<double> x;       // pooled values + pooled context residual
  std::vector<double> hidden;  // tanh outputs
  std::vector<double> probs;
  double logsumexp = 0;
  std::vector<double> logits;
};

Activations run_forward(const Parameters& params, const ModelConfig& config, int num_labels,
                        const ColumnInput& input) {
  const uint32_t d = config.emb_dim, H = config.hidden_dim;
  Activations act;
  act.x.resize(d);
  mean_pool(params.emb_value, d, input.value_ids, act.x.data());
  if (!input.context_ids.empty()) {
    std::vector<double> ctx(d);
    mean_pool(params.emb_context, d, input.context_ids, ctx.data());
    for (uint32_t k = 0; k < d; ++k) act.x[k] += ctx[k];
  }

  act.hidden.resize(H);
  for (uint32_t h = 0; h < H; ++h) {
    const double* row = params.w1.data() + static_cast<size_t>(h) * d;
    double a = params.b1[h];
    for (uint32_t j = 0; j < d; ++j) a += row[j] * act.x[j];
    act.hidden[h] = std::tanh(a);
  }

  act.logits.resize(static_cast<size_t>(num_labels));
  for (int l = 0; l < num_labels; ++l) {
    const double* row = params.w2.data() + static_cast<size_t>(l) * H;
    double z = params.b2[static_cast<size_t>(l)];
    for (uint32_t h = 0; h < H; ++h) z += row[h] * act.hidden[h];
    act.logits[static_cast<size_t>(l)] = z;
  }

  double zmax = *std::max_element(act.logits.begin(), act.logits.end());
  if (!std::isfinite(zmax)) throw std::runtime_error("non-finite activation in forward pass");
  double sum = 0;
  act.probs.resize(act.logits.size());
  for (size_t l = 0; l < act.logits.size(); ++l) {
    act.probs[l] = std::exp(act.logits[l] - zmax);
    sum += act.probs[l];
  }
  for (double& p : act.probs) p /= sum;
  act.logsumexp = zmax + std::log(sum);
  return act;
}

}  // namespace

Model::Model(ModelConfig config, LabelVocabulary vocabulary, uint64_t init_seed)
    : config_(config), vocab_(std::move(vocabulary)), tokenizer_(config.tokenizer) {
  if (vocab_.size() < 2) throw std::invalid_argument("model needs a vocabulary of at least 2 labels");
  if (config_.emb_dim == 0 || config_.hidden_dim == 0)
    throw std::invalid_argument("model dimensions must be positive");

  uint64_t h = tokenizer_.fingerprint();
  h = hash_combine(h, config_.emb_dim);
  h = hash_combine(h, config_.hidden_dim);
  h = hash_combine(h, config_.max_seq_len);
  h = hash_combine(h, config_.values_only ? 1 : 0);
  for (const auto& label : vocab_.labels()) h = hash_combine(h, fnv1a64(label));
  fingerprint_ = h;

  const size_t buckets = config_.tokenizer.buckets;
  const uint32_t d = config_.emb_dim, H = config_.hidden_dim;
  const auto L = static_cast<size_t>(vocab_.size());
  params_.emb_value.resize(buckets * d);
  params_.emb_context.resize(buckets * d);
  params_.w1.resize(static_cast<size_t>(H) * d);
  params_.b1.assign(H, 0.0);
  params_.w2.assign(L * H, 0.0);  // zero head: fresh models predict uniformly
  params_.b2.assign(L, 0.0);

  Rng rng(hash_combine(init_seed, fingerprint_));
  for (double& w : params_.emb_value) w = 0.2 * rng.real() - 0.1;
  for (double& w : params_.emb_context) w = 0.2 * rng.real() - 0.1;
  double bound = std::sqrt(6.0 / (static_cast<double>(d) + H));
  for (double& w : params_.w1) w = bound * (2.0 * rng.real() - 1.0);
}

ColumnInput Model::make_input(const std::vector<std::string>& values,
                              const std::vector<std::string>& context) const {
  static const std::vector<std::string> kNoContext;
  const auto& ctx = config_.values_only ? kNoContext : context;
  return tokenizer_.serialize_input(values, ctx, config_.max_seq_len);
}

LabelDistribution Model::forward(const ColumnInput& input) const {
  if (input.fingerprint != tokenizer_.fingerprint())
    throw std::runtime_error("input/model tokenizer fingerprint mismatch");
  Activations act = run_forward(params_, config_, vocab_.size(), input);

  LabelDistribution dist;
  dist.probs = std::move(act.probs);
  dist.argmax_label = 0;
  for (size_t l = 1; l < dist.probs.size(); ++l)
    if (dist.probs[l] > dist.probs[static_cast<size_t>(dist.argmax_label)])
      dist.argmax_label = static_cast<int>(l);
  dist.confidence = dist.probs[static_cast<size_t>(dist.argmax_label)];
  return dist;
}

Gradients loss_and_gradients(const Model& model,
                             const std::vector<std::pair<ColumnInput, int>>& batch) {
  if (batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  const ModelConfig& config = model.config_;
  const Parameters& params = model.params_;
  const uint32_t d = config.emb_dim, H = config.hidden_dim;
  const int L = model.num_labels();

  Gradients g;
  g.w1.assign(params.w1.size(), 0.0);
  g.b1.assign(params.b1.size(), 0.0);
  g.w2.assign(params.w2.size(), 0.0);
  g.b2.assign(params.b2.size(), 0.0);

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  std::vector<double> dz(static_cast<size_t>(L)), dh(H), da(H), dx(d);

  for (const auto& [input, label] : batch) {
    if (label < 0 || label >= L)
      throw std::invalid_argument("loss_and_gradients: label id out of range");
    if (input.fingerprint != model.tokenizer_.fingerprint())
      throw std::runtime_error("input/model tokenizer fingerprint mismatch");

    Activations act = run_forward(params, config, L, input);
    g.loss += (act.logsumexp - act.logits[static_cast<size_t>(label)]) * inv_batch;

    for (int l = 0; l < L; ++l)
      dz[static_cast<size_t>(l)] =
          (act.probs[static_cast<size_t>(l)] - (l == label ? 1.0 : 0.0)) * inv_batch;

    for (int l = 0; l < L; ++l) {
      g.b2[static_cast<size_t>(l)] += dz[static_cast<size_t>(l)];
      double* w2g = g.w2.data() + static_cast<size_t>(l) * H;
      for (uint32_t h = 0; h < H; ++h) w2g[h] += dz[static_cast<size_t>(l)] * act.hidden[h];
    }
    std::fill(dh.begin(), dh.end(), 0.0);
    for (int l = 0; l < L; ++l) {
      const double* w2row = params.w2.data() + static_cast<size_t>(l) * H;
      for (uint32_t h = 0; h < H; ++h) dh[h] += w2row[h] * dz[static_cast<size_t>(l)];
    }
    for (uint32_t h = 0; h < H; ++h) da[h] = dh[h] * (1.0 - act.hidden[h] * act.hidden[h]);

    for (uint32_t h = 0; h < H; ++h) {
      g.b1[h] += da[h];
      double* w1g = g.w1.data() + static_cast<size_t>(h) * d;
      for (uint32_t j = 0; j < d; ++j) w1g[j] += da[h] * act.x[j];
    }
    std::fill(dx.begin(), dx.end(), 0.0);
    for (uint32_t h = 0; h < H; ++h) {
      const double* w1row = params.w1.data() + static_cast<size_t>(h) * d;
      for (uint32_t j = 0; j < d; ++j) dx[j] += w1row[j] * da[h];
    }

    auto scatter = [&](std::unordered_map<uint32_t, std::vector<double>>& rows,
                       const std::vector<uint32_t>& ids) {
      if (ids.empty()) return;
      double inv = 1.0 / static_cast<double>(ids.size());
      for (uint32_t id : ids) {
        auto [it, inserted] = rows.try_emplace(id);
        if (inserted) it->second.assign(d, 0.0);
        for (uint32_t k = 0; k < d; ++k) it->second[k] += dx[k] * inv;
      }
    };
    scatter(g.emb_value_rows, input.value_ids);
    scatter(g.emb_context_rows, input.context_ids);
  }
  return g;
}

AdamState AdamState::for_model(const Model& model) {
  AdamState s;
  const Parameters& p = model.params();
  s.m.emb_value.assign(p.emb_value.size(), 0.0);
  s.m.emb_context.assign(p.emb_context.size(), 0.0);
  s.m.w1.assign(p.w1.size(), 0.0);
  s.m.b1.assign(p.b1.size(), 0.0);
  s.m.w2.assign(p.w2.size(), 0.0);
  s.m.b2.assign(p.b2.size(), 0.0);
  s.v = s.m;
  return s;
}

void AdamState::apply(Model& model, const Gradients& grads, const AdamConfig& config) {
  Parameters& p = model.params();
  ++step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));

  auto update_one = [&](double& param, double& m_i, double& v_i, double grad) {
    m_i = config.beta1 * m_i + (1.0 - config.beta1) * grad;
    v_i = config.beta2 * v_i + (1.0 - config.beta2) * grad * grad;
    param -= config.learning_rate * (m_i / bc1) / (std::sqrt(v_i / bc2) + config.epsilon);
  };
  auto update_dense = [&](std::vector<double>& param, std::vector<double>& m_b,
                          std::vector<double>& v_b, const std::vector<double>& grad) {
    if (param.size() != grad.size())
      throw std::logic_error("optimizer: gradient block shape mismatch");
    for (size_t i = 0; i < param.size(); ++i) update_one(param[i], m_b[i], v_b[i], grad[i]);
  };
  update_dense(p.w1, m.w1, v.w1, grads.w1);
  update_dense(p.b1, m.b1, v.b1, grads.b1);
  update_dense(p.w2, m.w2, v.w2, grads.w2);
  update_dense(p.b2, m.b2, v.b2, grads.b2);

  // Sorted row order keeps the floating-point update sequence reproducible.
  const uint32_t d = model.config().emb_dim;
  auto update_sparse = [&](std::vector<double>& table, std::vector<double>& m_t,
                           std::vector<double>& v_t,
                           const std::unordered_map<uint32_t, std::vector<double>>& rows) {
    std::vector<uint32_t> touched;
    touched.reserve(rows.size());
    for (const auto& [row, unused] : rows) touched.push_back(row);
    std::sort(touched.begin(), touched.end());
    for (uint32_t row : touched) {
      const std::vector<double>& grad = rows.at(row);
      size_t base = static_cast<size_t>(row) * d;
      for (uint32_t k = 0; k < d; ++k)
        update_one(table[base + k], m_t[base + k], v_t[base + k], grad[k]);
    }
  };
  update_sparse(p.emb_value, m.emb_value, v.emb_value, grads.emb_value_rows);
  update_sparse(p.emb_context, m.emb_context, v.emb_context, grads.emb_context_rows);
}

namespace {

void write_bytes(std::ostream& out, const void* data, size_t size) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}
template <typename T>
void write_pod(std::ostream& out, T value) {
  write_bytes(out, &value, sizeof(value));
}
void write_block(std::ostream& out, const std::vector<double>& block) {
  write_pod<uint64_t>(out, block.size());
  write_bytes(out, block.data(), block.size() * sizeof(double));
}

void read_bytes(std::istream& in, void* data, size_t size) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<size_t>(in.gcount()) != size)
    throw std::runtime_error("model file truncated");
}
template <typename T>
T read_pod(std::istream& in) {
  T value;
  read_bytes(in, &value, sizeof(value));
  return value;
}
void read_block(std::istream& in, std::vector<double>& block, size_t expected) {
  auto size = read_pod<uint64_t>(in);
  if (size != expected) throw std::runtime_error("model file corrupt: block size mismatch");
  block.resize(expected);
  read_bytes(in, block.data(), expected * sizeof(double));
}

void write_parameters(std::ostream& out, const Parameters& p) {
  write_block(out, p.emb_value);
  write_block(out, p.emb_context);
  write_block(out, p.w1);
  write_block(out, p.b1);
  write_block(out, p.w2);
  write_block(out, p.b2);
}

void read_parameters(std::istream& in, Parameters& p, const Parameters& shape) {
  read_block(in, p.emb_value, shape.emb_value.size());
  read_block(in, p.emb_context, shape.emb_context.size());
  read_block(in, p.w1, shape.w1.size());
  read_block(in, p.b1, shape.b1.size());
  read_block(in, p.w2, shape.w2.size());
  read_block(in, p.b2, shape.b2.size());
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path,
                const AdamState* optimizer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());

  write_bytes(out, kMagic, sizeof(kMagic));
  write_pod<uint32_t>(out, kVersion);
  const ModelConfig& c = model.config();
  write_pod<uint32_t>(out, c.tokenizer.buckets);
  write_pod<uint32_t>(out, c.tokenizer.ngram_min);
  write_pod<uint32_t>(out, c.tokenizer.ngram_max);
  write_pod<uint32_t>(out, c.emb_dim);
  write_pod<uint32_t>(out, c.hidden_dim);
  write_pod<uint32_t>(out, c.max_seq_len);
  write_pod<uint8_t>(out, c.values_only ? 1 : 0);
  write_pod<uint64_t>(out, model.fingerprint());

  write_pod<uint32_t>(out, static_cast<uint32_t>(model.vocabulary().size()));
  for (const auto& label : model.vocabulary().labels()) {
    write_pod<uint32_t>(out, static_cast<uint32_t>(label.size()));
    write_bytes(out, label.data(), label.size());
  }

  write_parameters(out, model.params());

  write_pod<uint8_t>(out, optimizer ? 1 : 0);
  if (optimizer) {
    write_pod<uint64_t>(out, optimizer->step);
    write_parameters(out, optimizer->m);
    write_parameters(out, optimizer->v);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());

  char magic[4];
  read_bytes(in, magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a model file (bad magic): " + path.string());
  auto version = read_pod<uint32_t>(in);
  if (version != kVersion)
    throw std::runtime_error("unsupported model file version " + std::to_string(version));

  ModelConfig config;
  config.tokenizer.buckets = read_pod<uint32_t>(in);
  config.tokenizer.ngram_min = read_pod<uint32_t>(in);
  config.tokenizer.ngram_max = read_pod<uint32_t>(in);
  config.emb_dim = read_pod<uint32_t>(in);
  config.hidden_dim = read_pod<uint32_t>(in);
  config.max_seq_len = read_pod<uint32_t>(in);
  config.values_only = read_pod<uint8_t>(in) != 0;
  auto stored_fingerprint = read_pod<uint64_t>(in);

  auto num_labels = read_pod<uint32_t>(in);
  LabelVocabulary vocab;
  for (uint32_t i = 0; i < num_labels; ++i) {
    auto len = read_pod<uint32_t>(in);
    std::string label(len, '\0');
    read_bytes(in, label.data(), len);
    vocab.add(label);
  }

  LoadedModel loaded{Model(config, std::move(vocab), 0), std::nullopt};
  Model& model = loaded.model;
  if (model.fingerprint() != stored_fingerprint)
    throw std::runtime_error("model file corrupt: fingerprint mismatch");

  read_parameters(in, model.params(), model.params());

  if (read_pod<uint8_t>(in) != 0) {
    AdamState state = AdamState::for_model(model);
    state.step = read_pod<uint64_t>(in);
    read_parameters(in, state.m, model.params());
    read_parameters(in, state.v, model.params());
    loaded.optimizer = std::move(state);
  }
  return loaded;
}

}  // namespace tablabel
