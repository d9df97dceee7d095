#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "creditseg/corpus.hpp"
#include "creditseg/rng.hpp"

namespace creditseg {

struct TrainConfig {
  int hidden = 512;
  double dropout = 0.5;  // probability of dropping an input coordinate
  int epochs_per_iteration = 100;
  double lr_initial = 1e-3;
  double lr_finetune = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 64;
  std::uint64_t rng_seed = 0;
};

// Two-layer network scoring a bag-of-words vector against every class plus a
// synthetic "none of the classes" output at index n_classes. Parameters are
// stored as float32 (that is what the model file holds); all arithmetic runs
// in double.
struct ScorerModel {
  int vocab_size = 0;
  int hidden = 0;
  int n_classes = 0;
  std::vector<std::string> class_names;  // size n_classes, output order
  std::uint64_t vocab_hash = 0;
  std::vector<float> w1;  // vocab_size x hidden, row-major
  std::vector<float> b1;  // hidden
  std::vector<float> w2;  // hidden x outputs, row-major
  std::vector<float> b2;  // outputs

  int outputs() const { return n_classes + 1; }
  int null_index() const { return n_classes; }
};

// One (feature vector, class) pair. The target is always a real class; the
// null output never appears as a training target.
struct TrainingExample {
  BowVector features;
  int target = 0;
};

inline ScorerModel init_model(int vocab_size, int n_classes,
                              const TrainConfig& cfg) {
  if (vocab_size <= 0 || n_classes <= 0 || cfg.hidden <= 0) {
    throw std::invalid_argument("init_model: dimensions must be positive");
  }
  ScorerModel m;
  m.vocab_size = vocab_size;
  m.hidden = cfg.hidden;
  m.n_classes = n_classes;
  m.w1.resize(static_cast<std::size_t>(vocab_size) *
              static_cast<std::size_t>(cfg.hidden));
  m.b1.assign(static_cast<std::size_t>(cfg.hidden), 0.0f);
  m.w2.resize(static_cast<std::size_t>(cfg.hidden) *
              static_cast<std::size_t>(m.outputs()));
  m.b2.assign(static_cast<std::size_t>(m.outputs()), 0.0f);
  Rng rng(cfg.rng_seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(vocab_size));
  for (float& w : m.w1) w = static_cast<float>(rng.next_range(-s1, s1));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
  for (float& w : m.w2) w = static_cast<float>(rng.next_range(-s2, s2));
  return m;
}

namespace classifier_detail {

inline void check_features(const ScorerModel& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.vocab_size) {
    throw std::invalid_argument(
        "feature vector has size " + std::to_string(x.size()) +
        ", expected " + std::to_string(m.vocab_size));
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("feature vector contains a non-finite value");
    }
  }
}

// Hidden pre-activations for an input that may have been dropout-masked.
// Only non-zero coordinates touch the weight matrix.
inline void hidden_preact(const ScorerModel& m, std::span<const double> x,
                          std::vector<double>& z1) {
  const int H = m.hidden;
  z1.assign(static_cast<std::size_t>(H), 0.0);
  for (int h = 0; h < H; ++h) z1[static_cast<std::size_t>(h)] = m.b1[static_cast<std::size_t>(h)];
  for (int v = 0; v < m.vocab_size; ++v) {
    const double xv = x[static_cast<std::size_t>(v)];
    if (xv == 0.0) continue;
    const float* row = m.w1.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(H);
    for (int h = 0; h < H; ++h) {
      z1[static_cast<std::size_t>(h)] += xv * static_cast<double>(row[h]);
    }
  }
}

inline void output_probs(const ScorerModel& m, const std::vector<double>& act,
                         std::vector<double>& probs) {
  const int H = m.hidden;
  const int O = m.outputs();
  probs.assign(static_cast<std::size_t>(O), 0.0);
  for (int o = 0; o < O; ++o) probs[static_cast<std::size_t>(o)] = m.b2[static_cast<std::size_t>(o)];
  for (int h = 0; h < H; ++h) {
    const double a = act[static_cast<std::size_t>(h)];
    if (a == 0.0) continue;
    const float* row = m.w2.data() + static_cast<std::size_t>(h) * static_cast<std::size_t>(O);
    for (int o = 0; o < O; ++o) {
      probs[static_cast<std::size_t>(o)] += a * static_cast<double>(row[o]);
    }
  }
  double mx = probs[0];
  for (double z : probs) mx = std::max(mx, z);
  double sum = 0.0;
  for (double& z : probs) {
    z = std::exp(z - mx);
    sum += z;
  }
  for (double& z : probs) z /= sum;
}

}  // namespace classifier_detail

// Class probabilities for a feature vector, outputs() entries summing to 1.
inline std::vector<double> forward(const ScorerModel& m,
                                   std::span<const double> x) {
  classifier_detail::check_features(m, x);
  std::vector<double> z1;
  classifier_detail::hidden_preact(m, x, z1);
  for (double& z : z1) z = std::max(z, 0.0);
  std::vector<double> probs;
  classifier_detail::output_probs(m, z1, probs);
  return probs;
}

struct Gradients {
  std::vector<double> w1, b1, w2, b2;

  void reset(const ScorerModel& m) {
    w1.assign(m.w1.size(), 0.0);
    b1.assign(m.b1.size(), 0.0);
    w2.assign(m.w2.size(), 0.0);
    b2.assign(m.b2.size(), 0.0);
  }
};

// Mean cross-entropy over the batch plus parameter gradients. With a positive
// dropout rate each example gets a fresh inverted-dropout mask over its
// non-zero input coordinates, drawn from rng in coordinate order; the rng may
// be null when dropout is 0.
inline double loss_and_grads(const ScorerModel& m,
                             std::span<const TrainingExample> batch,
                             double dropout, Rng* rng, Gradients& grads) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grads: empty batch");
  if (dropout < 0.0 || dropout >= 1.0) {
    throw std::invalid_argument("dropout must lie in [0, 1)");
  }
  if (dropout > 0.0 && rng == nullptr) {
    throw std::invalid_argument("dropout requires an rng");
  }
  grads.reset(m);
  const int H = m.hidden;
  const int O = m.outputs();
  const double keep = 1.0 - dropout;
  double total_loss = 0.0;
  std::vector<double> xt, z1, act, probs, dz2, dz1;
  for (const TrainingExample& ex : batch) {
    classifier_detail::check_features(m, ex.features);
    if (ex.target < 0 || ex.target >= m.n_classes) {
      throw std::invalid_argument("training target " + std::to_string(ex.target) +
                                  " is not a real class");
    }
    xt.assign(ex.features.begin(), ex.features.end());
    if (dropout > 0.0) {
      for (double& v : xt) {
        if (v == 0.0) continue;
        v = (rng->next_unit() < keep) ? v / keep : 0.0;
      }
    }
    classifier_detail::hidden_preact(m, xt, z1);
    act = z1;
    for (double& a : act) a = std::max(a, 0.0);
    classifier_detail::output_probs(m, act, probs);
    total_loss += -std::log(std::max(probs[static_cast<std::size_t>(ex.target)],
                                     std::numeric_limits<double>::min()));

    dz2 = probs;
    dz2[static_cast<std::size_t>(ex.target)] -= 1.0;
    for (int o = 0; o < O; ++o) grads.b2[static_cast<std::size_t>(o)] += dz2[static_cast<std::size_t>(o)];
    dz1.assign(static_cast<std::size_t>(H), 0.0);
    for (int h = 0; h < H; ++h) {
      const double a = act[static_cast<std::size_t>(h)];
      const std::size_t row = static_cast<std::size_t>(h) * static_cast<std::size_t>(O);
      if (a != 0.0) {
        for (int o = 0; o < O; ++o) {
          grads.w2[row + static_cast<std::size_t>(o)] += a * dz2[static_cast<std::size_t>(o)];
        }
      }
      if (z1[static_cast<std::size_t>(h)] > 0.0) {
        double da = 0.0;
        for (int o = 0; o < O; ++o) {
          da += static_cast<double>(m.w2[row + static_cast<std::size_t>(o)]) *
                dz2[static_cast<std::size_t>(o)];
        }
        dz1[static_cast<std::size_t>(h)] = da;
      }
    }
    for (int h = 0; h < H; ++h) grads.b1[static_cast<std::size_t>(h)] += dz1[static_cast<std::size_t>(h)];
    for (int v = 0; v < m.vocab_size; ++v) {
      const double xv = xt[static_cast<std::size_t>(v)];
      if (xv == 0.0) continue;
      const std::size_t row = static_cast<std::size_t>(v) * static_cast<std::size_t>(H);
      for (int h = 0; h < H; ++h) {
        grads.w1[row + static_cast<std::size_t>(h)] += xv * dz1[static_cast<std::size_t>(h)];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grads.w1) g *= inv;
  for (double& g : grads.b1) g *= inv;
  for (double& g : grads.w2) g *= inv;
  for (double& g : grads.b2) g *= inv;
  return total_loss * inv;
}

namespace classifier_detail {

struct AdamState {
  std::vector<double> m, v;
  void init(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
};

inline void adam_update(std::vector<float>& params,
                        const std::vector<double>& grads, AdamState& state,
                        const TrainConfig& cfg, double lr, long step) {
  const double b1 = cfg.adam_beta1;
  const double b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double mhat = state.m[i] / corr1;
    const double vhat = state.v[i] / corr2;
    const double p = static_cast<double>(params[i]) -
                     lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    params[i] = static_cast<float>(p);
  }
}

}  // namespace classifier_detail

// Minibatch ADAM over shuffled epochs. Returns the mean per-example loss of
// each epoch. Throws if the loss ever turns non-finite.
inline std::vector<double> train(ScorerModel& m,
                                 std::span<const TrainingExample> data,
                                 const TrainConfig& cfg, double lr) {
  if (data.empty()) throw std::invalid_argument("train: no training examples");
  if (cfg.batch_size <= 0) throw std::invalid_argument("train: bad batch size");
  Rng rng(cfg.rng_seed);
  classifier_detail::AdamState s_w1, s_b1, s_w2, s_b2;
  s_w1.init(m.w1.size());
  s_b1.init(m.b1.size());
  s_w2.init(m.w2.size());
  s_b2.init(m.b2.size());
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<TrainingExample> batch;
  Gradients grads;
  std::vector<double> epoch_losses;
  long step = 0;
  for (int epoch = 1; epoch <= cfg.epochs_per_iteration; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(data[order[i]]);
      const double loss =
          loss_and_grads(m, batch, cfg.dropout, &rng, grads);
      loss_sum += loss * static_cast<double>(end - begin);
      ++step;
      classifier_detail::adam_update(m.w1, grads.w1, s_w1, cfg, lr, step);
      classifier_detail::adam_update(m.b1, grads.b1, s_b1, cfg, lr, step);
      classifier_detail::adam_update(m.w2, grads.w2, s_w2, cfg, lr, step);
      classifier_detail::adam_update(m.b2, grads.b2, s_b2, cfg, lr, step);
    }
    const double epoch_loss = loss_sum / static_cast<double>(data.size());
    if (!std::isfinite(epoch_loss)) {
      throw std::runtime_error("training diverged at epoch " +
                               std::to_string(epoch) + " (loss is not finite)");
    }
    epoch_losses.push_back(epoch_loss);
  }
  return epoch_losses;
}

// Continues training an existing model at the fine-tuning learning rate.
// An empty example set is allowed and leaves the model untouched.
inline std::vector<double> fine_tune(ScorerModel& m,
                                     std::span<const TrainingExample> data,
                                     const TrainConfig& cfg) {
  if (data.empty()) {
    std::cerr << "warning: fine_tune called with no examples, model unchanged\n";
    return {};
  }
  return train(m, data, cfg, cfg.lr_finetune);
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------
//
// Little-endian binary layout:
//   magic "CSEG", u32 version (1), u32 vocab_size, u32 hidden, u32 outputs,
//   u64 vocab_hash, u32 name count, names as (u32 length, bytes),
//   then float32 arrays w1, b1, w2, b2 in row-major order.

namespace classifier_detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 8);
}

inline void put_f32(std::ostream& out, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32(out, v);
}

inline std::uint32_t get_u32(std::istream& in, const char* what) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw std::runtime_error(std::string("model file truncated reading ") + what);
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::istream& in, const char* what) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), 8)) {
    throw std::runtime_error(std::string("model file truncated reading ") + what);
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

inline float get_f32(std::istream& in, const char* what) {
  std::uint32_t v = get_u32(in, what);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

}  // namespace classifier_detail

inline void save_model(const ScorerModel& m, const std::string& path) {
  if (static_cast<int>(m.class_names.size()) != m.n_classes) {
    throw std::invalid_argument("save_model: class name count mismatch");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write("CSEG", 4);
  classifier_detail::put_u32(out, 1);
  classifier_detail::put_u32(out, static_cast<std::uint32_t>(m.vocab_size));
  classifier_detail::put_u32(out, static_cast<std::uint32_t>(m.hidden));
  classifier_detail::put_u32(out, static_cast<std::uint32_t>(m.outputs()));
  classifier_detail::put_u64(out, m.vocab_hash);
  classifier_detail::put_u32(out, static_cast<std::uint32_t>(m.class_names.size()));
  for (const std::string& name : m.class_names) {
    classifier_detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (float f : m.w1) classifier_detail::put_f32(out, f);
  for (float f : m.b1) classifier_detail::put_f32(out, f);
  for (float f : m.w2) classifier_detail::put_f32(out, f);
  for (float f : m.b2) classifier_detail::put_f32(out, f);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline ScorerModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "CSEG", 4) != 0) {
    throw std::runtime_error("'" + path + "' is not a model file (bad magic)");
  }
  const std::uint32_t version = classifier_detail::get_u32(in, "version");
  if (version != 1) {
    throw std::runtime_error("model file version " + std::to_string(version) +
                             " not supported (expected 1)");
  }
  ScorerModel m;
  m.vocab_size = static_cast<int>(classifier_detail::get_u32(in, "vocab size"));
  m.hidden = static_cast<int>(classifier_detail::get_u32(in, "hidden size"));
  const int outputs = static_cast<int>(classifier_detail::get_u32(in, "output size"));
  if (m.vocab_size <= 0 || m.hidden <= 0 || outputs < 2) {
    throw std::runtime_error("model file has implausible dimensions");
  }
  m.n_classes = outputs - 1;
  m.vocab_hash = classifier_detail::get_u64(in, "vocab hash");
  const std::uint32_t n_names = classifier_detail::get_u32(in, "name count");
  if (static_cast<int>(n_names) != m.n_classes) {
    throw std::runtime_error("model file class name count mismatch");
  }
  for (std::uint32_t i = 0; i < n_names; ++i) {
    const std::uint32_t len = classifier_detail::get_u32(in, "name length");
    std::string name(len, '\0');
    if (len > 0 && !in.read(name.data(), static_cast<std::streamsize>(len))) {
      throw std::runtime_error("model file truncated reading a class name");
    }
    m.class_names.push_back(std::move(name));
  }
  auto read_block = [&](std::vector<float>& dst, std::size_t n, const char* what) {
    dst.resize(n);
    for (std::size_t i = 0; i < n; ++i) dst[i] = classifier_detail::get_f32(in, what);
  };
  read_block(m.w1, static_cast<std::size_t>(m.vocab_size) * static_cast<std::size_t>(m.hidden), "w1");
  read_block(m.b1, static_cast<std::size_t>(m.hidden), "b1");
  read_block(m.w2, static_cast<std::size_t>(m.hidden) * static_cast<std::size_t>(outputs), "w2");
  read_block(m.b2, static_cast<std::size_t>(outputs), "b2");
  char extra;
  if (in.read(&extra, 1)) {
    throw std::runtime_error("model file has trailing bytes");
  }
  return m;
}

}  // namespace creditseg
