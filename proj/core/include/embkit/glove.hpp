#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "embkit/corpus.hpp"
#include "embkit/embstore.hpp"
#include "embkit/vocab.hpp"

namespace embkit {

// Sparse weighted co-occurrence counts X_AB. Symmetric when built with a
// symmetric window; no explicit zero entries are stored.
class CoocStore {
 public:
  int window = 0;
  bool distance_weighting = true;
  std::unordered_map<uint64_t, double> entries;

  static uint64_t key(int32_t a, int32_t b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
           static_cast<uint32_t>(b);
  }
  void add(int32_t a, int32_t b, double w) { entries[key(a, b)] += w; }
  double get(int32_t a, int32_t b) const {
    auto it = entries.find(key(a, b));
    return it == entries.end() ? 0.0 : it->second;
  }
  size_t size() const { return entries.size(); }
};

// For each co-occurring pair within window distance d, adds 1/d (or 1
// without distance weighting) to both X_AB and X_BA.
CoocStore build_cooc(SentenceStream& stream, const Vocabulary& vocab, int window,
                     bool distance_weighting, int workers = 1);

// Header line "#cooc v1 window=<w> dw=<0|1>", then little-endian binary
// triples (u32, u32, f64) sorted by key.
void save_cooc(const CoocStore& store, const std::string& path);
CoocStore load_cooc(const std::string& path);

struct GloveConfig {
  int dim = 300;
  int window = 11;
  int epochs = 80;
  double x_max = 100.0;
  double alpha = 0.75;
  double initial_lr = 0.05;
  uint64_t seed = 1;
  int workers = 1;
};

struct GloveModel {
  int dim = 0;
  std::vector<double> w;   // V x dim word vectors
  std::vector<double> c;   // V x dim context vectors
  std::vector<double> bw;  // V word biases
  std::vector<double> bc;  // V context biases
  std::vector<double> epoch_losses;
};

// f(x) = min(1, (x / x_max)^alpha)
double glove_weight(double x, double x_max, double alpha);

// Per-entry objective f(x) * (w.c + bw + bc - log x)^2 with its exact
// gradients; this is the same math the trainer steps on.
struct GloveEntryGrad {
  std::vector<double> dw, dc;
  double dbw = 0, dbc = 0;
};
double glove_entry_loss_and_grad(std::span<const double> w, std::span<const double> c,
                                 double bw, double bc, double x, double x_max, double alpha,
                                 GloveEntryGrad* grad = nullptr);

// Adaptive-gradient updates over seeded shuffles of the nonzero entries;
// parameters initialized uniform(-0.5/dim, 0.5/dim), accumulators at 1.
GloveModel train_glove(const CoocStore& store, const GloveConfig& cfg);

double glove_loss(const GloveModel& model, const CoocStore& store, double x_max = 100.0,
                  double alpha = 0.75);

// Final embedding rows are W + C.
EmbeddingSet to_embedding_set(const GloveModel& model, const Vocabulary& vocab);

}  // namespace embkit
