#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "embkit/corpus.hpp"
#include "embkit/embstore.hpp"
#include "embkit/vocab.hpp"

namespace embkit {

enum class SgnsMode { skipgram, cbow };

struct SgnsConfig {
  int dim = 300;
  int window = 11;  // context extends up to `window` on each side
  int epochs = 80;
  int negatives = 5;
  float initial_lr = 0.025f;
  SgnsMode mode = SgnsMode::skipgram;
  uint64_t seed = 1;
  int workers = 1;
  double subsample = 0.0;      // frequent-word subsampling threshold; 0 = off
  bool exact_sigmoid = false;  // bypass the lookup table
};

struct SgnsModel {
  int dim = 0;
  std::vector<float> input;   // V x dim, the final embeddings
  std::vector<float> output;  // V x dim
  std::vector<double> epoch_losses;  // mean pair loss per epoch
};

// Skip-gram / CBOW with negative sampling. Input matrix initialized
// uniform(-0.5/dim, 0.5/dim), output zero; learning rate decays linearly
// to initial_lr * 1e-4 over all scheduled updates. Deterministic with one
// worker; multiple workers update shared matrices without locks.
SgnsModel train_sgns(SentenceStream& stream, const Vocabulary& vocab, const SgnsConfig& cfg);

// loss = -log s(u.v) - sum_k log s(-u.v_k), exact sigmoid, double precision.
// u is the input-side vector; v and the v_k are output-side vectors.
struct SgnsGrad {
  std::vector<double> input;
  std::vector<double> positive;
  std::vector<std::vector<double>> negatives;
};
double sgns_loss_and_grad(std::span<const double> u, std::span<const double> v,
                          const std::vector<std::vector<double>>& negatives,
                          SgnsGrad* grad = nullptr);

// 1024-bin lookup over [-6, 6] with saturation outside, as used by the
// trainers' update path.
float lookup_sigmoid(float x);

EmbeddingSet to_embedding_set(const SgnsModel& model, const Vocabulary& vocab);

}  // namespace embkit
