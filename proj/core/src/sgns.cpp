#include "embkit/sgns.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "embkit/error.hpp"

namespace embkit {

namespace {

constexpr float kMaxExp = 6.0f;
constexpr int kSigmoidBins = 1024;

struct SigmoidTable {
  float table[kSigmoidBins];
  SigmoidTable() {
    for (int i = 0; i < kSigmoidBins; ++i) {
      double x = (static_cast<double>(i) / kSigmoidBins * 2.0 - 1.0) * kMaxExp;
      table[i] = static_cast<float>(1.0 / (1.0 + std::exp(-x)));
    }
  }
};
const SigmoidTable g_sigmoid;

inline double softplus(double x) {
  // log(1 + e^x), stable for large |x|.
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid_exact(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct TrainState {
  const SgnsConfig& cfg;
  const NegativeSamplingTable& table;
  std::vector<float>& input;
  std::vector<float>& output;
  const std::vector<std::vector<int32_t>>& corpus;
  const std::vector<double>& keep_prob;
  uint64_t total_scheduled;
  std::atomic<uint64_t>& processed;
};

inline float sig(const SgnsConfig& cfg, float x) {
  if (cfg.exact_sigmoid) return static_cast<float>(sigmoid_exact(x));
  return lookup_sigmoid(x);
}

// One (input vector, positive output id) update with negative sampling.
// Returns the exact pair loss for monitoring. `neu` accumulates the
// input-side gradient step; output rows are updated in place.
double pair_update(TrainState& st, const float* u, int32_t positive, float lr, Rng& rng,
                   float* neu) {
  const int dim = st.cfg.dim;
  double loss = 0;
  for (int k = 0; k <= st.cfg.negatives; ++k) {
    int32_t target;
    float label;
    if (k == 0) {
      target = positive;
      label = 1.0f;
    } else {
      target = st.table.sample_excluding(rng, positive);
      label = 0.0f;
    }
    float* out = st.output.data() + static_cast<size_t>(target) * dim;
    float dot = 0;
    for (int d = 0; d < dim; ++d) dot += u[d] * out[d];
    if (!std::isfinite(dot)) throw NumericError("sgns: non-finite activation");
    loss += label > 0 ? softplus(-dot) : softplus(dot);
    float g = (label - sig(st.cfg, dot)) * lr;
    for (int d = 0; d < dim; ++d) neu[d] += g * out[d];
    for (int d = 0; d < dim; ++d) out[d] += g * u[d];
  }
  return loss;
}

}  // namespace

float lookup_sigmoid(float x) {
  if (x >= kMaxExp) return 1.0f;
  if (x <= -kMaxExp) return 0.0f;
  int idx = static_cast<int>((x + kMaxExp) * (kSigmoidBins / kMaxExp / 2.0f));
  if (idx < 0) idx = 0;
  if (idx >= kSigmoidBins) idx = kSigmoidBins - 1;
  return g_sigmoid.table[idx];
}

double sgns_loss_and_grad(std::span<const double> u, std::span<const double> v,
                          const std::vector<std::vector<double>>& negatives, SgnsGrad* grad) {
  size_t dim = u.size();
  if (v.size() != dim) throw ConfigError("sgns loss: dimension mismatch");
  for (const auto& n : negatives) {
    if (n.size() != dim) throw ConfigError("sgns loss: dimension mismatch");
  }
  if (grad) {
    grad->input.assign(dim, 0.0);
    grad->positive.assign(dim, 0.0);
    grad->negatives.assign(negatives.size(), std::vector<double>(dim, 0.0));
  }
  double dot = 0;
  for (size_t d = 0; d < dim; ++d) dot += u[d] * v[d];
  double loss = softplus(-dot);
  if (grad) {
    double c = sigmoid_exact(dot) - 1.0;  // d loss / d dot
    for (size_t d = 0; d < dim; ++d) {
      grad->input[d] += c * v[d];
      grad->positive[d] += c * u[d];
    }
  }
  for (size_t k = 0; k < negatives.size(); ++k) {
    double dn = 0;
    for (size_t d = 0; d < dim; ++d) dn += u[d] * negatives[k][d];
    loss += softplus(dn);
    if (grad) {
      double c = sigmoid_exact(dn);
      for (size_t d = 0; d < dim; ++d) {
        grad->input[d] += c * negatives[k][d];
        grad->negatives[k][d] += c * u[d];
      }
    }
  }
  return loss;
}

SgnsModel train_sgns(SentenceStream& stream, const Vocabulary& vocab, const SgnsConfig& cfg) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives < 1 || cfg.initial_lr <= 0) {
    throw ConfigError("sgns: invalid configuration");
  }
  if (vocab.size() < 2) throw ConfigError("sgns: need vocabulary size >= 2");

  std::vector<std::vector<int32_t>> corpus;
  uint64_t total_tokens = 0;
  while (auto sentence = stream.next()) {
    std::vector<int32_t> ids;
    ids.reserve(sentence->size());
    for (const auto& tok : *sentence) {
      int32_t id = vocab.id_of(tok);
      if (id >= 0) ids.push_back(id);
    }
    if (!ids.empty()) {
      total_tokens += ids.size();
      corpus.push_back(std::move(ids));
    }
  }
  if (corpus.empty()) throw ConfigError("sgns: empty training stream");

  SgnsModel model;
  model.dim = cfg.dim;
  size_t v = vocab.size();
  model.input.resize(v * cfg.dim);
  model.output.assign(v * cfg.dim, 0.0f);
  Rng init_rng(cfg.seed);
  float bound = 0.5f / cfg.dim;
  for (auto& x : model.input) x = static_cast<float>(init_rng.uniform(-bound, bound));

  NegativeSamplingTable table(vocab);
  std::vector<double> keep_prob(v, 1.0);
  if (cfg.subsample > 0) {
    for (size_t i = 0; i < v; ++i) {
      keep_prob[i] = keep_probability(vocab, static_cast<int32_t>(i), cfg.subsample);
    }
  }

  uint64_t total_scheduled = static_cast<uint64_t>(cfg.epochs) * total_tokens;
  std::atomic<uint64_t> processed{0};
  TrainState st{cfg, table, model.input, model.output, corpus, keep_prob, total_scheduled,
                processed};

  int workers = std::max(1, cfg.workers);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> worker_loss(workers, 0.0);
    std::vector<uint64_t> worker_pairs(workers, 0);
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto run_worker = [&](int w) {
      try {
        Rng rng(Rng::derive(cfg.seed, static_cast<uint64_t>(w) + 1,
                            static_cast<uint64_t>(epoch) + 1));
        std::vector<float> neu(cfg.dim);
        std::vector<int32_t> sent;
        for (size_t si = w; si < st.corpus.size(); si += workers) {
          const auto& raw = st.corpus[si];
          sent.clear();
          for (int32_t id : raw) {
            if (cfg.subsample > 0 && st.keep_prob[id] < 1.0 &&
                rng.unit() >= st.keep_prob[id]) {
              continue;
            }
            sent.push_back(id);
          }
          uint64_t done = st.processed.fetch_add(raw.size());
          double frac = 1.0 - static_cast<double>(done) / static_cast<double>(total_scheduled);
          float lr = cfg.initial_lr * static_cast<float>(std::max(frac, 1e-4));

          for (size_t t = 0; t < sent.size(); ++t) {
            int b = 1 + static_cast<int>(rng.below(cfg.window));
            if (cfg.mode == SgnsMode::skipgram) {
              for (int off = -b; off <= b; ++off) {
                if (off == 0) continue;
                long j = static_cast<long>(t) + off;
                if (j < 0 || j >= static_cast<long>(sent.size())) continue;
                float* u = st.input.data() + static_cast<size_t>(sent[t]) * cfg.dim;
                std::fill(neu.begin(), neu.end(), 0.0f);
                double loss;
                try {
                  loss = pair_update(st, u, sent[j], lr, rng, neu.data());
                } catch (const NumericError&) {
                  throw NumericError("sgns: NaN at epoch " + std::to_string(epoch) +
                                     ", sentence " + std::to_string(si) + ", position " +
                                     std::to_string(t));
                }
                for (int d = 0; d < cfg.dim; ++d) u[d] += neu[d];
                worker_loss[w] += loss;
                ++worker_pairs[w];
              }
            } else {
              // CBOW: mean of context predicts the target.
              std::vector<float> mean(cfg.dim, 0.0f);
              int cw = 0;
              for (int off = -b; off <= b; ++off) {
                if (off == 0) continue;
                long j = static_cast<long>(t) + off;
                if (j < 0 || j >= static_cast<long>(sent.size())) continue;
                const float* cvec = st.input.data() + static_cast<size_t>(sent[j]) * cfg.dim;
                for (int d = 0; d < cfg.dim; ++d) mean[d] += cvec[d];
                ++cw;
              }
              if (cw == 0) continue;
              for (int d = 0; d < cfg.dim; ++d) mean[d] /= static_cast<float>(cw);
              std::fill(neu.begin(), neu.end(), 0.0f);
              double loss;
              try {
                loss = pair_update(st, mean.data(), sent[t], lr, rng, neu.data());
              } catch (const NumericError&) {
                throw NumericError("sgns: NaN at epoch " + std::to_string(epoch) +
                                   ", sentence " + std::to_string(si) + ", position " +
                                   std::to_string(t));
              }
              // Exact gradient of the mean: each context row gets 1/cw.
              for (int d = 0; d < cfg.dim; ++d) neu[d] /= static_cast<float>(cw);
              for (int off = -b; off <= b; ++off) {
                if (off == 0) continue;
                long j = static_cast<long>(t) + off;
                if (j < 0 || j >= static_cast<long>(sent.size())) continue;
                float* cvec = st.input.data() + static_cast<size_t>(sent[j]) * cfg.dim;
                for (int d = 0; d < cfg.dim; ++d) cvec[d] += neu[d];
              }
              worker_loss[w] += loss;
              ++worker_pairs[w];
            }
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    };

    if (workers == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(workers);
      for (int w = 0; w < workers; ++w) threads.emplace_back(run_worker, w);
      for (auto& th : threads) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    double loss_sum = 0;
    uint64_t pairs = 0;
    for (int w = 0; w < workers; ++w) {
      loss_sum += worker_loss[w];
      pairs += worker_pairs[w];
    }
    model.epoch_losses.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);

    for (float x : model.input) {
      if (!std::isfinite(x)) throw NumericError("sgns: NaN in parameters after epoch " +
                                                std::to_string(epoch));
    }
  }
  return model;
}

EmbeddingSet to_embedding_set(const SgnsModel& model, const Vocabulary& vocab) {
  return EmbeddingSet(vocab.id_to_token, model.input, model.dim);
}

}  // namespace embkit
