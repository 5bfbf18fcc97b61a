#include "embkit/glove.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include "embkit/error.hpp"
#include "embkit/rng.hpp"

namespace embkit {

CoocStore build_cooc(SentenceStream& stream, const Vocabulary& vocab, int window,
                     bool distance_weighting, int workers) {
  if (window < 1) throw ConfigError("cooc: window must be >= 1");
  CoocStore store;
  store.window = window;
  store.distance_weighting = distance_weighting;

  std::vector<std::vector<int32_t>> sentences;
  while (auto sentence = stream.next()) {
    std::vector<int32_t> ids;
    ids.reserve(sentence->size());
    for (const auto& tok : *sentence) {
      int32_t id = vocab.id_of(tok);
      if (id >= 0) ids.push_back(id);
    }
    if (!ids.empty()) sentences.push_back(std::move(ids));
  }

  workers = std::max(1, workers);
  std::vector<std::unordered_map<uint64_t, double>> shards(workers);
  auto count_shard = [&](int w) {
    auto& local = shards[w];
    for (size_t si = w; si < sentences.size(); si += workers) {
      const auto& s = sentences[si];
      for (size_t i = 0; i < s.size(); ++i) {
        size_t lo = i > static_cast<size_t>(window) ? i - window : 0;
        for (size_t j = lo; j < i; ++j) {
          double d = static_cast<double>(i - j);
          double wgt = distance_weighting ? 1.0 / d : 1.0;
          local[CoocStore::key(s[i], s[j])] += wgt;
          local[CoocStore::key(s[j], s[i])] += wgt;
        }
      }
    }
  };
  if (workers == 1) {
    count_shard(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(count_shard, w);
    for (auto& th : threads) th.join();
  }
  // Deterministic merge in shard order.
  for (auto& shard : shards) {
    for (auto& [k, v] : shard) store.entries[k] += v;
  }
  return store;
}

void save_cooc(const CoocStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cooc: cannot write " + path);
  out << "#cooc v1 window=" << store.window << " dw=" << (store.distance_weighting ? 1 : 0)
      << "\n";
  std::vector<uint64_t> keys;
  keys.reserve(store.entries.size());
  for (auto& [k, v] : store.entries) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (uint64_t k : keys) {
    uint32_t a = static_cast<uint32_t>(k >> 32);
    uint32_t b = static_cast<uint32_t>(k & 0xffffffffu);
    double x = store.entries.at(k);
    out.write(reinterpret_cast<const char*>(&a), sizeof(a));
    out.write(reinterpret_cast<const char*>(&b), sizeof(b));
    out.write(reinterpret_cast<const char*>(&x), sizeof(x));
  }
}

CoocStore load_cooc(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cooc: cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("#cooc v1 ", 0) != 0) {
    throw DataError(path + ":1: expected '#cooc v1' header");
  }
  CoocStore store;
  size_t wpos = header.find("window=");
  size_t dpos = header.find("dw=");
  if (wpos == std::string::npos || dpos == std::string::npos) {
    throw DataError(path + ":1: header missing window= or dw=");
  }
  store.window = std::stoi(header.substr(wpos + 7));
  store.distance_weighting = header.substr(dpos + 3, 1) == "1";
  while (true) {
    uint32_t a, b;
    double x;
    in.read(reinterpret_cast<char*>(&a), sizeof(a));
    if (in.gcount() == 0 && in.eof()) break;
    in.read(reinterpret_cast<char*>(&b), sizeof(b));
    in.read(reinterpret_cast<char*>(&x), sizeof(x));
    if (!in) throw DataError(path + ": truncated triple record");
    store.entries[CoocStore::key(static_cast<int32_t>(a), static_cast<int32_t>(b))] = x;
  }
  return store;
}

double glove_weight(double x, double x_max, double alpha) {
  if (x >= x_max) return 1.0;
  return std::pow(x / x_max, alpha);
}

double glove_entry_loss_and_grad(std::span<const double> w, std::span<const double> c,
                                 double bw, double bc, double x, double x_max, double alpha,
                                 GloveEntryGrad* grad) {
  if (w.size() != c.size()) throw ConfigError("glove entry: dimension mismatch");
  double dot = 0;
  for (size_t d = 0; d < w.size(); ++d) dot += w[d] * c[d];
  double diff = dot + bw + bc - std::log(x);
  double f = glove_weight(x, x_max, alpha);
  double loss = f * diff * diff;
  if (grad) {
    grad->dw.resize(w.size());
    grad->dc.resize(w.size());
    double g = 2.0 * f * diff;
    for (size_t d = 0; d < w.size(); ++d) {
      grad->dw[d] = g * c[d];
      grad->dc[d] = g * w[d];
    }
    grad->dbw = g;
    grad->dbc = g;
  }
  return loss;
}

GloveModel train_glove(const CoocStore& store, const GloveConfig& cfg) {
  if (store.entries.empty()) throw ConfigError("glove: empty co-occurrence store");
  if (cfg.dim < 1 || cfg.x_max <= 0 || cfg.alpha <= 0 || cfg.alpha > 1) {
    throw ConfigError("glove: invalid configuration");
  }

  struct Entry {
    int32_t a, b;
    double x;
  };
  std::vector<Entry> entries;
  entries.reserve(store.size());
  {
    std::vector<uint64_t> keys;
    keys.reserve(store.size());
    for (auto& [k, v] : store.entries) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (uint64_t k : keys) {
      entries.push_back({static_cast<int32_t>(k >> 32),
                         static_cast<int32_t>(k & 0xffffffffu), store.entries.at(k)});
    }
  }
  int32_t v = 0;
  for (const auto& e : entries) v = std::max({v, e.a + 1, e.b + 1});

  GloveModel model;
  model.dim = cfg.dim;
  size_t vd = static_cast<size_t>(v) * cfg.dim;
  model.w.resize(vd);
  model.c.resize(vd);
  model.bw.resize(v);
  model.bc.resize(v);
  Rng init_rng(cfg.seed);
  double bound = 0.5 / cfg.dim;
  for (auto& p : model.w) p = init_rng.uniform(-bound, bound);
  for (auto& p : model.c) p = init_rng.uniform(-bound, bound);
  for (auto& p : model.bw) p = init_rng.uniform(-bound, bound);
  for (auto& p : model.bc) p = init_rng.uniform(-bound, bound);

  std::vector<double> acc_w(vd, 1.0), acc_c(vd, 1.0), acc_bw(v, 1.0), acc_bc(v, 1.0);
  std::vector<size_t> order(entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  int workers = std::max(1, cfg.workers);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(Rng::derive(cfg.seed, 0x510e, static_cast<uint64_t>(epoch) + 1));
    shuffle_rng.shuffle(order);

    std::vector<double> worker_loss(workers, 0.0);
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto run_worker = [&](int w) {
      try {
        GloveEntryGrad grad;
        for (size_t oi = w; oi < order.size(); oi += workers) {
          const Entry& e = entries[order[oi]];
          double* wa = model.w.data() + static_cast<size_t>(e.a) * cfg.dim;
          double* cb = model.c.data() + static_cast<size_t>(e.b) * cfg.dim;
          double loss = glove_entry_loss_and_grad(
              std::span<const double>(wa, cfg.dim), std::span<const double>(cb, cfg.dim),
              model.bw[e.a], model.bc[e.b], e.x, cfg.x_max, cfg.alpha, &grad);
          if (!std::isfinite(loss)) {
            throw NumericError("glove: NaN at epoch " + std::to_string(epoch) + ", entry " +
                               std::to_string(order[oi]));
          }
          double* aw = acc_w.data() + static_cast<size_t>(e.a) * cfg.dim;
          double* ac = acc_c.data() + static_cast<size_t>(e.b) * cfg.dim;
          for (int d = 0; d < cfg.dim; ++d) {
            double gw = grad.dw[d], gc = grad.dc[d];
            wa[d] -= cfg.initial_lr * gw / std::sqrt(aw[d]);
            cb[d] -= cfg.initial_lr * gc / std::sqrt(ac[d]);
            aw[d] += gw * gw;
            ac[d] += gc * gc;
          }
          model.bw[e.a] -= cfg.initial_lr * grad.dbw / std::sqrt(acc_bw[e.a]);
          model.bc[e.b] -= cfg.initial_lr * grad.dbc / std::sqrt(acc_bc[e.b]);
          acc_bw[e.a] += grad.dbw * grad.dbw;
          acc_bc[e.b] += grad.dbc * grad.dbc;
          worker_loss[w] += loss;
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
      for (int w = 0; w < workers; ++w) threads.emplace_back(run_worker, w);
      for (auto& th : threads) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    double loss_sum = 0;
    for (double l : worker_loss) loss_sum += l;
    model.epoch_losses.push_back(loss_sum / static_cast<double>(entries.size()));
  }
  return model;
}

double glove_loss(const GloveModel& model, const CoocStore& store, double x_max, double alpha) {
  double total = 0;
  for (const auto& [k, x] : store.entries) {
    int32_t a = static_cast<int32_t>(k >> 32);
    int32_t b = static_cast<int32_t>(k & 0xffffffffu);
    const double* wa = model.w.data() + static_cast<size_t>(a) * model.dim;
    const double* cb = model.c.data() + static_cast<size_t>(b) * model.dim;
    total += glove_entry_loss_and_grad(std::span<const double>(wa, model.dim),
                                       std::span<const double>(cb, model.dim), model.bw[a],
                                       model.bc[b], x, x_max, alpha);
  }
  return total;
}

EmbeddingSet to_embedding_set(const GloveModel& model, const Vocabulary& vocab) {
  std::vector<float> matrix(vocab.size() * static_cast<size_t>(model.dim));
  for (size_t i = 0; i < vocab.size(); ++i) {
    for (int d = 0; d < model.dim; ++d) {
      matrix[i * model.dim + d] =
          static_cast<float>(model.w[i * model.dim + d] + model.c[i * model.dim + d]);
    }
  }
  return EmbeddingSet(vocab.id_to_token, std::move(matrix), model.dim);
}

}  // namespace embkit
