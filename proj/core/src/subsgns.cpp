#include "embkit/subsgns.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "embkit/error.hpp"
#include "embkit/rng.hpp"
#include "embkit/sgns.hpp"
#include "embkit/text.hpp"

namespace embkit {

std::vector<std::string> extract_ngrams(std::string_view word, int nmin, int nmax) {
  if (word.empty()) throw ConfigError("extract_ngrams: empty word");
  if (nmin < 1 || nmin > nmax) throw ConfigError("extract_ngrams: bad n-gram range");
  std::u32string wrapped = U"<" + utf8_decode(word) + U">";
  std::vector<std::string> out;
  size_t len = wrapped.size();
  for (int n = nmin; n <= nmax; ++n) {
    if (static_cast<size_t>(n) > len) break;
    for (size_t i = 0; i + n <= len; ++i) {
      if (static_cast<size_t>(n) == len) continue;  // skip the full wrapped word
      out.push_back(utf8_encode(std::u32string_view(wrapped).substr(i, n)));
    }
  }
  return out;
}

uint32_t ngram_bucket(std::string_view ngram, int64_t buckets) {
  uint32_t h = 2166136261u;
  for (char c : ngram) {
    h ^= static_cast<uint8_t>(c);
    h *= 16777619u;
  }
  return static_cast<uint32_t>(h % static_cast<uint64_t>(buckets));
}

namespace {

std::vector<uint32_t> bucket_ids(const SubsgnsModel& model, std::string_view word) {
  std::vector<uint32_t> ids;
  for (const auto& g : extract_ngrams(word, model.ngram_min, model.ngram_max)) {
    ids.push_back(ngram_bucket(g, model.buckets));
  }
  return ids;
}

}  // namespace

std::vector<float> compose_word_vector(const SubsgnsModel& model, std::string_view word) {
  std::vector<float> sum(model.dim, 0.0f);
  size_t n = 0;
  int32_t wid = model.vocab.id_of(word);
  if (wid >= 0) {
    const float* row = model.word_matrix.data() + static_cast<size_t>(wid) * model.dim;
    for (int d = 0; d < model.dim; ++d) sum[d] += row[d];
    ++n;
  }
  for (uint32_t b : bucket_ids(model, word)) {
    const float* row = model.ngram_matrix.data() + static_cast<size_t>(b) * model.dim;
    for (int d = 0; d < model.dim; ++d) sum[d] += row[d];
    ++n;
  }
  if (n == 0 || model.compose_sum) return sum;
  for (auto& x : sum) x /= static_cast<float>(n);
  return sum;
}

SubsgnsModel train_subsgns(SentenceStream& stream, const Vocabulary& vocab,
                           const SubsgnsConfig& cfg) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives < 1 || cfg.buckets < 1 ||
      cfg.ngram_min < 1 || cfg.ngram_min > cfg.ngram_max) {
    throw ConfigError("subsgns: invalid configuration");
  }
  if (vocab.size() < 2) throw ConfigError("subsgns: need vocabulary size >= 2");

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
  if (corpus.empty()) throw ConfigError("subsgns: empty training stream");

  SubsgnsModel model;
  model.dim = cfg.dim;
  model.ngram_min = cfg.ngram_min;
  model.ngram_max = cfg.ngram_max;
  model.buckets = cfg.buckets;
  model.compose_sum = cfg.compose_sum;
  model.vocab = vocab;

  size_t v = vocab.size();
  model.word_matrix.resize(v * cfg.dim);
  model.ngram_matrix.resize(static_cast<size_t>(cfg.buckets) * cfg.dim);
  std::vector<float> output(v * cfg.dim, 0.0f);
  Rng init_rng(cfg.seed);
  float bound = 0.5f / cfg.dim;
  for (auto& x : model.word_matrix) x = static_cast<float>(init_rng.uniform(-bound, bound));
  for (auto& x : model.ngram_matrix) x = static_cast<float>(init_rng.uniform(-bound, bound));

  // Per-word n-gram buckets, computed once.
  std::vector<std::vector<uint32_t>> word_buckets(v);
  for (size_t i = 0; i < v; ++i) {
    word_buckets[i] = bucket_ids(model, vocab.id_to_token[i]);
  }

  NegativeSamplingTable table(vocab);
  std::vector<double> keep_prob(v, 1.0);
  if (cfg.subsample > 0) {
    for (size_t i = 0; i < v; ++i) {
      keep_prob[i] = keep_probability(vocab, static_cast<int32_t>(i), cfg.subsample);
    }
  }

  uint64_t total_scheduled = static_cast<uint64_t>(cfg.epochs) * total_tokens;
  std::atomic<uint64_t> processed{0};
  int workers = std::max(1, cfg.workers);

  auto sig = [&](float x) {
    return cfg.exact_sigmoid ? static_cast<float>(1.0 / (1.0 + std::exp(-static_cast<double>(x))))
                             : lookup_sigmoid(x);
  };
  auto softplus = [](double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> worker_loss(workers, 0.0);
    std::vector<uint64_t> worker_pairs(workers, 0);
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto run_worker = [&](int w) {
      try {
        Rng rng(Rng::derive(cfg.seed, static_cast<uint64_t>(w) + 1,
                            static_cast<uint64_t>(epoch) + 1));
        std::vector<float> hidden(cfg.dim), neu(cfg.dim);
        std::vector<int32_t> sent;
        for (size_t si = w; si < corpus.size(); si += workers) {
          const auto& raw = corpus[si];
          sent.clear();
          for (int32_t id : raw) {
            if (cfg.subsample > 0 && keep_prob[id] < 1.0 && rng.unit() >= keep_prob[id]) {
              continue;
            }
            sent.push_back(id);
          }
          uint64_t done = processed.fetch_add(raw.size());
          double frac = 1.0 - static_cast<double>(done) / static_cast<double>(total_scheduled);
          float lr = cfg.initial_lr * static_cast<float>(std::max(frac, 1e-4));

          for (size_t t = 0; t < sent.size(); ++t) {
            int32_t target = sent[t];
            const auto& buckets = word_buckets[target];
            size_t n_rows = 1 + buckets.size();
            float scale = cfg.compose_sum ? 1.0f : 1.0f / static_cast<float>(n_rows);

            int b = 1 + static_cast<int>(rng.below(cfg.window));
            for (int off = -b; off <= b; ++off) {
              if (off == 0) continue;
              long j = static_cast<long>(t) + off;
              if (j < 0 || j >= static_cast<long>(sent.size())) continue;
              int32_t context = sent[j];

              // Composed input vector of the target word.
              const float* wrow =
                  model.word_matrix.data() + static_cast<size_t>(target) * cfg.dim;
              for (int d = 0; d < cfg.dim; ++d) hidden[d] = wrow[d];
              for (uint32_t bk : buckets) {
                const float* grow =
                    model.ngram_matrix.data() + static_cast<size_t>(bk) * cfg.dim;
                for (int d = 0; d < cfg.dim; ++d) hidden[d] += grow[d];
              }
              for (int d = 0; d < cfg.dim; ++d) hidden[d] *= scale;

              std::fill(neu.begin(), neu.end(), 0.0f);
              double loss = 0;
              for (int k = 0; k <= cfg.negatives; ++k) {
                int32_t out_id = k == 0 ? context : table.sample_excluding(rng, context);
                float label = k == 0 ? 1.0f : 0.0f;
                float* out = output.data() + static_cast<size_t>(out_id) * cfg.dim;
                float dot = 0;
                for (int d = 0; d < cfg.dim; ++d) dot += hidden[d] * out[d];
                if (!std::isfinite(dot)) {
                  throw NumericError("subsgns: NaN at epoch " + std::to_string(epoch) +
                                     ", sentence " + std::to_string(si) + ", position " +
                                     std::to_string(t));
                }
                loss += label > 0 ? softplus(-dot) : softplus(dot);
                float g = (label - sig(dot)) * lr;
                for (int d = 0; d < cfg.dim; ++d) neu[d] += g * out[d];
                for (int d = 0; d < cfg.dim; ++d) out[d] += g * hidden[d];
              }
              // Split the input gradient equally over the contributing rows.
              for (int d = 0; d < cfg.dim; ++d) neu[d] *= scale;
              float* wrow_mut =
                  model.word_matrix.data() + static_cast<size_t>(target) * cfg.dim;
              for (int d = 0; d < cfg.dim; ++d) wrow_mut[d] += neu[d];
              for (uint32_t bk : buckets) {
                float* grow = model.ngram_matrix.data() + static_cast<size_t>(bk) * cfg.dim;
                for (int d = 0; d < cfg.dim; ++d) grow[d] += neu[d];
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
  }
  return model;
}

void save_subsgns_model(const SubsgnsModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("subsgns model: cannot write " + path);
  out << "#subsgns v1 dim=" << model.dim << " nmin=" << model.ngram_min
      << " nmax=" << model.ngram_max << " buckets=" << model.buckets
      << " hash=fnv1a32 compose=" << (model.compose_sum ? "sum" : "mean") << "\n";
  out << model.vocab.size() << ' ' << model.dim << '\n';
  char buf[64];
  for (size_t i = 0; i < model.vocab.size(); ++i) {
    out << model.vocab.id_to_token[i] << ' ' << model.vocab.freq[i];
    const float* row = model.word_matrix.data() + i * model.dim;
    for (int d = 0; d < model.dim; ++d) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(row[d]));
      out << ' ' << buf;
    }
    out << '\n';
  }
  out << "#ngrams\n";
  out.write(reinterpret_cast<const char*>(model.ngram_matrix.data()),
            static_cast<std::streamsize>(model.ngram_matrix.size() * sizeof(float)));
}

SubsgnsModel load_subsgns_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("subsgns model: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#subsgns v1 ", 0) != 0) {
    throw DataError(path + ":1: expected '#subsgns v1' header");
  }
  SubsgnsModel model;
  auto field = [&](const std::string& name) {
    size_t pos = line.find(name + "=");
    if (pos == std::string::npos) throw DataError(path + ":1: header missing " + name + "=");
    return line.substr(pos + name.size() + 1);
  };
  model.dim = std::stoi(field("dim"));
  model.ngram_min = std::stoi(field("nmin"));
  model.ngram_max = std::stoi(field("nmax"));
  model.buckets = std::stoll(field("buckets"));
  model.compose_sum = field("compose").rfind("sum", 0) == 0;
  if (field("hash").rfind("fnv1a32", 0) != 0) {
    throw DataError(path + ":1: unsupported hash id");
  }

  if (!std::getline(in, line)) throw DataError(path + ":2: missing 'V dim' line");
  long long v = 0, d = 0;
  if (std::sscanf(line.c_str(), "%lld %lld", &v, &d) != 2 || v < 1 || d != model.dim) {
    throw DataError(path + ":2: bad 'V dim' line");
  }
  model.word_matrix.resize(static_cast<size_t>(v) * model.dim);
  size_t line_no = 2;
  for (long long i = 0; i < v; ++i) {
    if (!std::getline(in, line)) throw DataError(path + ": truncated word rows");
    ++line_no;
    std::istringstream row(line);
    std::string word;
    uint64_t freq = 0;
    if (!(row >> word >> freq)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 'word freq v...'");
    }
    model.vocab.token_to_id.emplace(word, static_cast<int32_t>(i));
    model.vocab.id_to_token.push_back(word);
    model.vocab.freq.push_back(freq);
    model.vocab.total_tokens += freq;
    for (int dd = 0; dd < model.dim; ++dd) {
      float x;
      if (!(row >> x)) {
        throw DataError(path + ":" + std::to_string(line_no) + ": short vector row");
      }
      model.word_matrix[static_cast<size_t>(i) * model.dim + dd] = x;
    }
  }
  if (!std::getline(in, line) || line != "#ngrams") {
    throw DataError(path + ": expected '#ngrams' marker");
  }
  model.ngram_matrix.resize(static_cast<size_t>(model.buckets) * model.dim);
  in.read(reinterpret_cast<char*>(model.ngram_matrix.data()),
          static_cast<std::streamsize>(model.ngram_matrix.size() * sizeof(float)));
  if (in.gcount() !=
      static_cast<std::streamsize>(model.ngram_matrix.size() * sizeof(float))) {
    throw DataError(path + ": truncated n-gram matrix");
  }
  return model;
}

EmbeddingSet to_embedding_set(const SubsgnsModel& model) {
  std::vector<float> matrix(model.vocab.size() * static_cast<size_t>(model.dim));
  for (size_t i = 0; i < model.vocab.size(); ++i) {
    auto composed = compose_word_vector(model, model.vocab.id_to_token[i]);
    std::copy(composed.begin(), composed.end(), matrix.begin() + i * model.dim);
  }
  EmbeddingSet set(model.vocab.id_to_token, std::move(matrix), model.dim);
  const SubsgnsModel* m = &model;
  set.set_oov_composer("ngram_compose",
                       [m](const std::string& word) { return compose_word_vector(*m, word); });
  return set;
}

}  // namespace embkit
