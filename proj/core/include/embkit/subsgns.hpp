#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "embkit/corpus.hpp"
#include "embkit/embstore.hpp"
#include "embkit/vocab.hpp"

namespace embkit {

struct SubsgnsConfig {
  int dim = 300;
  int window = 11;
  int epochs = 80;
  int min_count = 6;
  int negatives = 5;
  float initial_lr = 0.025f;
  int ngram_min = 3;
  int ngram_max = 11;
  int64_t buckets = 2000000;
  uint64_t seed = 1;
  int workers = 1;
  double subsample = 1e-4;
  bool compose_sum = false;  // sum instead of mean; cosine-equivalent downstream
  bool exact_sigmoid = false;
};

// All substrings of length nmin..nmax of the '<'word'>' wrapped form
// (code-point based), excluding the full wrapped word itself. Repeated
// substrings appear once per occurrence.
std::vector<std::string> extract_ngrams(std::string_view word, int nmin, int nmax);

// FNV-1a 32-bit over the UTF-8 bytes, mod buckets.
uint32_t ngram_bucket(std::string_view ngram, int64_t buckets);

struct SubsgnsModel {
  int dim = 0;
  int ngram_min = 3;
  int ngram_max = 11;
  int64_t buckets = 0;
  bool compose_sum = false;
  Vocabulary vocab;                 // word-level vocabulary
  std::vector<float> word_matrix;   // V x dim
  std::vector<float> ngram_matrix;  // buckets x dim
  std::vector<double> epoch_losses;
};

// In-vocab: mean (or sum) of the word row plus all hashed n-gram rows;
// OOV: the n-gram rows alone. Pure function of (model, word).
std::vector<float> compose_word_vector(const SubsgnsModel& model, std::string_view word);

// Skip-gram with negative sampling where the input representation of the
// target word is its composed vector; the gradient is split equally over
// all contributing rows.
SubsgnsModel train_subsgns(SentenceStream& stream, const Vocabulary& vocab,
                           const SubsgnsConfig& cfg);

void save_subsgns_model(const SubsgnsModel& model, const std::string& path);
SubsgnsModel load_subsgns_model(const std::string& path);

// Word-vocabulary set whose rows are the composed vectors; the OOV rule
// composes from n-grams on demand. The returned set borrows `model`.
EmbeddingSet to_embedding_set(const SubsgnsModel& model);

}  // namespace embkit
