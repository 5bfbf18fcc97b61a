#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embkit/corpus.hpp"
#include "embkit/rng.hpp"

namespace embkit {

// Token<->id map. Ids are dense 0..V-1, assigned in descending frequency
// with lexicographic tie-break, so rebuilds from the same stream are stable.
struct Vocabulary {
  std::vector<std::string> id_to_token;
  std::vector<uint64_t> freq;
  std::unordered_map<std::string, int32_t> token_to_id;
  int32_t min_count = 1;
  uint64_t total_tokens = 0;  // sum of freq after filtering

  size_t size() const { return id_to_token.size(); }
  int32_t id_of(std::string_view token) const {
    auto it = token_to_id.find(std::string(token));
    return it == token_to_id.end() ? -1 : it->second;
  }
};

Vocabulary build_vocab(SentenceStream& stream, int min_count);

void save_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

// Keep-probability for frequent-word subsampling; 1.0 when threshold <= 0.
double keep_probability(const Vocabulary& vocab, int32_t id, double threshold);

// Discrete distribution over ids proportional to freq^power (alias method).
class NegativeSamplingTable {
 public:
  explicit NegativeSamplingTable(const Vocabulary& vocab, double power = 0.75);

  int32_t sample(Rng& rng) const;
  // Rejection-samples until the draw differs from `exclude`.
  int32_t sample_excluding(Rng& rng, int32_t exclude) const;

  const std::vector<double>& probabilities() const { return prob_; }

 private:
  std::vector<double> prob_;        // exact distribution
  std::vector<double> accept_;      // alias acceptance thresholds
  std::vector<int32_t> alias_;
};

}  // namespace embkit
