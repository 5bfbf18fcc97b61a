#include "embkit/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "embkit/error.hpp"

namespace embkit {

Vocabulary build_vocab(SentenceStream& stream, int min_count) {
  if (min_count < 1) throw ConfigError("vocab: min_count must be >= 1");
  std::unordered_map<std::string, uint64_t> counts;
  while (auto sentence = stream.next()) {
    for (auto& tok : *sentence) ++counts[tok];
  }
  std::vector<std::pair<std::string, uint64_t>> kept;
  kept.reserve(counts.size());
  for (auto& [tok, n] : counts) {
    if (n >= static_cast<uint64_t>(min_count)) kept.emplace_back(tok, n);
  }
  if (kept.empty()) throw ConfigError("vocab: empty vocabulary after min_count filter");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  vocab.min_count = min_count;
  vocab.id_to_token.reserve(kept.size());
  vocab.freq.reserve(kept.size());
  for (size_t i = 0; i < kept.size(); ++i) {
    vocab.id_to_token.push_back(kept[i].first);
    vocab.freq.push_back(kept[i].second);
    vocab.token_to_id.emplace(kept[i].first, static_cast<int32_t>(i));
    vocab.total_tokens += kept[i].second;
  }
  return vocab;
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("vocab: cannot write " + path);
  out << "#vocab v1\n";
  for (size_t i = 0; i < vocab.size(); ++i) {
    out << vocab.id_to_token[i] << '\t' << vocab.freq[i] << '\n';
  }
}

Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("vocab: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#vocab v1", 0) != 0) {
    throw DataError(path + ":1: expected '#vocab v1' header");
  }
  Vocabulary vocab;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected token<TAB>freq");
    }
    std::string tok = line.substr(0, tab);
    uint64_t n = 0;
    try {
      n = std::stoull(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad frequency");
    }
    if (vocab.token_to_id.count(tok)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate token " + tok);
    }
    vocab.token_to_id.emplace(tok, static_cast<int32_t>(vocab.id_to_token.size()));
    vocab.id_to_token.push_back(tok);
    vocab.freq.push_back(n);
    vocab.total_tokens += n;
  }
  if (vocab.id_to_token.empty()) throw DataError(path + ": empty vocabulary");
  return vocab;
}

double keep_probability(const Vocabulary& vocab, int32_t id, double threshold) {
  if (threshold <= 0) return 1.0;
  double z = static_cast<double>(vocab.freq[id]) / static_cast<double>(vocab.total_tokens);
  if (z <= threshold) return 1.0;
  double p = (std::sqrt(z / threshold) + 1.0) * threshold / z;
  return p > 1.0 ? 1.0 : p;
}

NegativeSamplingTable::NegativeSamplingTable(const Vocabulary& vocab, double power) {
  size_t v = vocab.size();
  if (v == 0) throw ConfigError("sampling table: empty vocabulary");
  prob_.resize(v);
  double z = 0;
  for (size_t i = 0; i < v; ++i) {
    prob_[i] = std::pow(static_cast<double>(vocab.freq[i]), power);
    z += prob_[i];
  }
  for (auto& p : prob_) p /= z;

  // Vose alias construction with deterministic worklists.
  accept_.assign(v, 1.0);
  alias_.assign(v, 0);
  std::vector<double> scaled(v);
  for (size_t i = 0; i < v; ++i) scaled[i] = prob_[i] * static_cast<double>(v);
  std::vector<int32_t> small, large;
  for (size_t i = 0; i < v; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<int32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    int32_t s = small.back();
    small.pop_back();
    int32_t l = large.back();
    large.pop_back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = scaled[l] + scaled[s] - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (int32_t i : large) accept_[i] = 1.0;
  for (int32_t i : small) accept_[i] = 1.0;
}

int32_t NegativeSamplingTable::sample(Rng& rng) const {
  auto i = static_cast<int32_t>(rng.below(prob_.size()));
  return rng.unit() < accept_[i] ? i : alias_[i];
}

int32_t NegativeSamplingTable::sample_excluding(Rng& rng, int32_t exclude) const {
  if (prob_.size() < 2) throw ConfigError("sampling table: need vocabulary size >= 2");
  while (true) {
    int32_t id = sample(rng);
    if (id != exclude) return id;
  }
}

}  // namespace embkit
