#include "embkit/subword.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "embkit/error.hpp"
#include "embkit/text.hpp"

namespace embkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxSeedPieceLen = 8;
constexpr int kMinSeedFreq = 2;
constexpr int kEmItersPerRound = 2;
constexpr double kPruneFraction = 0.2;
constexpr double kUnseenPenalty = 10.0;

struct U32SvHash {
  using is_transparent = void;
  size_t operator()(std::u32string_view s) const noexcept {
    size_t h = 1469598103934665603ull;
    for (char32_t c : s) {
      h ^= static_cast<size_t>(c);
      h *= 1099511628211ull;
    }
    return h;
  }
};
struct U32SvEq {
  using is_transparent = void;
  bool operator()(std::u32string_view a, std::u32string_view b) const noexcept {
    return a == b;
  }
};
using U32Index = std::unordered_map<std::u32string, int32_t, U32SvHash, U32SvEq>;

double logadd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct Candidate {
  std::u32string text;
  double log_prob = 0;
  double count = 0;  // expected count from the last E-step
  bool required = false;
};

struct Trainer {
  std::vector<Candidate> cands;
  U32Index index;
  size_t max_len = 1;

  void rebuild() {
    index.clear();
    index.reserve(cands.size() * 2);
    max_len = 1;
    for (size_t i = 0; i < cands.size(); ++i) {
      index.emplace(cands[i].text, static_cast<int32_t>(i));
      max_len = std::max(max_len, cands[i].text.size());
    }
  }

  // Forward-backward expected counts for one sentence.
  double accumulate(const std::u32string& s, std::vector<double>& counts) const {
    size_t n = s.size();
    std::vector<double> alpha(n + 1, kNegInf), beta(n + 1, kNegInf);
    alpha[0] = 0;
    for (size_t j = 1; j <= n; ++j) {
      size_t lmax = std::min(max_len, j);
      for (size_t len = 1; len <= lmax; ++len) {
        if (alpha[j - len] == kNegInf) continue;
        auto it = index.find(std::u32string_view(s).substr(j - len, len));
        if (it == index.end()) continue;
        alpha[j] = logadd(alpha[j], alpha[j - len] + cands[it->second].log_prob);
      }
    }
    double z = alpha[n];
    beta[n] = 0;
    for (size_t i = n; i-- > 0;) {
      size_t lmax = std::min(max_len, n - i);
      for (size_t len = 1; len <= lmax; ++len) {
        if (beta[i + len] == kNegInf) continue;
        auto it = index.find(std::u32string_view(s).substr(i, len));
        if (it == index.end()) continue;
        beta[i] = logadd(beta[i], cands[it->second].log_prob + beta[i + len]);
      }
    }
    for (size_t i = 0; i < n; ++i) {
      if (alpha[i] == kNegInf) continue;
      size_t lmax = std::min(max_len, n - i);
      for (size_t len = 1; len <= lmax; ++len) {
        if (beta[i + len] == kNegInf) continue;
        auto it = index.find(std::u32string_view(s).substr(i, len));
        if (it == index.end()) continue;
        counts[it->second] +=
            std::exp(alpha[i] + cands[it->second].log_prob + beta[i + len] - z);
      }
    }
    return z;
  }

  // Best segmentation score of `s` with one candidate removed.
  double viterbi_excluding(const std::u32string& s, int32_t exclude) const {
    size_t n = s.size();
    std::vector<double> best(n + 1, kNegInf);
    best[0] = 0;
    for (size_t j = 1; j <= n; ++j) {
      size_t lmax = std::min(max_len, j);
      for (size_t len = 1; len <= lmax; ++len) {
        if (best[j - len] == kNegInf) continue;
        auto it = index.find(std::u32string_view(s).substr(j - len, len));
        if (it == index.end() || it->second == exclude) continue;
        best[j] = std::max(best[j], best[j - len] + cands[it->second].log_prob);
      }
    }
    return best[n];
  }

  void em_iteration(const std::vector<std::u32string>& texts) {
    std::vector<double> counts(cands.size(), 0.0);
    for (const auto& s : texts) accumulate(s, counts);
    double total = 0;
    for (double c : counts) total += c;
    for (size_t i = 0; i < cands.size(); ++i) {
      double c = std::max(counts[i], 1e-300);
      cands[i].count = counts[i];
      cands[i].log_prob = std::log(c) - std::log(total);
    }
  }

  void prune(int target) {
    int prunable = 0;
    for (const auto& c : cands) {
      if (!c.required) ++prunable;
    }
    int excess = static_cast<int>(cands.size()) - target;
    int k = std::min(excess, std::max(1, static_cast<int>(std::ceil(prunable * kPruneFraction))));
    // Likelihood loss if removed: occurrences re-segment at the best
    // alternative score.
    std::vector<std::pair<double, int32_t>> losses;
    for (size_t i = 0; i < cands.size(); ++i) {
      if (cands[i].required) continue;
      double alt = viterbi_excluding(cands[i].text, static_cast<int32_t>(i));
      double loss = cands[i].count * (cands[i].log_prob - alt);
      losses.emplace_back(loss, static_cast<int32_t>(i));
    }
    std::sort(losses.begin(), losses.end(), [this](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return cands[a.second].text < cands[b.second].text;
    });
    std::vector<bool> drop(cands.size(), false);
    for (int i = 0; i < k; ++i) drop[losses[i].second] = true;
    std::vector<Candidate> kept;
    kept.reserve(cands.size() - k);
    for (size_t i = 0; i < cands.size(); ++i) {
      if (!drop[i]) kept.push_back(std::move(cands[i]));
    }
    cands = std::move(kept);
    // Renormalize.
    double lse = kNegInf;
    for (const auto& c : cands) lse = logadd(lse, c.log_prob);
    for (auto& c : cands) c.log_prob -= lse;
    rebuild();
  }
};

std::u32string sentence_text(const Sentence& tokens, char32_t meta) {
  std::string joined;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) joined.push_back(' ');
    joined += tokens[i];
  }
  std::u32string text = utf8_decode(joined);
  for (auto& c : text) {
    if (c == U' ') c = meta;
  }
  return text;
}

std::vector<int32_t> chain_ids(const std::vector<int>& prev,
                               const std::vector<int32_t>& arc_id, int pos) {
  std::vector<int32_t> ids;
  while (pos > 0) {
    ids.push_back(arc_id[pos]);
    pos = prev[pos];
  }
  std::reverse(ids.begin(), ids.end());
  return ids;
}

}  // namespace

void SubwordModel::rebuild_index() {
  index_.clear();
  index_.reserve(pieces.size() * 2);
  max_piece_len_ = 1;
  min_log_prob_ = 0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    std::u32string p = utf8_decode(pieces[i].piece);
    max_piece_len_ = std::max(max_piece_len_, p.size());
    min_log_prob_ = std::min(min_log_prob_, pieces[i].log_prob);
    if (!index_.emplace(std::move(p), static_cast<int32_t>(i)).second) {
      throw DataError("subword model: duplicate piece " + pieces[i].piece);
    }
  }
}

SubwordModel train_tokenizer(SentenceStream& stream, int vocab_size, int seed_size) {
  if (vocab_size < 1) throw ConfigError("tokenizer: vocab_size must be >= 1");
  if (seed_size <= 0) seed_size = 10 * vocab_size;

  std::vector<std::u32string> texts;
  while (auto sentence = stream.next()) {
    texts.push_back(sentence_text(*sentence, kMetaSymbol));
  }
  if (texts.empty()) throw ConfigError("tokenizer: empty corpus");

  // Character and substring statistics.
  std::unordered_map<char32_t, uint64_t> char_freq;
  std::unordered_map<std::u32string, uint64_t, U32SvHash, U32SvEq> sub_freq;
  for (const auto& s : texts) {
    for (char32_t c : s) ++char_freq[c];
    size_t n = s.size();
    for (size_t len = 2; len <= std::min<size_t>(kMaxSeedPieceLen, n); ++len) {
      for (size_t i = 0; i + len <= n; ++i) {
        ++sub_freq[std::u32string(s, i, len)];
      }
    }
  }
  if (vocab_size < static_cast<int>(char_freq.size())) {
    throw ConfigError("tokenizer: vocab_size " + std::to_string(vocab_size) +
                      " smaller than alphabet size " + std::to_string(char_freq.size()));
  }

  Trainer tr;
  std::vector<std::pair<char32_t, uint64_t>> chars(char_freq.begin(), char_freq.end());
  std::sort(chars.begin(), chars.end());
  for (auto& [c, f] : chars) {
    tr.cands.push_back({std::u32string(1, c), std::log(static_cast<double>(f)), 0, true});
  }
  // Multi-character seeds ranked by freq * length, lexicographic tie-break.
  std::vector<std::pair<std::u32string, uint64_t>> seeds;
  for (auto& [sub, f] : sub_freq) {
    if (f >= kMinSeedFreq) seeds.emplace_back(sub, f);
  }
  std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) {
    uint64_t sa = a.second * a.first.size(), sb = b.second * b.first.size();
    if (sa != sb) return sa > sb;
    return a.first < b.first;
  });
  size_t cap = seed_size > static_cast<int>(chars.size())
                   ? static_cast<size_t>(seed_size - chars.size())
                   : 0;
  if (seeds.size() > cap) seeds.resize(cap);
  for (auto& [sub, f] : seeds) {
    tr.cands.push_back({sub, std::log(static_cast<double>(f)), 0, false});
  }
  if (static_cast<int>(tr.cands.size()) < vocab_size) {
    throw ConfigError("tokenizer: corpus yields only " + std::to_string(tr.cands.size()) +
                      " candidate pieces; lower vocab_size");
  }
  // Normalize the initial scores into a distribution.
  double lse = kNegInf;
  for (const auto& c : tr.cands) lse = logadd(lse, c.log_prob);
  for (auto& c : tr.cands) c.log_prob -= lse;
  tr.rebuild();

  while (true) {
    for (int it = 0; it < kEmItersPerRound; ++it) tr.em_iteration(texts);
    if (static_cast<int>(tr.cands.size()) <= vocab_size) break;
    tr.prune(vocab_size);
  }

  SubwordModel model;
  model.vocab_size = vocab_size;
  std::vector<std::pair<std::string, double>> out;
  out.reserve(tr.cands.size());
  for (auto& c : tr.cands) out.emplace_back(utf8_encode(c.text), c.log_prob);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (auto& [p, lp] : out) model.pieces.push_back({p, lp});
  model.rebuild_index();
  return model;
}

Segmentation encode(const SubwordModel& model, std::string_view text) {
  std::u32string s = utf8_decode(text);
  for (auto& c : s) {
    if (c == U' ') c = model.meta_symbol;
  }
  size_t n = s.size();
  Segmentation seg;
  if (n == 0) return seg;

  double unseen_lp = model.min_log_prob() - kUnseenPenalty;
  std::vector<double> score(n + 1, kNegInf);
  std::vector<int32_t> count(n + 1, 0);
  std::vector<int> prev(n + 1, -1);
  std::vector<int32_t> arc_id(n + 1, -2);
  score[0] = 0;

  for (size_t j = 1; j <= n; ++j) {
    size_t lmax = std::min(model.max_piece_len(), j);
    for (size_t len = 1; len <= lmax; ++len) {
      size_t i = j - len;
      if (score[i] == kNegInf) continue;
      std::u32string piece(s, i, len);
      int32_t id = model.piece_id(piece);
      double lp;
      if (id >= 0) {
        lp = model.pieces[id].log_prob;
      } else if (len == 1) {
        lp = unseen_lp;
        id = -1;
      } else {
        continue;
      }
      double cand_score = score[i] + lp;
      int32_t cand_count = count[i] + 1;
      bool take = false;
      if (cand_score > score[j]) {
        take = true;
      } else if (cand_score == score[j]) {
        if (cand_count < count[j]) {
          take = true;
        } else if (cand_count == count[j]) {
          auto cur = chain_ids(prev, arc_id, static_cast<int>(j));
          auto cand = chain_ids(prev, arc_id, static_cast<int>(i));
          cand.push_back(id);
          take = cand < cur;
        }
      }
      if (take) {
        score[j] = cand_score;
        count[j] = cand_count;
        prev[j] = static_cast<int>(i);
        arc_id[j] = id;
      }
    }
  }

  // Walk back collecting (id, surface) pairs.
  std::vector<std::pair<int32_t, std::string>> out;
  int pos = static_cast<int>(n);
  while (pos > 0) {
    int start = prev[pos];
    out.emplace_back(arc_id[pos], utf8_encode(std::u32string_view(s).substr(start, pos - start)));
    pos = start;
  }
  std::reverse(out.begin(), out.end());
  for (auto& [id, surface] : out) {
    seg.ids.push_back(id);
    seg.pieces.push_back(std::move(surface));
  }
  seg.score = score[n];
  return seg;
}

std::string decode(const SubwordModel& model, const Segmentation& seg) {
  std::u32string text;
  for (size_t i = 0; i < seg.ids.size(); ++i) {
    int32_t id = seg.ids[i];
    if (id >= 0) {
      if (id >= static_cast<int32_t>(model.pieces.size())) {
        throw DataError("decode: invalid piece id " + std::to_string(id));
      }
      text += utf8_decode(model.pieces[id].piece);
    } else if (id == -1) {
      if (i >= seg.pieces.size()) {
        throw DataError("decode: unseen piece id without surface string");
      }
      text += utf8_decode(seg.pieces[i]);
    } else {
      throw DataError("decode: invalid piece id " + std::to_string(id));
    }
  }
  for (auto& c : text) {
    if (c == model.meta_symbol) c = U' ';
  }
  return utf8_encode(text);
}

void save_subword_model(const SubwordModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("subword model: cannot write " + path);
  out << "#subword v1 vocab=" << model.vocab_size << " meta=" << utf8_encode(model.meta_symbol)
      << "\n";
  char buf[64];
  for (const auto& p : model.pieces) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.log_prob);
    out << p.piece << '\t' << buf << '\n';
  }
}

SubwordModel load_subword_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("subword model: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#subword v1 ", 0) != 0) {
    throw DataError(path + ":1: expected '#subword v1' header");
  }
  SubwordModel model;
  size_t vpos = line.find("vocab=");
  size_t mpos = line.find("meta=");
  if (vpos == std::string::npos || mpos == std::string::npos) {
    throw DataError(path + ":1: header missing vocab= or meta=");
  }
  model.vocab_size = std::stoi(line.substr(vpos + 6));
  std::u32string meta = utf8_decode(line.substr(mpos + 5));
  if (meta.size() != 1) throw DataError(path + ":1: meta symbol must be one character");
  model.meta_symbol = meta[0];
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected piece<TAB>log_prob");
    }
    SubwordPiece piece;
    piece.piece = line.substr(0, tab);
    try {
      piece.log_prob = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad log_prob");
    }
    if (!std::isfinite(piece.log_prob)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": non-finite log_prob");
    }
    model.pieces.push_back(std::move(piece));
  }
  if (model.pieces.empty()) throw DataError(path + ": no pieces");
  model.rebuild_index();
  return model;
}

std::optional<Sentence> EncodedSentenceStream::next() {
  auto sentence = base_.next();
  if (!sentence) return std::nullopt;
  std::string joined;
  for (size_t i = 0; i < sentence->size(); ++i) {
    if (i) joined.push_back(' ');
    joined += (*sentence)[i];
  }
  Segmentation seg = encode(model_, joined);
  return Sentence(seg.pieces.begin(), seg.pieces.end());
}

}  // namespace embkit
