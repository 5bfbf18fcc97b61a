#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embkit/corpus.hpp"

namespace embkit {

// Character substituted for space before segmentation, so word boundaries
// become ordinary text. Stored bit-exactly in the model file.
inline constexpr char32_t kMetaSymbol = U'▁';

struct SubwordPiece {
  std::string piece;  // UTF-8, may contain the meta symbol
  double log_prob;
};

// Unigram-LM piece inventory. Pieces are kept in descending log_prob order
// (ties by piece string); ids are indices into `pieces`.
class SubwordModel {
 public:
  std::vector<SubwordPiece> pieces;
  char32_t meta_symbol = kMetaSymbol;
  int vocab_size = 0;

  // Must be called after `pieces` changes; encode() depends on the index.
  void rebuild_index();

  int32_t piece_id(const std::u32string& piece) const {
    auto it = index_.find(piece);
    return it == index_.end() ? -1 : it->second;
  }
  size_t max_piece_len() const { return max_piece_len_; }
  double min_log_prob() const { return min_log_prob_; }

 private:
  std::unordered_map<std::u32string, int32_t> index_;
  size_t max_piece_len_ = 0;
  double min_log_prob_ = 0;
};

// Pieces of one maximum-likelihood segmentation. Unseen characters are
// represented with id -1; `pieces` always carries the surface strings, so
// concatenating them (and restoring the meta symbol) reproduces the input.
struct Segmentation {
  std::vector<int32_t> ids;
  std::vector<std::string> pieces;
  double score = 0;
};

// Unigram-LM training: seed candidates from frequent substrings, run EM over
// piece probabilities, prune lowest-utility pieces until vocab_size remain.
// Single characters seen in training are never pruned. seed_size 0 means
// 10 * vocab_size.
SubwordModel train_tokenizer(SentenceStream& stream, int vocab_size, int seed_size = 0);

// Viterbi segmentation over piece scores; spaces are replaced by the meta
// symbol first. Ties: fewer pieces, then lexicographically smallest id
// sequence. Unseen characters become single-character pieces with
// log_prob = min_log_prob - 10.
Segmentation encode(const SubwordModel& model, std::string_view text);

// Inverse of encode: concatenates pieces and restores spaces.
std::string decode(const SubwordModel& model, const Segmentation& seg);

void save_subword_model(const SubwordModel& model, const std::string& path);
SubwordModel load_subword_model(const std::string& path);

// Adapts a raw-token stream into its subword-encoded form: tokens of each
// sentence are joined with single spaces, encoded, and the piece surfaces
// become the new tokens.
class EncodedSentenceStream final : public SentenceStream {
 public:
  EncodedSentenceStream(SentenceStream& base, const SubwordModel& model)
      : base_(base), model_(model) {}
  std::optional<Sentence> next() override;
  void reset() override { base_.reset(); }

 private:
  SentenceStream& base_;
  const SubwordModel& model_;
};

}  // namespace embkit
