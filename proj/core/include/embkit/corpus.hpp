#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace embkit {

struct CorpusSpec {
  std::vector<std::string> sources;  // plain-text UTF-8 files, read in order
  bool lowercase = false;            // ASCII lowercasing only
  int max_sentence_len = 1000;       // sentences longer than this are truncated
};

using Sentence = std::vector<std::string>;

// One sentence per input line, tokens split on runs of whitespace.
// Blank lines are dropped; order is deterministic across runs.
class SentenceStream {
 public:
  virtual ~SentenceStream() = default;
  virtual std::optional<Sentence> next() = 0;
  virtual void reset() = 0;
};

class VectorSentenceStream final : public SentenceStream {
 public:
  explicit VectorSentenceStream(std::vector<Sentence> sentences)
      : sentences_(std::move(sentences)) {}
  std::optional<Sentence> next() override {
    if (pos_ >= sentences_.size()) return std::nullopt;
    return sentences_[pos_++];
  }
  void reset() override { pos_ = 0; }

 private:
  std::vector<Sentence> sentences_;
  size_t pos_ = 0;
};

// Validates every source at open time (missing file -> ConfigError).
// Undecodable bytes raise DataError naming the file and byte offset.
std::unique_ptr<SentenceStream> load_corpus(const CorpusSpec& spec);

struct CorpusStats {
  uint64_t sentences = 0;
  uint64_t tokens = 0;
  uint64_t distinct_tokens = 0;
};

CorpusStats corpus_stats(SentenceStream& stream);

std::vector<Sentence> collect(SentenceStream& stream);

}  // namespace embkit
