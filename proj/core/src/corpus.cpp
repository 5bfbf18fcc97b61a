#include "embkit/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include "embkit/error.hpp"
#include "embkit/text.hpp"

namespace embkit {

namespace {

class FileSentenceStream final : public SentenceStream {
 public:
  explicit FileSentenceStream(CorpusSpec spec) : spec_(std::move(spec)) {
    if (spec_.sources.empty()) throw ConfigError("corpus: no source files given");
    for (const auto& path : spec_.sources) {
      std::ifstream probe(path);
      if (!probe) throw ConfigError("corpus: cannot open " + path);
    }
    reset();
  }

  std::optional<Sentence> next() override {
    std::string line;
    while (true) {
      if (!file_.is_open() || !std::getline(file_, line)) {
        if (!open_next_file()) return std::nullopt;
        continue;
      }
      size_t line_start = offset_;
      offset_ += line.size() + 1;
      // Validate encoding; tokenization itself is byte-oriented.
      utf8_decode(line, spec_.sources[file_idx_], line_start);
      if (spec_.lowercase) ascii_lowercase_inplace(line);
      Sentence tokens = split_whitespace(line);
      if (tokens.empty()) continue;
      if (spec_.max_sentence_len > 0 &&
          tokens.size() > static_cast<size_t>(spec_.max_sentence_len)) {
        tokens.resize(spec_.max_sentence_len);
      }
      return tokens;
    }
  }

  void reset() override {
    file_.close();
    file_idx_ = static_cast<size_t>(-1);
    offset_ = 0;
  }

 private:
  bool open_next_file() {
    ++file_idx_;
    if (file_idx_ >= spec_.sources.size()) return false;
    file_.close();
    file_.open(spec_.sources[file_idx_], std::ios::binary);
    if (!file_) throw ConfigError("corpus: cannot open " + spec_.sources[file_idx_]);
    offset_ = 0;
    return true;
  }

  CorpusSpec spec_;
  std::ifstream file_;
  size_t file_idx_ = static_cast<size_t>(-1);
  size_t offset_ = 0;
};

}  // namespace

std::unique_ptr<SentenceStream> load_corpus(const CorpusSpec& spec) {
  return std::make_unique<FileSentenceStream>(spec);
}

CorpusStats corpus_stats(SentenceStream& stream) {
  CorpusStats stats;
  std::unordered_set<std::string> distinct;
  while (auto sentence = stream.next()) {
    ++stats.sentences;
    stats.tokens += sentence->size();
    for (auto& tok : *sentence) distinct.insert(tok);
  }
  stats.distinct_tokens = distinct.size();
  return stats;
}

std::vector<Sentence> collect(SentenceStream& stream) {
  std::vector<Sentence> out;
  while (auto s = stream.next()) out.push_back(std::move(*s));
  return out;
}

}  // namespace embkit
