#include <benchmark/benchmark.h>

#include "embkit/corpus.hpp"
#include "embkit/embstore.hpp"
#include "embkit/glove.hpp"
#include "embkit/rng.hpp"
#include "embkit/sgns.hpp"
#include "embkit/subword.hpp"
#include "embkit/vocab.hpp"

#ifndef EMBKIT_DATA_DIR
#define EMBKIT_DATA_DIR "data"
#endif

namespace {

using namespace embkit;

const std::string kCorpus = std::string(EMBKIT_DATA_DIR) + "/toy_corpus.txt";

std::vector<Sentence> toy_sentences() {
  auto stream = load_corpus({{kCorpus}});
  return collect(*stream);
}

void BM_tokenizer_encode(benchmark::State& state) {
  auto sentences = toy_sentences();
  VectorSentenceStream stream(sentences);
  SubwordModel model = train_tokenizer(stream, 150);
  std::vector<std::string> lines;
  for (const auto& s : sentences) {
    std::string line;
    for (size_t i = 0; i < s.size(); ++i) {
      if (i) line += ' ';
      line += s[i];
    }
    lines.push_back(line);
  }
  size_t i = 0;
  uint64_t chars = 0;
  for (auto _ : state) {
    Segmentation seg = encode(model, lines[i]);
    benchmark::DoNotOptimize(seg.score);
    chars += lines[i].size();
    i = (i + 1) % lines.size();
  }
  state.SetBytesProcessed(static_cast<int64_t>(chars));
}
BENCHMARK(BM_tokenizer_encode);

void BM_sgns_epoch(benchmark::State& state) {
  auto sentences = toy_sentences();
  VectorSentenceStream vstream(sentences);
  Vocabulary vocab = build_vocab(vstream, 1);
  SgnsConfig cfg;
  cfg.dim = static_cast<int>(state.range(0));
  cfg.epochs = 1;
  cfg.seed = 1;
  for (auto _ : state) {
    VectorSentenceStream stream(sentences);
    SgnsModel model = train_sgns(stream, vocab, cfg);
    benchmark::DoNotOptimize(model.input.data());
  }
}
BENCHMARK(BM_sgns_epoch)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_build_cooc(benchmark::State& state) {
  auto sentences = toy_sentences();
  VectorSentenceStream vstream(sentences);
  Vocabulary vocab = build_vocab(vstream, 1);
  for (auto _ : state) {
    VectorSentenceStream stream(sentences);
    CoocStore store = build_cooc(stream, vocab, 11, true);
    benchmark::DoNotOptimize(store.size());
  }
}
BENCHMARK(BM_build_cooc)->Unit(benchmark::kMillisecond);

void BM_nearest(benchmark::State& state) {
  const int v = 10000, dim = 100;
  Rng rng(5);
  std::vector<std::string> words;
  std::vector<float> matrix(static_cast<size_t>(v) * dim);
  for (int i = 0; i < v; ++i) words.push_back("w" + std::to_string(i));
  for (auto& x : matrix) x = static_cast<float>(rng.uniform(-1, 1));
  EmbeddingSet set(std::move(words), std::move(matrix), dim);
  int q = 0;
  for (auto _ : state) {
    auto result = nearest(set, set.row(q), 10, {});
    benchmark::DoNotOptimize(result.data());
    q = (q + 1) % v;
  }
}
BENCHMARK(BM_nearest)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
