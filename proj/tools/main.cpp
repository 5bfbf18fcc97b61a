// embkit command-line tool: corpus -> tokenizer -> trainers -> embedding
// store -> intrinsic evaluation, with line-oriented config files and a
// single --seed funneling all randomness.

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "embkit/corpus.hpp"
#include "embkit/embstore.hpp"
#include "embkit/error.hpp"
#include "embkit/evalsuite.hpp"
#include "embkit/glove.hpp"
#include "embkit/inventory.hpp"
#include "embkit/sgns.hpp"
#include "embkit/subsgns.hpp"
#include "embkit/subword.hpp"
#include "embkit/text.hpp"
#include "embkit/vocab.hpp"

namespace {

using namespace embkit;

// Exit codes, also documented in the README.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 64;     // unknown flag / bad arguments
constexpr int kExitData = 65;      // malformed input data
constexpr int kExitNoInput = 66;   // missing or unreadable file
constexpr int kExitConflict = 67;  // conflicting options
constexpr int kExitNumeric = 70;   // non-finite numbers during training

struct ConflictingOptions : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// config file: line-oriented `key = value`, overridden by flags

std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    auto key = split_whitespace(line.substr(0, eq));
    std::string value = line.substr(eq + 1);
    auto value_tokens = split_whitespace(value);
    if (key.size() != 1 || value_tokens.empty()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string joined;
    for (size_t i = 0; i < value_tokens.size(); ++i) {
      if (i) joined.push_back(' ');
      joined += value_tokens[i];
    }
    entries.emplace_back(key[0], joined);
  }
  return entries;
}

// Splices config-provided options into the argument list. A key present on
// the command line wins; config keys only fill the gaps.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string config_path;
  int seen = 0;
  for (size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file argument");
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      ++seen;
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
      ++seen;
    } else {
      ++i;
    }
  }
  if (seen > 1) throw ConflictingOptions("more than one --config given");
  if (seen == 0) return args;

  auto entries = load_config_file(config_path);
  size_t insert_at = 0;
  while (insert_at < args.size() && insert_at < 2 && !args[insert_at].empty() &&
         args[insert_at][0] != '-') {
    ++insert_at;
  }
  for (const auto& [key, value] : entries) {
    std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) {
        present = true;
        break;
      }
    }
    if (present) continue;
    std::vector<std::string> injected = {flag};
    for (auto& tok : split_whitespace(value)) injected.push_back(tok);
    args.insert(args.begin() + insert_at, injected.begin(), injected.end());
  }
  return args;
}

// ---------------------------------------------------------------------------
// shared option bundles

struct CorpusOpts {
  std::vector<std::string> sources;
  bool lowercase = false;
  int max_sentence_len = 1000;

  CorpusSpec spec() const { return {sources, lowercase, max_sentence_len}; }
  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--corpus", sources, "corpus files (UTF-8, one sentence per line)");
    if (required) opt->required();
    cmd->add_flag("--lowercase", lowercase, "ASCII-lowercase the corpus");
    cmd->add_option("--max-sentence-len", max_sentence_len, "truncate longer sentences")
        ->capture_default_str();
  }
};

std::string file_stem(const std::string& path) {
  size_t slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  size_t dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

// ---------------------------------------------------------------------------
// tokenizer subcommands

struct TokenizerTrainArgs {
  CorpusOpts corpus;
  int vocab_size = 32000;
  int seed_size = 0;
  std::string out;
};

int run_tokenizer_train(const TokenizerTrainArgs& a) {
  auto stream = load_corpus(a.corpus.spec());
  SubwordModel model = train_tokenizer(*stream, a.vocab_size, a.seed_size);
  save_subword_model(model, a.out);
  std::cerr << "trained " << model.pieces.size() << " pieces -> " << a.out << "\n";
  return kExitOk;
}

int run_tokenizer_encode(const std::string& model_path, const std::string& in_path,
                         const std::string& out_path) {
  SubwordModel model = load_subword_model(model_path);
  std::ifstream file_in;
  if (!in_path.empty()) {
    file_in.open(in_path, std::ios::binary);
    if (!file_in) throw ConfigError("cannot open " + in_path);
  }
  std::istream& in = in_path.empty() ? std::cin : file_in;
  std::ofstream file_out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) throw ConfigError("cannot write " + out_path);
  }
  std::ostream& out = out_path.empty() ? std::cout : file_out;
  std::string line;
  while (std::getline(in, line)) {
    Segmentation seg = encode(model, line);
    for (size_t i = 0; i < seg.pieces.size(); ++i) {
      if (i) out << ' ';
      out << seg.pieces[i];
    }
    out << '\n';
  }
  return kExitOk;
}

int run_tokenizer_decode(const std::string& model_path, const std::string& in_path,
                         const std::string& out_path) {
  SubwordModel model = load_subword_model(model_path);
  std::unordered_map<std::string, int32_t> by_surface;
  for (size_t i = 0; i < model.pieces.size(); ++i) {
    by_surface.emplace(model.pieces[i].piece, static_cast<int32_t>(i));
  }
  std::ifstream file_in;
  if (!in_path.empty()) {
    file_in.open(in_path, std::ios::binary);
    if (!file_in) throw ConfigError("cannot open " + in_path);
  }
  std::istream& in = in_path.empty() ? std::cin : file_in;
  std::ofstream file_out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) throw ConfigError("cannot write " + out_path);
  }
  std::ostream& out = out_path.empty() ? std::cout : file_out;
  std::string line;
  while (std::getline(in, line)) {
    Segmentation seg;
    for (auto& piece : split_whitespace(line)) {
      auto it = by_surface.find(piece);
      if (it != by_surface.end()) {
        seg.ids.push_back(it->second);
      } else if (utf8_decode(piece).size() == 1) {
        seg.ids.push_back(-1);  // unseen single character
      } else {
        throw DataError("decode: unknown piece '" + piece + "'");
      }
      seg.pieces.push_back(piece);
    }
    out << decode(model, seg) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train subcommands

struct TrainCommonArgs {
  CorpusOpts corpus;
  std::string tokenizer_path;
  std::string out;
  std::string save_vocab_path;
  uint64_t seed = 1;
  int workers = 1;
};

// Builds the token stream (subword-encoded when a tokenizer is given) and
// its vocabulary; the SubwordModel must outlive the returned stream.
struct PreparedStream {
  std::unique_ptr<SentenceStream> raw;
  std::optional<SubwordModel> tokenizer;
  std::unique_ptr<SentenceStream> encoded;
  SentenceStream* stream = nullptr;
  Vocabulary vocab;
};

PreparedStream prepare_stream(const TrainCommonArgs& a, int min_count) {
  PreparedStream p;
  p.raw = load_corpus(a.corpus.spec());
  p.stream = p.raw.get();
  if (!a.tokenizer_path.empty()) {
    p.tokenizer = load_subword_model(a.tokenizer_path);
    p.encoded = std::make_unique<EncodedSentenceStream>(*p.raw, *p.tokenizer);
    p.stream = p.encoded.get();
  }
  p.vocab = build_vocab(*p.stream, min_count);
  p.stream->reset();
  if (!a.save_vocab_path.empty()) save_vocab(p.vocab, a.save_vocab_path);
  return p;
}

int run_train_sgns(const TrainCommonArgs& common, SgnsConfig cfg, int min_count,
                   const std::string& mode) {
  cfg.mode = mode == "cbow" ? SgnsMode::cbow : SgnsMode::skipgram;
  cfg.seed = common.seed;
  cfg.workers = common.workers;
  PreparedStream p = prepare_stream(common, min_count);
  SgnsModel model = train_sgns(*p.stream, p.vocab, cfg);
  export_vectors(to_embedding_set(model, p.vocab), common.out);
  std::cerr << "trained sgns: V=" << p.vocab.size() << " dim=" << cfg.dim << " -> "
            << common.out << "\n";
  return kExitOk;
}

int run_train_glove(const TrainCommonArgs& common, GloveConfig cfg, int min_count,
                    bool distance_weighting, const std::string& cooc_in,
                    const std::string& cooc_out, const std::string& vocab_in) {
  cfg.seed = common.seed;
  cfg.workers = common.workers;
  CoocStore store;
  Vocabulary vocab;
  if (!cooc_in.empty()) {
    if (!common.corpus.sources.empty()) {
      throw ConflictingOptions("--cooc and --corpus are mutually exclusive");
    }
    if (vocab_in.empty()) throw ConfigError("--cooc needs --vocab to map ids to words");
    vocab = load_vocab(vocab_in);
    store = load_cooc(cooc_in);
  } else {
    if (common.corpus.sources.empty()) throw ConfigError("--corpus or --cooc required");
    PreparedStream p = prepare_stream(common, min_count);
    vocab = std::move(p.vocab);
    store = build_cooc(*p.stream, vocab, cfg.window, distance_weighting, common.workers);
  }
  if (!cooc_out.empty()) save_cooc(store, cooc_out);
  GloveModel model = train_glove(store, cfg);
  // Words never seen inside any window would be missing from the model;
  // to_embedding_set needs V rows, so pad the store's V up to the vocab.
  if (model.w.size() < vocab.size() * static_cast<size_t>(cfg.dim)) {
    model.w.resize(vocab.size() * static_cast<size_t>(cfg.dim), 0.0);
    model.c.resize(vocab.size() * static_cast<size_t>(cfg.dim), 0.0);
    model.bw.resize(vocab.size(), 0.0);
    model.bc.resize(vocab.size(), 0.0);
  }
  export_vectors(to_embedding_set(model, vocab), common.out);
  std::cerr << "trained glove: V=" << vocab.size() << " entries=" << store.size() << " -> "
            << common.out << "\n";
  return kExitOk;
}

int run_train_subsgns(const TrainCommonArgs& common, SubsgnsConfig cfg,
                      const std::string& compose, const std::string& vectors_out,
                      const std::vector<std::string>& export_composed) {
  cfg.compose_sum = compose == "sum";
  cfg.seed = common.seed;
  cfg.workers = common.workers;
  auto stream = load_corpus(common.corpus.spec());
  Vocabulary vocab = build_vocab(*stream, cfg.min_count);
  stream->reset();
  if (!common.save_vocab_path.empty()) save_vocab(vocab, common.save_vocab_path);
  SubsgnsModel model = train_subsgns(*stream, vocab, cfg);
  save_subsgns_model(model, common.out);
  if (!vectors_out.empty()) export_vectors(to_embedding_set(model), vectors_out);
  if (!export_composed.empty()) {
    const std::string& wordlist = export_composed[0];
    const std::string& out_path = export_composed[1];
    std::ifstream in(wordlist);
    if (!in) throw ConfigError("cannot open wordlist " + wordlist);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
      for (auto& w : split_whitespace(line)) words.push_back(w);
    }
    std::vector<float> matrix;
    matrix.reserve(words.size() * static_cast<size_t>(model.dim));
    for (const auto& w : words) {
      auto v = compose_word_vector(model, w);
      matrix.insert(matrix.end(), v.begin(), v.end());
    }
    export_vectors(EmbeddingSet(words, std::move(matrix), model.dim), out_path);
  }
  std::cerr << "trained subsgns: V=" << vocab.size() << " buckets=" << cfg.buckets << " -> "
            << common.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// model loading for eval / nn

struct LoadedModels {
  std::optional<SubwordModel> tokenizer;
  std::deque<SubsgnsModel> subsgns;  // stable addresses for the composers
  std::vector<std::pair<std::string, EmbeddingSet>> sets;
};

LoadedModels load_models(const std::vector<std::string>& vector_paths,
                         const std::vector<std::string>& subsgns_paths,
                         const std::string& tokenizer_path) {
  LoadedModels loaded;
  if (!tokenizer_path.empty()) loaded.tokenizer = load_subword_model(tokenizer_path);
  for (const auto& path : vector_paths) {
    EmbeddingSet set = import_vectors(path);
    if (loaded.tokenizer) set.set_oov_subword_sum(&*loaded.tokenizer);
    loaded.sets.emplace_back(file_stem(path), std::move(set));
  }
  for (const auto& path : subsgns_paths) {
    loaded.subsgns.push_back(load_subsgns_model(path));
    loaded.sets.emplace_back(file_stem(path), to_embedding_set(loaded.subsgns.back()));
  }
  if (loaded.sets.empty()) {
    throw ConfigError("no models given; use --vectors and/or --subsgns-model");
  }
  return loaded;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::vector<std::string> vector_paths;
  std::vector<std::string> subsgns_paths;
  std::string tokenizer_path;
  std::string relatedness_path;
  std::string synonym_path;
  std::string analogy_path;
  std::string cat_syn_path;
  std::string cat_sem_path;
  std::string tsv_path;
  std::string per_item_path;
  uint64_t seed = 1;
};

int run_eval(const EvalArgs& a, const std::string& task) {
  auto need = [&](const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("eval ") + task + " needs --" + what);
  };
  if (task == "relatedness") need(a.relatedness_path, "relatedness");
  if (task == "synonym") need(a.synonym_path, "synonym");
  if (task == "analogy") need(a.analogy_path, "analogy");
  if (task == "categorization" && a.cat_syn_path.empty() && a.cat_sem_path.empty()) {
    throw ConfigError("eval categorization needs --categorization-syn or --categorization-sem");
  }

  std::optional<RelatednessInventory> relatedness;
  std::optional<SynonymInventory> synonym;
  std::optional<AnalogyInventory> analogy;
  std::optional<CategorizationInventory> cat_syn, cat_sem;
  bool all = task == "all";
  if ((all || task == "relatedness") && !a.relatedness_path.empty()) {
    relatedness = parse_relatedness(a.relatedness_path);
  }
  if ((all || task == "synonym") && !a.synonym_path.empty()) {
    synonym = parse_synonym(a.synonym_path);
  }
  if ((all || task == "analogy") && !a.analogy_path.empty()) {
    analogy = parse_analogy(a.analogy_path);
  }
  if ((all || task == "categorization") && !a.cat_syn_path.empty()) {
    cat_syn = parse_categorization(a.cat_syn_path, CategorizationInventory::Kind::syntactic);
  }
  if ((all || task == "categorization") && !a.cat_sem_path.empty()) {
    cat_sem = parse_categorization(a.cat_sem_path, CategorizationInventory::Kind::semantic);
  }
  if (all && !relatedness && !synonym && !analogy && !cat_syn && !cat_sem) {
    throw ConfigError("eval all: no inventory files given");
  }

  LoadedModels models = load_models(a.vector_paths, a.subsgns_paths, a.tokenizer_path);

  std::vector<std::string> per_item;
  std::vector<ModelRow> rows;
  for (auto& [name, set] : models.sets) {
    EvalInputs inputs;
    inputs.relatedness = relatedness ? &*relatedness : nullptr;
    inputs.synonym = synonym ? &*synonym : nullptr;
    inputs.analogy = analogy ? &*analogy : nullptr;
    inputs.categorization_syn = cat_syn ? &*cat_syn : nullptr;
    inputs.categorization_sem = cat_sem ? &*cat_sem : nullptr;
    inputs.seed = a.seed;
    inputs.per_item = a.per_item_path.empty() ? nullptr : &per_item;
    rows.push_back({name, run_all(set, inputs)});
  }

  std::cout << render_table(rows);
  if (!a.tsv_path.empty()) {
    std::ofstream out(a.tsv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + a.tsv_path);
    out << render_tsv(rows);
  }
  if (!a.per_item_path.empty()) {
    std::ofstream out(a.per_item_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + a.per_item_path);
    for (const auto& line : per_item) out << line << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// nn / project / stats / inventory

int run_nn(const std::string& word, const EvalArgs& a, int k) {
  LoadedModels models = load_models(a.vector_paths, a.subsgns_paths, a.tokenizer_path);
  char buf[64];
  for (auto& [name, set] : models.sets) {
    if (models.sets.size() > 1) std::cout << "# " << name << "\n";
    auto [query, was_oov] = set.vector_of(word);
    if (was_oov) std::cerr << word << " is OOV under rule " << set.oov_rule_name() << "\n";
    for (const auto& nb : nearest(set, query, k, {word})) {
      std::snprintf(buf, sizeof(buf), "%.6f", nb.cosine);
      std::cout << nb.word << '\t' << buf << '\n';
    }
  }
  return kExitOk;
}

int run_project(const std::string& in_path, const std::string& out_path) {
  EmbeddingSet set = import_vectors(in_path);
  std::vector<std::vector<double>> vectors;
  vectors.reserve(set.size());
  for (size_t i = 0; i < set.size(); ++i) {
    auto r = set.row(static_cast<int32_t>(i));
    vectors.emplace_back(r.begin(), r.end());
  }
  Projection2D proj = project_2d(set.words(), vectors);
  std::ofstream file_out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) throw ConfigError("cannot write " + out_path);
  }
  std::ostream& out = out_path.empty() ? std::cout : file_out;
  char buf[64];
  for (const auto& p : proj.points) {
    out << p.label;
    std::snprintf(buf, sizeof(buf), "%.9g", p.x);
    out << '\t' << buf;
    std::snprintf(buf, sizeof(buf), "%.9g", p.y);
    out << '\t' << buf << '\n';
  }
  return kExitOk;
}

int run_stats(const CorpusOpts& corpus) {
  auto stream = load_corpus(corpus.spec());
  CorpusStats stats = corpus_stats(*stream);
  std::cout << "sentences\t" << stats.sentences << "\n"
            << "tokens\t" << stats.tokens << "\n"
            << "distinct_tokens\t" << stats.distinct_tokens << "\n";
  return kExitOk;
}

int run_inventory_validate(const std::string& kind, const std::string& path) {
  if (kind == "relatedness") {
    auto inv = parse_relatedness(path);
    std::cout << "ok: " << inv.pairs.size() << " pairs ("
              << inv.dev_split().pairs.size() << " dev)\n";
  } else if (kind == "synonym") {
    auto inv = parse_synonym(path);
    std::cout << "ok: " << inv.mcqs.size() << " questions\n";
  } else if (kind == "analogy") {
    auto inv = parse_analogy(path);
    size_t syn = 0;
    for (const auto& q : inv.questions) syn += q.section == AnalogySection::syntactic;
    std::cout << "ok: " << inv.questions.size() << " questions (" << syn << " syntactic, "
              << inv.questions.size() - syn << " semantic)\n";
  } else if (kind == "categorization") {
    auto inv = parse_categorization(path, CategorizationInventory::Kind::semantic);
    size_t words = 0;
    for (const auto& [c, ws] : inv.categories) words += ws.size();
    std::cout << "ok: " << inv.categories.size() << " categories, " << words << " concepts\n";
  } else {
    throw ConfigError("unknown inventory kind " + kind);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embkit: subword tokenizers, static word embeddings, and intrinsic evaluation"};
  app.require_subcommand(1);

  // ---- tokenizer ----
  auto* tokenizer = app.add_subcommand("tokenizer", "train or apply a subword tokenizer");
  tokenizer->require_subcommand(1);

  auto* tok_train = tokenizer->add_subcommand("train", "learn a unigram-LM piece inventory");
  TokenizerTrainArgs tok_args;
  tok_args.corpus.attach(tok_train);
  tok_train->add_option("--vocab-size", tok_args.vocab_size, "piece inventory size")
      ->capture_default_str();
  tok_train->add_option("--seed-size", tok_args.seed_size,
                        "seed candidate cap (0 = 10 x vocab-size)")
      ->capture_default_str();
  tok_train->add_option("--out", tok_args.out, "model file to write")->required();

  auto* tok_encode = tokenizer->add_subcommand("encode", "segment text into pieces");
  std::string tok_model, tok_in, tok_out;
  tok_encode->add_option("--model", tok_model, "tokenizer model file")->required();
  tok_encode->add_option("--in", tok_in, "input file (default stdin)");
  tok_encode->add_option("--out", tok_out, "output file (default stdout)");

  auto* tok_decode = tokenizer->add_subcommand("decode", "restore text from pieces");
  std::string dec_model, dec_in, dec_out;
  tok_decode->add_option("--model", dec_model, "tokenizer model file")->required();
  tok_decode->add_option("--in", dec_in, "input file (default stdin)");
  tok_decode->add_option("--out", dec_out, "output file (default stdout)");

  // ---- train ----
  auto* train = app.add_subcommand("train", "train an embedding model");
  train->require_subcommand(1);

  auto add_common = [](CLI::App* cmd, TrainCommonArgs& args, bool corpus_required) {
    args.corpus.attach(cmd, corpus_required);
    cmd->add_option("--out", args.out, "output file")->required();
    cmd->add_option("--save-vocab", args.save_vocab_path, "also write the vocabulary");
    cmd->add_option("--seed", args.seed, "random seed")->capture_default_str();
    cmd->add_option("--workers", args.workers, "trainer threads")->capture_default_str();
  };

  auto* train_sgns_cmd = train->add_subcommand("sgns", "skip-gram/CBOW with negative sampling");
  TrainCommonArgs sgns_common;
  SgnsConfig sgns_cfg;
  int sgns_min_count = 1;
  std::string sgns_mode = "skipgram";
  add_common(train_sgns_cmd, sgns_common, true);
  train_sgns_cmd->add_option("--tokenizer", sgns_common.tokenizer_path,
                             "subword model; trains on the encoded corpus");
  train_sgns_cmd->add_option("--dim", sgns_cfg.dim, "embedding dimension")->capture_default_str();
  train_sgns_cmd->add_option("--window", sgns_cfg.window, "context window (each side)")
      ->capture_default_str();
  train_sgns_cmd->add_option("--epochs", sgns_cfg.epochs, "training epochs")->capture_default_str();
  train_sgns_cmd->add_option("--negatives", sgns_cfg.negatives, "negative samples per pair")
      ->capture_default_str();
  train_sgns_cmd->add_option("--lr", sgns_cfg.initial_lr, "initial learning rate")
      ->capture_default_str();
  train_sgns_cmd->add_option("--mode", sgns_mode, "skipgram or cbow")
      ->check(CLI::IsMember({"skipgram", "cbow"}))
      ->capture_default_str();
  train_sgns_cmd->add_option("--min-count", sgns_min_count, "minimum word count for vocabulary")
      ->capture_default_str();
  train_sgns_cmd->add_option("--subsample", sgns_cfg.subsample,
                             "frequent-word subsampling threshold (0 = off)")
      ->capture_default_str();

  auto* train_glove_cmd = train->add_subcommand("glove", "global co-occurrence factorization");
  TrainCommonArgs glove_common;
  GloveConfig glove_cfg;
  int glove_min_count = 1;
  int glove_dw = 1;
  std::string glove_cooc_in, glove_cooc_out, glove_vocab_in;
  add_common(train_glove_cmd, glove_common, false);
  train_glove_cmd->add_option("--tokenizer", glove_common.tokenizer_path,
                              "subword model; trains on the encoded corpus");
  train_glove_cmd->add_option("--dim", glove_cfg.dim, "embedding dimension")->capture_default_str();
  train_glove_cmd->add_option("--window", glove_cfg.window, "context window (each side)")
      ->capture_default_str();
  train_glove_cmd->add_option("--epochs", glove_cfg.epochs, "training epochs")
      ->capture_default_str();
  train_glove_cmd->add_option("--x-max", glove_cfg.x_max, "weighting cutoff x_max")
      ->capture_default_str();
  train_glove_cmd->add_option("--alpha", glove_cfg.alpha, "weighting exponent")
      ->capture_default_str();
  train_glove_cmd->add_option("--lr", glove_cfg.initial_lr, "initial learning rate")
      ->capture_default_str();
  train_glove_cmd->add_option("--min-count", glove_min_count, "minimum word count for vocabulary")
      ->capture_default_str();
  train_glove_cmd->add_option("--distance-weighting", glove_dw, "weight pairs by 1/distance (0|1)")
      ->capture_default_str();
  train_glove_cmd->add_option("--cooc", glove_cooc_in, "load a co-occurrence file instead of --corpus");
  train_glove_cmd->add_option("--save-cooc", glove_cooc_out, "write the co-occurrence file");
  train_glove_cmd->add_option("--vocab", glove_vocab_in, "vocabulary file (with --cooc)");

  auto* train_subsgns_cmd =
      train->add_subcommand("subsgns", "skip-gram over character n-grams (raw corpus)");
  TrainCommonArgs subsgns_common;
  SubsgnsConfig subsgns_cfg;
  std::string subsgns_compose = "mean";
  std::string subsgns_vectors_out;
  std::vector<std::string> subsgns_export;
  add_common(train_subsgns_cmd, subsgns_common, true);
  train_subsgns_cmd->add_option("--dim", subsgns_cfg.dim, "embedding dimension")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--window", subsgns_cfg.window, "context window (each side)")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--epochs", subsgns_cfg.epochs, "training epochs")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--negatives", subsgns_cfg.negatives, "negative samples per pair")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--lr", subsgns_cfg.initial_lr, "initial learning rate")
      ->capture_default_str();
  train_subsgns_cmd
      ->add_option("--min-count", subsgns_cfg.min_count, "minimum word count for vocabulary")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--ngram-min", subsgns_cfg.ngram_min, "minimum n-gram length")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--ngram-max", subsgns_cfg.ngram_max, "maximum n-gram length")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--buckets", subsgns_cfg.buckets, "n-gram hash buckets")
      ->capture_default_str();
  train_subsgns_cmd
      ->add_option("--subsample", subsgns_cfg.subsample,
                   "frequent-word subsampling threshold (0 = off)")
      ->capture_default_str();
  train_subsgns_cmd->add_option("--compose", subsgns_compose, "word composition: mean or sum")
      ->check(CLI::IsMember({"mean", "sum"}))
      ->capture_default_str();
  train_subsgns_cmd->add_option("--vectors-out", subsgns_vectors_out,
                                "also export composed vocabulary vectors");
  train_subsgns_cmd
      ->add_option("--export-composed", subsgns_export,
                   "WORDLIST OUT: export composed vectors for a word list")
      ->expected(2);

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "run intrinsic evaluation tasks");
  eval->require_subcommand(1);
  EvalArgs eval_args;
  std::vector<CLI::App*> eval_tasks;
  for (const char* task : {"relatedness", "synonym", "analogy", "categorization", "all"}) {
    auto* cmd = eval->add_subcommand(task, std::string("evaluate ") + task);
    cmd->add_option("--vectors", eval_args.vector_paths, "vector files (one model row each)");
    cmd->add_option("--subsgns-model", eval_args.subsgns_paths, "subsgns model files");
    cmd->add_option("--tokenizer", eval_args.tokenizer_path,
                    "subword model for OOV composition of --vectors models");
    cmd->add_option("--relatedness", eval_args.relatedness_path, "relatedness inventory TSV");
    cmd->add_option("--synonym", eval_args.synonym_path, "synonym MCQ inventory TSV");
    cmd->add_option("--analogy", eval_args.analogy_path, "analogy inventory TSV");
    cmd->add_option("--categorization-syn", eval_args.cat_syn_path,
                    "syntactic categorization TSV");
    cmd->add_option("--categorization-sem", eval_args.cat_sem_path,
                    "semantic categorization TSV");
    cmd->add_option("--tsv", eval_args.tsv_path, "write the report as TSV");
    cmd->add_option("--emit-per-item", eval_args.per_item_path,
                    "write one prediction per line");
    cmd->add_option("--seed", eval_args.seed, "random seed (clustering)")->capture_default_str();
    eval_tasks.push_back(cmd);
  }

  // ---- nn ----
  auto* nn_cmd = app.add_subcommand("nn", "nearest neighbors of a word by cosine");
  std::string nn_word;
  int nn_k = 10;
  EvalArgs nn_args;
  nn_cmd->add_option("word", nn_word, "query word")->required();
  nn_cmd->add_option("--vectors", nn_args.vector_paths, "vector files");
  nn_cmd->add_option("--subsgns-model", nn_args.subsgns_paths, "subsgns model files");
  nn_cmd->add_option("--tokenizer", nn_args.tokenizer_path,
                     "subword model for OOV composition of --vectors models");
  nn_cmd->add_option("--k", nn_k, "neighbors to list")->capture_default_str();

  // ---- project ----
  auto* project_cmd = app.add_subcommand("project", "2-D PCA coordinates of labeled vectors");
  std::string project_in, project_out;
  project_cmd->add_option("file", project_in, "labeled vector file")->required();
  project_cmd->add_option("--out", project_out, "output TSV (default stdout)");

  // ---- stats ----
  auto* stats_cmd = app.add_subcommand("stats", "corpus sentence/token counts");
  CorpusOpts stats_corpus;
  stats_corpus.attach(stats_cmd);

  // ---- inventory ----
  auto* inventory_cmd = app.add_subcommand("inventory", "build or validate task inventories");
  inventory_cmd->require_subcommand(1);

  auto* inv_rel = inventory_cmd->add_subcommand("build-relatedness",
                                                "sample labeled word pairs from a lexicon");
  std::string rel_lexicon, rel_out;
  int rel_n_total = 13500;
  double rel_dev_fraction = 1.0 / 3.0;
  uint64_t rel_seed = 1;
  inv_rel->add_option("--lexicon", rel_lexicon, "synset lexicon TSV")->required();
  inv_rel->add_option("--n-total", rel_n_total, "total pairs (multiple of 3)")
      ->capture_default_str();
  inv_rel->add_option("--dev-fraction", rel_dev_fraction, "fraction marked dev")
      ->capture_default_str();
  inv_rel->add_option("--seed", rel_seed, "random seed")->capture_default_str();
  inv_rel->add_option("--out", rel_out, "output TSV")->required();

  auto* inv_syn = inventory_cmd->add_subcommand("build-synonym",
                                                "build MCQs from multi-word synsets");
  std::string syn_lexicon, syn_out;
  uint64_t syn_seed = 1;
  inv_syn->add_option("--lexicon", syn_lexicon, "synset lexicon TSV")->required();
  inv_syn->add_option("--seed", syn_seed, "random seed")->capture_default_str();
  inv_syn->add_option("--out", syn_out, "output TSV")->required();

  auto* inv_ana = inventory_cmd->add_subcommand("build-analogy",
                                                "build questions from paradigms and relations");
  std::string ana_paradigms, ana_relations, ana_out;
  inv_ana->add_option("--paradigms", ana_paradigms, "paradigm tables TSV")->required();
  inv_ana->add_option("--relations", ana_relations, "semantic relation pairs TSV")->required();
  inv_ana->add_option("--out", ana_out, "output TSV")->required();

  auto* inv_val = inventory_cmd->add_subcommand("validate", "validate an inventory file");
  std::string val_kind, val_file;
  inv_val->add_option("--kind", val_kind, "relatedness|synonym|analogy|categorization")
      ->required()
      ->check(CLI::IsMember({"relatedness", "synonym", "analogy", "categorization"}));
  inv_val->add_option("file", val_file, "inventory TSV")->required();

  // ---- parse & dispatch ----
  std::vector<std::string> raw_args(argv + 1, argv + argc);
  try {
    std::vector<std::string> args = apply_config(std::move(raw_args));
    // CLI11 consumes reversed argv.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << "error: usage: " << e.what() << "\n";
      return kExitUsage;
    }

    if (tok_train->parsed()) return run_tokenizer_train(tok_args);
    if (tok_encode->parsed()) return run_tokenizer_encode(tok_model, tok_in, tok_out);
    if (tok_decode->parsed()) return run_tokenizer_decode(dec_model, dec_in, dec_out);
    if (train_sgns_cmd->parsed()) {
      return run_train_sgns(sgns_common, sgns_cfg, sgns_min_count, sgns_mode);
    }
    if (train_glove_cmd->parsed()) {
      return run_train_glove(glove_common, glove_cfg, glove_min_count, glove_dw != 0,
                             glove_cooc_in, glove_cooc_out, glove_vocab_in);
    }
    if (train_subsgns_cmd->parsed()) {
      return run_train_subsgns(subsgns_common, subsgns_cfg, subsgns_compose,
                               subsgns_vectors_out, subsgns_export);
    }
    for (auto* cmd : eval_tasks) {
      if (cmd->parsed()) return run_eval(eval_args, cmd->get_name());
    }
    if (nn_cmd->parsed()) return run_nn(nn_word, nn_args, nn_k);
    if (project_cmd->parsed()) return run_project(project_in, project_out);
    if (stats_cmd->parsed()) return run_stats(stats_corpus);
    if (inv_rel->parsed()) {
      auto lex = load_lexicon(rel_lexicon);
      auto inv = build_relatedness(lex, rel_n_total, rel_dev_fraction, rel_seed);
      save_relatedness(inv, rel_out);
      std::cerr << "wrote " << inv.pairs.size() << " pairs -> " << rel_out << "\n";
      return kExitOk;
    }
    if (inv_syn->parsed()) {
      auto lex = load_lexicon(syn_lexicon);
      auto inv = build_synonym_mcqs(lex, syn_seed);
      save_synonym(inv, syn_out);
      std::cerr << "wrote " << inv.mcqs.size() << " questions (" << inv.skipped
                << " synsets skipped) -> " << syn_out << "\n";
      return kExitOk;
    }
    if (inv_ana->parsed()) {
      auto inv = build_analogy(load_paradigms(ana_paradigms), load_relations(ana_relations));
      save_analogy(inv, ana_out);
      std::cerr << "wrote " << inv.questions.size() << " questions -> " << ana_out << "\n";
      return kExitOk;
    }
    if (inv_val->parsed()) return run_inventory_validate(val_kind, val_file);
    std::cerr << "error: usage: no subcommand\n";
    return kExitUsage;
  } catch (const ConflictingOptions& e) {
    std::cerr << "error: conflict: " << e.what() << "\n";
    return kExitConflict;
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitNumeric;
  }
}
