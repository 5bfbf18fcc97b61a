#include "embkit/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "embkit/error.hpp"
#include "embkit/rng.hpp"

namespace embkit {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

[[noreturn]] void fail(const std::string& path, size_t line_no, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line_no) + ": " + what);
}

bool single_token(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') return false;
  }
  return true;
}

// Resolves polysemous words to one membership, sampled uniformly over the
// synsets containing the word; iteration over sorted words keeps the draw
// deterministic for a given seed.
std::unordered_map<std::string, int> canonical_membership(const SynsetLexicon& lex, Rng& rng) {
  std::unordered_map<std::string, std::vector<int>> memberships;
  for (size_t i = 0; i < lex.synsets.size(); ++i) {
    for (const auto& w : lex.synsets[i].words) {
      memberships[w].push_back(static_cast<int>(i));
    }
  }
  std::vector<std::string> words;
  words.reserve(memberships.size());
  for (auto& [w, _] : memberships) words.push_back(w);
  std::sort(words.begin(), words.end());
  std::unordered_map<std::string, int> canonical;
  for (const auto& w : words) {
    const auto& ms = memberships[w];
    canonical[w] = ms.size() == 1 ? ms[0] : ms[rng.below(ms.size())];
  }
  return canonical;
}

}  // namespace

SynsetLexicon load_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("lexicon: cannot open " + path);
  SynsetLexicon lex;
  std::map<std::pair<std::string, std::string>, int> index;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3) fail(path, line_no, "expected varga<TAB>synset_id<TAB>word");
    if (cols[0].empty() || cols[1].empty() || !single_token(cols[2])) {
      fail(path, line_no, "empty field or multi-token word");
    }
    auto key = std::make_pair(cols[0], cols[1]);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, static_cast<int>(lex.synsets.size()));
      lex.synsets.push_back({cols[0], cols[1], {cols[2]}});
    } else {
      auto& words = lex.synsets[it->second].words;
      if (std::find(words.begin(), words.end(), cols[2]) != words.end()) {
        fail(path, line_no, "word repeated within synset " + cols[1]);
      }
      words.push_back(cols[2]);
    }
  }
  if (lex.synsets.empty()) throw DataError(path + ": empty lexicon");
  return lex;
}

const char* to_string(RelLabel label) {
  switch (label) {
    case RelLabel::SYNSET: return "SYNSET";
    case RelLabel::VARGA: return "VARGA";
    default: return "UNRELATED";
  }
}

RelLabel rel_label_from(const std::string& s) {
  if (s == "SYNSET") return RelLabel::SYNSET;
  if (s == "VARGA") return RelLabel::VARGA;
  if (s == "UNRELATED") return RelLabel::UNRELATED;
  throw DataError("unknown relatedness label: " + s);
}

RelatednessInventory RelatednessInventory::dev_split() const {
  RelatednessInventory out;
  for (const auto& p : pairs) {
    if (p.dev) out.pairs.push_back(p);
  }
  return out;
}

RelatednessInventory RelatednessInventory::test_split() const {
  RelatednessInventory out;
  for (const auto& p : pairs) {
    if (!p.dev) out.pairs.push_back(p);
  }
  return out;
}

RelatednessInventory build_relatedness(const SynsetLexicon& lex, int n_total,
                                       double dev_fraction, uint64_t seed) {
  if (n_total < 3 || n_total % 3 != 0) {
    throw ConfigError("relatedness: n_total must be a positive multiple of 3");
  }
  if (dev_fraction < 0 || dev_fraction > 1) {
    throw ConfigError("relatedness: dev_fraction must be in [0, 1]");
  }
  int per_class = n_total / 3;

  Rng rng(Rng::derive(seed, 0x3e1));
  auto canonical = canonical_membership(lex, rng);

  // word -> varga / synset under the canonical assignment
  std::vector<std::string> words;
  words.reserve(canonical.size());
  for (auto& [w, _] : canonical) words.push_back(w);
  std::sort(words.begin(), words.end());
  std::unordered_map<std::string, int> word_idx;
  for (size_t i = 0; i < words.size(); ++i) word_idx[words[i]] = static_cast<int>(i);

  std::unordered_map<int, std::vector<int>> synset_words;   // synset -> word idxs
  std::unordered_map<std::string, std::vector<int>> varga_words;
  std::vector<std::string> word_varga(words.size());
  for (const auto& w : words) {
    int s = canonical[w];
    int wi = word_idx[w];
    synset_words[s].push_back(wi);
    varga_words[lex.synsets[s].varga].push_back(wi);
    word_varga[wi] = lex.synsets[s].varga;
  }

  using Pair = std::pair<int, int>;
  auto canon_pair = [&](int a, int b) { return a < b ? Pair{a, b} : Pair{b, a}; };

  std::vector<Pair> synset_pairs;
  for (size_t s = 0; s < lex.synsets.size(); ++s) {
    auto it = synset_words.find(static_cast<int>(s));
    if (it == synset_words.end()) continue;
    const auto& ws = it->second;
    for (size_t i = 0; i < ws.size(); ++i)
      for (size_t j = i + 1; j < ws.size(); ++j) synset_pairs.push_back(canon_pair(ws[i], ws[j]));
  }
  if (static_cast<int>(synset_pairs.size()) < per_class) {
    throw ConfigError("relatedness: not enough SYNSET pairs (" +
                      std::to_string(synset_pairs.size()) + " < " + std::to_string(per_class) +
                      ")");
  }

  std::vector<Pair> varga_pairs;
  for (auto& [varga, ws] : varga_words) {
    for (size_t i = 0; i < ws.size(); ++i) {
      for (size_t j = i + 1; j < ws.size(); ++j) {
        if (canonical[words[ws[i]]] != canonical[words[ws[j]]]) {
          varga_pairs.push_back(canon_pair(ws[i], ws[j]));
        }
      }
    }
  }
  if (static_cast<int>(varga_pairs.size()) < per_class) {
    throw ConfigError("relatedness: not enough VARGA pairs (" +
                      std::to_string(varga_pairs.size()) + " < " + std::to_string(per_class) +
                      ")");
  }

  uint64_t w_count = words.size();
  uint64_t all_pairs = w_count * (w_count - 1) / 2;
  uint64_t same_varga = 0;
  for (auto& [varga, ws] : varga_words) {
    same_varga += static_cast<uint64_t>(ws.size()) * (ws.size() - 1) / 2;
  }
  if (all_pairs - same_varga < static_cast<uint64_t>(per_class)) {
    throw ConfigError("relatedness: not enough UNRELATED pairs (" +
                      std::to_string(all_pairs - same_varga) + " < " +
                      std::to_string(per_class) + ")");
  }

  // Candidate enumeration above is deterministic (sorted words, lexicon
  // order); shuffles below carry all the randomness.
  std::sort(synset_pairs.begin(), synset_pairs.end());
  std::sort(varga_pairs.begin(), varga_pairs.end());
  rng.shuffle(synset_pairs);
  rng.shuffle(varga_pairs);
  synset_pairs.resize(per_class);
  varga_pairs.resize(per_class);

  std::set<Pair> taken(synset_pairs.begin(), synset_pairs.end());
  taken.insert(varga_pairs.begin(), varga_pairs.end());
  std::vector<Pair> unrelated_pairs;
  while (static_cast<int>(unrelated_pairs.size()) < per_class) {
    int a = static_cast<int>(rng.below(w_count));
    int b = static_cast<int>(rng.below(w_count));
    if (a == b || word_varga[a] == word_varga[b]) continue;
    Pair p = canon_pair(a, b);
    if (!taken.insert(p).second) continue;
    unrelated_pairs.push_back(p);
  }

  RelatednessInventory inv;
  auto append = [&](const std::vector<Pair>& ps, RelLabel label) {
    for (const auto& [a, b] : ps) inv.pairs.push_back({words[a], words[b], label, false});
  };
  append(synset_pairs, RelLabel::SYNSET);
  append(varga_pairs, RelLabel::VARGA);
  append(unrelated_pairs, RelLabel::UNRELATED);
  rng.shuffle(inv.pairs);
  auto dev_count = static_cast<size_t>(std::llround(dev_fraction * n_total));
  for (size_t i = 0; i < inv.pairs.size() && i < dev_count; ++i) inv.pairs[i].dev = true;
  return inv;
}

SynonymInventory build_synonym_mcqs(const SynsetLexicon& lex, uint64_t seed) {
  Rng rng(Rng::derive(seed, 0x5f0));
  auto canonical = canonical_membership(lex, rng);

  // Canonical synset groups and per-varga word lists, in lexicon order.
  std::vector<std::vector<std::string>> groups(lex.synsets.size());
  std::unordered_map<std::string, std::vector<std::pair<int, std::string>>> varga_members;
  for (size_t s = 0; s < lex.synsets.size(); ++s) {
    for (const auto& w : lex.synsets[s].words) {
      if (canonical[w] == static_cast<int>(s)) {
        groups[s].push_back(w);
        varga_members[lex.synsets[s].varga].emplace_back(static_cast<int>(s), w);
      }
    }
  }

  SynonymInventory inv;
  for (size_t s = 0; s < lex.synsets.size(); ++s) {
    if (groups[s].size() < 2) continue;
    std::vector<std::string> members = groups[s];
    rng.shuffle(members);
    const std::string& target = members[0];
    const std::string& answer = members[1];
    std::vector<std::string> pool;
    for (const auto& [gs, w] : varga_members[lex.synsets[s].varga]) {
      if (gs != static_cast<int>(s)) pool.push_back(w);
    }
    if (pool.size() < 3) {
      ++inv.skipped;
      continue;
    }
    rng.shuffle(pool);
    SynonymMcq mcq;
    mcq.target = target;
    std::vector<std::string> cands = {answer, pool[0], pool[1], pool[2]};
    rng.shuffle(cands);
    for (int i = 0; i < 4; ++i) {
      mcq.candidates[i] = cands[i];
      if (cands[i] == answer) mcq.answer_idx = i;
    }
    inv.mcqs.push_back(std::move(mcq));
  }
  return inv;
}

std::vector<ParadigmTable> load_paradigms(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("paradigms: cannot open " + path);
  std::vector<ParadigmTable> tables;
  std::map<std::string, int> table_idx;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 4) fail(path, line_no, "expected family<TAB>lemma<TAB>cell<TAB>form");
    for (const auto& c : cols) {
      if (!single_token(c)) fail(path, line_no, "empty or multi-token field");
    }
    auto it = table_idx.find(cols[0]);
    if (it == table_idx.end()) {
      table_idx.emplace(cols[0], static_cast<int>(tables.size()));
      tables.push_back({cols[0], {}, {}, {}});
      it = table_idx.find(cols[0]);
    }
    ParadigmTable& t = tables[it->second];
    auto lemma_it = std::find(t.lemmas.begin(), t.lemmas.end(), cols[1]);
    size_t li = lemma_it - t.lemmas.begin();
    if (lemma_it == t.lemmas.end()) {
      t.lemmas.push_back(cols[1]);
      t.forms.emplace_back(t.cells.size());
    }
    auto cell_it = std::find(t.cells.begin(), t.cells.end(), cols[2]);
    size_t ci = cell_it - t.cells.begin();
    if (cell_it == t.cells.end()) {
      t.cells.push_back(cols[2]);
      for (auto& row : t.forms) row.emplace_back();
    }
    if (!t.forms[li][ci].empty()) fail(path, line_no, "duplicate cell for lemma " + cols[1]);
    t.forms[li][ci] = cols[3];
  }
  if (tables.empty()) throw DataError(path + ": empty paradigm file");
  return tables;
}

std::vector<RelationPairs> load_relations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("relations: cannot open " + path);
  std::vector<RelationPairs> rels;
  std::map<std::string, int> rel_idx;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3) fail(path, line_no, "expected relation<TAB>word1<TAB>word2");
    for (const auto& c : cols) {
      if (!single_token(c)) fail(path, line_no, "empty or multi-token field");
    }
    auto it = rel_idx.find(cols[0]);
    if (it == rel_idx.end()) {
      rel_idx.emplace(cols[0], static_cast<int>(rels.size()));
      rels.push_back({cols[0], {}});
      it = rel_idx.find(cols[0]);
    }
    rels[it->second].pairs.emplace_back(cols[1], cols[2]);
  }
  if (rels.empty()) throw DataError(path + ": empty relation file");
  return rels;
}

const char* to_string(AnalogySection section) {
  return section == AnalogySection::syntactic ? "syntactic" : "semantic";
}

AnalogyInventory build_analogy(const std::vector<ParadigmTable>& paradigms,
                               const std::vector<RelationPairs>& relations) {
  AnalogyInventory inv;
  auto all_distinct = [](const std::string& a, const std::string& b, const std::string& c,
                         const std::string& d) {
    return a != b && a != c && a != d && b != c && b != d && c != d;
  };
  for (const auto& t : paradigms) {
    for (size_t i = 0; i < t.lemmas.size(); ++i) {
      for (size_t j = i + 1; j < t.lemmas.size(); ++j) {
        for (size_t ci = 0; ci < t.cells.size(); ++ci) {
          const std::string& b = t.forms[i][ci];
          const std::string& d = t.forms[j][ci];
          if (b.empty() || d.empty()) continue;
          if (!all_distinct(t.lemmas[i], b, t.lemmas[j], d)) continue;
          inv.questions.push_back({t.lemmas[i], b, t.lemmas[j], d, AnalogySection::syntactic});
        }
      }
    }
  }
  for (const auto& r : relations) {
    for (size_t i = 0; i < r.pairs.size(); ++i) {
      for (size_t j = i + 1; j < r.pairs.size(); ++j) {
        const auto& [a, b] = r.pairs[i];
        const auto& [c, d] = r.pairs[j];
        if (!all_distinct(a, b, c, d)) continue;
        inv.questions.push_back({a, b, c, d, AnalogySection::semantic});
      }
    }
  }
  return inv;
}

RelatednessInventory parse_relatedness(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("relatedness: cannot open " + path);
  RelatednessInventory inv;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 4) fail(path, line_no, "expected word1 word2 label split");
    if (!single_token(cols[0]) || !single_token(cols[1])) {
      fail(path, line_no, "empty or multi-token word");
    }
    if (cols[0] == cols[1]) fail(path, line_no, "pair of identical words");
    RelatednessPair p;
    p.w1 = cols[0];
    p.w2 = cols[1];
    try {
      p.label = rel_label_from(cols[2]);
    } catch (const DataError& e) {
      fail(path, line_no, e.what());
    }
    if (cols[3] == "dev") {
      p.dev = true;
    } else if (cols[3] == "test") {
      p.dev = false;
    } else {
      fail(path, line_no, "split must be dev or test");
    }
    inv.pairs.push_back(std::move(p));
  }
  if (inv.pairs.empty()) throw DataError(path + ": empty inventory");
  return inv;
}

SynonymInventory parse_synonym(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("synonym: cannot open " + path);
  SynonymInventory inv;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 6) fail(path, line_no, "expected target c1 c2 c3 c4 answer_idx");
    SynonymMcq mcq;
    if (!single_token(cols[0])) fail(path, line_no, "empty or multi-token target");
    mcq.target = cols[0];
    for (int i = 0; i < 4; ++i) {
      if (!single_token(cols[1 + i])) fail(path, line_no, "empty or multi-token candidate");
      mcq.candidates[i] = cols[1 + i];
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        if (mcq.candidates[i] == mcq.candidates[j]) {
          fail(path, line_no, "duplicate candidate " + mcq.candidates[i]);
        }
      }
    }
    try {
      mcq.answer_idx = std::stoi(cols[5]);
    } catch (const std::exception&) {
      fail(path, line_no, "bad answer index");
    }
    if (mcq.answer_idx < 0 || mcq.answer_idx > 3) {
      fail(path, line_no, "answer index out of range 0..3");
    }
    inv.mcqs.push_back(std::move(mcq));
  }
  if (inv.mcqs.empty()) throw DataError(path + ": empty inventory");
  return inv;
}

AnalogyInventory parse_analogy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("analogy: cannot open " + path);
  AnalogyInventory inv;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 5) fail(path, line_no, "expected a b c d section");
    for (int i = 0; i < 4; ++i) {
      if (!single_token(cols[i])) fail(path, line_no, "word must be a single token");
    }
    AnalogyQuestion q;
    q.a = cols[0];
    q.b = cols[1];
    q.c = cols[2];
    q.d = cols[3];
    if (q.a == q.b || q.a == q.c || q.a == q.d || q.b == q.c || q.b == q.d || q.c == q.d) {
      fail(path, line_no, "the four words must be distinct");
    }
    if (cols[4] == "syntactic") {
      q.section = AnalogySection::syntactic;
    } else if (cols[4] == "semantic") {
      q.section = AnalogySection::semantic;
    } else {
      fail(path, line_no, "section must be syntactic or semantic");
    }
    inv.questions.push_back(std::move(q));
  }
  if (inv.questions.empty()) throw DataError(path + ": empty inventory");
  return inv;
}

CategorizationInventory parse_categorization(const std::string& path,
                                             CategorizationInventory::Kind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("categorization: cannot open " + path);
  CategorizationInventory inv;
  inv.kind = kind;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 2) fail(path, line_no, "expected category<TAB>word");
    if (cols[0].empty()) fail(path, line_no, "empty category name");
    if (!single_token(cols[1])) fail(path, line_no, "empty or multi-token word");
    auto& words = inv.categories[cols[0]];
    if (std::find(words.begin(), words.end(), cols[1]) != words.end()) {
      fail(path, line_no, "duplicate concept " + cols[1] + " in category " + cols[0]);
    }
    words.push_back(cols[1]);
  }
  if (inv.categories.size() < 2) {
    throw DataError(path + ": need at least 2 categories");
  }
  return inv;
}

void save_relatedness(const RelatednessInventory& inv, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("relatedness: cannot write " + path);
  for (const auto& p : inv.pairs) {
    out << p.w1 << '\t' << p.w2 << '\t' << to_string(p.label) << '\t'
        << (p.dev ? "dev" : "test") << '\n';
  }
}

void save_synonym(const SynonymInventory& inv, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("synonym: cannot write " + path);
  for (const auto& m : inv.mcqs) {
    out << m.target;
    for (const auto& c : m.candidates) out << '\t' << c;
    out << '\t' << m.answer_idx << '\n';
  }
}

void save_analogy(const AnalogyInventory& inv, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("analogy: cannot write " + path);
  for (const auto& q : inv.questions) {
    out << q.a << '\t' << q.b << '\t' << q.c << '\t' << q.d << '\t' << to_string(q.section)
        << '\n';
  }
}

void save_categorization(const CategorizationInventory& inv, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("categorization: cannot write " + path);
  for (const auto& [cat, words] : inv.categories) {
    for (const auto& w : words) out << cat << '\t' << w << '\n';
  }
}

}  // namespace embkit
