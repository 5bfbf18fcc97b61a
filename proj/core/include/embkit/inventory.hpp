#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace embkit {

// Thesaurus-style lexicon: synonymous words grouped into synsets, synsets
// grouped into thematically related vargas. A word may repeat across
// synsets (polysemy) but not within one.
struct Synset {
  std::string varga;
  std::string synset_id;
  std::vector<std::string> words;
};

struct SynsetLexicon {
  std::vector<Synset> synsets;
};

// TSV: varga<TAB>synset_id<TAB>word
SynsetLexicon load_lexicon(const std::string& path);

enum class RelLabel { SYNSET, VARGA, UNRELATED };
const char* to_string(RelLabel label);
RelLabel rel_label_from(const std::string& s);  // throws DataError

struct RelatednessPair {
  std::string w1, w2;
  RelLabel label;
  bool dev;
};

struct RelatednessInventory {
  std::vector<RelatednessPair> pairs;
  RelatednessInventory dev_split() const;
  RelatednessInventory test_split() const;
};

// Samples n_total/3 pairs per class (same synset / same varga different
// synset / different varga), shuffles, and marks the first dev_fraction
// as the dev split. Polysemous words get one uniformly sampled membership.
RelatednessInventory build_relatedness(const SynsetLexicon& lex, int n_total,
                                       double dev_fraction, uint64_t seed);

struct SynonymMcq {
  std::string target;
  std::array<std::string, 4> candidates;
  int answer_idx;  // 0-based
};

struct SynonymInventory {
  std::vector<SynonymMcq> mcqs;
  int skipped = 0;  // synsets skipped for lack of distractors
};

// One MCQ per multi-word synset: target and answer from the synset, three
// distractors from the same varga outside it.
SynonymInventory build_synonym_mcqs(const SynsetLexicon& lex, uint64_t seed);

// Grid of inflected forms of one family: forms[lemma][cell], empty string
// for a missing cell.
struct ParadigmTable {
  std::string family;
  std::vector<std::string> lemmas;
  std::vector<std::string> cells;
  std::vector<std::vector<std::string>> forms;
};

// TSV: family<TAB>lemma<TAB>cell<TAB>form
std::vector<ParadigmTable> load_paradigms(const std::string& path);

struct RelationPairs {
  std::string relation;
  std::vector<std::pair<std::string, std::string>> pairs;
};

// TSV: relation<TAB>word1<TAB>word2
std::vector<RelationPairs> load_relations(const std::string& path);

enum class AnalogySection { syntactic, semantic };
const char* to_string(AnalogySection section);

struct AnalogyQuestion {
  std::string a, b, c, d;
  AnalogySection section;
};

struct AnalogyInventory {
  std::vector<AnalogyQuestion> questions;
};

// Syntactic: lemma pairs of one family at one cell. Semantic: pairs of
// related pairs within one relation. Questions with missing forms or
// repeated words are skipped.
AnalogyInventory build_analogy(const std::vector<ParadigmTable>& paradigms,
                               const std::vector<RelationPairs>& relations);

struct CategorizationInventory {
  enum class Kind { semantic, syntactic };
  Kind kind = Kind::semantic;
  // category name -> concept words, iterated in name order
  std::map<std::string, std::vector<std::string>> categories;
};

// TSV formats (also written by the save_* functions):
//   relatedness:    word1 word2 label split
//   synonym:        target c1 c2 c3 c4 answer_idx
//   analogy:        a b c d section
//   categorization: category word
RelatednessInventory parse_relatedness(const std::string& path);
SynonymInventory parse_synonym(const std::string& path);
AnalogyInventory parse_analogy(const std::string& path);
CategorizationInventory parse_categorization(const std::string& path,
                                             CategorizationInventory::Kind kind);

void save_relatedness(const RelatednessInventory& inv, const std::string& path);
void save_synonym(const SynonymInventory& inv, const std::string& path);
void save_analogy(const AnalogyInventory& inv, const std::string& path);
void save_categorization(const CategorizationInventory& inv, const std::string& path);

}  // namespace embkit
