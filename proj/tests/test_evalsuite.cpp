#include "embkit/evalsuite.hpp"

#include <cmath>
#include <map>

#include "doctest.h"
#include "embkit/error.hpp"
#include "embkit/rng.hpp"
#include "testutil.hpp"

using namespace embkit;

namespace {

EmbeddingSet make_set(std::vector<std::string> words, std::vector<std::vector<float>> rows) {
  int dim = static_cast<int>(rows[0].size());
  std::vector<float> matrix;
  for (auto& r : rows) matrix.insert(matrix.end(), r.begin(), r.end());
  return EmbeddingSet(std::move(words), std::move(matrix), dim);
}

// Confusion-matrix oracle written independently of macro_f1.
double oracle_macro_f1(const std::vector<int>& gold, const std::vector<int>& pred,
                       int n_classes) {
  double total = 0;
  for (int c = 0; c < n_classes; ++c) {
    int tp = 0, pred_c = 0, gold_c = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
      pred_c += pred[i] == c;
      gold_c += gold[i] == c;
      tp += pred[i] == c && gold[i] == c;
    }
    double p = pred_c ? static_cast<double>(tp) / pred_c : 0.0;
    double r = gold_c ? static_cast<double>(tp) / gold_c : 0.0;
    total += (p + r) > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return total / n_classes;
}

// Majority-count purity oracle.
double oracle_purity(const std::vector<int>& clusters, const std::vector<int>& gold) {
  std::map<int, std::map<int, int>> table;
  for (size_t i = 0; i < clusters.size(); ++i) ++table[clusters[i]][gold[i]];
  int agree = 0;
  for (auto& [c, counts] : table) {
    int best = 0;
    for (auto& [g, n] : counts) best = std::max(best, n);
    agree += best;
  }
  return static_cast<double>(agree) / clusters.size();
}

RelatednessInventory pairs_of(const std::vector<std::tuple<std::string, std::string, RelLabel>>& v,
                              bool dev) {
  RelatednessInventory inv;
  for (const auto& [a, b, label] : v) inv.pairs.push_back({a, b, label, dev});
  return inv;
}

}  // namespace

TEST_SUITE("evalsuite") {

TEST_CASE("macro-F1 hand example") {
  std::vector<int> gold{0, 0, 1, 1, 2, 2};
  std::vector<int> pred{0, 1, 1, 1, 2, 2};
  // Hand confusion matrices: F1s are 2/3, 4/5, 1.
  CHECK(std::abs(macro_f1(gold, pred, 3) - (2.0 / 3.0 + 4.0 / 5.0 + 1.0) / 3.0) <= 1e-9);
  CHECK(std::abs(macro_f1(gold, pred, 3) - 37.0 / 45.0) <= 1e-9);
}

TEST_CASE("perfect classification scores exactly one") {
  std::vector<int> gold{0, 1, 2, 1, 0};
  CHECK(macro_f1(gold, gold, 3) == 1.0);
}

TEST_CASE("classes absent from gold and prediction contribute zero") {
  std::vector<int> gold{0, 0};
  std::vector<int> pred{0, 0};
  CHECK(macro_f1(gold, pred, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("macro-F1 matches an independent confusion-matrix oracle") {
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.below(20);
    int classes = 2 + static_cast<int>(rng.below(3));
    std::vector<int> gold(n), pred(n);
    for (auto& g : gold) g = static_cast<int>(rng.below(classes));
    for (auto& p : pred) p = static_cast<int>(rng.below(classes));
    CHECK(macro_f1(gold, pred, classes) ==
          doctest::Approx(oracle_macro_f1(gold, pred, classes)).epsilon(1e-12));
  }
}

TEST_CASE("purity hand example scores exactly 0.75") {
  std::vector<int> clusters{0, 0, 0, 1};
  std::vector<int> gold{0, 0, 1, 1};
  CHECK(purity(clusters, gold, 2, 2) == 0.75);
}

TEST_CASE("purity of replicated gold clusters is exactly one") {
  std::vector<int> clusters{1, 1, 0, 0, 2, 2};
  std::vector<int> gold{0, 0, 1, 1, 2, 2};
  CHECK(purity(clusters, gold, 3, 3) == 1.0);
}

TEST_CASE("purity matches a brute-force majority count on small instances") {
  Rng rng(83);
  for (int trial = 0; trial < 40; ++trial) {
    size_t n = 2 + rng.below(11);
    int k = 2 + static_cast<int>(rng.below(3));
    std::vector<int> clusters(n), gold(n);
    for (auto& c : clusters) c = static_cast<int>(rng.below(k));
    for (auto& g : gold) g = static_cast<int>(rng.below(k));
    CHECK(purity(clusters, gold, k, k) ==
          doctest::Approx(oracle_purity(clusters, gold)).epsilon(1e-12));
  }
}

TEST_CASE("k-means objective never increases across Lloyd iterations") {
  Rng rng(91);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 30; ++i) {
    points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  }
  KmeansResult km = kmeans(points, 4, 17, 1);
  REQUIRE(!km.objective_trace.empty());
  for (size_t i = 1; i < km.objective_trace.size(); ++i) {
    CHECK(km.objective_trace[i] <= km.objective_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("k-means recovers well-separated clusters") {
  Rng rng(101);
  std::vector<std::vector<double>> points;
  std::vector<int> gold;
  double centers[3][2] = {{10, 0}, {-10, 0}, {0, 10}};
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 5; ++i) {
      points.push_back({centers[c][0] + rng.uniform(-0.1, 0.1),
                        centers[c][1] + rng.uniform(-0.1, 0.1)});
      gold.push_back(c);
    }
  }
  KmeansResult km = kmeans(points, 3, 7);
  CHECK(purity(km.assignment, gold, 3, 3) == 1.0);
}

TEST_CASE("threshold tuning on a separable dev set reaches macro-F1 one") {
  // Pairs engineered so SYNSET ~ 0.9, VARGA ~ 0.5, UNRELATED ~ 0.1.
  auto mk = [](double target) {
    return std::vector<float>{static_cast<float>(target),
                              static_cast<float>(std::sqrt(1.0 - target * target))};
  };
  auto set = make_set({"q", "s", "v", "u"}, {{1.0f, 0.0f}, mk(0.9), mk(0.5), mk(0.1)});
  RelatednessInventory dev = pairs_of({{"q", "s", RelLabel::SYNSET},
                                       {"q", "v", RelLabel::VARGA},
                                       {"q", "u", RelLabel::UNRELATED}},
                                      true);
  ThresholdPair t = tune_thresholds(set, dev);
  CHECK(t.t_hi > 0.5);
  CHECK(t.t_hi <= 0.9);
  CHECK(t.t_lo > 0.1);
  CHECK(t.t_lo <= 0.5);
  EvalReport report = eval_relatedness(set, t, dev);
  CHECK(report.value == 1.0);
}

TEST_CASE("identical similarities degenerate to the best single class") {
  // Every pair has cosine 1, so any thresholds give one predicted class;
  // SYNSET is the majority, and tie-breaking lands on (-1, -1).
  auto set = make_set({"a", "b"}, {{1.0f, 0.0f}, {1.0f, 0.0f}});
  RelatednessInventory dev = pairs_of({{"a", "b", RelLabel::SYNSET},
                                       {"b", "a", RelLabel::SYNSET},
                                       {"a", "b", RelLabel::VARGA},
                                       {"a", "b", RelLabel::UNRELATED}},
                                      true);
  ThresholdPair t = tune_thresholds(set, dev);
  CHECK(t.t_lo == -1.0);
  CHECK(t.t_hi == -1.0);
  // All -> SYNSET: F1 = 2*2/(4+2) = 2/3; macro = 2/9.
  EvalReport report = eval_relatedness(set, t, dev);
  CHECK(report.value == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("rescaling vectors leaves the tuned macro-F1 unchanged") {
  Rng rng(111);
  std::vector<std::string> words;
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < 20; ++i) {
    words.push_back("w" + std::to_string(i));
    std::vector<float> r(6);
    for (auto& x : r) x = static_cast<float>(rng.uniform(-1, 1));
    rows.push_back(r);
  }
  std::vector<std::tuple<std::string, std::string, RelLabel>> pairs;
  for (int i = 0; i < 19; ++i) {
    pairs.emplace_back(words[i], words[i + 1], static_cast<RelLabel>(i % 3));
  }
  RelatednessInventory dev = pairs_of(pairs, true);
  auto base = make_set(words, rows);
  auto scaled = make_set(words, rows);
  scaled.scale(4.0f);
  ThresholdPair t1 = tune_thresholds(base, dev);
  ThresholdPair t2 = tune_thresholds(scaled, dev);
  CHECK(eval_relatedness(base, t1, dev).value == eval_relatedness(scaled, t2, dev).value);
}

TEST_CASE("synonym detection picks the argmax candidate") {
  auto set = make_set({"t", "good", "d1", "d2", "d3"},
                      {{1.0f, 0.0f, 0.0f},
                       {1.0f, 0.0f, 0.0f},
                       {0.0f, 1.0f, 0.0f},
                       {0.0f, 0.0f, 1.0f},
                       {0.0f, -1.0f, 0.0f}});
  SynonymInventory inv;
  inv.mcqs.push_back({"t", {"d1", "good", "d2", "d3"}, 1});
  EvalReport report = eval_synonym(set, inv);
  CHECK(report.value == 1.0);
  CHECK(report.n_items == 1);
  CHECK(report.oov_count == 0);
}

TEST_CASE("all-OOV questions fall to the first candidate by the tie rule") {
  auto set = make_set({"filler"}, {{1.0f, 0.0f}});
  SynonymInventory inv;
  inv.mcqs.push_back({"t", {"c1", "c2", "c3", "c4"}, 0});  // answer at index 0
  inv.mcqs.push_back({"t", {"c1", "c2", "c3", "c4"}, 2});  // answer elsewhere
  EvalReport report = eval_synonym(set, inv);
  CHECK(report.value == 0.5);
  CHECK(report.oov_count == 10);
}

TEST_CASE("analogy arithmetic finds d when v(d) = v(b) - v(a) + v(c)") {
  // v(d) = (0,1,1) exactly; distractor far away.
  auto set = make_set({"a", "b", "c", "d", "e"},
                      {{1.0f, 0.0f, 0.0f},
                       {0.0f, 1.0f, 0.0f},
                       {1.0f, 0.0f, 1.0f},
                       {0.0f, 1.0f, 1.0f},
                       {-1.0f, -1.0f, -1.0f}});
  AnalogyInventory inv;
  inv.questions.push_back({"a", "b", "c", "d", AnalogySection::syntactic});
  EvalReport report = eval_analogy(set, inv);
  CHECK(report.value == 1.0);
  CHECK(report.breakdown[0].second == 1.0);  // syntactic
}

TEST_CASE("input words are excluded from the candidate pool") {
  // d's vector equals b's; without the exclusion b (lower id) would win.
  auto set = make_set({"a", "b", "c", "d", "e"},
                      {{1.0f, 0.0f, 0.0f},
                       {0.0f, 1.0f, 0.0f},
                       {1.0f, 0.0f, 0.0f},
                       {0.0f, 1.0f, 0.0f},
                       {0.3f, 0.3f, 0.9f}});
  AnalogyInventory inv;
  inv.questions.push_back({"a", "b", "c", "d", AnalogySection::semantic});
  EvalReport report = eval_analogy(set, inv);
  CHECK(report.value == 1.0);
  CHECK(report.breakdown[1].second == 1.0);  // semantic
}

TEST_CASE("accuracy is scored separately per section") {
  auto set = make_set({"a", "b", "c", "d", "x", "y"},
                      {{1.0f, 0.0f, 0.0f},
                       {0.0f, 1.0f, 0.0f},
                       {1.0f, 0.0f, 1.0f},
                       {0.0f, 1.0f, 1.0f},
                       {0.9f, 0.9f, -0.9f},
                       {-0.5f, 0.4f, 0.2f}});
  AnalogyInventory inv;
  inv.questions.push_back({"a", "b", "c", "d", AnalogySection::syntactic});  // correct
  inv.questions.push_back({"a", "b", "c", "x", AnalogySection::semantic});   // d wins, not x
  EvalReport report = eval_analogy(set, inv);
  CHECK(report.breakdown[0].second == 1.0);
  CHECK(report.breakdown[1].second == 0.0);
  CHECK(report.value == 0.5);
}

TEST_CASE("OOV inventory words join the pool as composed vectors") {
  auto set = make_set({"a", "b", "c", "e"},
                      {{1.0f, 0.0f}, {0.0f, 1.0f}, {1.0f, 1.0f}, {0.0f, 1.0f}});
  AnalogyInventory inv;
  // d is OOV; under the zero_vector rule its pool vector is zero, so it
  // loses to e, but the run must not crash and must count OOV.
  inv.questions.push_back({"a", "b", "c", "d", AnalogySection::syntactic});
  EvalReport report = eval_analogy(set, inv);
  CHECK(report.value == 0.0);
  CHECK(report.oov_count == 1);
}

TEST_CASE("categorization of separable concepts reaches purity one") {
  Rng rng(121);
  std::vector<std::string> words;
  std::vector<std::vector<float>> rows;
  CategorizationInventory inv;
  inv.kind = CategorizationInventory::Kind::semantic;
  double centers[3][3] = {{5, 0, 0}, {0, 5, 0}, {0, 0, 5}};
  for (int c = 0; c < 3; ++c) {
    std::string cat = "cat" + std::to_string(c);
    for (int i = 0; i < 4; ++i) {
      std::string w = cat + "_w" + std::to_string(i);
      words.push_back(w);
      rows.push_back({static_cast<float>(centers[c][0] + rng.uniform(-0.2, 0.2)),
                      static_cast<float>(centers[c][1] + rng.uniform(-0.2, 0.2)),
                      static_cast<float>(centers[c][2] + rng.uniform(-0.2, 0.2))});
      inv.categories[cat].push_back(w);
    }
  }
  auto set = make_set(words, rows);
  EvalReport report = eval_categorization(set, inv, 5);
  CHECK(report.value == 1.0);
  CHECK(report.task == "categorization-sem");
  CHECK(report.n_items == 12);
}

TEST_CASE("run_all produces one report per provided inventory") {
  auto set = make_set({"a", "b", "c", "d"},
                      {{1.0f, 0.0f}, {0.9f, 0.1f}, {0.0f, 1.0f}, {0.5f, 0.5f}});
  RelatednessInventory rel = pairs_of({{"a", "b", RelLabel::SYNSET},
                                       {"a", "c", RelLabel::UNRELATED},
                                       {"b", "c", RelLabel::VARGA}},
                                      true);
  rel.pairs.push_back({"a", "b", RelLabel::SYNSET, false});
  SynonymInventory syn;
  syn.mcqs.push_back({"a", {"b", "c", "d", "x"}, 0});
  AnalogyInventory ana;
  ana.questions.push_back({"a", "b", "c", "d", AnalogySection::syntactic});
  CategorizationInventory cat_syn, cat_sem;
  cat_syn.kind = CategorizationInventory::Kind::syntactic;
  cat_syn.categories = {{"g1", {"a", "b"}}, {"g2", {"c", "d"}}};
  cat_sem = cat_syn;
  cat_sem.kind = CategorizationInventory::Kind::semantic;

  EvalInputs inputs;
  inputs.relatedness = &rel;
  inputs.synonym = &syn;
  inputs.analogy = &ana;
  inputs.categorization_syn = &cat_syn;
  inputs.categorization_sem = &cat_sem;
  inputs.seed = 3;
  auto reports = run_all(set, inputs);
  CHECK(reports.size() == 5);
  for (const auto& r : reports) {
    CHECK(r.value >= 0.0);
    CHECK(r.value <= 1.0);
  }
  // Six metric cells in the rendered table row; the header's "f-score"
  // carries the only dash when nothing is absent.
  std::string table = render_table({{"m", reports}});
  CHECK(table.find("Relatedness") != std::string::npos);
  size_t full_dashes = 0;
  for (char ch : table) full_dashes += ch == '-';
  CHECK(full_dashes == 1);

  EvalInputs only_analogy;
  only_analogy.analogy = &ana;
  auto partial = run_all(set, only_analogy);
  CHECK(partial.size() == 1);
  std::string table2 = render_table({{"m", partial}});
  // Four absent cells: relatedness, two purity columns, similarity.
  size_t dashes = 0;
  for (char ch : table2) dashes += ch == '-';
  CHECK(dashes == 5);
}

TEST_CASE("rescaling all vectors by 7.3 leaves every report value bit-identical") {
  Rng rng(131);
  std::vector<std::string> words;
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < 30; ++i) {
    words.push_back("w" + std::to_string(i));
    std::vector<float> r(8);
    for (auto& x : r) x = static_cast<float>(rng.uniform(-1, 1));
    rows.push_back(r);
  }
  RelatednessInventory rel;
  for (int i = 0; i < 28; ++i) {
    rel.pairs.push_back(
        {words[i], words[i + 1], static_cast<RelLabel>(i % 3), i % 2 == 0});
  }
  SynonymInventory syn;
  for (int i = 0; i + 5 < 30; i += 5) {
    syn.mcqs.push_back({words[i], {words[i + 1], words[i + 2], words[i + 3], words[i + 4]},
                        static_cast<int>(i / 5) % 4});
  }
  AnalogyInventory ana;
  for (int i = 0; i + 4 < 30; i += 4) {
    ana.questions.push_back({words[i], words[i + 1], words[i + 2], words[i + 3],
                             i % 8 ? AnalogySection::semantic : AnalogySection::syntactic});
  }
  CategorizationInventory cat;
  cat.kind = CategorizationInventory::Kind::semantic;
  for (int i = 0; i < 30; ++i) cat.categories["c" + std::to_string(i % 3)].push_back(words[i]);

  EvalInputs inputs;
  inputs.relatedness = &rel;
  inputs.synonym = &syn;
  inputs.analogy = &ana;
  inputs.categorization_sem = &cat;
  inputs.seed = 7;

  auto base = make_set(words, rows);
  auto scaled = make_set(words, rows);
  scaled.scale(7.3f);
  auto r1 = run_all(base, inputs);
  auto r2 = run_all(scaled, inputs);
  REQUIRE(r1.size() == r2.size());
  for (size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].value == r2[i].value);
    REQUIRE(r1[i].breakdown.size() == r2[i].breakdown.size());
    for (size_t j = 0; j < r1[i].breakdown.size(); ++j) {
      CHECK(r1[i].breakdown[j].second == r2[i].breakdown[j].second);
    }
  }
}

TEST_CASE("table formatting scales f-score and accuracy by 100") {
  EvalReport rel{"relatedness", "macro_f1", 0.309, {}, 0, 10};
  EvalReport cat{"categorization-syn", "purity", 0.22, {}, 0, 10};
  EvalReport sim{"similarity", "accuracy", 0.3734, {}, 0, 10};
  EvalReport ana{"analogy", "accuracy", 0.3, {{"syntactic", 0.568}, {"semantic", 0.327}}, 0, 10};
  std::string table = render_table({{"model1", {rel, cat, sim, ana}}});
  CHECK(table.find("30.90") != std::string::npos);
  CHECK(table.find("0.22") != std::string::npos);
  CHECK(table.find("37.34") != std::string::npos);
  CHECK(table.find("56.80") != std::string::npos);
  CHECK(table.find("32.70") != std::string::npos);

  std::string tsv = render_tsv({{"model1", {rel, cat, sim, ana}}});
  CHECK(tsv.find("model1\trelatedness\tmacro_f1\t0.309000\t0\t10") != std::string::npos);
  CHECK(tsv.find("analogy-syn") != std::string::npos);
}

}  // TEST_SUITE
