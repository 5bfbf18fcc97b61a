#include "embkit/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "embkit/error.hpp"
#include "embkit/rng.hpp"

namespace embkit {

namespace {

std::string fmt(double v, bool scale100) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", scale100 ? v * 100.0 : v);
  return buf;
}

int classify(double sim, const ThresholdPair& t) {
  if (sim >= t.t_hi) return 0;  // SYNSET
  if (sim >= t.t_lo) return 1;  // VARGA
  return 2;                     // UNRELATED
}

double l2norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double macro_f1(std::span<const int> gold, std::span<const int> pred, int n_classes) {
  if (gold.size() != pred.size()) throw ConfigError("macro_f1: size mismatch");
  std::vector<double> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) {
      tp[gold[i]] += 1;
    } else {
      fp[pred[i]] += 1;
      fn[gold[i]] += 1;
    }
  }
  double sum = 0;
  for (int c = 0; c < n_classes; ++c) {
    double precision = tp[c] + fp[c] > 0 ? tp[c] / (tp[c] + fp[c]) : 0;
    double recall = tp[c] + fn[c] > 0 ? tp[c] / (tp[c] + fn[c]) : 0;
    double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
    sum += f1;
  }
  return sum / n_classes;
}

double purity(std::span<const int> clusters, std::span<const int> gold, int k_clusters,
              int n_categories) {
  if (clusters.size() != gold.size()) throw ConfigError("purity: size mismatch");
  if (clusters.empty()) return 0;
  std::vector<std::vector<int>> counts(k_clusters, std::vector<int>(n_categories, 0));
  for (size_t i = 0; i < clusters.size(); ++i) ++counts[clusters[i]][gold[i]];
  long long agree = 0;
  for (int c = 0; c < k_clusters; ++c) {
    agree += *std::max_element(counts[c].begin(), counts[c].end());
  }
  return static_cast<double>(agree) / static_cast<double>(clusters.size());
}

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

KmeansResult kmeans_once(const std::vector<std::vector<double>>& points, int k, Rng& rng,
                         int max_iters) {
  size_t n = points.size();
  size_t dim = points[0].size();

  // k-means++ seeding.
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  centers.push_back(points[rng.below(n)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0;
    for (size_t i = 0; i < n; ++i) {
      double best = sqdist(points[i], centers[0]);
      for (size_t c = 1; c < centers.size(); ++c) {
        best = std::min(best, sqdist(points[i], centers[c]));
      }
      d2[i] = best;
      total += best;
    }
    size_t pick;
    if (total <= 0) {
      pick = rng.below(n);  // all points coincide with a center
    } else {
      double r = rng.unit() * total;
      double acc = 0;
      pick = n - 1;
      for (size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(points[pick]);
  }

  KmeansResult res;
  res.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = sqdist(points[i], centers[0]);
      for (int c = 1; c < k; ++c) {
        double dd = sqdist(points[i], centers[c]);
        if (dd < bd) {
          bd = dd;
          best = c;
        }
      }
      if (res.assignment[i] != best) {
        res.assignment[i] = best;
        changed = true;
      }
    }
    // Re-seat empty clusters with the point farthest from its center.
    std::vector<int> sizes(k, 0);
    for (int a : res.assignment) ++sizes[a];
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      size_t far = 0;
      double fd = -1;
      for (size_t i = 0; i < n; ++i) {
        if (sizes[res.assignment[i]] <= 1) continue;
        double dd = sqdist(points[i], centers[res.assignment[i]]);
        if (dd > fd) {
          fd = dd;
          far = i;
        }
      }
      --sizes[res.assignment[far]];
      res.assignment[far] = c;
      sizes[c] = 1;
      changed = true;
    }
    for (int c = 0; c < k; ++c) {
      std::fill(centers[c].begin(), centers[c].end(), 0.0);
    }
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < dim; ++j) centers[res.assignment[i]][j] += points[i][j];
    }
    for (int c = 0; c < k; ++c) {
      for (size_t j = 0; j < dim; ++j) centers[c][j] /= sizes[c];
    }
    double obj = 0;
    for (size_t i = 0; i < n; ++i) obj += sqdist(points[i], centers[res.assignment[i]]);
    res.objective_trace.push_back(obj);
    res.objective = obj;
    if (!changed) break;
  }
  return res;
}

}  // namespace

KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, uint64_t seed,
                    int restarts, int max_iters) {
  if (points.empty()) throw ConfigError("kmeans: no points");
  if (k < 1 || k > static_cast<int>(points.size())) {
    throw ConfigError("kmeans: k out of range");
  }
  KmeansResult best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(Rng::derive(seed, 0x632a, static_cast<uint64_t>(r) + 1));
    KmeansResult run = kmeans_once(points, k, rng, max_iters);
    if (!have || run.objective < best.objective) {
      best = std::move(run);
      have = true;
    }
  }
  return best;
}

ThresholdPair tune_thresholds(const EmbeddingSet& set, const RelatednessInventory& dev) {
  if (dev.pairs.empty()) throw ConfigError("tune_thresholds: empty dev set");
  size_t n = dev.pairs.size();
  std::vector<double> sims(n);
  std::vector<int> gold(n);
  for (size_t i = 0; i < n; ++i) {
    auto [v1, oov1] = set.vector_of(dev.pairs[i].w1);
    auto [v2, oov2] = set.vector_of(dev.pairs[i].w2);
    sims[i] = cosine(std::span<const float>(v1), std::span<const float>(v2));
    gold[i] = static_cast<int>(dev.pairs[i].label);
  }
  ThresholdPair best{-1.0, -1.0};
  double best_f1 = -1;
  std::vector<int> pred(n);
  for (int lo = -100; lo <= 100; ++lo) {
    for (int hi = lo; hi <= 100; ++hi) {
      ThresholdPair t{lo / 100.0, hi / 100.0};
      for (size_t i = 0; i < n; ++i) pred[i] = classify(sims[i], t);
      double f1 = macro_f1(gold, pred, 3);
      bool better = f1 > best_f1;
      if (!better && f1 == best_f1) {
        double w_new = t.t_hi - t.t_lo, w_old = best.t_hi - best.t_lo;
        better = w_new < w_old || (w_new == w_old && t.t_lo < best.t_lo);
      }
      if (better) {
        best_f1 = f1;
        best = t;
      }
    }
  }
  return best;
}

EvalReport eval_relatedness(const EmbeddingSet& set, ThresholdPair thresholds,
                            const RelatednessInventory& test,
                            std::vector<std::string>* per_item) {
  EvalReport report;
  report.task = "relatedness";
  report.metric = "macro_f1";
  size_t n = test.pairs.size();
  std::vector<int> gold(n), pred(n);
  for (size_t i = 0; i < n; ++i) {
    auto [v1, oov1] = set.vector_of(test.pairs[i].w1);
    auto [v2, oov2] = set.vector_of(test.pairs[i].w2);
    report.oov_count += static_cast<uint64_t>(oov1) + static_cast<uint64_t>(oov2);
    double sim = cosine(std::span<const float>(v1), std::span<const float>(v2));
    gold[i] = static_cast<int>(test.pairs[i].label);
    pred[i] = classify(sim, thresholds);
    if (per_item) {
      per_item->push_back("relatedness\t" + test.pairs[i].w1 + "\t" + test.pairs[i].w2 + "\t" +
                          to_string(test.pairs[i].label) + "\t" +
                          to_string(static_cast<RelLabel>(pred[i])));
    }
  }
  report.n_items = n;
  report.value = macro_f1(gold, pred, 3);
  for (int c = 0; c < 3; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < n; ++i) {
      if (gold[i] == c && pred[i] == c) ++tp;
      if (gold[i] != c && pred[i] == c) ++fp;
      if (gold[i] == c && pred[i] != c) ++fn;
    }
    double precision = tp + fp > 0 ? tp / (tp + fp) : 0;
    double recall = tp + fn > 0 ? tp / (tp + fn) : 0;
    double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0;
    report.breakdown.emplace_back(to_string(static_cast<RelLabel>(c)), f1);
  }
  return report;
}

EvalReport eval_synonym(const EmbeddingSet& set, const SynonymInventory& inv,
                        std::vector<std::string>* per_item) {
  EvalReport report;
  report.task = "similarity";
  report.metric = "accuracy";
  uint64_t correct = 0;
  for (const auto& mcq : inv.mcqs) {
    auto [tv, toov] = set.vector_of(mcq.target);
    report.oov_count += toov;
    int best = 0;
    double best_sim = -2;
    for (int i = 0; i < 4; ++i) {
      auto [cv, coov] = set.vector_of(mcq.candidates[i]);
      report.oov_count += coov;
      double sim = cosine(std::span<const float>(tv), std::span<const float>(cv));
      if (sim > best_sim) {
        best_sim = sim;
        best = i;
      }
    }
    if (best == mcq.answer_idx) ++correct;
    if (per_item) {
      per_item->push_back("similarity\t" + mcq.target + "\t" + std::to_string(mcq.answer_idx) +
                          "\t" + std::to_string(best));
    }
  }
  report.n_items = inv.mcqs.size();
  report.value = report.n_items ? static_cast<double>(correct) / report.n_items : 0;
  return report;
}

EvalReport eval_analogy(const EmbeddingSet& set, const AnalogyInventory& inv,
                        std::vector<std::string>* per_item) {
  EvalReport report;
  report.task = "analogy";
  report.metric = "accuracy";

  // Candidate pool: set vocabulary plus composed vectors for inventory
  // words missing from it, in first-appearance order.
  std::vector<std::string> pool_words(set.words());
  std::vector<std::vector<float>> extra_vectors;
  std::unordered_map<std::string, int32_t> pool_index;
  for (size_t i = 0; i < pool_words.size(); ++i) {
    pool_index.emplace(pool_words[i], static_cast<int32_t>(i));
  }
  auto ensure_pooled = [&](const std::string& w) {
    if (pool_index.count(w)) return;
    auto [v, oov] = set.vector_of(w);
    (void)oov;
    pool_index.emplace(w, static_cast<int32_t>(pool_words.size()));
    pool_words.push_back(w);
    extra_vectors.push_back(std::move(v));
  };
  for (const auto& q : inv.questions) {
    ensure_pooled(q.a);
    ensure_pooled(q.b);
    ensure_pooled(q.c);
    ensure_pooled(q.d);
  }
  auto pool_row = [&](int32_t id) -> std::span<const float> {
    if (id < static_cast<int32_t>(set.size())) return set.row(id);
    return extra_vectors[id - set.size()];
  };

  uint64_t correct_syn = 0, n_syn = 0, correct_sem = 0, n_sem = 0;
  std::vector<float> x(set.dim());
  for (const auto& q : inv.questions) {
    auto [va, oa] = set.vector_of(q.a);
    auto [vb, ob] = set.vector_of(q.b);
    auto [vc, oc] = set.vector_of(q.c);
    report.oov_count += static_cast<uint64_t>(oa) + ob + oc + set.vector_of(q.d).second;
    for (int d = 0; d < set.dim(); ++d) x[d] = vb[d] - va[d] + vc[d];

    int32_t exclude[3] = {pool_index[q.a], pool_index[q.b], pool_index[q.c]};
    int32_t best_id = -1;
    double best_sim = -2;
    for (int32_t id = 0; id < static_cast<int32_t>(pool_words.size()); ++id) {
      if (id == exclude[0] || id == exclude[1] || id == exclude[2]) continue;
      double sim = cosine(std::span<const float>(x), pool_row(id));
      if (sim > best_sim) {
        best_sim = sim;
        best_id = id;
      }
    }
    bool ok = best_id >= 0 && pool_words[best_id] == q.d;
    if (q.section == AnalogySection::syntactic) {
      ++n_syn;
      correct_syn += ok;
    } else {
      ++n_sem;
      correct_sem += ok;
    }
    if (per_item) {
      per_item->push_back("analogy\t" + q.a + "\t" + q.b + "\t" + q.c + "\t" + q.d + "\t" +
                          to_string(q.section) + "\t" +
                          (best_id >= 0 ? pool_words[best_id] : std::string("-")));
    }
  }
  report.n_items = inv.questions.size();
  uint64_t correct = correct_syn + correct_sem;
  report.value = report.n_items ? static_cast<double>(correct) / report.n_items : 0;
  report.breakdown.emplace_back("syntactic",
                                n_syn ? static_cast<double>(correct_syn) / n_syn : 0.0);
  report.breakdown.emplace_back("semantic",
                                n_sem ? static_cast<double>(correct_sem) / n_sem : 0.0);
  return report;
}

EvalReport eval_categorization(const EmbeddingSet& set, const CategorizationInventory& inv,
                               uint64_t seed, std::vector<std::string>* per_item) {
  EvalReport report;
  report.task = inv.kind == CategorizationInventory::Kind::syntactic ? "categorization-syn"
                                                                     : "categorization-sem";
  report.metric = "purity";
  if (inv.categories.size() < 2) throw ConfigError("categorization: need >= 2 categories");

  std::vector<std::string> concepts;
  std::vector<int> gold;
  int cat_id = 0;
  std::vector<std::string> cat_names;
  for (const auto& [cat, words] : inv.categories) {
    for (const auto& w : words) {
      concepts.push_back(w);
      gold.push_back(cat_id);
    }
    cat_names.push_back(cat);
    ++cat_id;
  }

  std::vector<std::vector<double>> points;
  points.reserve(concepts.size());
  for (const auto& w : concepts) {
    auto [v, oov] = set.vector_of(w);
    report.oov_count += oov;
    std::vector<double> p(v.begin(), v.end());
    double norm = l2norm(p);
    if (norm > 0) {
      for (auto& x : p) x /= norm;
    }
    points.push_back(std::move(p));
  }
  // Exact duplicates make the clustering degenerate; proceed but warn.
  {
    auto sorted = points;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      std::cerr << "warning: duplicate concept vectors in " << report.task << "\n";
    }
  }

  int k = static_cast<int>(inv.categories.size());
  KmeansResult km = kmeans(points, k, seed);
  report.n_items = concepts.size();
  report.value = purity(km.assignment, gold, k, k);
  if (per_item) {
    for (size_t i = 0; i < concepts.size(); ++i) {
      per_item->push_back(report.task + "\t" + concepts[i] + "\t" + cat_names[gold[i]] + "\t" +
                          std::to_string(km.assignment[i]));
    }
  }
  return report;
}

std::vector<EvalReport> run_all(const EmbeddingSet& set, const EvalInputs& inputs) {
  std::vector<EvalReport> reports;
  if (inputs.relatedness) {
    ThresholdPair t = tune_thresholds(set, inputs.relatedness->dev_split());
    reports.push_back(
        eval_relatedness(set, t, inputs.relatedness->test_split(), inputs.per_item));
  }
  if (inputs.categorization_syn) {
    reports.push_back(
        eval_categorization(set, *inputs.categorization_syn, inputs.seed, inputs.per_item));
  }
  if (inputs.categorization_sem) {
    reports.push_back(
        eval_categorization(set, *inputs.categorization_sem, inputs.seed, inputs.per_item));
  }
  if (inputs.synonym) {
    reports.push_back(eval_synonym(set, *inputs.synonym, inputs.per_item));
  }
  if (inputs.analogy) {
    reports.push_back(eval_analogy(set, *inputs.analogy, inputs.per_item));
  }
  return reports;
}

namespace {

// The six metric cells of one model row, "-" when absent.
std::vector<std::string> row_cells(const ModelRow& row) {
  std::string rel = "-", cat_syn = "-", cat_sem = "-", sim = "-", ana_syn = "-", ana_sem = "-";
  for (const auto& r : row.reports) {
    if (r.task == "relatedness") {
      rel = fmt(r.value, true);
    } else if (r.task == "categorization-syn") {
      cat_syn = fmt(r.value, false);
    } else if (r.task == "categorization-sem") {
      cat_sem = fmt(r.value, false);
    } else if (r.task == "similarity") {
      sim = fmt(r.value, true);
    } else if (r.task == "analogy") {
      for (const auto& [name, v] : r.breakdown) {
        if (name == "syntactic") ana_syn = fmt(v, true);
        if (name == "semantic") ana_sem = fmt(v, true);
      }
    }
  }
  return {rel, cat_syn, cat_sem, sim, ana_syn, ana_sem};
}

}  // namespace

std::string render_table(const std::vector<ModelRow>& rows) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"Model", "Relatedness", "Categorization", "", "Similarity", "Analogy", ""});
  table.push_back({"", "f-score", "syn", "sem", "acc", "syn", "sem"});
  for (const auto& row : rows) {
    auto cells = row_cells(row);
    cells.insert(cells.begin(), row.name);
    table.push_back(cells);
  }
  std::vector<size_t> widths(7, 0);
  for (const auto& r : table) {
    for (size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
  }
  std::ostringstream out;
  for (const auto& r : table) {
    for (size_t c = 0; c < r.size(); ++c) {
      out << r[c] << std::string(widths[c] - r[c].size() + (c + 1 < r.size() ? 2 : 0), ' ');
    }
    out << '\n';
  }
  return out.str();
}

std::string render_tsv(const std::vector<ModelRow>& rows) {
  std::ostringstream out;
  out << "model\ttask\tmetric\tvalue\toov_count\tn_items\n";
  char buf[64];
  for (const auto& row : rows) {
    for (const auto& r : row.reports) {
      if (r.task == "analogy") {
        for (const auto& [name, v] : r.breakdown) {
          std::snprintf(buf, sizeof(buf), "%.6f", v);
          out << row.name << "\tanalogy-" << (name == "syntactic" ? "syn" : "sem")
              << "\taccuracy\t" << buf << '\t' << r.oov_count << '\t' << r.n_items << '\n';
        }
        continue;
      }
      std::snprintf(buf, sizeof(buf), "%.6f", r.value);
      out << row.name << '\t' << r.task << '\t' << r.metric << '\t' << buf << '\t'
          << r.oov_count << '\t' << r.n_items << '\n';
    }
  }
  return out.str();
}

}  // namespace embkit
