#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embkit/embstore.hpp"
#include "embkit/inventory.hpp"

namespace embkit {

struct ThresholdPair {
  double t_lo = -1.0;
  double t_hi = -1.0;
};

struct EvalReport {
  std::string task;    // relatedness | similarity | analogy | categorization-syn/-sem
  std::string metric;  // macro_f1 | accuracy | purity
  double value = 0;    // always in [0, 1]; scaling happens at render time
  std::vector<std::pair<std::string, double>> breakdown;
  uint64_t oov_count = 0;
  uint64_t n_items = 0;
};

// Unweighted mean of per-class F1; classes absent from both gold and
// prediction contribute 0.
double macro_f1(std::span<const int> gold, std::span<const int> pred, int n_classes);

// Fraction of points that belong to their cluster's majority gold category.
double purity(std::span<const int> clusters, std::span<const int> gold, int k_clusters,
              int n_categories);

struct KmeansResult {
  std::vector<int> assignment;
  double objective = 0;
  std::vector<double> objective_trace;  // per Lloyd iteration of the kept run
};

// k-means++ seeding, `restarts` runs with derived seeds, best
// within-cluster sum of squares kept.
KmeansResult kmeans(const std::vector<std::vector<double>>& points, int k, uint64_t seed,
                    int restarts = 10, int max_iters = 100);

// Grid search over [-1, 1] step 0.01 with t_lo <= t_hi, maximizing macro-F1
// of: sim >= t_hi -> SYNSET; t_lo <= sim < t_hi -> VARGA; else UNRELATED.
// Ties prefer smaller (t_hi - t_lo), then smaller t_lo.
ThresholdPair tune_thresholds(const EmbeddingSet& set, const RelatednessInventory& dev);

EvalReport eval_relatedness(const EmbeddingSet& set, ThresholdPair thresholds,
                            const RelatednessInventory& test,
                            std::vector<std::string>* per_item = nullptr);

// Predicted candidate = argmax cosine with the target; ties pick the
// lowest candidate index.
EvalReport eval_synonym(const EmbeddingSet& set, const SynonymInventory& inv,
                        std::vector<std::string>* per_item = nullptr);

// 3CosAdd: nearest word to v(b) - v(a) + v(c), input words excluded.
// The candidate pool is the set vocabulary plus composed vectors for
// inventory words missing from it.
EvalReport eval_analogy(const EmbeddingSet& set, const AnalogyInventory& inv,
                        std::vector<std::string>* per_item = nullptr);

// k-means over L2-normalized concept vectors with k = #categories,
// scored by purity.
EvalReport eval_categorization(const EmbeddingSet& set, const CategorizationInventory& inv,
                               uint64_t seed, std::vector<std::string>* per_item = nullptr);

struct EvalInputs {
  const RelatednessInventory* relatedness = nullptr;
  const SynonymInventory* synonym = nullptr;
  const AnalogyInventory* analogy = nullptr;
  const CategorizationInventory* categorization_syn = nullptr;
  const CategorizationInventory* categorization_sem = nullptr;
  uint64_t seed = 1;
  std::vector<std::string>* per_item = nullptr;
};

// Runs every provided task; missing inventories leave their columns absent.
std::vector<EvalReport> run_all(const EmbeddingSet& set, const EvalInputs& inputs);

struct ModelRow {
  std::string name;
  std::vector<EvalReport> reports;
};

// Aligned table with the six metric cells per model: relatedness f-score,
// categorization syn/sem purity, similarity accuracy, analogy syn/sem
// accuracy. F-scores and accuracies are scaled x100; purity stays in 0..1.
std::string render_table(const std::vector<ModelRow>& rows);
// Long-form TSV: model task metric value oov_count n_items.
std::string render_tsv(const std::vector<ModelRow>& rows);

}  // namespace embkit
