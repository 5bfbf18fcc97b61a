#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "embkit/subword.hpp"

namespace embkit {

// Uniform embedding container: a word table plus a total OOV rule, so
// vector_of never fails to produce a vector.
class EmbeddingSet {
 public:
  using Composer = std::function<std::vector<float>(const std::string&)>;

  EmbeddingSet(std::vector<std::string> words, std::vector<float> matrix, int dim);

  int dim() const { return dim_; }
  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  int32_t id_of(std::string_view word) const;
  std::span<const float> row(int32_t id) const {
    return {matrix_.data() + static_cast<size_t>(id) * dim_, static_cast<size_t>(dim_)};
  }

  // In-vocab words return the stored row; everything else goes through the
  // OOV rule. zero_vector is the default rule.
  std::pair<std::vector<float>, bool> vector_of(const std::string& word) const;

  // Sum of the stored rows of the word's subword segmentation. Pieces
  // without a stored row contribute nothing.
  void set_oov_subword_sum(const SubwordModel* model);
  // Arbitrary composition hook (used for n-gram models).
  void set_oov_composer(std::string name, Composer composer);
  const std::string& oov_rule_name() const { return oov_rule_; }

  void scale(float c);  // multiply every stored row

 private:
  std::vector<std::string> words_;
  std::vector<float> matrix_;
  int dim_;
  std::unordered_map<std::string, int32_t> word_to_id_;
  std::string oov_rule_ = "zero_vector";
  const SubwordModel* subword_ = nullptr;
  Composer composer_;
};

// a.b / (|a||b|); 0 when either norm is 0, so OOV zero vectors are
// maximally unrelated.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);

struct Neighbor {
  std::string word;
  double cosine;
  int32_t id;
};

// Top-k by cosine descending over the set's vocabulary minus `exclude`;
// ties broken by ascending id. k larger than the remainder returns all.
std::vector<Neighbor> nearest(const EmbeddingSet& set, std::span<const float> query, int k,
                              const std::unordered_set<std::string>& exclude);

struct Projection2D {
  struct Point {
    std::string label;
    double x, y;
  };
  std::vector<Point> points;
};

// Mean-centers and projects onto the top-2 eigenvectors of the sample
// covariance (descending eigenvalue; sign fixed so each component's
// largest-magnitude loading is positive). Needs at least 2 vectors.
Projection2D project_2d(const std::vector<std::string>& labels,
                        const std::vector<std::vector<double>>& vectors);

// Text vector format: first line "V D", then "word v1 ... vD".
EmbeddingSet import_vectors(const std::string& path);
void export_vectors(const EmbeddingSet& set, const std::string& path);

}  // namespace embkit
