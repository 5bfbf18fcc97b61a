#include "embkit/embstore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "embkit/error.hpp"

namespace embkit {

EmbeddingSet::EmbeddingSet(std::vector<std::string> words, std::vector<float> matrix, int dim)
    : words_(std::move(words)), matrix_(std::move(matrix)), dim_(dim) {
  if (dim_ < 1) throw ConfigError("embedding set: dim must be >= 1");
  if (matrix_.size() != words_.size() * static_cast<size_t>(dim_)) {
    throw ConfigError("embedding set: matrix size does not match V x dim");
  }
  for (size_t i = 0; i < words_.size(); ++i) {
    if (!word_to_id_.emplace(words_[i], static_cast<int32_t>(i)).second) {
      throw DataError("embedding set: duplicate word " + words_[i]);
    }
  }
  for (float v : matrix_) {
    if (!std::isfinite(v)) throw DataError("embedding set: non-finite entry");
  }
}

int32_t EmbeddingSet::id_of(std::string_view word) const {
  auto it = word_to_id_.find(std::string(word));
  return it == word_to_id_.end() ? -1 : it->second;
}

std::pair<std::vector<float>, bool> EmbeddingSet::vector_of(const std::string& word) const {
  int32_t id = id_of(word);
  if (id >= 0) {
    auto r = row(id);
    return {std::vector<float>(r.begin(), r.end()), false};
  }
  if (oov_rule_ == "subword_sum") {
    std::vector<float> sum(dim_, 0.0f);
    Segmentation seg = encode(*subword_, word);
    for (const auto& piece : seg.pieces) {
      int32_t pid = id_of(piece);
      if (pid < 0) continue;
      auto r = row(pid);
      for (int d = 0; d < dim_; ++d) sum[d] += r[d];
    }
    return {std::move(sum), true};
  }
  if (composer_) return {composer_(word), true};
  return {std::vector<float>(dim_, 0.0f), true};
}

void EmbeddingSet::set_oov_subword_sum(const SubwordModel* model) {
  subword_ = model;
  composer_ = nullptr;
  oov_rule_ = "subword_sum";
}

void EmbeddingSet::set_oov_composer(std::string name, Composer composer) {
  composer_ = std::move(composer);
  subword_ = nullptr;
  oov_rule_ = std::move(name);
}

void EmbeddingSet::scale(float c) {
  for (auto& v : matrix_) v *= c;
}

template <class T>
static double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw ConfigError("cosine: dimension mismatch");
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0 || nb == 0) return 0;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

std::vector<Neighbor> nearest(const EmbeddingSet& set, std::span<const float> query, int k,
                              const std::unordered_set<std::string>& exclude) {
  if (k < 1) throw ConfigError("nearest: k must be >= 1");
  std::vector<Neighbor> all;
  all.reserve(set.size());
  for (size_t i = 0; i < set.size(); ++i) {
    if (exclude.count(set.words()[i])) continue;
    all.push_back({set.words()[i], cosine(query, set.row(static_cast<int32_t>(i))),
                   static_cast<int32_t>(i)});
  }
  auto cmp = [](const Neighbor& a, const Neighbor& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.id < b.id;
  };
  if (static_cast<size_t>(k) >= all.size()) {
    std::sort(all.begin(), all.end(), cmp);
    return all;
  }
  std::partial_sort(all.begin(), all.begin() + k, all.end(), cmp);
  all.resize(k);
  return all;
}

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Good enough for
// the d x d covariances seen here; deterministic.
void jacobi_eigensymm(std::vector<double>& a, int n, std::vector<double>& eigvals,
                      std::vector<double>& eigvecs) {
  eigvecs.assign(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) eigvecs[static_cast<size_t>(i) * n + i] = 1.0;
  auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };
  auto V = [&](int i, int j) -> double& { return eigvecs[static_cast<size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int i = 0; i < n; ++i) {
          double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int j = 0; j < n; ++j) {
          double apj = A(p, j), aqj = A(q, j);
          A(p, j) = c * apj - s * aqj;
          A(q, j) = s * apj + c * aqj;
        }
        for (int i = 0; i < n; ++i) {
          double vip = V(i, p), viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  eigvals.resize(n);
  for (int i = 0; i < n; ++i) eigvals[i] = A(i, i);
}

}  // namespace

Projection2D project_2d(const std::vector<std::string>& labels,
                        const std::vector<std::vector<double>>& vectors) {
  size_t n = vectors.size();
  if (n < 2) throw ConfigError("project_2d: need at least 2 vectors");
  if (labels.size() != n) throw ConfigError("project_2d: labels/vectors size mismatch");
  size_t d = vectors[0].size();
  for (const auto& v : vectors) {
    if (v.size() != d) throw ConfigError("project_2d: dimension mismatch");
  }
  std::vector<double> mean(d, 0.0);
  for (const auto& v : vectors)
    for (size_t j = 0; j < d; ++j) mean[j] += v[j];
  for (auto& m : mean) m /= static_cast<double>(n);
  std::vector<double> centered(n * d);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j) centered[i * d + j] = vectors[i][j] - mean[j];

  std::vector<double> cov(d * d, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j)
      for (size_t l = 0; l < d; ++l)
        cov[j * d + l] += centered[i * d + j] * centered[i * d + l];
  double denom = static_cast<double>(n - 1);
  for (auto& c : cov) c /= denom;

  std::vector<double> eigvals, eigvecs;
  jacobi_eigensymm(cov, static_cast<int>(d), eigvals, eigvecs);

  // Top-2 eigenvalues, descending; ties by lower column index.
  std::vector<int> order(d);
  for (size_t i = 0; i < d; ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return eigvals[a] > eigvals[b]; });
  int cols[2] = {order[0], d > 1 ? order[1] : order[0]};

  // Fix sign: the largest-magnitude loading of each component is positive.
  std::vector<std::vector<double>> comp(2, std::vector<double>(d, 0.0));
  int n_comp = d > 1 ? 2 : 1;
  for (int c = 0; c < n_comp; ++c) {
    size_t arg = 0;
    double best = -1;
    for (size_t j = 0; j < d; ++j) {
      comp[c][j] = eigvecs[j * d + cols[c]];
      if (std::abs(comp[c][j]) > best) {
        best = std::abs(comp[c][j]);
        arg = j;
      }
    }
    if (comp[c][arg] < 0) {
      for (auto& v : comp[c]) v = -v;
    }
  }

  Projection2D out;
  out.points.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    double x = 0, y = 0;
    for (size_t j = 0; j < d; ++j) {
      x += centered[i * d + j] * comp[0][j];
      y += centered[i * d + j] * comp[1][j];
    }
    out.points.push_back({labels[i], x, y});
  }
  return out;
}

EmbeddingSet import_vectors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("vectors: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ":1: empty file");
  std::istringstream header(line);
  long long v = -1, d = -1;
  std::string extra;
  if (!(header >> v >> d) || (header >> extra) || v < 0 || d < 1) {
    throw DataError(path + ":1: expected header 'V D'");
  }
  std::vector<std::string> words;
  std::vector<float> matrix;
  words.reserve(v);
  matrix.reserve(static_cast<size_t>(v) * d);
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string word;
    if (!(row >> word)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": missing word");
    }
    size_t got = 0;
    float x;
    while (row >> x) {
      matrix.push_back(x);
      ++got;
    }
    if (got != static_cast<size_t>(d)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(d) +
                      " values, got " + std::to_string(got));
    }
    words.push_back(std::move(word));
  }
  if (static_cast<long long>(words.size()) != v) {
    throw DataError(path + ": header promises " + std::to_string(v) + " rows, found " +
                    std::to_string(words.size()));
  }
  return EmbeddingSet(std::move(words), std::move(matrix), static_cast<int>(d));
}

void export_vectors(const EmbeddingSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("vectors: cannot write " + path);
  out << set.size() << ' ' << set.dim() << '\n';
  char buf[64];
  for (size_t i = 0; i < set.size(); ++i) {
    out << set.words()[i];
    auto r = set.row(static_cast<int32_t>(i));
    for (int dd = 0; dd < set.dim(); ++dd) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(r[dd]));
      out << ' ' << buf;
    }
    out << '\n';
  }
}

}  // namespace embkit
