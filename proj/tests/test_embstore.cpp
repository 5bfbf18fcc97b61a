#include "embkit/embstore.hpp"

#include <Eigen/Dense>
#include <cmath>

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

// Dense eigendecomposition oracle for the PCA path.
Projection2D eigen_project_2d(const std::vector<std::string>& labels,
                              const std::vector<std::vector<double>>& vectors) {
  size_t n = vectors.size(), d = vectors[0].size();
  Eigen::MatrixXd x(n, d);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j) x(i, j) = vectors[i][j];
  Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  Eigen::MatrixXd comp(d, 2);
  comp.col(0) = solver.eigenvectors().col(d - 1);  // eigenvalues ascending in Eigen
  if (d > 1) {
    comp.col(1) = solver.eigenvectors().col(d - 2);
  } else {
    comp.col(1) = Eigen::VectorXd::Zero(d);
  }
  for (int c = 0; c < 2; ++c) {
    int arg = 0;
    double best = -1;
    for (size_t j = 0; j < d; ++j) {
      if (std::abs(comp(j, c)) > best) {
        best = std::abs(comp(j, c));
        arg = static_cast<int>(j);
      }
    }
    if (comp(arg, c) < 0) comp.col(c) = -comp.col(c);
  }
  Eigen::MatrixXd coords = centered * comp;
  Projection2D out;
  for (size_t i = 0; i < n; ++i) out.points.push_back({labels[i], coords(i, 0), coords(i, 1)});
  return out;
}

}  // namespace

TEST_SUITE("embstore") {

TEST_CASE("in-vocab lookup returns the stored row") {
  auto set = make_set({"u", "v"}, {{1.0f, 2.0f}, {3.0f, 4.0f}});
  auto [vec, oov] = set.vector_of("v");
  CHECK_FALSE(oov);
  CHECK(vec == std::vector<float>{3.0f, 4.0f});
}

TEST_CASE("zero_vector rule flags OOV with an all-zero row") {
  auto set = make_set({"u"}, {{1.0f, 2.0f}});
  auto [vec, oov] = set.vector_of("missing");
  CHECK(oov);
  CHECK(vec == std::vector<float>{0.0f, 0.0f});
  CHECK(set.oov_rule_name() == "zero_vector");
}

TEST_CASE("subword_sum composes an OOV word from its pieces") {
  SubwordModel model;
  model.pieces = {{"ab", -0.5}, {"cd", -0.6}, {"a", -3}, {"b", -3}, {"c", -3}, {"d", -3}};
  model.vocab_size = 6;
  model.rebuild_index();
  auto set = make_set({"ab", "cd"}, {{1.0f, 0.0f}, {0.5f, 2.0f}});
  set.set_oov_subword_sum(&model);
  auto [vec, oov] = set.vector_of("abcd");  // segments as ab + cd
  CHECK(oov);
  CHECK(vec[0] == doctest::Approx(1.5f));
  CHECK(vec[1] == doctest::Approx(2.0f));
  // Pieces without stored rows contribute nothing.
  auto [only, oov2] = set.vector_of("abd");  // ab + d, d has no row
  CHECK(oov2);
  CHECK(only[0] == doctest::Approx(1.0f));
  CHECK(only[1] == doctest::Approx(0.0f));
}

TEST_CASE("cosine basics") {
  std::vector<float> v{3.0f, 4.0f}, e1{1.0f, 0.0f}, e2{0.0f, 1.0f}, ones{1.0f, 1.0f};
  std::vector<float> zero{0.0f, 0.0f};
  CHECK(cosine(std::span<const float>(v), std::span<const float>(v)) == 1.0);
  CHECK(cosine(std::span<const float>(e1), std::span<const float>(e2)) == 0.0);
  // Hand arithmetic: 1 / sqrt(2)
  CHECK(std::abs(cosine(std::span<const float>(ones), std::span<const float>(e1)) -
                 0.70710678118654752) <= 1e-9);
  CHECK(cosine(std::span<const float>(zero), std::span<const float>(e1)) == 0.0);
  CHECK(cosine(std::span<const float>(e1), std::span<const float>(zero)) == 0.0);
}

TEST_CASE("cosine is symmetric") {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    std::vector<float> a(5), b(5);
    for (int d = 0; d < 5; ++d) {
      a[d] = static_cast<float>(rng.uniform(-1, 1));
      b[d] = static_cast<float>(rng.uniform(-1, 1));
    }
    CHECK(cosine(std::span<const float>(a), std::span<const float>(b)) ==
          cosine(std::span<const float>(b), std::span<const float>(a)));
  }
}

TEST_CASE("nearest ranks by cosine with the query word excluded") {
  auto set = make_set({"x", "y", "z"}, {{1.0f, 0.0f}, {0.9f, 0.1f}, {0.0f, 1.0f}});
  auto [q, oov] = set.vector_of("x");
  auto result = nearest(set, q, 1, {"x"});
  REQUIRE(result.size() == 1);
  CHECK(result[0].word == "y");
  // Hand cosine: 0.9 / sqrt(0.82)
  CHECK(result[0].cosine == doctest::Approx(0.9 / std::sqrt(0.82)).epsilon(1e-9));
}

TEST_CASE("excluding the whole vocabulary yields an empty list") {
  auto set = make_set({"x", "y"}, {{1.0f, 0.0f}, {0.0f, 1.0f}});
  auto [q, oov] = set.vector_of("x");
  CHECK(nearest(set, q, 3, {"x", "y"}).empty());
}

TEST_CASE("nearest breaks ties by ascending id and caps k at the remainder") {
  auto set = make_set({"m", "n", "o"}, {{1.0f, 0.0f}, {1.0f, 0.0f}, {0.0f, 1.0f}});
  std::vector<float> q{1.0f, 0.0f};
  auto result = nearest(set, q, 10, {});
  REQUIRE(result.size() == 3);
  CHECK(result[0].word == "m");
  CHECK(result[1].word == "n");
  CHECK(result[2].word == "o");
}

TEST_CASE("scaling all vectors leaves nearest rankings identical") {
  Rng rng(77);
  std::vector<std::string> words;
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < 40; ++i) {
    words.push_back("w" + std::to_string(i));
    std::vector<float> r(8);
    for (auto& x : r) x = static_cast<float>(rng.uniform(-1, 1));
    rows.push_back(r);
  }
  auto base = make_set(words, rows);
  auto scaled = make_set(words, rows);
  scaled.scale(3.7f);
  for (int q = 0; q < 5; ++q) {
    std::string query = "w" + std::to_string(q * 7);
    auto r1 = nearest(base, base.vector_of(query).first, 10, {query});
    auto r2 = nearest(scaled, scaled.vector_of(query).first, 10, {query});
    REQUIRE(r1.size() == r2.size());
    for (size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].word == r2[i].word);
  }
}

TEST_CASE("export/import roundtrip is exact at 9 significant digits") {
  testutil::TempDir tmp;
  Rng rng(7);
  std::vector<std::string> words;
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < 12; ++i) {
    words.push_back("w" + std::to_string(i));
    std::vector<float> r(5);
    for (auto& x : r) x = static_cast<float>(rng.uniform(-2, 2));
    rows.push_back(r);
  }
  auto set = make_set(words, rows);
  export_vectors(set, tmp.path("v.vec"));
  auto loaded = import_vectors(tmp.path("v.vec"));
  REQUIRE(loaded.size() == set.size());
  REQUIRE(loaded.dim() == set.dim());
  for (size_t i = 0; i < set.size(); ++i) {
    auto a = set.row(static_cast<int32_t>(i));
    auto b = loaded.row(static_cast<int32_t>(i));
    for (int d = 0; d < set.dim(); ++d) CHECK(a[d] == b[d]);
  }
}

TEST_CASE("import reads the header and row shape") {
  testutil::TempDir tmp;
  auto path = tmp.write("v.vec", "2 3\nfoo 1 2 3\nbar 4 5 6\n");
  auto set = import_vectors(path);
  CHECK(set.size() == 2);
  CHECK(set.dim() == 3);
  CHECK(set.id_of("bar") == 1);
}

TEST_CASE("malformed rows are rejected with their line number") {
  testutil::TempDir tmp;
  auto path = tmp.write("v.vec", "2 3\nfoo 1 2 3\nbar 4 5\n");
  try {
    import_vectors(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  auto path2 = tmp.write("v2.vec", "1 3\nfoo 1 2 3\nbar 4 5 6\n");
  CHECK_THROWS_AS(import_vectors(path2), DataError);
  auto path3 = tmp.write("v3.vec", "not a header\n");
  CHECK_THROWS_AS(import_vectors(path3), DataError);
}

TEST_CASE("project_2d recovers axis-aligned anisotropic points") {
  std::vector<std::string> labels{"p1", "p2", "p3", "p4"};
  std::vector<std::vector<double>> points{{2, 0}, {-2, 0}, {0, 1}, {0, -1}};
  Projection2D proj = project_2d(labels, points);
  REQUIRE(proj.points.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(proj.points[i].x == doctest::Approx(points[i][0]).epsilon(1e-12));
    CHECK(proj.points[i].y == doctest::Approx(points[i][1]).epsilon(1e-12));
  }
}

TEST_CASE("collinear points project with a zero second coordinate") {
  std::vector<std::string> labels{"a", "b", "c", "d"};
  std::vector<std::vector<double>> points;
  for (double t : {-1.0, 0.0, 1.0, 2.0}) points.push_back({t, 2 * t, 3 * t});
  Projection2D proj = project_2d(labels, points);
  for (const auto& p : proj.points) CHECK(std::abs(p.y) <= 1e-9);
}

TEST_CASE("project_2d matches a dense eigendecomposition oracle") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    size_t n = 3 + rng.below(8);
    size_t d = 2 + rng.below(7);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> points;
    for (size_t i = 0; i < n; ++i) {
      labels.push_back("p" + std::to_string(i));
      std::vector<double> v(d);
      for (auto& x : v) x = rng.uniform(-3, 3);
      points.push_back(v);
    }
    Projection2D got = project_2d(labels, points);
    Projection2D want = eigen_project_2d(labels, points);
    for (size_t i = 0; i < n; ++i) {
      CHECK(std::abs(got.points[i].x - want.points[i].x) <= 1e-8);
      CHECK(std::abs(got.points[i].y - want.points[i].y) <= 1e-8);
    }
  }
}

TEST_CASE("projected variance never exceeds input variance") {
  Rng rng(29);
  std::vector<std::string> labels;
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 9; ++i) {
    labels.push_back("p" + std::to_string(i));
    std::vector<double> v(6);
    for (auto& x : v) x = rng.uniform(-2, 2);
    points.push_back(v);
  }
  Projection2D proj = project_2d(labels, points);
  std::vector<double> mean(6, 0.0);
  for (auto& p : points)
    for (int j = 0; j < 6; ++j) mean[j] += p[j] / points.size();
  double var_in = 0;
  for (auto& p : points)
    for (int j = 0; j < 6; ++j) var_in += (p[j] - mean[j]) * (p[j] - mean[j]);
  double var_out = 0;
  for (auto& p : proj.points) var_out += p.x * p.x + p.y * p.y;
  CHECK(var_out <= var_in + 1e-9);

  // Rank-2 input keeps all of its variance.
  Rng rng2(30);
  std::vector<std::string> labels2;
  std::vector<std::vector<double>> plane;
  for (int i = 0; i < 8; ++i) {
    labels2.push_back("q" + std::to_string(i));
    double s = rng2.uniform(-2, 2), t = rng2.uniform(-2, 2);
    plane.push_back({s + t, 2 * s - t, -s, 3 * t});
  }
  Projection2D pp = project_2d(labels2, plane);
  std::vector<double> mean2(4, 0.0);
  for (auto& p : plane)
    for (int j = 0; j < 4; ++j) mean2[j] += p[j] / plane.size();
  double vin = 0;
  for (auto& p : plane)
    for (int j = 0; j < 4; ++j) vin += (p[j] - mean2[j]) * (p[j] - mean2[j]);
  double vout = 0;
  for (auto& p : pp.points) vout += p.x * p.x + p.y * p.y;
  CHECK(vout == doctest::Approx(vin).epsilon(1e-9));
}

TEST_CASE("fewer than two vectors is an error") {
  CHECK_THROWS_AS(project_2d({"a"}, {{1.0, 2.0}}), ConfigError);
}

TEST_CASE("duplicate words are rejected") {
  CHECK_THROWS_AS(make_set({"a", "a"}, {{1.0f}, {2.0f}}), DataError);
}

}  // TEST_SUITE
