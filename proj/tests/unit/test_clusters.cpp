#include "doctest.h"
#include "ganchain/eval/clusters.hpp"
#include "ganchain/rng.hpp"

using namespace ganchain;
using eval::FoolingMatrix;

namespace {

FoolingMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
  FoolingMatrix m;
  const int n = int(rows.size());
  for (int i = 0; i < n; i++) {
    m.row_ids.push_back("c" + std::to_string(i));
    m.col_ids.push_back("g" + std::to_string(i));
  }
  for (auto& r : rows)
    for (double v : r) m.entries.push_back(v);
  return m;
}

// The cross-architecture mutual-fooling grid of ten classifier/generator
// pairs, digitized from the published table.
FoolingMatrix published_grid() {
  return matrix_from({
      {0.04, 0.06, 0.05, 0.08, 0.07, 0.06, 0.98, 0.98, 0.47, 0.95},
      {0.16, 0.05, 0.11, 0.10, 0.08, 0.10, 0.99, 0.99, 0.64, 0.97},
      {0.09, 0.08, 0.03, 0.10, 0.08, 0.08, 0.99, 0.99, 0.44, 0.94},
      {0.09, 0.05, 0.05, 0.03, 0.05, 0.05, 0.99, 0.99, 0.53, 0.96},
      {0.09, 0.05, 0.09, 0.06, 0.04, 0.10, 0.98, 0.98, 0.60, 0.94},
      {0.22, 0.15, 0.14, 0.20, 0.20, 0.05, 1.00, 1.00, 0.70, 0.98},
      {0.53, 0.45, 0.59, 0.37, 0.52, 0.35, 0.01, 0.21, 0.37, 0.03},
      {0.28, 0.29, 0.45, 0.17, 0.17, 0.21, 0.02, 0.00, 0.12, 0.03},
      {0.13, 0.14, 0.06, 0.11, 0.17, 0.09, 0.92, 0.91, 0.03, 0.74},
      {0.44, 0.42, 0.37, 0.34, 0.40, 0.33, 0.60, 0.70, 0.28, 0.02},
  });
}

}  // namespace

TEST_CASE("published ten-by-ten grid yields the {0..5} and {6,7} clusters at 0.20") {
  auto report = eval::extract_clusters(published_grid(), 0.20);
  REQUIRE(report.clusters.size() == 2);
  CHECK(report.clusters[0] == std::vector<int>{0, 1, 2, 3, 4, 5});
  CHECK(report.clusters[1] == std::vector<int>{6, 7});
  CHECK(report.unclustered == std::vector<int>{8, 9});

  // Raw boolean snapshot keeps the asymmetric view: (7,6) fooled, (6,7) not.
  CHECK(report.fooled[7 * 10 + 6] == 1);
  CHECK(report.fooled[6 * 10 + 7] == 0);
}

TEST_CASE("all-zero matrix forms a single cluster of everyone") {
  FoolingMatrix m = matrix_from(std::vector<std::vector<double>>(5, std::vector<double>(5, 0.0)));
  auto report = eval::extract_clusters(m, 0.20);
  REQUIRE(report.clusters.size() == 1);
  CHECK(report.clusters[0] == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(report.unclustered.empty());
}

TEST_CASE("non-square matrices are rejected") {
  FoolingMatrix m;
  m.row_ids = {"a", "b"};
  m.col_ids = {"x"};
  m.entries = {0.0, 0.0};
  CHECK_THROWS_AS(eval::extract_clusters(m, 0.2), ArgumentError);
}

TEST_CASE("clusters are disjoint and satisfy the pairwise predicate") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; trial++) {
    const int n = 3 + int(rng.below(6));
    FoolingMatrix m;
    for (int i = 0; i < n; i++) {
      m.row_ids.push_back("c" + std::to_string(i));
      m.col_ids.push_back("g" + std::to_string(i));
    }
    for (int i = 0; i < n * n; i++) m.entries.push_back(rng.uniform());
    auto report = eval::extract_clusters(m, 0.35);

    std::vector<int> seen(size_t(n), 0);
    for (auto& c : report.clusters) {
      CHECK(c.size() >= 2);
      for (int v : c) seen[size_t(v)]++;
      for (int a : c)
        for (int b : c)
          CHECK((m.at(a, b) + m.at(b, a)) / 2.0 <= 0.35);
    }
    for (int v : report.unclustered) seen[size_t(v)]++;
    for (int i = 0; i < n; i++) CHECK(seen[size_t(i)] == 1);
  }
}

TEST_CASE("greedy-peel extraction equals brute-force subset search on random matrices") {
  Rng rng(77);
  for (int trial = 0; trial < 200; trial++) {
    const int n = 2 + int(rng.below(7));  // up to 8x8
    FoolingMatrix m;
    for (int i = 0; i < n; i++) {
      m.row_ids.push_back("c" + std::to_string(i));
      m.col_ids.push_back("g" + std::to_string(i));
    }
    // Boolean accuracies: 0.0 (fooled) or 1.0 (never fooled).
    for (int i = 0; i < n * n; i++) m.entries.push_back(rng.below(2) ? 1.0 : 0.0);

    auto report = eval::extract_clusters(m, 0.20);
    auto rel = eval::symmetrized_relation(m, 0.20);
    auto oracle = eval::brute_force_clusters(rel, n);
    CHECK(report.clusters == oracle);
  }
}
