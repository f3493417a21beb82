#include "ganchain/eval/clusters.hpp"

#include <algorithm>
#include <bit>

#include "ganchain/error.hpp"

namespace ganchain::eval {

std::vector<uint8_t> symmetrized_relation(const FoolingMatrix& m, double threshold) {
  if (m.rows() != m.cols())
    throw ArgumentError("cluster extraction needs a square, aligned fooling matrix");
  const int n = int(m.rows());
  std::vector<uint8_t> rel(size_t(n) * n, 0);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++)
      rel[size_t(i) * n + j] = ((m.at(i, j) + m.at(j, i)) / 2.0 <= threshold) ? 1 : 0;
  return rel;
}

namespace {

using Mask = uint64_t;

struct CliqueSearch {
  int n = 0;
  std::vector<Mask> adj;  // neighbors incl. self
  std::vector<int> best;

  void consider(Mask clique) {
    std::vector<int> v;
    for (int i = 0; i < n; i++)
      if (clique & (Mask(1) << i)) v.push_back(i);
    if (v.size() > best.size() || (v.size() == best.size() && v < best)) best = v;
  }

  // Bron-Kerbosch with pivoting; enumerates maximal cliques of the candidate
  // set and keeps the largest (ties broken lexicographically).
  void run(Mask r, Mask p, Mask x) {
    if (p == 0 && x == 0) {
      consider(r);
      return;
    }
    Mask px = p | x;
    int pivot = -1, best_deg = -1;
    for (int u = 0; u < n; u++) {
      if (!(px & (Mask(1) << u))) continue;
      const int deg = std::popcount(p & adj[size_t(u)]);
      if (deg > best_deg) {
        best_deg = deg;
        pivot = u;
      }
    }
    Mask cand = p & ~adj[size_t(pivot)];
    for (int v = 0; v < n; v++) {
      const Mask bit = Mask(1) << v;
      if (!(cand & bit)) continue;
      run(r | bit, p & adj[size_t(v)] & ~bit, x & adj[size_t(v)]);
      p &= ~bit;
      x |= bit;
    }
  }
};

// Best clique among `alive` vertices: exact for n <= 64 via Bron-Kerbosch.
std::vector<int> best_clique(const std::vector<uint8_t>& rel, int n,
                             const std::vector<bool>& alive) {
  CliqueSearch cs;
  cs.n = n;
  cs.adj.assign(size_t(n), 0);
  Mask p = 0;
  for (int i = 0; i < n; i++) {
    if (!alive[size_t(i)] || !rel[size_t(i) * n + i]) continue;
    p |= Mask(1) << i;
    for (int j = 0; j < n; j++) {
      if (i == j || !alive[size_t(j)] || !rel[size_t(j) * n + j]) continue;
      if (rel[size_t(i) * n + j] && rel[size_t(j) * n + i]) cs.adj[size_t(i)] |= Mask(1) << j;
    }
  }
  if (p == 0) return {};
  cs.run(0, p, 0);
  return cs.best;
}

// Greedy maximal-clique growth for matrices too large for exact search:
// grow from every start vertex, always absorbing the smallest compatible
// index, and keep the best result.
std::vector<int> greedy_clique(const std::vector<uint8_t>& rel, int n,
                               const std::vector<bool>& alive) {
  auto compatible = [&](int a, int b) {
    return rel[size_t(a) * n + b] && rel[size_t(b) * n + a];
  };
  std::vector<int> best;
  for (int s = 0; s < n; s++) {
    if (!alive[size_t(s)] || !rel[size_t(s) * n + s]) continue;
    std::vector<int> grown{s};
    for (;;) {
      int pick = -1;
      for (int v = 0; v < n && pick < 0; v++) {
        if (!alive[size_t(v)] || !rel[size_t(v) * n + v]) continue;
        if (std::find(grown.begin(), grown.end(), v) != grown.end()) continue;
        bool ok = true;
        for (int g : grown)
          if (!compatible(v, g)) {
            ok = false;
            break;
          }
        if (ok) pick = v;
      }
      if (pick < 0) break;
      grown.push_back(pick);
    }
    std::sort(grown.begin(), grown.end());
    if (grown.size() > best.size() || (grown.size() == best.size() && grown < best))
      best = grown;
  }
  return best;
}

std::vector<std::vector<int>> peel_clusters(const std::vector<uint8_t>& rel, int n) {
  std::vector<bool> alive(size_t(n), true);
  std::vector<std::vector<int>> clusters;
  for (;;) {
    std::vector<int> c =
        n <= 64 ? best_clique(rel, n, alive) : greedy_clique(rel, n, alive);
    if (c.size() < 2) break;
    clusters.push_back(c);
    for (int v : c) alive[size_t(v)] = false;
  }
  return clusters;
}

}  // namespace

ClusterReport extract_clusters(const FoolingMatrix& m, double threshold) {
  const auto rel = symmetrized_relation(m, threshold);
  const int n = int(m.rows());

  ClusterReport report;
  report.threshold = threshold;
  report.fooled.assign(size_t(n) * n, 0);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++)
      report.fooled[size_t(i) * n + j] = m.at(i, j) <= threshold ? 1 : 0;

  report.clusters = peel_clusters(rel, n);
  std::vector<bool> in_cluster(size_t(n), false);
  for (auto& c : report.clusters)
    for (int v : c) in_cluster[size_t(v)] = true;
  for (int i = 0; i < n; i++)
    if (!in_cluster[size_t(i)]) report.unclustered.push_back(i);
  return report;
}

ClusterReport extract_clusters(const FoolingMatrix& m) {
  return extract_clusters(m, m.fooled_threshold);
}

std::vector<std::vector<int>> brute_force_clusters(const std::vector<uint8_t>& rel, int n) {
  if (n > 20) throw ArgumentError("brute-force cluster oracle is limited to n <= 20");
  std::vector<bool> alive(size_t(n), true);
  std::vector<std::vector<int>> clusters;
  for (;;) {
    std::vector<int> best;
    for (uint32_t mask = 1; mask < (1u << n); mask++) {
      std::vector<int> v;
      bool ok = true;
      for (int i = 0; i < n && ok; i++) {
        if (!(mask & (1u << i))) continue;
        if (!alive[size_t(i)]) {
          ok = false;
          break;
        }
        v.push_back(i);
      }
      if (!ok) continue;
      for (size_t a = 0; a < v.size() && ok; a++)
        for (size_t b = 0; b < v.size() && ok; b++)
          if (!rel[size_t(v[a]) * n + v[b]]) ok = false;
      if (!ok) continue;
      if (v.size() > best.size() || (v.size() == best.size() && v < best)) best = v;
    }
    if (best.size() < 2) break;
    clusters.push_back(best);
    for (int v : best) alive[size_t(v)] = false;
  }
  return clusters;
}

}  // namespace ganchain::eval
