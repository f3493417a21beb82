#pragma once

#include <cstdint>
#include <vector>

#include "ganchain/eval/metrics.hpp"

namespace ganchain::eval {

// Mutually-fooling cluster extraction over an aligned square fooling matrix
// (generator j trained to fool classifier j). The pair relation symmetrizes
// the two directions by their mean: i and j are mutually fooling when
// (a_ij + a_ji)/2 <= threshold. Clusters are maximal cliques of size >= 2
// under that relation (diagonal entries included in the membership test);
// everything else is reported as unclustered. The raw one-directional
// boolean fooled matrix is preserved alongside.
struct ClusterReport {
  std::vector<std::vector<int>> clusters;  // disjoint, each sorted, size >= 2
  std::vector<int> unclustered;
  std::vector<uint8_t> fooled;  // row-major snapshot of (a_ij <= threshold)
  double threshold = kFooledThreshold;
};

ClusterReport extract_clusters(const FoolingMatrix& m);
ClusterReport extract_clusters(const FoolingMatrix& m, double threshold);

// Same peel-best-clique partition computed by exhaustive subset search;
// test oracle for small n.
std::vector<std::vector<int>> brute_force_clusters(const std::vector<uint8_t>& sym_relation,
                                                   int n);

// Exposed for the oracle tests: the symmetric boolean relation the clusters
// are computed on (includes the diagonal).
std::vector<uint8_t> symmetrized_relation(const FoolingMatrix& m, double threshold);

}  // namespace ganchain::eval
