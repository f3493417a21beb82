#pragma once

#include <Eigen/Dense>

#include "ganchain/models/instances.hpp"

namespace ganchain::eval {

struct FrechetResult {
  double value = 0.0;
  bool regularized = false;  // set when a degenerate covariance needed lambda*I

  operator double() const { return value; }
};

// Frechet distance between Gaussian fits of two feature sets (rows are
// samples): |mu_a - mu_b|^2 + Tr(Sa + Sb - 2 sqrt(Sa Sb)). The matrix square
// root goes through an eigendecomposition of the symmetrized product;
// negative eigenvalue dust is clipped at zero. Each set needs at least
// dim + 1 rows.
FrechetResult frechet_from_features(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Embedder-based distance between two image batches.
FrechetResult frechet_distance(const EmbedderInstance& embedder, const TensorF& set_a,
                               const TensorF& set_b);

// Penultimate-layer features of the embedder, chunked eval-mode forward.
Eigen::MatrixXd embed_features(const EmbedderInstance& embedder, const TensorF& images);

// Top-1 accuracy of the ten-class embedder on a labeled set (embedder
// quality gets recorded next to every report that uses it).
double embedder_accuracy(const EmbedderInstance& embedder, const TensorF& images,
                         const std::vector<int>& labels);

}  // namespace ganchain::eval
