#include "ganchain/eval/frechet.hpp"

#include <cstring>

#include "ganchain/error.hpp"

namespace ganchain::eval {

namespace {

constexpr double kRegLambda = 1e-6;
constexpr double kDegenerateEig = 1e-10;
constexpr double kNegativeDust = -1e-8;

Eigen::MatrixXd covariance(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& mu) {
  const Eigen::MatrixXd centered = x.rowwise() - mu;
  return centered.transpose() * centered / double(x.rows() - 1);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); i++) ev[i] = ev[i] > 0 ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

FrechetResult frechet_from_features(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw ArgumentError("feature dimensions differ");
  const int64_t dim = a.cols();
  if (a.rows() < dim + 1 || b.rows() < dim + 1)
    throw ArgumentError("need at least dim+1 samples per set for covariance estimation");

  const Eigen::RowVectorXd mu_a = a.colwise().mean();
  const Eigen::RowVectorXd mu_b = b.colwise().mean();
  Eigen::MatrixXd cov_a = covariance(a, mu_a);
  Eigen::MatrixXd cov_b = covariance(b, mu_b);

  FrechetResult res;
  auto degenerate = [&](const Eigen::MatrixXd& c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() < kDegenerateEig;
  };
  if (degenerate(cov_a) || degenerate(cov_b)) {
    res.regularized = true;
    cov_a += kRegLambda * Eigen::MatrixXd::Identity(dim, dim);
    cov_b += kRegLambda * Eigen::MatrixXd::Identity(dim, dim);
  }

  // Tr sqrt(Sa Sb) = Tr sqrt(sqrt(Sa) Sb sqrt(Sa)); the inner product is
  // symmetric PSD so a self-adjoint eigendecomposition applies.
  const Eigen::MatrixXd sa = psd_sqrt(cov_a);
  Eigen::MatrixXd inner = sa * cov_b * sa;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner, Eigen::EigenvaluesOnly);
  double tr_sqrt = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); i++) {
    const double ev = es.eigenvalues()[i];
    tr_sqrt += ev > 0 ? std::sqrt(ev) : 0.0;
  }

  double value = (mu_a - mu_b).squaredNorm() + cov_a.trace() + cov_b.trace() - 2.0 * tr_sqrt;
  if (value < 0) {
    if (value < kNegativeDust)
      throw IntegrityError("frechet distance came out negative beyond numerical dust: " +
                           std::to_string(value));
    value = 0.0;
  }
  res.value = value;
  return res;
}

Eigen::MatrixXd embed_features(const EmbedderInstance& embedder, const TensorF& images) {
  EmbedderNet<float> net = embedder.net;
  const int64_t n = images.dim(0);
  Eigen::MatrixXd out(n, EmbedderNet<float>::kEmbedDim);
  constexpr int64_t kChunk = 512;
  int64_t at = 0;
  while (at < n) {
    const int64_t take = std::min(kChunk, n - at);
    TensorF chunk({take, 28, 28, 1});
    std::memcpy(chunk.data(), &images[at * 784], size_t(take) * 784 * sizeof(float));
    TensorF e = net.embed(chunk, false);
    for (int64_t i = 0; i < take; i++)
      for (int64_t j = 0; j < EmbedderNet<float>::kEmbedDim; j++)
        out(at + i, j) = double(e[i * EmbedderNet<float>::kEmbedDim + j]);
    at += take;
  }
  return out;
}

FrechetResult frechet_distance(const EmbedderInstance& embedder, const TensorF& set_a,
                               const TensorF& set_b) {
  return frechet_from_features(embed_features(embedder, set_a),
                               embed_features(embedder, set_b));
}

double embedder_accuracy(const EmbedderInstance& embedder, const TensorF& images,
                         const std::vector<int>& labels) {
  EmbedderNet<float> net = embedder.net;
  const int64_t n = images.dim(0);
  if (int64_t(labels.size()) != n) throw ArgumentError("label count mismatch");
  int64_t correct = 0;
  constexpr int64_t kChunk = 512;
  int64_t at = 0;
  while (at < n) {
    const int64_t take = std::min(kChunk, n - at);
    TensorF chunk({take, 28, 28, 1});
    std::memcpy(chunk.data(), &images[at * 784], size_t(take) * 784 * sizeof(float));
    TensorF logits = net.forward_logits(chunk, false);
    for (int64_t i = 0; i < take; i++) {
      int argmax = 0;
      for (int k = 1; k < 10; k++)
        if (logits[i * 10 + k] > logits[i * 10 + argmax]) argmax = k;
      if (argmax == labels[size_t(at + i)]) correct++;
    }
    at += take;
  }
  return double(correct) / double(n);
}

}  // namespace ganchain::eval
