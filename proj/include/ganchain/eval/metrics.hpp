#pragma once

#include <string>
#include <vector>

#include "ganchain/models/instances.hpp"
#include "ganchain/train/train.hpp"

namespace ganchain::eval {

inline constexpr double kDecisionThreshold = 0.5;
inline constexpr double kFooledThreshold = 0.20;

// Eval-mode classifier probabilities over an image tensor, chunked; the
// classifier is copied so concurrent callers never share forward caches.
TensorF classifier_probs(const ClassifierInstance& cls, const TensorF& images);

// Fraction of generated samples correctly flagged as generated
// (p_real < 0.5). 0 means the classifier is completely fooled.
double accuracy_on_generated(const ClassifierInstance& cls, const GeneratorInstance& gen,
                             int64_t n_samples, uint64_t seed);

// Fraction of real samples correctly flagged as real (p_real >= 0.5).
double accuracy_on_real(const ClassifierInstance& cls, const data::ImageBatch& real,
                        int64_t n_samples, uint64_t seed);

// Accuracy over an exactly balanced sample: n_samples generated (split evenly
// across the given generators) plus n_samples real. 0.5 is random.
double accuracy_balanced(const ClassifierInstance& cls,
                         const std::vector<const GeneratorInstance*>& generators,
                         const data::ImageBatch& real, int64_t n_samples, uint64_t seed);

struct GeneralizationCurve {
  std::vector<int> n_values;
  std::vector<double> accuracies;
  std::vector<std::string> held_out_pool;
};

struct CurveSpec {
  std::vector<int> n_values;
  CapacityTier tier;
  train::TrainSpec classifier_spec;
  int64_t samples_per_generator = 2000;
  int64_t eval_samples = 2000;
};

// For each n, trains a fresh classifier on the first n generators of
// train_pool and evaluates balanced accuracy against the held-out pool.
// The two pools must be disjoint.
GeneralizationCurve generalization_curve(const data::DatasetSplit& real,
                                         const std::vector<const GeneratorInstance*>& train_pool,
                                         const std::vector<const GeneratorInstance*>& held_out_pool,
                                         const CurveSpec& spec, uint64_t seed);

// Classifier x generator grid of accuracy-on-generated values.
struct FoolingMatrix {
  std::vector<std::string> row_ids;  // classifiers
  std::vector<std::string> col_ids;  // generators
  std::vector<double> entries;       // row-major
  double fooled_threshold = kFooledThreshold;
  int64_t samples_per_cell = 2000;
  uint64_t seed = 0;

  int64_t rows() const { return int64_t(row_ids.size()); }
  int64_t cols() const { return int64_t(col_ids.size()); }
  double at(int64_t i, int64_t j) const { return entries[size_t(i * cols() + j)]; }
  double& at(int64_t i, int64_t j) { return entries[size_t(i * cols() + j)]; }
};

FoolingMatrix cross_fooling_matrix(const std::vector<const ClassifierInstance*>& classifiers,
                                   const std::vector<const GeneratorInstance*>& generators,
                                   int64_t n_samples, uint64_t seed, int workers = 0);

}  // namespace ganchain::eval
