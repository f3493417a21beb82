#include "ganchain/eval/metrics.hpp"

#include <cstring>
#include <set>

#include "ganchain/util/parallel.hpp"

namespace ganchain::eval {

TensorF classifier_probs(const ClassifierInstance& cls, const TensorF& images) {
  ClassifierNet<float> net = cls.net;
  const int64_t n = images.dim(0);
  TensorF out({n});
  constexpr int64_t kChunk = 512;
  int64_t at = 0;
  while (at < n) {
    const int64_t take = std::min(kChunk, n - at);
    TensorF chunk({take, 28, 28, 1});
    std::memcpy(chunk.data(), &images[at * 784], size_t(take) * 784 * sizeof(float));
    TensorF p = net.forward(chunk, nn::Mode::Eval, false);
    std::memcpy(&out[at], p.data(), size_t(take) * sizeof(float));
    at += take;
  }
  return out;
}

namespace {

int64_t count_generated_correct(const TensorF& probs) {
  int64_t correct = 0;
  for (int64_t i = 0; i < probs.size(); i++)
    if (double(probs[i]) < kDecisionThreshold) correct++;
  return correct;
}

int64_t count_real_correct(const TensorF& probs) {
  int64_t correct = 0;
  for (int64_t i = 0; i < probs.size(); i++)
    if (double(probs[i]) >= kDecisionThreshold) correct++;
  return correct;
}

}  // namespace

double accuracy_on_generated(const ClassifierInstance& cls, const GeneratorInstance& gen,
                             int64_t n_samples, uint64_t seed) {
  if (n_samples <= 0) throw ArgumentError("n_samples must be > 0");
  TensorF imgs = sample_images(gen, n_samples, seed);
  TensorF p = classifier_probs(cls, imgs);
  return double(count_generated_correct(p)) / double(n_samples);
}

double accuracy_on_real(const ClassifierInstance& cls, const data::ImageBatch& real,
                        int64_t n_samples, uint64_t seed) {
  if (n_samples <= 0) throw ArgumentError("n_samples must be > 0");
  data::ImageBatch drawn = data::draw_images(real, n_samples, seed);
  TensorF p = classifier_probs(cls, drawn.pixels);
  return double(count_real_correct(p)) / double(n_samples);
}

double accuracy_balanced(const ClassifierInstance& cls,
                         const std::vector<const GeneratorInstance*>& generators,
                         const data::ImageBatch& real, int64_t n_samples, uint64_t seed) {
  if (n_samples <= 0) throw ArgumentError("n_samples must be > 0");
  if (generators.empty()) throw ArgumentError("balanced accuracy needs generators");
  const int64_t k = int64_t(generators.size());
  int64_t gen_correct = 0;
  for (int64_t g = 0; g < k; g++) {
    const int64_t take = n_samples / k + (g < n_samples % k ? 1 : 0);
    if (take == 0) continue;
    TensorF imgs = sample_images(*generators[size_t(g)], take,
                                 derive_seed(seed, "balanced.gen", uint64_t(g)));
    gen_correct += count_generated_correct(classifier_probs(cls, imgs));
  }
  data::ImageBatch drawn =
      data::draw_images(real, n_samples, derive_seed(seed, "balanced.real", 0));
  const int64_t real_correct = count_real_correct(classifier_probs(cls, drawn.pixels));
  return double(gen_correct + real_correct) / double(2 * n_samples);
}

GeneralizationCurve generalization_curve(const data::DatasetSplit& real,
                                         const std::vector<const GeneratorInstance*>& train_pool,
                                         const std::vector<const GeneratorInstance*>& held_out_pool,
                                         const CurveSpec& spec, uint64_t seed) {
  if (train_pool.empty() || held_out_pool.empty())
    throw ArgumentError("generalization curve needs non-empty pools");
  std::set<std::string> train_ids;
  for (auto* g : train_pool) train_ids.insert(g->id);
  for (auto* g : held_out_pool)
    if (train_ids.count(g->id))
      throw ArgumentError("train and held-out generator pools overlap: " + g->id);

  GeneralizationCurve out;
  out.n_values = spec.n_values;
  for (auto* g : held_out_pool) out.held_out_pool.push_back(g->id);
  for (size_t i = 0; i < spec.n_values.size(); i++) {
    const int n = spec.n_values[i];
    if (n < 1 || n > int(train_pool.size()))
      throw ArgumentError("curve n value out of range: " + std::to_string(n));
    std::vector<const GeneratorInstance*> sources(train_pool.begin(), train_pool.begin() + n);
    ClassifierInstance cls = train::train_classifier(
        real, sources, spec.tier, spec.classifier_spec,
        derive_seed(seed, "curve.cls", uint64_t(i)), spec.samples_per_generator);
    cls.id = "curve_n" + std::to_string(n);
    out.accuracies.push_back(accuracy_balanced(cls, held_out_pool, real.eval,
                                               spec.eval_samples,
                                               derive_seed(seed, "curve.eval", uint64_t(i))));
  }
  return out;
}

FoolingMatrix cross_fooling_matrix(const std::vector<const ClassifierInstance*>& classifiers,
                                   const std::vector<const GeneratorInstance*>& generators,
                                   int64_t n_samples, uint64_t seed, int workers) {
  if (classifiers.empty() || generators.empty())
    throw ArgumentError("fooling matrix needs classifiers and generators");
  if (n_samples <= 0) throw ArgumentError("n_samples must be > 0");
  FoolingMatrix m;
  for (auto* c : classifiers) m.row_ids.push_back(c->id);
  for (auto* g : generators) m.col_ids.push_back(g->id);
  m.samples_per_cell = n_samples;
  m.seed = seed;
  m.entries.assign(size_t(m.rows() * m.cols()), 0.0);
  const int64_t cols = m.cols();
  parallel_for(m.rows() * cols, workers, [&](int64_t cell) {
    const int64_t i = cell / cols, j = cell % cols;
    m.entries[size_t(cell)] =
        accuracy_on_generated(*classifiers[size_t(i)], *generators[size_t(j)], n_samples,
                              derive_seed(seed, "matrix.cell", uint64_t(cell)));
  });
  return m;
}

}  // namespace ganchain::eval
