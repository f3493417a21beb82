#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ganchain/tensor.hpp"

namespace ganchain::data {

// Batch of 28x28 grayscale images, NHWC, values normalized to [-1, 1].
struct ImageBatch {
  TensorF pixels;  // [N, 28, 28, 1]

  int64_t count() const { return pixels.rank() == 4 ? pixels.dim(0) : 0; }
  bool empty() const { return count() == 0; }
};

ImageBatch make_image_batch(int64_t n);
void validate_image_batch(const ImageBatch& b);

// Deterministic train/eval partition of a corpus. Labels are optional; they
// are carried through when the corpus provides them (needed by the
// ten-class embedder behind the Frechet metric).
struct DatasetSplit {
  ImageBatch train, eval;
  std::vector<int> train_labels, eval_labels;  // empty when unlabeled
  uint64_t split_seed = 0;
  double split_ratio = 0.8;
  std::string corpus_hash;  // sha256 of the raw corpus bytes

  bool labeled() const { return !train_labels.empty(); }
};

// Latent batch: [batch, 100] i.i.d. standard normal, reproducible from seed.
struct LatentBatch {
  TensorF vectors;
  uint64_t seed = 0;
};

LatentBatch sample_latents(uint64_t seed, int64_t batch);

// Loads a corpus and splits it. `corpus_path` may be an IDX image file, a
// directory containing IDX files (images plus optional labels), or a
// directory tree of 28x28 PNG files (class subdirectories named 0..9 give
// labels; anything else is unlabeled).
DatasetSplit load_dataset(const std::string& corpus_path, double split_ratio,
                          uint64_t split_seed);

// On-disk cache of a split's index permutation keyed by
// (corpus hash, ratio, seed). Returns false when no valid entry exists.
bool load_split_cache(const std::string& cache_dir, const std::string& corpus_hash,
                      double ratio, uint64_t seed, std::vector<int64_t>& order);
void save_split_cache(const std::string& cache_dir, const std::string& corpus_hash,
                      double ratio, uint64_t seed, const std::vector<int64_t>& order);

// A generated-image source for balanced-set assembly; the training module
// adapts trained generator instances to this shape.
struct SampleSource {
  std::string id;
  std::function<TensorF(int64_t count, uint64_t seed)> sample;
};

// Balanced real/generated set with per-image provenance.
struct LabeledImageSet {
  ImageBatch images;
  std::vector<float> labels;          // 1 = real, 0 = generated
  std::vector<std::string> provenance;  // "corpus" or generator id
};

struct BalancedCounts {
  int64_t generated = 0;
  int64_t real = 0;
  int64_t repetition_factor = 1;  // how often the real pool is reused
};

// Pure arithmetic of the balanced-set contract, testable at full scale
// without materializing anything.
BalancedCounts balanced_set_counts(int64_t n_generators, int64_t samples_per_generator,
                                   int64_t real_pool);

LabeledImageSet build_balanced_set(const ImageBatch& real,
                                   const std::vector<SampleSource>& generators,
                                   int64_t samples_per_generator, uint64_t seed);

// Takes `n` images from a batch in a seeded order (cycling past the end).
ImageBatch draw_images(const ImageBatch& from, int64_t n, uint64_t seed);

}  // namespace ganchain::data
