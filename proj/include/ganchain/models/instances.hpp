#pragma once

#include <string>
#include <vector>

#include "ganchain/data/dataset.hpp"
#include "ganchain/losses/losses.hpp"
#include "ganchain/models/nets.hpp"

namespace ganchain {

// A trained GAN: generator plus its co-trained discriminator, with the
// metadata needed to reconstruct how it was produced. `lineage` lists the
// ids of the frozen classifiers that appeared in its generator loss.
struct GeneratorInstance {
  std::string id;
  int iteration = 0;
  std::vector<std::string> lineage;
  losses::LossConfig loss;
  uint64_t seed = 0;
  long step_count = 0;
  GeneratorNet<float> net;
  DiscriminatorNet<float> disc;
};

struct ClassifierInstance {
  std::string id;
  int iteration = 0;
  std::vector<std::string> source_generator_ids;
  CapacityTier tier;
  uint64_t seed = 0;
  long step_count = 0;
  ClassifierNet<float> net;

  ClassifierInstance() : net(CapacityTier{}) {}
  explicit ClassifierInstance(CapacityTier t) : tier(t), net(t) {}
};

// Ten-class digit classifier used as the feature embedder for the Frechet
// metric. Identified by id + weights hash in every report that uses it.
struct EmbedderInstance {
  std::string id;
  uint64_t seed = 0;
  long step_count = 0;
  std::string corpus_hash;
  EmbedderNet<float> net;
};

// Eval-mode sampling, chunked to bound peak memory. Deterministic in
// (generator weights, n, seed).
TensorF sample_images(const GeneratorInstance& gen, int64_t n, uint64_t seed);

data::SampleSource as_sample_source(const GeneratorInstance& gen);

}  // namespace ganchain
