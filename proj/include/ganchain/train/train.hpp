#pragma once

#include <functional>
#include <optional>

#include "ganchain/data/dataset.hpp"
#include "ganchain/models/instances.hpp"
#include "ganchain/nn/adam.hpp"

namespace ganchain::train {

struct TrainSpec {
  long steps = 2000;
  int batch_size = 64;
  nn::AdamConfig optimizer;  // adaptive-moment defaults: 2e-4, 0.5, 0.999
  long eval_every = 100;
  // The generator has ~100x the discriminator's parameter count, so an even
  // step size lets it outrun its discriminator at small scale; the
  // discriminator gets a faster clock instead of extra steps to keep the
  // 1:1 alternation.
  double disc_lr_scale = 4.0;
  // Discriminator-only prologue before the alternation starts.
  long disc_warmup_steps = 25;

  void validate() const {
    if (steps <= 0) throw ArgumentError("steps must be > 0");
    if (batch_size <= 0) throw ArgumentError("batch_size must be > 0");
    if (eval_every <= 0) throw ArgumentError("eval_every must be > 0");
    if (disc_lr_scale <= 0) throw ArgumentError("disc_lr_scale must be > 0");
    if (disc_warmup_steps < 0) throw ArgumentError("disc_warmup_steps must be >= 0");
  }
};

// One line-delimited record per logged step: the total losses plus each
// term of the generator objective (classifier terms reported separately
// and unweighted).
struct TrainLogEntry {
  long step = 0;
  double loss_g = 0, loss_d = 0;
  double term_d = 0;               // -mean log D(G(w))
  std::vector<double> term_c;      // -mean log C_j(G(w)) per frozen classifier
};
using LogSink = std::function<void(const TrainLogEntry&)>;

// Stage-1 GAN training. `frozen` lists the classifiers appearing in the
// generator loss; they are copied internally and never updated. The number
// and iterations of frozen classifiers must be consistent with the loss
// variant (fool-all wants one per preceding iteration, memoryless/normalized
// exactly one from the immediately preceding iteration, multi-classifier t
// instances from one iteration).
GeneratorInstance train_gan(const data::DatasetSplit& data,
                            const std::vector<const ClassifierInstance*>& frozen,
                            const losses::LossConfig& loss_config, const TrainSpec& spec,
                            uint64_t seed, const LogSink& log = {});

// Warm-started variant: continues from `base` weights with a modified loss.
GeneratorInstance finetune_gan(const GeneratorInstance& base,
                               const std::vector<const ClassifierInstance*>& frozen,
                               const losses::LossConfig& loss_config, const TrainSpec& spec,
                               uint64_t seed, const LogSink& log = {});

// Stage-2 classifier training on a balanced real/generated set drawn from
// `sources` (all of one iteration). Decision threshold is fixed at 0.5.
ClassifierInstance train_classifier(const data::DatasetSplit& real,
                                    const std::vector<const GeneratorInstance*>& sources,
                                    const CapacityTier& tier, const TrainSpec& spec,
                                    uint64_t seed, int64_t samples_per_generator = 2000,
                                    const LogSink& log = {});

// Ten-class digit classifier on the real train split; requires labels.
EmbedderInstance train_embedder(const data::DatasetSplit& real, const TrainSpec& spec,
                                uint64_t seed);

}  // namespace ganchain::train
