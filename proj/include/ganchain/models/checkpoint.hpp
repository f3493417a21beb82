#pragma once

#include <string>
#include <vector>

#include "ganchain/models/instances.hpp"

namespace ganchain::models {

inline constexpr int kCheckpointFormatVersion = 1;

// Checkpoints are a binary weight blob (<id>.gcw) with a JSON metadata
// sidecar (<id>.json). The blob stores named float32 tensors; the sidecar
// records kind, seeds, tier, iteration, lineage, step counts, the format
// version and the blob's sha256.

void save_generator(const std::string& dir, GeneratorInstance& gen);
GeneratorInstance load_generator(const std::string& dir, const std::string& id);

void save_classifier(const std::string& dir, ClassifierInstance& cls);
ClassifierInstance load_classifier(const std::string& dir, const std::string& id);

void save_embedder(const std::string& dir, EmbedderInstance& emb);
EmbedderInstance load_embedder(const std::string& dir, const std::string& id);

bool checkpoint_exists(const std::string& dir, const std::string& id);

// sha256 of the weight blob; the frozen-classifier invariants are asserted
// against this.
std::string weights_hash(const std::string& dir, const std::string& id);

// Verifies sidecar/blob consistency (format version + recorded hash).
void verify_checkpoint(const std::string& dir, const std::string& id);

}  // namespace ganchain::models
