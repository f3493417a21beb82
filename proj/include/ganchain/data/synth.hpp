#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ganchain/rng.hpp"

namespace ganchain::data {

// Deterministic synthetic digit-glyph corpus. Ten stroke-based glyph classes
// are rendered at 28x28 with per-sample affine jitter, stroke-width and
// intensity variation, and written in IDX format. Stands in for a real
// handwritten-digit corpus in tests and demos.

std::vector<uint8_t> render_glyph(int digit, Rng& rng);

struct SynthCorpusFiles {
  std::string images_path;
  std::string labels_path;
};

SynthCorpusFiles synth_corpus(const std::string& dir, int64_t count, uint64_t seed);

}  // namespace ganchain::data
