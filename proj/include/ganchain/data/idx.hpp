#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ganchain::data {

// IDX binary format (big-endian), as used by the classic digit corpora:
// images carry magic 0x00000803 and dims [count, rows, cols]; labels carry
// magic 0x00000801 and dims [count].

struct IdxImages {
  int64_t count = 0;
  int rows = 0, cols = 0;
  std::vector<uint8_t> pixels;  // count*rows*cols, row-major
};

IdxImages read_idx_images(const std::string& path);
std::vector<uint8_t> read_idx_labels(const std::string& path);

void write_idx_images(const std::string& path, const std::vector<uint8_t>& pixels,
                      int64_t count, int rows, int cols);
void write_idx_labels(const std::string& path, const std::vector<uint8_t>& labels);

}  // namespace ganchain::data
