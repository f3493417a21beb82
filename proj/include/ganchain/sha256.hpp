#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ganchain {

// Minimal SHA-256, enough for checkpoint and manifest integrity hashes.
class Sha256 {
 public:
  Sha256();
  void update(const void* data, size_t len);
  std::array<uint8_t, 32> digest();  // finalizes; do not reuse afterwards

  static std::string hex(const void* data, size_t len);
  static std::string hex_of_file(const std::string& path);

 private:
  void process_block(const uint8_t* block);

  uint32_t h_[8];
  uint64_t total_len_ = 0;
  uint8_t buf_[64];
  size_t buf_len_ = 0;
};

std::string to_hex(const std::array<uint8_t, 32>& d);

}  // namespace ganchain
