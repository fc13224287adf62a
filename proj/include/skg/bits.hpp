#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skg/errors.hpp"
#include "skg/series.hpp"

namespace skg {

// Bits travel through the pipeline as one byte per bit (values 0/1) and are
// packed MSB-first only at serialization boundaries.
using Bit = std::uint8_t;

struct BitFrame {
  std::vector<Bit> bits;
  std::size_t frame_index = 0;
  NodeId origin_node = NodeId::Alice;
};

inline std::vector<std::uint8_t> pack_msb_first(std::span<const Bit> bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] & 1u) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return out;
}

inline std::vector<Bit> unpack_msb_first(std::span<const std::uint8_t> bytes,
                                         std::size_t bit_count) {
  if (bit_count > bytes.size() * 8)
    throw DataError("unpack: " + std::to_string(bit_count) +
                    " bits requested from " + std::to_string(bytes.size()) +
                    " bytes");
  std::vector<Bit> out(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i)
    out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return out;
}

inline std::size_t hamming_distance(std::span<const Bit> a,
                                    std::span<const Bit> b) {
  if (a.size() != b.size())
    throw DataError("hamming distance needs equal lengths, got " +
                    std::to_string(a.size()) + " and " +
                    std::to_string(b.size()));
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] ^ b[i]) & 1u;
  return d;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

}  // namespace skg
