#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "skg/bits.hpp"
#include "skg/errors.hpp"
#include "skg/sha256.hpp"

namespace skg {

// One 256-bit key together with the provenance needed for leakage
// accounting: how many reconciled bits went in and at what assumed
// per-bit conditional min-entropy.
struct KeyMaterial {
  std::array<std::uint8_t, 32> key{};
  std::size_t input_bit_count = 0;
  double h_cond_used = 0.0;
  std::vector<std::size_t> frame_ids;
};

// Number of reconciled bits that must be hashed so the input carries at
// least 256 bits of conditional min-entropy at h_cond bits per bit.
inline std::size_t required_input_bits(double h_cond) {
  if (!(h_cond > 0.0))
    throw CannotAmplifyError(
        "conditional min-entropy is not positive; no secure key is "
        "extractable");
  if (h_cond > 1.0)
    throw ConfigError("per-bit min-entropy cannot exceed 1, got " +
                      std::to_string(h_cond));
  return static_cast<std::size_t>(std::ceil(256.0 / h_cond));
}

// Hashes the reconciled frames (concatenated in frame_index order, truncated
// to exactly the required bit count) down to one 256-bit key.
inline KeyMaterial amplify(std::span<const BitFrame> frames, double h_cond) {
  const std::size_t need = required_input_bits(h_cond);
  std::size_t have = 0;
  for (const BitFrame& f : frames) have += f.bits.size();
  if (have < need)
    throw CannotAmplifyError("privacy amplification needs " +
                             std::to_string(need) + " input bits but only " +
                             std::to_string(have) + " are available");

  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return frames[a].frame_index < frames[b].frame_index;
  });

  std::vector<Bit> input;
  input.reserve(need);
  KeyMaterial out;
  for (std::size_t idx : order) {
    if (input.size() >= need) break;
    const BitFrame& f = frames[idx];
    const std::size_t take = std::min(need - input.size(), f.bits.size());
    input.insert(input.end(), f.bits.begin(),
                 f.bits.begin() + static_cast<long>(take));
    out.frame_ids.push_back(f.frame_index);
  }

  const auto packed = pack_msb_first(input);
  out.key = Sha256::digest(packed);
  out.input_bit_count = need;
  out.h_cond_used = h_cond;
  return out;
}

struct AmplifyStreamResult {
  std::vector<KeyMaterial> keys;
  std::size_t leftover_bits = 0;  // tail too short for another key
};

// Consumes the frame sequence in index order, cutting consecutive
// required_input_bits(h_cond)-sized windows and hashing each into a key.
// The remainder shorter than one window is reported, not hashed.
inline AmplifyStreamResult amplify_stream(std::span<const BitFrame> frames,
                                          double h_cond) {
  const std::size_t need = required_input_bits(h_cond);

  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return frames[a].frame_index < frames[b].frame_index;
  });

  AmplifyStreamResult out;
  std::vector<Bit> window;
  window.reserve(need);
  std::vector<std::size_t> contributing;
  for (std::size_t idx : order) {
    const BitFrame& f = frames[idx];
    std::size_t off = 0;
    while (off < f.bits.size()) {
      if (contributing.empty() || contributing.back() != f.frame_index)
        contributing.push_back(f.frame_index);
      const std::size_t take =
          std::min(need - window.size(), f.bits.size() - off);
      window.insert(window.end(), f.bits.begin() + static_cast<long>(off),
                    f.bits.begin() + static_cast<long>(off + take));
      off += take;
      if (window.size() == need) {
        KeyMaterial km;
        km.key = Sha256::digest(pack_msb_first(window));
        km.input_bit_count = need;
        km.h_cond_used = h_cond;
        km.frame_ids = contributing;
        out.keys.push_back(std::move(km));
        window.clear();
        contributing.clear();
      }
    }
  }
  out.leftover_bits = window.size();
  return out;
}

}  // namespace skg
