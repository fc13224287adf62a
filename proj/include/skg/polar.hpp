#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "skg/bits.hpp"
#include "skg/errors.hpp"

namespace skg {

// Slepian-Wolf reconciliation with polar codes.
//
// Convention: x = u * G_n over GF(2) with G_n the Kronecker power of
// [[1,0],[1,1]] in natural order (no bit-reversal permutation).  G_n is its
// own inverse, so the same transform maps source words to u-domain words and
// back.  Alice publishes u = G_n(x_A) restricted to the least reliable
// positions ("syndrome"); Bob pins those positions during successive-
// cancellation decoding and recovers x_A from his own correlated bits.

struct PolarCodeSpec {
  std::size_t block_length_n = 0;
  std::vector<std::uint32_t> syndrome_positions;  // sorted ascending
  double code_rate = 0.0;  // exactly 1 - |syndrome_positions| / n
  double design_crossover = 0.0;
};

struct Syndrome {
  std::vector<Bit> bits;          // one per syndrome position, ascending
  std::size_t block_length_n = 0; // consistency tag for the generating spec
};

namespace detail {

inline bool is_pow2(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

// Bhattacharyya parameters of the n synthesized channels in u-domain order.
// The decoder splits top-down — the high half of the index range is decided
// after the low half — so the top-level degrade/upgrade is the op applied
// first in the composition and each doubling refines within the existing
// blocks: Z[2i] gets the degraded "check" combination (Z -> 2Z - Z^2),
// Z[2i+1] the upgraded one (Z -> Z^2).
inline std::vector<double> bhattacharyya(std::size_t n, double z0) {
  std::vector<double> z{z0};
  while (z.size() < n) {
    std::vector<double> next(z.size() * 2);
    for (std::size_t i = 0; i < z.size(); ++i) {
      next[2 * i] = 2.0 * z[i] - z[i] * z[i];
      next[2 * i + 1] = z[i] * z[i];
    }
    z.swap(next);
  }
  return z;
}

// Numerically stable boxplus: LLR of a XOR b given their LLRs.
// Equals sign(a)sign(b)min(|a|,|b|) plus the exact log-domain correction.
inline double boxplus(double a, double b) {
  const double sign = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
  const double m = std::min(std::fabs(a), std::fabs(b));
  return sign * m + std::log1p(std::exp(-std::fabs(a + b))) -
         std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace detail

inline void polar_transform_inplace(std::span<Bit> bits) {
  if (!detail::is_pow2(bits.size()))
    throw DataError("polar transform needs a power-of-two length, got " +
                    std::to_string(bits.size()));
  for (std::size_t len = 1; len < bits.size(); len *= 2) {
    for (std::size_t i = 0; i < bits.size(); i += 2 * len) {
      for (std::size_t j = 0; j < len; ++j)
        bits[i + j] = static_cast<Bit>((bits[i + j] ^ bits[i + j + len]) & 1u);
    }
  }
}

inline std::vector<Bit> polar_transform(std::span<const Bit> bits) {
  std::vector<Bit> out(bits.begin(), bits.end());
  polar_transform_inplace(out);
  return out;
}

inline PolarCodeSpec construct_code(std::size_t n, double code_rate,
                                    double design_crossover) {
  if (!detail::is_pow2(n) || n < 2)
    throw ConfigError("block length must be a power of two >= 2, got " +
                      std::to_string(n));
  if (!(code_rate > 0.0 && code_rate < 1.0))
    throw ConfigError("code_rate must lie in (0, 1)");
  if (!(design_crossover > 0.0 && design_crossover < 0.5))
    throw ConfigError("design_crossover must lie in (0, 0.5)");

  const double p = design_crossover;
  const double z0 = 2.0 * std::sqrt(p * (1.0 - p));
  const std::vector<double> z = detail::bhattacharyya(n, z0);

  const auto s = static_cast<std::size_t>(
      std::llround((1.0 - code_rate) * static_cast<double>(n)));
  if (s < 1 || s >= n)
    throw ConfigError("code_rate " + std::to_string(code_rate) +
                      " leaves no usable syndrome size at n = " +
                      std::to_string(n));

  // The s least reliable positions (largest Z); ties go to the lower index.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return z[a] > z[b];
                   });
  PolarCodeSpec spec;
  spec.block_length_n = n;
  spec.syndrome_positions.assign(order.begin(),
                                 order.begin() + static_cast<long>(s));
  std::sort(spec.syndrome_positions.begin(), spec.syndrome_positions.end());
  spec.code_rate = 1.0 - static_cast<double>(s) / static_cast<double>(n);
  spec.design_crossover = design_crossover;
  return spec;
}

inline Syndrome make_syndrome(const BitFrame& alice,
                              const PolarCodeSpec& spec) {
  if (alice.bits.size() != spec.block_length_n)
    throw DataError("make_syndrome: frame has " +
                    std::to_string(alice.bits.size()) + " bits, code expects " +
                    std::to_string(spec.block_length_n));
  const std::vector<Bit> u = polar_transform(alice.bits);
  Syndrome s;
  s.block_length_n = spec.block_length_n;
  s.bits.reserve(spec.syndrome_positions.size());
  for (std::uint32_t pos : spec.syndrome_positions) s.bits.push_back(u[pos]);
  return s;
}

namespace detail {

// Recursive successive-cancellation pass.  `llr` holds the LLRs of the
// x-domain sub-block, `base` is the absolute u-domain index of its first
// position.  Returns the u-domain decisions for the sub-block.
//
// The split follows the encoder identity x = (enc(uL^uR), enc(uR)): the two
// halves of x are independent observations of enc(uL) XOR-combined with
// enc(uR), so the first half of u decodes through boxplus-combined LLRs and,
// once enc(uL) is known, both halves fuse into a refined channel for uR.
inline void sc_decode(std::span<const double> llr, std::size_t base,
                      const std::vector<signed char>& pinned,
                      std::span<Bit> u_out) {
  const std::size_t n = llr.size();
  if (n == 1) {
    const signed char pin = pinned[base];
    if (pin >= 0)
      u_out[0] = static_cast<Bit>(pin);
    else
      u_out[0] = llr[0] < 0.0 ? 1 : 0;  // exact ties resolve to 0
    return;
  }
  const std::size_t h = n / 2;
  std::vector<double> lo(h);
  for (std::size_t j = 0; j < h; ++j) lo[j] = boxplus(llr[j], llr[j + h]);
  sc_decode(lo, base, pinned, u_out.subspan(0, h));

  std::vector<Bit> beta(u_out.begin(), u_out.begin() + static_cast<long>(h));
  polar_transform_inplace(beta);
  for (std::size_t j = 0; j < h; ++j)
    lo[j] = llr[j + h] + (beta[j] ? -llr[j] : llr[j]);
  sc_decode(lo, base + h, pinned, u_out.subspan(h, h));
}

}  // namespace detail

// Successive-cancellation decoding of the virtual BSC(crossover_p) whose
// output is `side_info`.  Syndrome positions are pinned; the result is the
// re-transformed source estimate, which satisfies the syndrome by
// construction.
inline BitFrame decode(const BitFrame& side_info, const Syndrome& syndrome,
                       const PolarCodeSpec& spec, double crossover_p) {
  if (!(crossover_p > 0.0 && crossover_p < 0.5))
    throw ConfigError("crossover probability must lie in (0, 0.5)");
  if (side_info.bits.size() != spec.block_length_n)
    throw DataError("decode: side info has " +
                    std::to_string(side_info.bits.size()) +
                    " bits, code expects " +
                    std::to_string(spec.block_length_n));
  if (syndrome.bits.size() != spec.syndrome_positions.size() ||
      (syndrome.block_length_n != 0 &&
       syndrome.block_length_n != spec.block_length_n))
    throw DataError("decode: syndrome does not match the code spec");

  const std::size_t n = spec.block_length_n;
  std::vector<signed char> pinned(n, -1);
  for (std::size_t i = 0; i < spec.syndrome_positions.size(); ++i)
    pinned[spec.syndrome_positions[i]] =
        static_cast<signed char>(syndrome.bits[i] & 1u);

  const double l0 = std::log((1.0 - crossover_p) / crossover_p);
  std::vector<double> llr(n);
  for (std::size_t j = 0; j < n; ++j)
    llr[j] = (side_info.bits[j] & 1u) ? -l0 : l0;

  std::vector<Bit> u(n);
  detail::sc_decode(llr, 0, pinned, u);
  polar_transform_inplace(u);

  BitFrame out;
  out.bits = std::move(u);
  out.frame_index = side_info.frame_index;
  out.origin_node = side_info.origin_node;
  return out;
}

inline double frame_error_rate(std::span<const BitFrame> decoded,
                               std::span<const BitFrame> reference) {
  if (decoded.size() != reference.size())
    throw DataError("frame_error_rate: counts differ (" +
                    std::to_string(decoded.size()) + " vs " +
                    std::to_string(reference.size()) + ")");
  if (decoded.empty()) throw DataError("frame_error_rate: no frames");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < decoded.size(); ++i) {
    if (decoded[i].bits != reference[i].bits) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(decoded.size());
}

// --- Serialization ---------------------------------------------------------
//
// A syndrome stream is a 16-byte header followed by the packed bits of each
// record (MSB-first, each record padded to a whole byte):
//
//   offset 0  : magic "SKGS"
//   offset 4  : block length n          (uint32, little endian)
//   offset 8  : code-rate numerator n-s (uint16, little endian)
//   offset 10 : code-rate denominator n (uint16, little endian)
//   offset 12 : design crossover        (float32, little endian)

namespace detail {

inline void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

inline void put_u16le(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

inline std::uint32_t get_u32le(std::span<const std::uint8_t> b,
                               std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

inline std::uint16_t get_u16le(std::span<const std::uint8_t> b,
                               std::size_t off) {
  return static_cast<std::uint16_t>(
      static_cast<std::uint32_t>(b[off]) |
      (static_cast<std::uint32_t>(b[off + 1]) << 8));
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_syndromes(
    const PolarCodeSpec& spec, std::span<const Syndrome> syndromes) {
  const std::size_t n = spec.block_length_n;
  const std::size_t s = spec.syndrome_positions.size();
  if (n - s > 0xFFFF || n > 0xFFFF)
    throw ConfigError("syndrome serialization supports n up to 65535");
  std::vector<std::uint8_t> out;
  out.reserve(16 + syndromes.size() * ((s + 7) / 8));
  for (char m : {'S', 'K', 'G', 'S'})
    out.push_back(static_cast<std::uint8_t>(m));
  detail::put_u32le(out, static_cast<std::uint32_t>(n));
  detail::put_u16le(out, static_cast<std::uint16_t>(n - s));
  detail::put_u16le(out, static_cast<std::uint16_t>(n));
  const float crossover = static_cast<float>(spec.design_crossover);
  std::uint32_t cbits;
  static_assert(sizeof(cbits) == sizeof(crossover));
  std::memcpy(&cbits, &crossover, sizeof(cbits));
  detail::put_u32le(out, cbits);

  for (const Syndrome& rec : syndromes) {
    if (rec.bits.size() != s)
      throw DataError("serialize_syndromes: record length " +
                      std::to_string(rec.bits.size()) + " does not match " +
                      std::to_string(s));
    const auto packed = pack_msb_first(rec.bits);
    out.insert(out.end(), packed.begin(), packed.end());
  }
  return out;
}

struct SyndromeStream {
  PolarCodeSpec spec;
  std::vector<Syndrome> records;
};

inline SyndromeStream parse_syndromes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || bytes[0] != 'S' || bytes[1] != 'K' ||
      bytes[2] != 'G' || bytes[3] != 'S')
    throw FormatError("not a syndrome stream (bad magic or truncated header)");
  const std::uint32_t n = detail::get_u32le(bytes, 4);
  const std::uint16_t num = detail::get_u16le(bytes, 8);
  const std::uint16_t den = detail::get_u16le(bytes, 10);
  const std::uint32_t cbits = detail::get_u32le(bytes, 12);
  float crossover;
  std::memcpy(&crossover, &cbits, sizeof(crossover));

  if (den == 0 || den != n || num == 0 || num >= den)
    throw FormatError("syndrome header rate fields are inconsistent");
  if (!(crossover > 0.0f && crossover < 0.5f))
    throw FormatError("syndrome header crossover out of range");

  SyndromeStream out;
  out.spec = construct_code(n, static_cast<double>(num) / den,
                            static_cast<double>(crossover));
  const std::size_t s = out.spec.syndrome_positions.size();
  const std::size_t rec_bytes = (s + 7) / 8;
  const std::size_t payload = bytes.size() - 16;
  if (rec_bytes == 0 || payload % rec_bytes != 0)
    throw FormatError("syndrome payload is not a whole number of records");
  const std::size_t count = payload / rec_bytes;
  out.records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Syndrome rec;
    rec.block_length_n = n;
    rec.bits = unpack_msb_first(bytes.subspan(16 + i * rec_bytes, rec_bytes), s);
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace skg
