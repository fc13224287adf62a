#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "skg/bits.hpp"
#include "skg/detrend.hpp"
#include "skg/errors.hpp"

namespace skg {

enum class Labeling { NaturalBinary, Gray };

struct QuantizerConfig {
  int levels = 4;
  int bits_per_sample = 2;
  Labeling labeling = Labeling::Gray;
};

inline void validate(const QuantizerConfig& cfg) {
  if (cfg.levels < 2) throw ConfigError("quantizer needs at least 2 levels");
  if (cfg.bits_per_sample < 1 || cfg.bits_per_sample > 16)
    throw ConfigError("bits_per_sample must lie in [1, 16]");
  if (cfg.levels != (1 << cfg.bits_per_sample))
    throw ConfigError("levels must equal 2^bits_per_sample (got " +
                      std::to_string(cfg.levels) + " vs 2^" +
                      std::to_string(cfg.bits_per_sample) + ")");
}

inline unsigned gray_encode(unsigned i) { return i ^ (i >> 1); }

// Consecutive non-overlapping rows of exactly samples_per_frame residuals;
// the trailing remainder is discarded and its size reported.
struct FrameRows {
  std::vector<std::span<const double>> rows;
  std::size_t discarded_samples = 0;
};

inline FrameRows frame(const ResidualSeries& residual,
                       std::size_t samples_per_frame = 512) {
  if (samples_per_frame == 0)
    throw ConfigError("samples_per_frame must be positive");
  const std::size_t n = residual.residuals.size();
  if (n < samples_per_frame)
    throw DataError("residual series with " + std::to_string(n) +
                    " samples is shorter than one " +
                    std::to_string(samples_per_frame) + "-sample row");
  FrameRows out;
  const std::size_t count = n / samples_per_frame;
  out.rows.reserve(count);
  for (std::size_t r = 0; r < count; ++r)
    out.rows.emplace_back(residual.residuals.data() + r * samples_per_frame,
                          samples_per_frame);
  out.discarded_samples = n - count * samples_per_frame;
  return out;
}

// Equal-width bins between the row's own min and max; the top edge is
// clamped into the last bin.  Bin indices are emitted MSB-first under the
// configured labeling (Gray by default: 00, 01, 11, 10).
inline BitFrame quantize_row(std::span<const double> row,
                             const QuantizerConfig& cfg,
                             std::size_t frame_index = 0,
                             NodeId origin = NodeId::Alice) {
  validate(cfg);
  if (row.empty()) throw DataError("cannot quantize an empty row");
  double lo = row[0], hi = row[0];
  for (double v : row) {
    if (!std::isfinite(v)) throw DataError("non-finite residual in row");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo))
    throw DegenerateRowError("constant row (min = max = " +
                             std::to_string(lo) + ") cannot be quantized");

  BitFrame out;
  out.frame_index = frame_index;
  out.origin_node = origin;
  out.bits.reserve(row.size() * static_cast<std::size_t>(cfg.bits_per_sample));
  const double levels = static_cast<double>(cfg.levels);
  const double width = hi - lo;
  for (double v : row) {
    int idx = static_cast<int>(levels * (v - lo) / width);
    idx = std::clamp(idx, 0, cfg.levels - 1);
    unsigned code = static_cast<unsigned>(idx);
    if (cfg.labeling == Labeling::Gray) code = gray_encode(code);
    for (int b = cfg.bits_per_sample - 1; b >= 0; --b)
      out.bits.push_back(static_cast<Bit>((code >> b) & 1u));
  }
  return out;
}

struct QuantizeResult {
  std::vector<BitFrame> frames;
  std::size_t skipped_rows = 0;      // degenerate (constant) rows
  std::size_t discarded_samples = 0; // trailing partial row
};

// Frames and quantizes a residual series.  Degenerate rows are skipped and
// counted; surviving frames keep their row position as frame_index so
// sequences from different nodes stay aligned by index even if a row is
// dropped on one side only.
inline QuantizeResult quantize_frames(const ResidualSeries& residual,
                                      const QuantizerConfig& cfg,
                                      std::size_t samples_per_frame = 512) {
  validate(cfg);
  const FrameRows rows = frame(residual, samples_per_frame);
  QuantizeResult out;
  out.discarded_samples = rows.discarded_samples;
  out.frames.reserve(rows.rows.size());
  for (std::size_t r = 0; r < rows.rows.size(); ++r) {
    try {
      out.frames.push_back(
          quantize_row(rows.rows[r], cfg, r, residual.node_id));
    } catch (const DegenerateRowError&) {
      ++out.skipped_rows;
    }
  }
  return out;
}

// Total Hamming distance over total bits across aligned frame sequences.
inline double mismatch_rate(std::span<const BitFrame> a,
                            std::span<const BitFrame> b) {
  if (a.size() != b.size())
    throw DataError("mismatch_rate: frame counts differ (" +
                    std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  if (a.empty()) throw DataError("mismatch_rate: no frames");
  std::size_t dist = 0, total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].bits.size() != b[i].bits.size())
      throw DataError("mismatch_rate: frame " + std::to_string(i) +
                      " lengths differ");
    dist += hamming_distance(a[i].bits, b[i].bits);
    total += a[i].bits.size();
  }
  return static_cast<double>(dist) / static_cast<double>(total);
}

}  // namespace skg
