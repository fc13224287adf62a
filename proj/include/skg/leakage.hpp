#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "skg/bits.hpp"
#include "skg/errors.hpp"
#include "skg/polar.hpp"

namespace skg {

enum class EstimatorKind { Frequentist, NearestNeighbor };

inline const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Frequentist: return "frequentist";
    case EstimatorKind::NearestNeighbor: return "knn";
  }
  return "?";
}

struct EntropyEstimate {
  double bits_per_symbol = 0.0;  // per bit position, in [0, 1]
  std::size_t sample_count = 0;
  EstimatorKind estimator = EstimatorKind::Frequentist;
  int block_size_b = 0;
};

struct LeakageRecord {
  double marginal_h = 0.0;
  double conditional_h = 0.0;
  double leakage_bits = 0.0;   // clamped at 0 from below
  double raw_difference = 0.0; // marginal - conditional before clamping
};

// Estimator tolerance: estimates are statistical, so identities like
// "conditioning cannot increase entropy" hold only to within this slack.
inline constexpr double kEntropyTolerance = 0.02;

struct LeakageConfig {
  EstimatorKind estimator = EstimatorKind::Frequentist;
  int digest_bits = 8;  // syndrome digest width in the conditioning tuple
};

namespace detail {

inline void check_block_size(int b) {
  if (b < 1 || b > 12)
    throw ConfigError("block size must lie in [1, 12], got " +
                      std::to_string(b));
}

inline std::size_t required_samples(int b) {
  return std::size_t{10} << b;  // 10 * 2^b
}

inline std::uint32_t block_value(std::span<const Bit> bits, std::size_t start,
                                 int b) {
  std::uint32_t v = 0;
  for (int j = 0; j < b; ++j)
    v = (v << 1) | (bits[start + static_cast<std::size_t>(j)] & 1u);
  return v;
}

}  // namespace detail

// Plug-in (maximum-likelihood) min-entropy of the frame bits over blocks of
// b bits: -log2(max empirical block probability) / b.
inline EntropyEstimate min_entropy(std::span<const BitFrame> frames, int b) {
  detail::check_block_size(b);
  if (frames.empty()) throw DataError("min_entropy needs at least one frame");
  std::size_t samples = 0;
  for (const BitFrame& f : frames) {
    if (f.bits.empty() || f.bits.size() % static_cast<std::size_t>(b) != 0)
      throw ConfigError("block size " + std::to_string(b) +
                        " does not divide the frame length " +
                        std::to_string(f.bits.size()));
    samples += f.bits.size() / static_cast<std::size_t>(b);
  }
  const std::size_t need = detail::required_samples(b);
  if (samples < need)
    throw EstimationError("min_entropy at block size " + std::to_string(b) +
                          " requires at least " + std::to_string(need) +
                          " samples, got " + std::to_string(samples));

  std::vector<std::size_t> count(std::size_t{1} << b, 0);
  for (const BitFrame& f : frames) {
    for (std::size_t off = 0; off < f.bits.size();
         off += static_cast<std::size_t>(b))
      ++count[detail::block_value(f.bits, off, b)];
  }
  const std::size_t maxc = *std::max_element(count.begin(), count.end());
  const double pmax =
      static_cast<double>(maxc) / static_cast<double>(samples);
  EntropyEstimate est;
  est.bits_per_symbol =
      std::clamp(-std::log2(pmax) / static_cast<double>(b), 0.0, 1.0);
  est.sample_count = samples;
  est.estimator = EstimatorKind::Frequentist;
  est.block_size_b = b;
  return est;
}

namespace detail {

// The conditioning observation for block t of frame f: the co-located b bits
// of Eve's quantized frame and of her decoded frame, plus a fixed-width
// digest of the published syndrome (digest bit j is syndrome bit
// (start + j) mod |s|, with start proportional to the block's position).
// Conditioning on a digest instead of the whole syndrome keeps the alphabet
// tractable; collapsing observations can only make Eve look stronger, so the
// resulting bound errs in the safe direction.
struct JointSamples {
  std::vector<std::uint64_t> obs;  // w
  std::vector<std::uint32_t> target;
  int obs_width = 0;
};

inline JointSamples build_joint(std::span<const BitFrame> r_a,
                                std::span<const BitFrame> r_e,
                                std::span<const Syndrome> s_a,
                                std::span<const BitFrame> r_e_prime, int b,
                                int digest_bits) {
  if (r_a.size() != r_e.size() || r_a.size() != r_e_prime.size())
    throw DataError("conditional_min_entropy: frame counts differ");
  if (!s_a.empty() && s_a.size() != r_a.size())
    throw DataError(
        "conditional_min_entropy: syndrome count must be 0 or match the "
        "frame count");
  if (r_a.empty())
    throw DataError("conditional_min_entropy needs at least one frame");
  if (digest_bits < 0 || digest_bits > 16)
    throw ConfigError("digest width must lie in [0, 16]");

  JointSamples out;
  for (std::size_t f = 0; f < r_a.size(); ++f) {
    const std::size_t len = r_a[f].bits.size();
    if (r_e[f].bits.size() != len || r_e_prime[f].bits.size() != len)
      throw DataError("conditional_min_entropy: frame " + std::to_string(f) +
                      " lengths differ across inputs");
    if (len == 0 || len % static_cast<std::size_t>(b) != 0)
      throw ConfigError("block size " + std::to_string(b) +
                        " does not divide the frame length " +
                        std::to_string(len));
    const std::size_t s_len = s_a.empty() ? 0 : s_a[f].bits.size();
    const int d = s_len == 0 ? 0 : digest_bits;
    out.obs_width = 2 * b + d;
    const std::size_t blocks = len / static_cast<std::size_t>(b);
    for (std::size_t t = 0; t < blocks; ++t) {
      const std::size_t off = t * static_cast<std::size_t>(b);
      std::uint64_t w = block_value(r_e[f].bits, off, b);
      w = (w << b) | block_value(r_e_prime[f].bits, off, b);
      if (d > 0) {
        const std::size_t start = off * s_len / len;
        std::uint32_t digest = 0;
        for (int j = 0; j < d; ++j)
          digest = (digest << 1) |
                   (s_a[f].bits[(start + static_cast<std::size_t>(j)) % s_len] &
                    1u);
        w = (w << d) | digest;
      }
      out.obs.push_back(w);
      out.target.push_back(block_value(r_a[f].bits, off, b));
    }
  }
  return out;
}

// Expected max-posterior success probability, plug-in estimate:
// sum over distinct w of max_x count(w, x), divided by N.
inline double frequentist_guess_prob(const JointSamples& joint) {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
  pairs.reserve(joint.obs.size());
  for (std::size_t i = 0; i < joint.obs.size(); ++i)
    pairs.emplace_back(joint.obs[i], joint.target[i]);
  std::sort(pairs.begin(), pairs.end());

  std::uint64_t total_max = 0;
  std::size_t i = 0;
  while (i < pairs.size()) {
    const std::uint64_t w = pairs[i].first;
    std::uint64_t best = 0;
    while (i < pairs.size() && pairs[i].first == w) {
      const std::uint32_t x = pairs[i].second;
      std::uint64_t run = 0;
      while (i < pairs.size() && pairs[i].first == w && pairs[i].second == x) {
        ++run;
        ++i;
      }
      best = std::max(best, run);
    }
    total_max += best;
  }
  return static_cast<double>(total_max) / static_cast<double>(pairs.size());
}

// Leave-one-out k-NN (k = ceil(ln N)) under Hamming distance on the
// observation word.  Neighbor sets grow bucket-by-bucket: all samples whose
// observation lies within the smallest radius that yields at least k
// neighbors vote, majority wins, ties go to the smaller class label.
inline double knn_guess_prob(const JointSamples& joint, int b) {
  const std::size_t n = joint.obs.size();
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(std::log(static_cast<double>(n))));
  const std::size_t classes = std::size_t{1} << b;
  const int width = joint.obs_width;
  if (width > 20)
    throw ConfigError(
        "k-NN estimator supports observation words up to 20 bits, got " +
        std::to_string(width));

  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
  for (std::size_t i = 0; i < n; ++i) {
    auto& hist = buckets[joint.obs[i]];
    if (hist.empty()) hist.resize(classes, 0);
    ++hist[joint.target[i]];
  }

  // Neighbor masks grouped by Hamming weight, enumerated in a fixed order.
  std::vector<std::vector<std::uint64_t>> masks_by_weight(
      static_cast<std::size_t>(width) + 1);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << width); ++mask)
    masks_by_weight[static_cast<std::size_t>(__builtin_popcountll(mask))]
        .push_back(mask);

  std::uint64_t correct = 0;
  std::vector<std::uint64_t> votes(classes);
  for (const auto& [w, hist] : buckets) {
    votes.assign(classes, 0);
    std::uint64_t gathered = 0;
    for (std::size_t radius = 0; radius <= static_cast<std::size_t>(width);
         ++radius) {
      for (std::uint64_t mask : masks_by_weight[radius]) {
        const auto it = buckets.find(w ^ mask);
        if (it == buckets.end()) continue;
        for (std::size_t x = 0; x < classes; ++x) {
          votes[x] += it->second[x];
          gathered += it->second[x];
        }
      }
      if (gathered > k) break;  // > k: self is included in its own bucket
    }
    // Each sample in this bucket predicts with itself removed.
    for (std::size_t x = 0; x < classes; ++x) {
      const std::uint32_t c = hist[x];
      if (c == 0) continue;
      votes[x] -= 1;
      std::size_t best = 0;
      for (std::size_t y = 1; y < classes; ++y)
        if (votes[y] > votes[best]) best = y;
      votes[x] += 1;
      if (best == x) correct += c;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace detail

// Conditional min-entropy of Alice's reconciled blocks given Eve's view
// (her quantized bits, her decoded bits, and the syndrome digest):
// -log2( E_w[ max_x P(x|w) ] ) / b.
inline EntropyEstimate conditional_min_entropy(
    std::span<const BitFrame> r_a, std::span<const BitFrame> r_e,
    std::span<const Syndrome> s_a, std::span<const BitFrame> r_e_prime, int b,
    const LeakageConfig& cfg = LeakageConfig{}) {
  detail::check_block_size(b);
  const detail::JointSamples joint =
      detail::build_joint(r_a, r_e, s_a, r_e_prime, b, cfg.digest_bits);
  const std::size_t need = detail::required_samples(b);
  if (joint.obs.size() < need)
    throw EstimationError("conditional_min_entropy at block size " +
                          std::to_string(b) + " requires at least " +
                          std::to_string(need) + " samples, got " +
                          std::to_string(joint.obs.size()));

  double guess;
  if (cfg.estimator == EstimatorKind::Frequentist)
    guess = detail::frequentist_guess_prob(joint);
  else
    guess = detail::knn_guess_prob(joint, b);

  EntropyEstimate est;
  est.bits_per_symbol =
      guess <= 0.0
          ? 1.0
          : std::clamp(-std::log2(guess) / static_cast<double>(b), 0.0, 1.0);
  est.sample_count = joint.obs.size();
  est.estimator = cfg.estimator;
  est.block_size_b = b;
  return est;
}

// Leakage: marginal minus conditional min-entropy, clamped at zero from
// below.  A deficit beyond the estimator tolerance means the two estimates
// cannot have come from the same data.
inline LeakageRecord leakage(const EntropyEstimate& marginal,
                             const EntropyEstimate& conditional) {
  if (marginal.block_size_b != conditional.block_size_b)
    throw ConfigError("leakage: block sizes differ (" +
                      std::to_string(marginal.block_size_b) + " vs " +
                      std::to_string(conditional.block_size_b) + ")");
  LeakageRecord rec;
  rec.marginal_h = marginal.bits_per_symbol;
  rec.conditional_h = conditional.bits_per_symbol;
  rec.raw_difference = marginal.bits_per_symbol - conditional.bits_per_symbol;
  if (rec.raw_difference < -kEntropyTolerance)
    throw EstimationError(
        "conditional entropy exceeds marginal by more than the estimator "
        "tolerance (difference " +
        std::to_string(rec.raw_difference) + ")");
  rec.leakage_bits = std::max(rec.raw_difference, 0.0);
  return rec;
}

}  // namespace skg
