#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skg/amplify.hpp"
#include "skg/bits.hpp"
#include "skg/errors.hpp"
#include "skg/stats.hpp"

namespace skg {

// The six SP 800-22 tests the evaluation tabulates, in table order.
enum class TestId {
  Monobit,
  BlockFrequency,
  Runs,
  LongestRun,
  Serial,
  CumulativeSums,
};

inline const char* to_string(TestId t) {
  switch (t) {
    case TestId::Monobit: return "monobit";
    case TestId::BlockFrequency: return "block_frequency";
    case TestId::Runs: return "runs";
    case TestId::LongestRun: return "longest_run";
    case TestId::Serial: return "serial";
    case TestId::CumulativeSums: return "cumulative_sums";
  }
  return "?";
}

constexpr std::array<TestId, 6> kAllTests = {
    TestId::Monobit,       TestId::BlockFrequency, TestId::Runs,
    TestId::LongestRun,    TestId::Serial,         TestId::CumulativeSums,
};

struct SuiteConfig {
  double significance_alpha = 0.01;
  int block_length_m = 128;  // BlockFrequency block size
  int serial_m = 16;         // capped at floor(log2 n) - 2 per sequence
  // Keys are only 256 bits; by default consecutive keys are concatenated
  // into longer streams so every test meets its minimum length.  per_key
  // evaluates each key on its own instead.
  int concat_keys = 16;
  bool per_key = false;
};

inline void validate(const SuiteConfig& cfg) {
  if (!(cfg.significance_alpha > 0.0 && cfg.significance_alpha < 0.1))
    throw ConfigError("significance level must lie in (0, 0.1)");
  if (cfg.block_length_m < 2)
    throw ConfigError("block_length_m must be at least 2");
  if (cfg.serial_m < 2) throw ConfigError("serial_m must be at least 2");
  if (cfg.concat_keys < 1) throw ConfigError("concat_keys must be at least 1");
}

// `applicable` is false when the sequence is too short for the test; that is
// reported distinctly from a failing p-value.
struct TestResult {
  TestId test_id = TestId::Monobit;
  std::vector<double> p_values;
  bool pass = false;
  bool applicable = false;
};

namespace detail {

// The detail-level kernels compute the statistic whenever it is defined at
// all, so reference worked examples (which use very short sequences) can be
// checked directly.  The published minimum lengths are enforced one level
// up, in run_test.

inline TestResult monobit(std::span<const Bit> bits, double alpha) {
  TestResult r{TestId::Monobit, {}, false, false};
  const std::size_t n = bits.size();
  if (n == 0) return r;
  long long s = 0;
  for (Bit b : bits) s += b ? 1 : -1;
  const double s_obs =
      std::fabs(static_cast<double>(s)) / std::sqrt(static_cast<double>(n));
  const double p = std::erfc(s_obs / std::sqrt(2.0));
  r.p_values = {p};
  r.applicable = true;
  r.pass = p >= alpha;
  return r;
}

inline TestResult block_frequency(std::span<const Bit> bits, int m,
                                  double alpha) {
  TestResult r{TestId::BlockFrequency, {}, false, false};
  const std::size_t n = bits.size();
  if (m < 1) return r;
  const std::size_t mm = static_cast<std::size_t>(m);
  if (n < mm) return r;  // needs at least one whole block
  const std::size_t blocks = n / mm;
  double chi2 = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < mm; ++i) ones += bits[b * mm + i];
    const double pi = static_cast<double>(ones) / static_cast<double>(mm);
    chi2 += (pi - 0.5) * (pi - 0.5);
  }
  chi2 *= 4.0 * static_cast<double>(mm);
  const double p = igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0);
  r.p_values = {p};
  r.applicable = true;
  r.pass = p >= alpha;
  return r;
}

inline TestResult runs(std::span<const Bit> bits, double alpha) {
  TestResult r{TestId::Runs, {}, false, false};
  const std::size_t n = bits.size();
  if (n < 2) return r;
  std::size_t ones = 0;
  for (Bit b : bits) ones += b;
  const double pi = static_cast<double>(ones) / static_cast<double>(n);
  r.applicable = true;
  // Frequency prerequisite: if the sequence is already heavily biased the
  // runs statistic is meaningless and the test reports a hard fail.
  if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) {
    r.p_values = {0.0};
    r.pass = false;
    return r;
  }
  std::size_t v = 1;
  for (std::size_t i = 1; i < n; ++i) v += bits[i] != bits[i - 1];
  const double nn = static_cast<double>(n);
  const double p = std::erfc(
      std::fabs(static_cast<double>(v) - 2.0 * nn * pi * (1.0 - pi)) /
      (2.0 * std::sqrt(2.0 * nn) * pi * (1.0 - pi)));
  r.p_values = {p};
  r.pass = p >= alpha;
  return r;
}

inline TestResult longest_run(std::span<const Bit> bits, double alpha) {
  TestResult r{TestId::LongestRun, {}, false, false};
  const std::size_t n = bits.size();
  if (n < 8) return r;  // needs one whole block in the smallest regime

  std::size_t m;
  std::size_t k;
  const double* pi;
  std::size_t lo;  // class 0 covers runs <= lo; class k covers >= lo + k
  static constexpr double pi8[4] = {0.2148, 0.3672, 0.2305, 0.1875};
  static constexpr double pi128[6] = {0.1174, 0.2430, 0.2493,
                                      0.1752, 0.1027, 0.1124};
  static constexpr double pi10k[7] = {0.0882, 0.2092, 0.2483, 0.1933,
                                      0.1208, 0.0675, 0.0727};
  if (n < 6272) {
    m = 8; k = 3; pi = pi8; lo = 1;
  } else if (n < 750000) {
    m = 128; k = 5; pi = pi128; lo = 4;
  } else {
    m = 10000; k = 6; pi = pi10k; lo = 10;
  }

  const std::size_t blocks = n / m;
  std::vector<std::size_t> nu(k + 1, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t longest = 0, run = 0;
    for (std::size_t i = 0; i < m; ++i) {
      run = bits[b * m + i] ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    std::size_t cls = longest <= lo ? 0 : longest - lo;
    cls = std::min(cls, k);
    ++nu[cls];
  }
  double chi2 = 0.0;
  for (std::size_t c = 0; c <= k; ++c) {
    const double expect = static_cast<double>(blocks) * pi[c];
    const double d = static_cast<double>(nu[c]) - expect;
    chi2 += d * d / expect;
  }
  const double p = igamc(static_cast<double>(k) / 2.0, chi2 / 2.0);
  r.p_values = {p};
  r.applicable = true;
  r.pass = p >= alpha;
  return r;
}

// psi^2 statistic over cyclic m-bit windows; m = 0 contributes 0 by the
// publication's convention.
inline double serial_psi2(std::span<const Bit> bits, int m) {
  if (m <= 0) return 0.0;
  const std::size_t n = bits.size();
  const std::size_t patterns = std::size_t{1} << m;
  const std::uint32_t mask = static_cast<std::uint32_t>(patterns - 1);
  std::vector<std::uint32_t> count(patterns, 0);
  std::uint32_t w = 0;
  for (int j = 0; j < m; ++j) w = (w << 1) | bits[static_cast<std::size_t>(j) % n];
  ++count[w & mask];
  for (std::size_t i = 1; i < n; ++i) {
    w = ((w << 1) | bits[(i + static_cast<std::size_t>(m) - 1) % n]) & mask;
    ++count[w];
  }
  double sum = 0.0;
  for (std::uint32_t c : count)
    sum += static_cast<double>(c) * static_cast<double>(c);
  return sum * static_cast<double>(patterns) / static_cast<double>(n) -
         static_cast<double>(n);
}

// Computes at exactly the pattern length given; the configured-m cap
// m <= floor(log2 n) - 2 is applied by run_test.
inline TestResult serial(std::span<const Bit> bits, int m, double alpha) {
  TestResult r{TestId::Serial, {}, false, false};
  const std::size_t n = bits.size();
  if (m < 2 || n < static_cast<std::size_t>(m)) return r;

  const double psi_m = serial_psi2(bits, m);
  const double psi_m1 = serial_psi2(bits, m - 1);
  const double psi_m2 = serial_psi2(bits, m - 2);
  const double d1 = psi_m - psi_m1;
  const double d2 = psi_m - 2.0 * psi_m1 + psi_m2;
  const double p1 = igamc(std::pow(2.0, m - 2), d1 / 2.0);
  const double p2 = igamc(std::pow(2.0, m - 3), d2 / 2.0);
  r.p_values = {p1, p2};
  r.applicable = true;
  r.pass = std::min(p1, p2) >= alpha;
  return r;
}

// One direction of the cumulative-sums statistic.  The summation bounds use
// the mathematical floor; the publication's reference implementation
// truncates toward zero instead, which shifts the worked-example p-value by
// a few 1e-5 — both agree with the published table to 1e-4.
inline double cusum_p(std::span<const Bit> bits, bool backward) {
  const std::size_t n = bits.size();
  long long s = 0, z = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Bit b = backward ? bits[n - 1 - i] : bits[i];
    s += b ? 1 : -1;
    z = std::max(z, std::llabs(s));
  }
  const double nn = static_cast<double>(n);
  const double zz = static_cast<double>(z);
  const double sq = std::sqrt(nn);

  double p = 1.0;
  {
    const long lo = static_cast<long>(std::floor((-nn / zz + 1.0) / 4.0));
    const long hi = static_cast<long>(std::floor((nn / zz - 1.0) / 4.0));
    for (long k = lo; k <= hi; ++k) {
      const double kk = static_cast<double>(k);
      p -= normal_cdf((4.0 * kk + 1.0) * zz / sq) -
           normal_cdf((4.0 * kk - 1.0) * zz / sq);
    }
  }
  {
    const long lo = static_cast<long>(std::floor((-nn / zz - 3.0) / 4.0));
    const long hi = static_cast<long>(std::floor((nn / zz - 1.0) / 4.0));
    for (long k = lo; k <= hi; ++k) {
      const double kk = static_cast<double>(k);
      p += normal_cdf((4.0 * kk + 3.0) * zz / sq) -
           normal_cdf((4.0 * kk + 1.0) * zz / sq);
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

inline TestResult cumulative_sums(std::span<const Bit> bits, double alpha) {
  TestResult r{TestId::CumulativeSums, {}, false, false};
  if (bits.empty()) return r;
  const double pf = cusum_p(bits, false);
  const double pb = cusum_p(bits, true);
  r.p_values = {pf, pb};
  r.applicable = true;
  r.pass = std::min(pf, pb) >= alpha;
  return r;
}

}  // namespace detail

// Applies the published minimum-length requirements on top of the detail
// kernels: frequency-family tests and cumulative sums need n >= 100 bits,
// longest-run needs n >= 128, and serial needs a pattern length of at
// least 2 after capping at floor(log2 n) - 2.  A sequence below the
// minimum yields a not-applicable result rather than an error, so suites
// over short keys degrade gracefully.
inline TestResult run_test(TestId id, std::span<const Bit> bits,
                           const SuiteConfig& cfg) {
  validate(cfg);
  const double a = cfg.significance_alpha;
  const std::size_t n = bits.size();
  const TestResult not_applicable{id, {}, false, false};
  switch (id) {
    case TestId::Monobit:
      if (n < 100) return not_applicable;
      return detail::monobit(bits, a);
    case TestId::BlockFrequency:
      if (n < 100) return not_applicable;
      return detail::block_frequency(bits, cfg.block_length_m, a);
    case TestId::Runs:
      if (n < 100) return not_applicable;
      return detail::runs(bits, a);
    case TestId::LongestRun:
      if (n < 128) return not_applicable;
      return detail::longest_run(bits, a);
    case TestId::Serial: {
      if (n < 4) return not_applicable;
      const int cap = static_cast<int>(std::floor(
                          std::log2(static_cast<double>(n)))) - 2;
      const int m_eff = std::min(cfg.serial_m, cap);
      if (m_eff < 2) return not_applicable;
      return detail::serial(bits, m_eff, a);
    }
    case TestId::CumulativeSums:
      if (n < 100) return not_applicable;
      return detail::cumulative_sums(bits, a);
  }
  throw ConfigError("unknown test id");
}

struct SuiteReport {
  struct Row {
    TestId test_id = TestId::Monobit;
    bool applicable = false;
    // Per-stream verdicts: a stream passes a test only if every statistic
    // the test emits clears alpha.
    std::size_t streams_passed = 0;
    std::size_t streams_evaluated = 0;
    // Per-statistic tallies.  Serial and the cumulative-sums test emit two
    // p-values per stream; the published reporting convention counts each
    // statistic separately toward the proportion, so success_rate is
    // statistics_passed / statistics_evaluated.
    std::size_t statistics_passed = 0;
    std::size_t statistics_evaluated = 0;
    double success_rate = 0.0;
    // One entry per stream, in stream order (1 or 2 p-values per test).
    std::vector<std::vector<double>> p_values;
  };
  std::vector<Row> rows;
  double alpha = 0.0;
  std::size_t stream_bits = 0;
  std::size_t streams = 0;
  std::size_t keys_per_stream = 0;  // concatenation policy
  std::size_t keys_total = 0;
  std::size_t keys_dropped = 0;  // tail too short for a full stream
};

// Evaluates every test on every stream.  Keys of equal length are required;
// with per_key = false consecutive groups of concat_keys keys form one
// stream each and an incomplete trailing group is dropped (recorded in
// keys_dropped).
inline SuiteReport run_suite(std::span<const std::vector<Bit>> keys,
                             const SuiteConfig& cfg) {
  validate(cfg);
  if (keys.empty()) throw DataError("randomness suite needs at least one key");
  const std::size_t klen = keys[0].size();
  if (klen == 0) throw DataError("keys must be non-empty");
  for (const auto& k : keys) {
    if (k.size() != klen)
      throw DataError("randomness suite needs keys of equal length");
  }

  const std::size_t group = cfg.per_key ? 1 : static_cast<std::size_t>(
                                               cfg.concat_keys);
  const std::size_t streams = keys.size() / group;

  SuiteReport rep;
  rep.alpha = cfg.significance_alpha;
  rep.keys_per_stream = group;
  rep.keys_total = keys.size();
  rep.keys_dropped = keys.size() - streams * group;
  rep.streams = streams;
  rep.stream_bits = klen * group;
  for (TestId id : kAllTests) {
    SuiteReport::Row row;
    row.test_id = id;
    rep.rows.push_back(std::move(row));
  }

  std::vector<Bit> stream;
  stream.reserve(rep.stream_bits);
  for (std::size_t s = 0; s < streams; ++s) {
    stream.clear();
    for (std::size_t k = 0; k < group; ++k) {
      const auto& key = keys[s * group + k];
      stream.insert(stream.end(), key.begin(), key.end());
    }
    for (std::size_t t = 0; t < kAllTests.size(); ++t) {
      const TestResult res = run_test(kAllTests[t], stream, cfg);
      SuiteReport::Row& row = rep.rows[t];
      if (!res.applicable) continue;
      row.applicable = true;
      ++row.streams_evaluated;
      row.streams_passed += res.pass ? 1 : 0;
      for (double p : res.p_values) {
        ++row.statistics_evaluated;
        row.statistics_passed += (p >= cfg.significance_alpha) ? 1 : 0;
      }
      row.p_values.push_back(res.p_values);
    }
  }
  for (auto& row : rep.rows) {
    if (row.statistics_evaluated > 0)
      row.success_rate = static_cast<double>(row.statistics_passed) /
                         static_cast<double>(row.statistics_evaluated);
  }
  return rep;
}

inline std::vector<Bit> key_to_bits(const KeyMaterial& key) {
  return unpack_msb_first(key.key, 256);
}

inline SuiteReport run_suite(std::span<const KeyMaterial> keys,
                             const SuiteConfig& cfg) {
  std::vector<std::vector<Bit>> bitstrings;
  bitstrings.reserve(keys.size());
  for (const KeyMaterial& k : keys) bitstrings.push_back(key_to_bits(k));
  return run_suite(bitstrings, cfg);
}

}  // namespace skg
