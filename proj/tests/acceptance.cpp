// Acceptance gate for the toolkit: ten timed criteria covering the filter,
// the quantizer, reconciliation, amplification, the randomness suite and the
// end-to-end sweep.  Each criterion prints exactly one PASS/FAIL line; the
// binary exits nonzero if any criterion fails or overruns its time budget.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "skg/skg.hpp"

namespace {

using Clock = std::chrono::steady_clock;

// Accumulates failure descriptions; a criterion passes when none were added.
struct Check {
  std::string why;
  bool ok = true;
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (!why.empty()) why += "; ";
    why += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<skg::Bit> bits_from_string(const std::string& s) {
  std::vector<skg::Bit> out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '0' || c == '1') out.push_back(static_cast<skg::Bit>(c - '0'));
  }
  return out;
}

std::vector<skg::Bit> random_bits(skg::Prng& g, std::size_t n) {
  std::vector<skg::Bit> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t w = g.next_u64();
    for (int b = 63; b >= 0 && i < n; --b)
      out[i++] = static_cast<skg::Bit>((w >> b) & 1u);
  }
  return out;
}

skg::BitFrame make_frame(std::vector<skg::Bit> bits, std::size_t index) {
  skg::BitFrame f;
  f.bits = std::move(bits);
  f.frame_index = index;
  return f;
}

std::vector<skg::BitFrame> bernoulli_frames(skg::Prng& g, std::size_t count,
                                            std::size_t len, double p_one) {
  std::vector<skg::BitFrame> out;
  out.reserve(count);
  for (std::size_t f = 0; f < count; ++f) {
    std::vector<skg::Bit> bits(len);
    for (auto& b : bits)
      b = static_cast<skg::Bit>(g.next_double() < p_one ? 1 : 0);
    out.push_back(make_frame(std::move(bits), f));
  }
  return out;
}

std::vector<skg::BitFrame> bsc_view(skg::Prng& g,
                                    const std::vector<skg::BitFrame>& truth,
                                    double crossover) {
  std::vector<skg::BitFrame> out = truth;
  for (auto& frame : out) {
    for (auto& b : frame.bits)
      if (g.next_double() < crossover) b ^= 1u;
  }
  return out;
}

double variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size());
}

constexpr const char* kOutDir = "acceptance_out";

// ---------------------------------------------------------------------------
// 1. Filter limit behaviour: R -> 0 tracks the measurement, R -> infinity
//    (with Q = 0) freezes the state at its initial value.

void criterion_1(Check& c) {
  skg::ChannelSimConfig sim;
  sim.num_samples = 16384;
  sim.seed = 1;
  const auto [alice, bob, eve] = skg::simulate_channel(sim);
  const double max_y =
      *std::max_element(alice.samples.begin(), alice.samples.end());
  const double bound = 1e-6 * max_y;

  skg::FilterConfig tight;
  tight.measurement_variance_r = 1e-12;
  const skg::FilteredSeries ft = skg::kalman_filter(alice, tight);
  for (std::size_t i = 1; i < alice.samples.size(); ++i) {
    const double res = std::fabs(alice.samples[i] - ft.states[i]);
    if (res >= bound) {
      c.expect(false, "tracking residual " + fmt(res) + " at sample " +
                          std::to_string(i) + " exceeds " + fmt(bound));
      break;
    }
  }

  skg::FilterConfig frozen;
  frozen.measurement_variance_r = 1e12;
  frozen.process_noise_q = 0.0;
  const skg::FilteredSeries ff = skg::kalman_filter(alice, frozen);
  for (std::size_t i = 0; i < alice.samples.size(); ++i) {
    const double dev = std::fabs(ff.states[i] - alice.samples.front());
    if (dev >= bound) {
      c.expect(false, "frozen state drifts by " + fmt(dev) + " at sample " +
                          std::to_string(i));
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Residual variance shrinks monotonically as R decreases; the swept
//    values are written out as plot data.

void criterion_2(Check& c) {
  skg::ChannelSimConfig sim;
  sim.num_samples = 16384;
  sim.seed = 1;
  const auto [alice, bob, eve] = skg::simulate_channel(sim);

  const double rs[] = {1e-2, 1e-3, 1e-5};
  std::vector<std::vector<double>> residuals;
  std::vector<double> variances;
  for (double r : rs) {
    skg::FilterConfig fc;
    fc.measurement_variance_r = r;
    const skg::DetrendResult det = skg::detrend_unit_power(alice, fc);
    variances.push_back(variance(det.residuals.residuals));
    residuals.push_back(det.residuals.residuals);
  }
  c.expect(variances[0] > variances[1] && variances[1] > variances[2],
           "residual variance is not strictly decreasing: " +
               fmt(variances[0]) + ", " + fmt(variances[1]) + ", " +
               fmt(variances[2]));

  std::filesystem::create_directories(kOutDir);
  {
    std::ofstream out(std::filesystem::path(kOutDir) /
                      "detrend_variance.csv");
    out << "r,residual_variance\n";
    for (std::size_t i = 0; i < 3; ++i)
      out << rs[i] << "," << variances[i] << "\n";
    c.expect(static_cast<bool>(out), "failed to write detrend_variance.csv");
  }
  {
    std::ofstream out(std::filesystem::path(kOutDir) /
                      "detrend_residuals.csv");
    out << "sample,r_1e-2,r_1e-3,r_1e-5\n";
    const std::size_t rows = std::min<std::size_t>(2048, alice.samples.size());
    for (std::size_t i = 0; i < rows; ++i) {
      out << i;
      for (const auto& series : residuals) out << "," << series[i];
      out << "\n";
    }
    c.expect(static_cast<bool>(out), "failed to write detrend_residuals.csv");
  }
}

// ---------------------------------------------------------------------------
// 3. Averaged over ten seeds, the Alice-Bob mismatch never improves as R
//    descends, and an uncorrelated eavesdropper stays near coin-flipping.

void criterion_3(Check& c) {
  const std::vector<double> rs = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const int seeds = 10;
  std::vector<double> avg_ab(rs.size(), 0.0);
  std::vector<double> avg_eve(rs.size(), 0.0);
  const skg::QuantizerConfig qcfg;

  for (int seed = 1; seed <= seeds; ++seed) {
    skg::ChannelSimConfig sim;
    sim.num_samples = 16384;
    sim.seed = static_cast<std::uint64_t>(seed);
    const auto [alice, bob, eve] = skg::simulate_channel(sim);
    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
      skg::FilterConfig fc;
      fc.measurement_variance_r = rs[ri];
      const auto fa =
          skg::quantize_frames(skg::detrend_unit_power(alice, fc).residuals,
                               qcfg, 512)
              .frames;
      const auto fb =
          skg::quantize_frames(skg::detrend_unit_power(bob, fc).residuals,
                               qcfg, 512)
              .frames;
      const auto fe =
          skg::quantize_frames(skg::detrend_unit_power(eve, fc).residuals,
                               qcfg, 512)
              .frames;
      avg_ab[ri] += skg::mismatch_rate(fa, fb);
      avg_eve[ri] += skg::mismatch_rate(fa, fe);
    }
  }
  for (auto& v : avg_ab) v /= seeds;
  for (auto& v : avg_eve) v /= seeds;

  for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
    c.expect(avg_ab[i + 1] >= avg_ab[i] - 1e-12,
             "mismatch fell from " + fmt(avg_ab[i]) + " to " +
                 fmt(avg_ab[i + 1]) + " between R = " + fmt(rs[i]) + " and " +
                 fmt(rs[i + 1]));
  }
  for (std::size_t i = 0; i < rs.size(); ++i) {
    c.expect(avg_eve[i] >= 0.45 && avg_eve[i] <= 0.55,
             "eve mismatch " + fmt(avg_eve[i]) + " at R = " + fmt(rs[i]) +
                 " leaves [0.45, 0.55]");
  }
}

// ---------------------------------------------------------------------------
// 4. The butterfly transform equals the GF(2) Kronecker matrix product, is
//    an involution, and every decode output satisfies its syndrome.

std::vector<std::vector<skg::Bit>> kronecker_matrix(std::size_t n) {
  std::vector<std::vector<skg::Bit>> g{{1}};
  while (g.size() < n) {
    const std::size_t h = g.size();
    std::vector<std::vector<skg::Bit>> big(2 * h,
                                           std::vector<skg::Bit>(2 * h, 0));
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < h; ++j) {
        big[i][j] = g[i][j];          // top-left block
        big[i + h][j] = g[i][j];      // bottom-left block
        big[i + h][j + h] = g[i][j];  // bottom-right block
      }
    }
    g = std::move(big);
  }
  return g;
}

void criterion_4(Check& c) {
  skg::Prng g = skg::Prng::stream(41, "acceptance/polar");
  for (std::size_t n = 2; n <= 64; n *= 2) {
    const auto matrix = kronecker_matrix(n);
    for (int trial = 0; trial < 100; ++trial) {
      const std::vector<skg::Bit> x = random_bits(g, n);
      const std::vector<skg::Bit> y = skg::polar_transform(x);
      for (std::size_t j = 0; j < n; ++j) {
        skg::Bit acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc ^= x[i] & matrix[i][j];
        if (acc != y[j]) {
          c.expect(false, "transform mismatch at n = " + std::to_string(n) +
                              ", output " + std::to_string(j));
          return;
        }
      }
      if (skg::polar_transform(y) != x) {
        c.expect(false,
                 "transform is not an involution at n = " + std::to_string(n));
        return;
      }
    }
  }

  for (std::size_t n = 2; n <= 64; n *= 2) {
    const skg::PolarCodeSpec spec = skg::construct_code(n, 0.5, 0.11);
    for (int trial = 0; trial < 25; ++trial) {
      const skg::BitFrame alice = make_frame(random_bits(g, n), 0);
      skg::BitFrame bob = alice;
      for (auto& b : bob.bits)
        if (g.next_double() < 0.1) b ^= 1u;
      const skg::Syndrome syn = skg::make_syndrome(alice, spec);
      const skg::BitFrame dec = skg::decode(bob, syn, spec, 0.11);
      if (skg::make_syndrome(dec, spec).bits != syn.bits) {
        c.expect(false, "decode output violates its syndrome at n = " +
                            std::to_string(n));
        return;
      }
    }
  }
  // A production-sized point as well.
  const skg::PolarCodeSpec spec = skg::construct_code(1024, 0.3, 0.07);
  for (int trial = 0; trial < 10; ++trial) {
    const skg::BitFrame alice = make_frame(random_bits(g, 1024), 0);
    skg::BitFrame bob = alice;
    for (auto& b : bob.bits)
      if (g.next_double() < 0.07) b ^= 1u;
    const skg::Syndrome syn = skg::make_syndrome(alice, spec);
    const skg::BitFrame dec = skg::decode(bob, syn, spec, 0.07);
    c.expect(skg::make_syndrome(dec, spec).bits == syn.bits,
             "decode output violates its syndrome at n = 1024");
  }
}

// ---------------------------------------------------------------------------
// 5. Reconciliation frame error rates: low at rate 0.1 over a 5% channel,
//    and never worse as the rate drops.

void criterion_5(Check& c) {
  const std::size_t frames = 1000;
  const std::size_t n = 1024;
  const double crossover = 0.05;

  skg::Prng ga = skg::Prng::stream(51, "acceptance/fer/alice");
  skg::Prng gn = skg::Prng::stream(51, "acceptance/fer/noise");
  std::vector<skg::BitFrame> alice;
  std::vector<skg::BitFrame> bob;
  alice.reserve(frames);
  bob.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    alice.push_back(make_frame(random_bits(ga, n), f));
    skg::BitFrame noisy = alice.back();
    for (auto& b : noisy.bits)
      if (gn.next_double() < crossover) b ^= 1u;
    bob.push_back(std::move(noisy));
  }

  const double rates[] = {0.5, 0.3, 0.1};
  double fer[3] = {0.0, 0.0, 0.0};
  for (int ri = 0; ri < 3; ++ri) {
    const skg::PolarCodeSpec spec =
        skg::construct_code(n, rates[ri], crossover);
    std::vector<std::uint8_t> errs(frames, 0);
    skg::detail::parallel_for(frames, [&](std::size_t f) {
      const skg::Syndrome syn = skg::make_syndrome(alice[f], spec);
      const skg::BitFrame dec = skg::decode(bob[f], syn, spec, crossover);
      errs[f] = dec.bits != alice[f].bits ? 1 : 0;
    });
    std::size_t total = 0;
    for (std::uint8_t e : errs) total += e;
    fer[ri] = static_cast<double>(total) / static_cast<double>(frames);
  }

  c.expect(fer[2] < 1e-2, "FER at rate 0.1 is " + fmt(fer[2]));
  c.expect(fer[0] >= fer[1] && fer[1] >= fer[2],
           "FER is not non-increasing across rates: " + fmt(fer[0]) + ", " +
               fmt(fer[1]) + ", " + fmt(fer[2]));
}

// ---------------------------------------------------------------------------
// 6. The frequentist min-entropy estimators land near the analytic values
//    on Bernoulli and binary-symmetric fixtures, and a perfect observer
//    drives the conditional estimate to zero.

void criterion_6(Check& c) {
  constexpr std::span<const skg::Syndrome> kNoSyndromes{};
  const double h_bern = 0.3219280948873623;   // -log2(0.8)
  const double h_bsc = 0.5145731728297583;    // -log2(0.7)

  {
    skg::Prng g = skg::Prng::stream(61, "acceptance/entropy/bernoulli");
    const auto small = bernoulli_frames(g, 100, 1000, 0.8);
    const double est5 = skg::min_entropy(small, 1).bits_per_symbol;
    c.expect(std::fabs(est5 - h_bern) <= 0.05,
             "Bernoulli estimate " + fmt(est5) + " at 1e5 samples is off by " +
                 fmt(std::fabs(est5 - h_bern)));
    const auto large = bernoulli_frames(g, 1000, 1000, 0.8);
    const double est6 = skg::min_entropy(large, 1).bits_per_symbol;
    c.expect(std::fabs(est6 - h_bern) <= 0.02,
             "Bernoulli estimate " + fmt(est6) + " at 1e6 samples is off by " +
                 fmt(std::fabs(est6 - h_bern)));
  }
  {
    skg::Prng g = skg::Prng::stream(61, "acceptance/entropy/bsc");
    const auto alice5 = bernoulli_frames(g, 100, 1000, 0.5);
    const auto eve5 = bsc_view(g, alice5, 0.3);
    const double cond5 =
        skg::conditional_min_entropy(alice5, eve5, kNoSyndromes, eve5, 1)
            .bits_per_symbol;
    c.expect(std::fabs(cond5 - h_bsc) <= 0.05,
             "BSC estimate " + fmt(cond5) + " at 1e5 samples is off by " +
                 fmt(std::fabs(cond5 - h_bsc)));
    const auto alice6 = bernoulli_frames(g, 1000, 1000, 0.5);
    const auto eve6 = bsc_view(g, alice6, 0.3);
    const double cond6 =
        skg::conditional_min_entropy(alice6, eve6, kNoSyndromes, eve6, 1)
            .bits_per_symbol;
    c.expect(std::fabs(cond6 - h_bsc) <= 0.02,
             "BSC estimate " + fmt(cond6) + " at 1e6 samples is off by " +
                 fmt(std::fabs(cond6 - h_bsc)));
  }
  {
    skg::Prng g = skg::Prng::stream(61, "acceptance/entropy/perfect");
    const auto alice = bernoulli_frames(g, 100, 1000, 0.5);
    const double cond =
        skg::conditional_min_entropy(alice, alice, kNoSyndromes, alice, 1)
            .bits_per_symbol;
    c.expect(cond <= 0.02,
             "perfect-observer estimate " + fmt(cond) + " exceeds 0.02");
  }
}

// ---------------------------------------------------------------------------
// 7. Stored key rates recompute exactly from their stored operands, and the
//    two reference operating points evaluate to their exact values.

void criterion_7(Check& c) {
  c.expect(skg::key_rate(1024, 0.0, 1.0, 0.005) == 204800.0,
           "reference point 204800 b/s does not reproduce");
  c.expect(skg::key_rate(1024, 0.1, 0.3, 0.005) == 55296.0,
           "reference point 55296 b/s does not reproduce");

  const skg::KeyValueConfig kv = skg::KeyValueConfig::parse(
      "seed = 11\n"
      "scenarios = los\n"
      "sim.num_samples = 8192\n"
      "filter.r = 1e-2, 1e-3\n"
      "code.rates = 0.5, 0.1\n");
  const skg::PipelineConfig cfg = skg::parse_pipeline_config(kv);
  const skg::PipelineReport rep = skg::run_pipeline(cfg);
  c.expect(rep.cells.size() == 4,
           "expected 4 sweep cells, got " + std::to_string(rep.cells.size()));
  for (const skg::PipelineCell& cell : rep.cells) {
    c.expect(cell.error.empty(), "cell failed: " + cell.error);
    if (!cell.error.empty()) continue;
    c.expect(std::isfinite(cell.key_rate_bps),
             "cell key rate is not finite");
    if (!std::isfinite(cell.key_rate_bps)) continue;
    const double recomputed = skg::key_rate(cell.frame_bits, cell.fer,
                                            cell.h_min_cond,
                                            cell.sampling_period_s);
    c.expect(cell.key_rate_bps == recomputed,
             "stored key rate " + fmt(cell.key_rate_bps) +
                 " differs from recomputed " + fmt(recomputed));
  }
}

// ---------------------------------------------------------------------------
// 8. SHA-256 short-message vectors are bit-exact and the amplifier input
//    sizing follows ceil(256 / h).

void criterion_8(Check& c) {
  const auto hex_of = [](std::span<const std::uint8_t> data) {
    return skg::to_hex(skg::Sha256::digest(data));
  };
  const auto hex_of_text = [](std::string_view text) {
    return skg::to_hex(skg::Sha256::digest(text));
  };

  struct TextVector {
    const char* message;
    const char* digest;
  };
  const TextVector text_vectors[] = {
      {"",
       "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"},
      {"abc",
       "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"},
      {"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
       "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"},
      {"abcdefghbcdefghicdefghijdefghijkefghijklfghijklmghijklmnhijklmno"
       "ijklmnopjklmnopqklmnopqrlmnopqrsmnopqrstnopqrstu",
       "cf5b16a778af8380036ce59e7b0492370b249b11e8f07a51afac45037afee9d1"},
  };
  for (const TextVector& v : text_vectors) {
    c.expect(hex_of_text(v.message) == v.digest,
             std::string("digest mismatch for message \"") + v.message + "\"");
  }

  const std::uint8_t one_byte[] = {0xbd};
  c.expect(hex_of(one_byte) ==
               "68325720aabd7c82f30f554b313d0570c95accbb7dc4b5aae11204c08ffe"
               "732b",
           "digest mismatch for the single-byte vector");
  const std::uint8_t four_bytes[] = {0xc9, 0x8c, 0x8e, 0x55};
  c.expect(hex_of(four_bytes) ==
               "7abc22c0ae5af26ce93dbb94433a0e0b2e119d014f8e7f65bd56c61ccccd"
               "9504",
           "digest mismatch for the four-byte vector");

  c.expect(skg::required_input_bits(1.0) == 256, "sizing at h = 1.0 is wrong");
  c.expect(skg::required_input_bits(0.5) == 512, "sizing at h = 0.5 is wrong");
  c.expect(skg::required_input_bits(0.3) == 854, "sizing at h = 0.3 is wrong");
}

// ---------------------------------------------------------------------------
// 9. The randomness suite reproduces the published worked examples and
//    keeps every per-test success rate in [0.98, 1.0] on fair input.

void criterion_9(Check& c) {
  const auto near = [&](double got, double want, const char* what) {
    c.expect(std::fabs(got - want) < 1e-4,
             std::string(what) + " p-value " + fmt(got) +
                 " is not within 1e-4 of " + fmt(want));
  };

  const std::vector<skg::Bit> pi100 = bits_from_string(
      "1100100100001111110110101010001000100001011010001100"
      "001000110100110001001100011001100010100010111000");
  near(skg::detail::monobit(pi100, 0.01).p_values[0], 0.109599, "monobit");

  const std::vector<skg::Bit> eps_bf = bits_from_string("0110011010");
  near(skg::detail::block_frequency(eps_bf, 3, 0.01).p_values[0], 0.801252,
       "block frequency");

  const std::vector<skg::Bit> eps_runs = bits_from_string("1001101011");
  near(skg::detail::runs(eps_runs, 0.01).p_values[0], 0.147232, "runs");

  const std::vector<skg::Bit> lr128 = bits_from_string(
      "11001100000101010110110001001100111000000000001001"
      "00110101010001000100111101011010000000110101111100"
      "1100111001101101100010110010");
  near(skg::detail::longest_run(lr128, 0.01).p_values[0], 0.180609,
       "longest run");

  const std::vector<skg::Bit> eps_serial = bits_from_string("0011011101");
  const skg::TestResult serial = skg::detail::serial(eps_serial, 3, 0.01);
  near(serial.p_values[0], 0.808793, "serial (first)");
  near(serial.p_values[1], 0.670320, "serial (second)");

  const std::vector<skg::Bit> eps_cusum = bits_from_string("1011010111");
  near(skg::detail::cumulative_sums(eps_cusum, 0.01).p_values[0], 0.4116588,
       "cumulative sums");

  // Success-rate band on 10^4 fair-coin 4096-bit streams.
  const std::size_t streams = 10000;
  const std::size_t stream_bits = 4096;
  const skg::SuiteConfig scfg;  // alpha 0.01, m 128, serial capped by length
  std::vector<std::array<std::uint8_t, 6>> passed(streams);
  std::vector<std::array<std::uint8_t, 6>> evaluated(streams);
  skg::detail::parallel_for(streams, [&](std::size_t s) {
    skg::Prng g =
        skg::Prng::stream(0x90f5, "acceptance/nist/" + std::to_string(s));
    const std::vector<skg::Bit> bits = random_bits(g, stream_bits);
    for (std::size_t t = 0; t < skg::kAllTests.size(); ++t) {
      const skg::TestResult res =
          skg::run_test(skg::kAllTests[t], bits, scfg);
      std::uint8_t pass = 0;
      std::uint8_t eval = 0;
      if (res.applicable) {
        for (double p : res.p_values) {
          ++eval;
          if (p >= scfg.significance_alpha) ++pass;
        }
      }
      passed[s][t] = pass;
      evaluated[s][t] = eval;
    }
  });
  for (std::size_t t = 0; t < skg::kAllTests.size(); ++t) {
    std::size_t pass = 0;
    std::size_t eval = 0;
    for (std::size_t s = 0; s < streams; ++s) {
      pass += passed[s][t];
      eval += evaluated[s][t];
    }
    c.expect(eval >= streams, std::string(skg::to_string(skg::kAllTests[t])) +
                                  " was not applicable on 4096-bit streams");
    if (eval == 0) continue;
    const double rate =
        static_cast<double>(pass) / static_cast<double>(eval);
    c.expect(rate >= 0.98 && rate <= 1.0,
             std::string(skg::to_string(skg::kAllTests[t])) +
                 " success rate " + fmt(rate) + " leaves [0.98, 1.0]");
  }
}

// ---------------------------------------------------------------------------
// 10. The full default sweep completes within budget and reruns emit
//     byte-identical reports.

void criterion_10(Check& c) {
  const skg::KeyValueConfig kv = skg::KeyValueConfig::parse("seed = 2026\n");
  const skg::PipelineConfig cfg = skg::parse_pipeline_config(kv);

  const auto t0 = Clock::now();
  const skg::PipelineReport first = skg::run_pipeline(cfg);
  const double first_s =
      std::chrono::duration<double>(Clock::now() - t0).count();
  c.expect(first_s < 600.0,
           "single sweep took " + fmt(first_s) + " s (budget 600 s)");

  c.expect(first.cells.size() == 42,
           "expected 42 cells, got " + std::to_string(first.cells.size()));
  for (const skg::PipelineCell& cell : first.cells) {
    c.expect(cell.error.empty(), "cell failed: " + cell.error);
    if (!cell.error.empty()) continue;
    c.expect(cell.frames_eval >= 200,
             "cell has only " + std::to_string(cell.frames_eval) +
                 " evaluation frames");
    if (std::isfinite(cell.key_rate_bps)) {
      const double recomputed = skg::key_rate(cell.frame_bits, cell.fer,
                                              cell.h_min_cond,
                                              cell.sampling_period_s);
      c.expect(cell.key_rate_bps == recomputed,
               "stored key rate does not recompute exactly");
    }
  }

  const skg::PipelineReport second = skg::run_pipeline(cfg);
  c.expect(skg::report_to_csv(first) == skg::report_to_csv(second),
           "rerun CSV differs");
  c.expect(skg::report_to_json(first) == skg::report_to_json(second),
           "rerun JSON differs");
  c.expect(skg::mismatch_to_csv(first) == skg::mismatch_to_csv(second),
           "rerun mismatch table differs");
  c.expect(first.config_hash == second.config_hash, "config hash differs");

  skg::write_report_files(first, kOutDir);
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    void (*fn)(Check&);
    double budget_s;
  };
  const Entry entries[] = {
      {1, "filter limit behaviour", criterion_1, 1.0},
      {2, "detrending variance trend", criterion_2, 5.0},
      {3, "quantizer mismatch trends", criterion_3, 60.0},
      {4, "polar transform and syndrome consistency", criterion_4, 10.0},
      {5, "reconciliation frame error rates", criterion_5, 120.0},
      {6, "min-entropy estimator calibration", criterion_6, 60.0},
      {7, "key-rate identity closure", criterion_7, 1.0},
      {8, "sha-256 vectors and amplifier sizing", criterion_8, 1.0},
      {9, "randomness suite calibration", criterion_9, 300.0},
      {10, "end-to-end sweep determinism", criterion_10, 600.0},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    Check check;
    const auto t0 = Clock::now();
    try {
      e.fn(check);
    } catch (const std::exception& ex) {
      check.expect(false, std::string("unexpected exception: ") + ex.what());
    }
    const double elapsed =
        std::chrono::duration<double>(Clock::now() - t0).count();
    check.expect(elapsed < e.budget_s,
                 "runtime " + fmt(elapsed) + " s exceeds the " +
                     fmt(e.budget_s) + " s budget");
    if (!check.ok) ++failures;
    std::printf("%s  criterion %2d  %-42s  %8.2f s%s%s\n",
                check.ok ? "PASS" : "FAIL", e.id, e.name, elapsed,
                check.ok ? "" : "  -- ", check.ok ? "" : check.why.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/10 acceptance criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
