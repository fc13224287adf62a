// End-to-end key generation, spelled out stage by stage: probe, detrend,
// quantize, reconcile, measure what the adversary knows, hash the agreed
// bits down to 256-bit keys, and sanity-check the keys' randomness.
//
// The one-call equivalent of this file is run_pipeline() (see the `skg run`
// CLI); this sample exists to show the seams between the stages.
//
// Build:  cmake --build build --target keygen_demo
// Run:    ./build/keygen_demo

#include <algorithm>
#include <cstdio>
#include <vector>

#include "skg/skg.hpp"

int main() {
  // --- Probe -------------------------------------------------------------
  skg::ChannelSimConfig sim;
  sim.num_samples = 65536;
  sim.seed = 1;
  const auto [alice, bob, eve] = skg::simulate_channel(sim);

  // --- Detrend + quantize every node ---------------------------------------
  skg::FilterConfig fc;
  fc.measurement_variance_r = 1e-3;
  const skg::QuantizerConfig qcfg;
  const std::size_t spf = 512;  // samples per frame -> 1024 bits per frame

  const auto fa = skg::quantize_frames(
      skg::detrend_unit_power(alice, fc).residuals, qcfg, spf);
  const auto fb = skg::quantize_frames(
      skg::detrend_unit_power(bob, fc).residuals, qcfg, spf);
  const auto fe = skg::quantize_frames(
      skg::detrend_unit_power(eve, fc).residuals, qcfg, spf);
  if (fa.skipped_rows + fb.skipped_rows + fe.skipped_rows > 0) {
    std::fprintf(stderr, "degenerate quantizer rows; pick another seed\n");
    return 1;
  }
  std::printf("quantized %zu frames/node, mismatch A-B %.4f, A-E %.4f\n",
              fa.frames.size(), skg::mismatch_rate(fa.frames, fb.frames),
              skg::mismatch_rate(fa.frames, fe.frames));

  // --- Reconcile -----------------------------------------------------------
  const std::size_t n = fa.frames.front().bits.size();
  const double cross_ab =
      std::clamp(skg::mismatch_rate(fa.frames, fb.frames), 1e-4, 0.4999);
  const double cross_ae =
      std::clamp(skg::mismatch_rate(fa.frames, fe.frames), 1e-4, 0.4999);
  const skg::PolarCodeSpec spec = skg::construct_code(n, 0.3, cross_ab);

  // Keep only the frames Bob actually repairs; Eve gets the same public
  // syndromes and her best decode attempt is part of what she "knows".
  std::vector<skg::BitFrame> agreed, eve_raw, eve_dec;
  std::vector<skg::Syndrome> syndromes;
  for (std::size_t i = 0; i < fa.frames.size(); ++i) {
    const skg::Syndrome s = skg::make_syndrome(fa.frames[i], spec);
    if (skg::decode(fb.frames[i], s, spec, cross_ab).bits !=
        fa.frames[i].bits)
      continue;
    agreed.push_back(fa.frames[i]);
    eve_raw.push_back(fe.frames[i]);
    eve_dec.push_back(skg::decode(fe.frames[i], s, spec, cross_ae));
    syndromes.push_back(s);
  }
  std::printf("reconciled %zu/%zu frames at code rate %.2f\n", agreed.size(),
              fa.frames.size(), spec.code_rate);

  // --- Measure the adversary ------------------------------------------------
  const skg::EntropyEstimate h = skg::conditional_min_entropy(
      agreed, eve_raw, syndromes, eve_dec, /*block size b=*/4);
  std::printf("conditional min-entropy: %.4f bits/bit over %zu blocks\n",
              h.bits_per_symbol, h.sample_count);

  // --- Amplify ---------------------------------------------------------------
  const skg::AmplifyStreamResult amp =
      skg::amplify_stream(agreed, h.bits_per_symbol);
  std::printf("amplified into %zu keys of 256 bits (%zu input bits each, "
              "%zu bits left over)\n",
              amp.keys.size(), skg::required_input_bits(h.bits_per_symbol),
              amp.leftover_bits);
  if (!amp.keys.empty())
    std::printf("first key: %s\n", skg::to_hex(amp.keys.front().key).c_str());

  // --- Validate ---------------------------------------------------------------
  const skg::SuiteReport rep = skg::run_suite(amp.keys, skg::SuiteConfig{});
  std::printf("\nrandomness suite: %zu streams x %zu bits, alpha %.2f\n",
              rep.streams, rep.stream_bits, rep.alpha);
  for (const skg::SuiteReport::Row& row : rep.rows) {
    if (!row.applicable) continue;
    std::printf("  %-18s %zu/%zu statistics passed (rate %.3f)\n",
                skg::to_string(row.test_id), row.statistics_passed,
                row.statistics_evaluated, row.success_rate);
  }
  return 0;
}
