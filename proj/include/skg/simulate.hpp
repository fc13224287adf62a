#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "skg/errors.hpp"
#include "skg/prng.hpp"
#include "skg/series.hpp"

namespace skg {

// Slow large-scale profile: a baseline, a linear path-loss ramp and a
// first-order low-pass-filtered Gaussian shadowing term with stationary
// standard deviation `shadowing_sigma`.  `shadowing_cutoff` is the one-pole
// low-pass bandwidth as a fraction of the probing rate; smaller means slower
// shadowing.  The combined trend is clamped away from zero.
struct TrendSpec {
  double base = 1.0;
  double slope_per_sample = 1e-5;
  double shadowing_sigma = 0.25;
  double shadowing_cutoff = 1e-3;
};

// Configuration for the three-node channel simulator.
//
// The legitimate nodes observe the same reciprocal channel through
// independent receiver noise; the eavesdropper observes a channel whose
// small-scale component has correlation `eve_correlation` with the
// legitimate one and whose shadowing is an independent realization of the
// same process (she is elsewhere in the room: same baseline drift, different
// obstructions).  `fading_coherence` is the small-scale decorrelation
// horizon in samples — the specular phase-drift rates and the diffuse AR(1)
// memory both scale with it, and 0 means independent fading from probe to
// probe.  snr_db = +infinity disables receiver noise entirely.
struct ChannelSimConfig {
  std::size_t num_samples = 0;
  double snr_db = 30.0;
  double eve_correlation = 0.0;
  TrendSpec trend;
  double probe_symbol = 1.0;
  double fading_coherence = 40.0;
  double sample_period_s = 0.005;
  std::uint64_t seed = 0;
};

namespace detail {

// Stationary complex AR(1) sequence with unit variance:
// h[0] = w[0], h[m] = a*h[m-1] + sqrt(1-a^2)*w[m], w ~ CN(0,1).
inline std::vector<std::complex<double>> ar1_complex(Prng& g, std::size_t n,
                                                     double a) {
  std::vector<std::complex<double>> h(n);
  const double innov = std::sqrt(std::max(0.0, 1.0 - a * a));
  const double comp = 1.0 / std::sqrt(2.0);  // unit total variance
  std::complex<double> prev{0.0, 0.0};
  for (std::size_t m = 0; m < n; ++m) {
    std::complex<double> w{g.next_gaussian() * comp, g.next_gaussian() * comp};
    prev = (m == 0) ? w : a * prev + innov * w;
    h[m] = prev;
  }
  return h;
}

// First-order low-pass-filtered Gaussian shadowing, scaled so the
// stationary standard deviation equals sigma.
inline std::vector<double> shadowing(Prng& g, std::size_t n, double sigma,
                                     double cutoff) {
  std::vector<double> s(n, 0.0);
  if (sigma <= 0.0) return s;
  const double a = 1.0 - cutoff;
  const double innov = std::sqrt(std::max(1e-300, 1.0 - a * a));
  double prev = g.next_gaussian();  // start at stationarity
  s[0] = sigma * prev;
  for (std::size_t m = 1; m < n; ++m) {
    prev = a * prev + innov * g.next_gaussian();
    s[m] = sigma * prev;
  }
  return s;
}

inline std::vector<double> make_trend(const TrendSpec& t, std::size_t n,
                                      const std::vector<double>& shadow) {
  std::vector<double> out(n);
  const double floor = 0.05 * t.base;
  for (std::size_t m = 0; m < n; ++m) {
    const double v =
        t.base + t.slope_per_sample * static_cast<double>(m) + shadow[m];
    out[m] = std::max(v, floor);
  }
  return out;
}

// Small-scale fading for a static desk-scale link: two dominant specular
// paths whose phases drift slowly in opposite directions, plus a weak
// diffuse remainder.  With most of the power split between two near-equal
// specular components the envelope sweeps between its constructive and
// destructive extremes and spends most of its time near them — the
// edge-heavy marginal of the two-wave-with-diffuse-power regime — rather
// than clustering around a mean the way a dense-scatter Rayleigh envelope
// does.
//
// Path k advances by omega_k radians per sample with |omega_k| drawn as
// (1 + 2|N(0,1)|) / coherence; the opposite signs keep the beat rate
// |omega_1 - omega_2| >= 2/coherence, so the envelope completes a full
// constructive/destructive cycle within ~pi*coherence samples and every
// few-hundred-sample window sees the whole envelope range.  The diffuse
// remainder is a stationary complex AR(1) with per-sample factor
// exp(-1/coherence).  coherence = 0 degenerates to probe-to-probe
// independence: the specular phases are redrawn uniformly every sample and
// the diffuse term is white.
inline std::vector<std::complex<double>> small_scale_fading(Prng& g,
                                                            std::size_t n,
                                                            double coherence) {
  constexpr double kSpecularPower = 0.49;  // per path, two paths
  constexpr double kDiffusePower = 0.02;   // total E|h|^2 = 1
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double amp = std::sqrt(kSpecularPower);

  const double a = coherence > 0.0 ? std::exp(-1.0 / coherence) : 0.0;
  std::vector<std::complex<double>> h = ar1_complex(g, n, a);
  const double dif = std::sqrt(kDiffusePower);
  for (auto& v : h) v *= dif;

  if (coherence > 0.0) {
    std::complex<double> cur[2], step[2];
    for (int k = 0; k < 2; ++k) {
      const double rate =
          (1.0 + 2.0 * std::fabs(g.next_gaussian())) / coherence;
      const double omega = (k == 0) ? rate : -rate;
      cur[k] = std::polar(amp, kTwoPi * g.next_double());
      step[k] = std::polar(1.0, omega);
    }
    for (std::size_t m = 0; m < n; ++m) {
      h[m] += cur[0] + cur[1];
      cur[0] *= step[0];
      cur[1] *= step[1];
    }
  } else {
    for (std::size_t m = 0; m < n; ++m) {
      h[m] += std::polar(amp, kTwoPi * g.next_double()) +
              std::polar(amp, kTwoPi * g.next_double());
    }
  }
  return h;
}

}  // namespace detail

// Validates a simulator configuration without running it; run_pipeline uses
// this to surface bad per-scenario settings at parse time.
inline void validate(const ChannelSimConfig& cfg) {
  if (cfg.num_samples < 2)
    throw ConfigError("simulator needs num_samples >= 2, got " +
                      std::to_string(cfg.num_samples));
  if (!(cfg.eve_correlation >= -1.0 && cfg.eve_correlation <= 1.0))
    throw ConfigError("eve_correlation must lie in [-1, 1]");
  if (!(cfg.probe_symbol > 0.0))
    throw ConfigError("probe_symbol must be positive");
  if (!(cfg.trend.base > 0.0))
    throw ConfigError("trend base must be positive");
  if (!(cfg.trend.shadowing_sigma >= 0.0))
    throw ConfigError("shadowing_sigma must be non-negative");
  if (!(cfg.trend.shadowing_cutoff > 0.0 && cfg.trend.shadowing_cutoff < 1.0))
    throw ConfigError("shadowing_cutoff must lie in (0, 1)");
  if (!(cfg.fading_coherence >= 0.0))
    throw ConfigError("fading_coherence must be non-negative");
  if (!(cfg.sample_period_s > 0.0))
    throw ConfigError("sample_period_s must be positive");
  if (std::isnan(cfg.snr_db) || cfg.snr_db == -INFINITY)
    throw ConfigError("snr_db must be a real value or +inf (noise off)");
}

// Generates aligned magnitude observations for Alice, Bob and Eve.
//
// Per probe the received value is |trend * h * X + noise| where X is the
// known pilot amplitude, h the unit-power small-scale fading and the noise
// is circular complex Gaussian sized so that the ratio of small-scale signal
// power (X^2) to noise power equals snr_db.  Alice and Bob share trend and
// fading and differ only in their noise draws; Eve's fading is
// rho*h + sqrt(1-rho^2)*h' with an independent h', so at
// eve_correlation = 1 (with shadowing disabled and noise off) her samples
// coincide exactly with the legitimate ones.
//
// Every random component is drawn from its own named substream of the seed,
// so adding or removing Eve never changes Alice's or Bob's samples, and the
// output is bit-identical across platforms and thread counts.
inline std::tuple<MeasurementSeries, MeasurementSeries, MeasurementSeries>
simulate_channel(const ChannelSimConfig& cfg) {
  validate(cfg);

  const std::size_t n = cfg.num_samples;

  Prng g_fade = Prng::stream(cfg.seed, "channel/fading");
  Prng g_fade_e = Prng::stream(cfg.seed, "eve/fading");
  Prng g_shadow = Prng::stream(cfg.seed, "channel/shadowing");
  Prng g_shadow_e = Prng::stream(cfg.seed, "eve/shadowing");
  Prng g_na = Prng::stream(cfg.seed, "alice/noise");
  Prng g_nb = Prng::stream(cfg.seed, "bob/noise");
  Prng g_ne = Prng::stream(cfg.seed, "eve/noise");

  const auto h = detail::small_scale_fading(g_fade, n, cfg.fading_coherence);
  const auto h_ind =
      detail::small_scale_fading(g_fade_e, n, cfg.fading_coherence);
  const auto shadow = detail::shadowing(g_shadow, n, cfg.trend.shadowing_sigma,
                                        cfg.trend.shadowing_cutoff);
  const auto shadow_e = detail::shadowing(
      g_shadow_e, n, cfg.trend.shadowing_sigma, cfg.trend.shadowing_cutoff);
  const auto trend = detail::make_trend(cfg.trend, n, shadow);
  const auto trend_e = detail::make_trend(cfg.trend, n, shadow_e);

  // Noise power relative to the small-scale signal power X^2 (E|h|^2 = 1).
  const double x = cfg.probe_symbol;
  const double noise_power =
      cfg.snr_db == INFINITY ? 0.0 : x * x * std::pow(10.0, -cfg.snr_db / 10.0);
  const double noise_comp = std::sqrt(noise_power / 2.0);

  const double rho = cfg.eve_correlation;
  const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));

  MeasurementSeries alice, bob, eve;
  alice.node_id = NodeId::Alice;
  bob.node_id = NodeId::Bob;
  eve.node_id = NodeId::Eve;
  for (MeasurementSeries* s : {&alice, &bob, &eve}) {
    s->sample_period_s = cfg.sample_period_s;
    s->scenario = Scenario::Unlabeled;
    s->samples.resize(n);
  }

  for (std::size_t m = 0; m < n; ++m) {
    const std::complex<double> sig = trend[m] * h[m] * x;
    // Special-case |rho| = 1 so the degenerate cases are exact, not merely
    // exact-up-to-rounding.
    const std::complex<double> h_e =
        (rho == 1.0) ? h[m]
                     : (rho == -1.0 ? -h[m] : rho * h[m] + rho_c * h_ind[m]);
    const std::complex<double> sig_e = trend_e[m] * h_e * x;

    const std::complex<double> na{g_na.next_gaussian() * noise_comp,
                                  g_na.next_gaussian() * noise_comp};
    const std::complex<double> nb{g_nb.next_gaussian() * noise_comp,
                                  g_nb.next_gaussian() * noise_comp};
    const std::complex<double> ne{g_ne.next_gaussian() * noise_comp,
                                  g_ne.next_gaussian() * noise_comp};

    alice.samples[m] = std::abs(sig + na);
    bob.samples[m] = std::abs(sig + nb);
    eve.samples[m] = std::abs(sig_e + ne);
  }
  return {std::move(alice), std::move(bob), std::move(eve)};
}

}  // namespace skg
