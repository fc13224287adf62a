#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "skg/errors.hpp"
#include "skg/series.hpp"

namespace skg {

enum class InitialState { FirstSample, Zero, Explicit };

// Scalar Kalman filter parameters.  R is the assumed measurement noise
// variance and the only knob the protocol sweeps; Q (process noise) and the
// initial conditions exist to keep the recursion well-behaved on long
// series — with Q = 0 the gain decays like 1/m and the filter degenerates
// into a running mean.
struct FilterConfig {
  double measurement_variance_r = 1e-2;
  double process_noise_q = 1e-6;
  InitialState initial_state_policy = InitialState::FirstSample;
  double explicit_initial_state = 0.0;
  double initial_covariance_p0 = 1.0;
};

struct FilteredSeries {
  std::vector<double> states;       // G_1..G_M
  std::vector<double> gains;        // K_1..K_M
  std::vector<double> covariances;  // P_1..P_M
};

// Residuals carry the source series metadata so downstream framing can keep
// provenance, plus the filter configuration that produced them.
struct ResidualSeries {
  std::vector<double> residuals;
  FilterConfig source_config;
  NodeId node_id = NodeId::Alice;
  int antenna_index = 0;
  int subcarrier_index = 0;
  double sample_period_s = 0.0;
  Scenario scenario = Scenario::Unlabeled;
};

// One pass of the scalar predict/update recursion:
//   P_pred = P_{m-1} + Q
//   K_m    = P_pred / (P_pred + R)
//   G_m    = G_{m-1} + K_m (Y_m - G_{m-1})
//   P_m    = (1 - K_m) P_pred  =  K_m R
// The covariance update uses the K_m R form: when R is tiny the gain sits
// within an ulp of 1 and computing (1 - K_m) directly would cancel away
// most of its significant digits.
inline FilteredSeries kalman_filter(const MeasurementSeries& series,
                                    const FilterConfig& cfg) {
  if (!(cfg.measurement_variance_r > 0.0))
    throw ConfigError("measurement variance R must be positive");
  if (!(cfg.process_noise_q >= 0.0))
    throw ConfigError("process noise Q must be non-negative");
  if (!(cfg.initial_covariance_p0 > 0.0))
    throw ConfigError("initial covariance P0 must be positive");
  if (series.samples.empty()) throw DataError("cannot filter an empty series");
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    if (!std::isfinite(series.samples[i]))
      throw DataError("non-finite sample at index " + std::to_string(i));
  }

  const double r = cfg.measurement_variance_r;
  const double q = cfg.process_noise_q;
  double g;
  switch (cfg.initial_state_policy) {
    case InitialState::FirstSample: g = series.samples.front(); break;
    case InitialState::Zero: g = 0.0; break;
    case InitialState::Explicit: g = cfg.explicit_initial_state; break;
    default: g = series.samples.front(); break;
  }
  double p = cfg.initial_covariance_p0;

  FilteredSeries out;
  const std::size_t m = series.samples.size();
  out.states.resize(m);
  out.gains.resize(m);
  out.covariances.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double p_pred = p + q;
    const double k = p_pred / (p_pred + r);
    g = g + k * (series.samples[i] - g);
    p = k * r;
    out.states[i] = g;
    out.gains[i] = k;
    out.covariances[i] = p;
  }
  return out;
}

inline ResidualSeries residual(const MeasurementSeries& series,
                               const FilteredSeries& filtered,
                               const FilterConfig& cfg = FilterConfig{}) {
  if (series.samples.size() != filtered.states.size())
    throw DataError("residual: series has " +
                    std::to_string(series.samples.size()) +
                    " samples but filter output has " +
                    std::to_string(filtered.states.size()));
  ResidualSeries out;
  out.residuals.resize(series.samples.size());
  for (std::size_t i = 0; i < series.samples.size(); ++i)
    out.residuals[i] = series.samples[i] - filtered.states[i];
  out.source_config = cfg;
  out.node_id = series.node_id;
  out.antenna_index = series.antenna_index;
  out.subcarrier_index = series.subcarrier_index;
  out.sample_period_s = series.sample_period_s;
  out.scenario = series.scenario;
  return out;
}

struct DetrendResult {
  FilteredSeries filtered;
  ResidualSeries residuals;
  double normalization = 1.0;  // mean power the R/Q/P0 scale was tied to
};

// Applies the filter with R, Q and P0 interpreted in units of the series'
// mean power.  Scaling the three variances by mean(y^2) is algebraically
// identical to normalizing the series to unit mean power first (the filter
// is linear in that joint scaling), so the published R sweep values carry
// over to measurements of any physical scale.  The factor is recorded so
// reports can state what the configured R meant in raw units.
inline DetrendResult detrend_unit_power(const MeasurementSeries& series,
                                        FilterConfig cfg) {
  validate(series);
  double power = 0.0;
  for (double v : series.samples) power += v * v;
  power /= static_cast<double>(series.samples.size());
  if (!(power > 0.0)) throw DataError("cannot normalize a zero-power series");

  cfg.measurement_variance_r *= power;
  cfg.process_noise_q *= power;
  cfg.initial_covariance_p0 *= power;
  if (cfg.initial_state_policy == InitialState::Explicit)
    cfg.explicit_initial_state *= std::sqrt(power);

  DetrendResult out;
  out.filtered = kalman_filter(series, cfg);
  out.residuals = residual(series, out.filtered, cfg);
  out.normalization = power;
  return out;
}

}  // namespace skg
