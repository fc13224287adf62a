#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "skg/amplify.hpp"
#include "skg/bits.hpp"
#include "skg/config.hpp"
#include "skg/dataset.hpp"
#include "skg/detrend.hpp"
#include "skg/errors.hpp"
#include "skg/leakage.hpp"
#include "skg/nist.hpp"
#include "skg/polar.hpp"
#include "skg/prng.hpp"
#include "skg/quantize.hpp"
#include "skg/series.hpp"
#include "skg/sha256.hpp"
#include "skg/simulate.hpp"
#include "skg/version.hpp"

namespace skg {

// ---------------------------------------------------------------------------
// Configuration

enum class SourceKind { Simulator, Dataset };

struct ScenarioSpec {
  Scenario label = Scenario::Unlabeled;
  ChannelSimConfig sim;
};

struct DatasetSource {
  std::string alice_path;
  std::string bob_path;
  std::string eve_path;  // empty = no eavesdropper branch
  SubsampleSpec subsample;
};

struct PipelineConfig {
  SourceKind source = SourceKind::Simulator;
  std::vector<ScenarioSpec> scenarios;  // simulator mode
  DatasetSource dataset;                // dataset mode

  std::vector<double> r_values;
  FilterConfig filter;  // measurement_variance_r is overridden per cell
  QuantizerConfig quantizer;
  std::size_t samples_per_frame = 512;

  std::size_t code_n = 1024;
  std::vector<double> code_rates;

  LeakageConfig leakage;
  int block_size_b = 4;

  SuiteConfig nist;

  double sampling_period_T_s = 0.005;
  double calibration_fraction = 0.10;
  std::uint64_t seed = 0;
  bool include_eve = true;
};

inline void validate(const PipelineConfig& cfg) {
  if (cfg.r_values.empty())
    throw ConfigError("the R sweep list must not be empty");
  for (double r : cfg.r_values) {
    if (!(r > 0.0)) throw ConfigError("every R value must be positive");
  }
  if (cfg.code_rates.empty())
    throw ConfigError("the code-rate list must not be empty");
  for (double rate : cfg.code_rates) {
    if (!(rate > 0.0 && rate < 1.0))
      throw ConfigError("every code rate must lie in (0, 1)");
  }
  if (!(cfg.sampling_period_T_s > 0.0))
    throw ConfigError("the sampling period T must be positive");
  if (!(cfg.calibration_fraction > 0.0 && cfg.calibration_fraction <= 0.5))
    throw ConfigError("calibration_fraction must lie in (0, 0.5]");
  if (cfg.samples_per_frame == 0)
    throw ConfigError("samples_per_frame must be positive");
  validate(cfg.quantizer);
  validate(cfg.nist);
  if (cfg.source == SourceKind::Simulator && cfg.scenarios.empty())
    throw ConfigError("simulator source needs at least one scenario");
  if (cfg.source == SourceKind::Simulator) {
    for (const ScenarioSpec& s : cfg.scenarios) validate(s.sim);
  }
  if (cfg.source == SourceKind::Dataset &&
      (cfg.dataset.alice_path.empty() || cfg.dataset.bob_path.empty()))
    throw ConfigError("dataset source needs alice and bob container paths");
  // One quantized frame maps onto one code block, so the code length is
  // pinned to the frame bit length.
  const std::size_t frame_bits =
      cfg.samples_per_frame * static_cast<std::size_t>(
                                  cfg.quantizer.bits_per_sample);
  if (cfg.code_n != frame_bits)
    throw ConfigError(
        "code.n must equal samples_per_frame * bits_per_sample (" +
        std::to_string(frame_bits) + "), got " + std::to_string(cfg.code_n));
}

// ---------------------------------------------------------------------------
// Report

struct NistCellSummary {
  bool ran = false;
  std::size_t streams = 0;
  std::size_t keys_per_stream = 0;
  // Success rate per test in kAllTests order; NaN when not applicable.
  std::array<double, 6> success_rates{};
};

struct PipelineCell {
  Scenario scenario = Scenario::Unlabeled;
  double r = 0.0;
  double code_rate = 0.0;  // exact stored rate of the constructed code
  std::size_t code_n = 0;
  std::size_t frame_bits = 0;

  std::size_t frames_total = 0;
  std::size_t frames_calibration = 0;
  std::size_t frames_eval = 0;
  std::size_t skipped_rows_ab = 0;
  std::size_t skipped_rows_eve = 0;

  double mismatch_ab = std::nan("");
  double mismatch_eve = std::nan("");
  double crossover_ab = std::nan("");   // calibration estimate (unclamped)
  double crossover_eve = std::nan("");

  double fer = std::nan("");
  double h_min = std::nan("");
  double h_min_cond = std::nan("");
  double leakage_bits = std::nan("");
  std::string estimator;
  int block_size = 0;
  std::size_t entropy_samples = 0;

  double key_rate_bps = std::nan("");
  double sampling_period_s = 0.0;
  std::size_t keys_emitted = 0;
  std::size_t reconciled_bits = 0;
  std::size_t leftover_bits = 0;
  std::size_t syndrome_bits = 0;  // per frame

  double normalization_alice = std::nan("");
  double normalization_bob = std::nan("");
  double normalization_eve = std::nan("");

  NistCellSummary nist;
  std::vector<KeyMaterial> keys;

  std::string error;  // empty = cell completed
};

struct PipelineReport {
  std::vector<PipelineCell> cells;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version;
};

// Throughput: frame bits times survival rate times conditional entropy,
// divided by the probing period.  Operand order is fixed so stored values
// recompute bit-for-bit.
inline double key_rate(std::size_t frame_bits, double fer, double h_cond,
                       double t_seconds) {
  if (!(t_seconds > 0.0))
    throw ConfigError("sampling period must be positive");
  if (!(fer >= 0.0 && fer <= 1.0))
    throw ConfigError("frame error rate must lie in [0, 1]");
  if (!(h_cond >= 0.0 && h_cond <= 1.0))
    throw ConfigError("conditional min-entropy must lie in [0, 1]");
  return static_cast<double>(frame_bits) * (1.0 - fer) * h_cond / t_seconds;
}

// ---------------------------------------------------------------------------
// Config parsing (documented key = value format; see the sample configs)

namespace detail {

inline Labeling labeling_from_string(const std::string& s) {
  if (s == "gray") return Labeling::Gray;
  if (s == "natural") return Labeling::NaturalBinary;
  throw ConfigError("quantizer.labeling must be 'gray' or 'natural', got '" +
                    s + "'");
}

inline EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "frequentist") return EstimatorKind::Frequentist;
  if (s == "knn") return EstimatorKind::NearestNeighbor;
  throw ConfigError("leakage.estimator must be 'frequentist' or 'knn', got '" +
                    s + "'");
}

inline InitialState initial_state_from_string(const std::string& s) {
  if (s == "first_sample") return InitialState::FirstSample;
  if (s == "zero") return InitialState::Zero;
  if (s == "explicit") return InitialState::Explicit;
  throw ConfigError(
      "filter.initial_state must be 'first_sample', 'zero' or 'explicit', "
      "got '" + s + "'");
}

// Per-scenario simulator fields may be overridden as sim.<label>.<field>;
// the bare sim.<field> is the shared default.
inline double sim_field(const KeyValueConfig& kv, const std::string& label,
                        const std::string& field, double fallback) {
  return kv.get_double("sim." + label + "." + field,
                       kv.get_double("sim." + field, fallback));
}

}  // namespace detail

inline PipelineConfig parse_pipeline_config(const KeyValueConfig& kv) {
  PipelineConfig cfg;
  cfg.seed = kv.get_u64("seed", 0);

  const std::string source = kv.get_string("source", "simulator");
  if (source == "simulator")
    cfg.source = SourceKind::Simulator;
  else if (source == "dataset")
    cfg.source = SourceKind::Dataset;
  else
    throw ConfigError("source must be 'simulator' or 'dataset', got '" +
                      source + "'");

  cfg.samples_per_frame =
      static_cast<std::size_t>(kv.get_u64("samples_per_frame", 512));
  cfg.sampling_period_T_s = kv.get_double("sampling_period_s", 0.005);
  cfg.calibration_fraction = kv.get_double("calibration_fraction", 0.10);

  if (cfg.source == SourceKind::Simulator) {
    std::vector<std::string> labels = kv.get_string_list("scenarios");
    if (labels.empty()) labels = {"los", "nlos"};
    for (const std::string& label : labels) {
      ScenarioSpec spec;
      spec.label = scenario_from_string(label);
      ChannelSimConfig& sim = spec.sim;
      sim.num_samples = static_cast<std::size_t>(detail::sim_field(
          kv, label, "num_samples", 114688.0));
      sim.snr_db = detail::sim_field(kv, label, "snr_db", 22.0);
      sim.eve_correlation =
          detail::sim_field(kv, label, "eve_correlation", 0.0);
      sim.probe_symbol = detail::sim_field(kv, label, "probe_symbol", 1.0);
      sim.fading_coherence =
          detail::sim_field(kv, label, "fading_coherence", 40.0);
      sim.sample_period_s =
          detail::sim_field(kv, label, "sample_period_s",
                            cfg.sampling_period_T_s);
      sim.trend.base = detail::sim_field(kv, label, "trend.base", 1.0);
      sim.trend.slope_per_sample =
          detail::sim_field(kv, label, "trend.slope_per_sample", 1e-5);
      sim.trend.shadowing_sigma =
          detail::sim_field(kv, label, "trend.shadowing_sigma", 0.25);
      sim.trend.shadowing_cutoff =
          detail::sim_field(kv, label, "trend.shadowing_cutoff", 1e-3);
      cfg.scenarios.push_back(spec);
    }
  } else {
    cfg.dataset.alice_path = kv.get_string("dataset.alice", "");
    cfg.dataset.bob_path = kv.get_string("dataset.bob", "");
    cfg.dataset.eve_path = kv.get_string("dataset.eve", "");
    cfg.dataset.subsample.antenna_stride =
        static_cast<std::size_t>(kv.get_u64("subsample.antenna_stride", 4));
    cfg.dataset.subsample.subcarrier_stride = static_cast<std::size_t>(
        kv.get_u64("subsample.subcarrier_stride", 10));
    cfg.dataset.subsample.time_stride =
        static_cast<std::size_t>(kv.get_u64("subsample.time_stride", 5));
  }

  cfg.r_values = kv.get_double_list("filter.r");
  if (cfg.r_values.empty())
    cfg.r_values = {1e-1, 1e-2, 4e-3, 1e-3, 7e-4, 1e-4, 1e-5};
  cfg.filter.process_noise_q = kv.get_double("filter.q", 1e-6);
  cfg.filter.initial_covariance_p0 = kv.get_double("filter.p0", 1.0);
  cfg.filter.initial_state_policy = detail::initial_state_from_string(
      kv.get_string("filter.initial_state", "first_sample"));
  cfg.filter.explicit_initial_state =
      kv.get_double("filter.initial_state_value", 0.0);

  cfg.quantizer.levels = static_cast<int>(kv.get_u64("quantizer.levels", 4));
  cfg.quantizer.bits_per_sample = 0;
  while ((1 << (cfg.quantizer.bits_per_sample + 1)) <= cfg.quantizer.levels)
    ++cfg.quantizer.bits_per_sample;
  cfg.quantizer.labeling = detail::labeling_from_string(
      kv.get_string("quantizer.labeling", "gray"));

  cfg.code_n = static_cast<std::size_t>(kv.get_u64("code.n", 1024));
  cfg.code_rates = kv.get_double_list("code.rates");
  if (cfg.code_rates.empty()) cfg.code_rates = {0.5, 0.3, 0.1};

  cfg.leakage.estimator = detail::estimator_from_string(
      kv.get_string("leakage.estimator", "frequentist"));
  cfg.leakage.digest_bits =
      static_cast<int>(kv.get_u64("leakage.digest_bits", 8));
  cfg.block_size_b = static_cast<int>(kv.get_u64("leakage.block_size", 4));

  cfg.nist.significance_alpha = kv.get_double("nist.alpha", 0.01);
  cfg.nist.block_length_m =
      static_cast<int>(kv.get_u64("nist.block_length", 128));
  cfg.nist.serial_m = static_cast<int>(kv.get_u64("nist.serial_m", 16));
  cfg.nist.concat_keys = static_cast<int>(kv.get_u64("nist.concat_keys", 16));
  cfg.nist.per_key = kv.get_bool("nist.per_key", false);

  cfg.include_eve = kv.get_bool("include_eve", true);

  kv.reject_unused();
  validate(cfg);
  return cfg;
}

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Canonical text rendering of the effective configuration; its hash ties a
// report to the exact parameters that produced it, independent of config
// file formatting.
inline std::string canonical_config_text(const PipelineConfig& cfg) {
  std::string out;
  auto emit = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  emit("seed", std::to_string(cfg.seed));
  emit("source",
       cfg.source == SourceKind::Simulator ? "simulator" : "dataset");
  emit("samples_per_frame", std::to_string(cfg.samples_per_frame));
  emit("sampling_period_s", fmt_double(cfg.sampling_period_T_s));
  emit("calibration_fraction", fmt_double(cfg.calibration_fraction));
  emit("include_eve", cfg.include_eve ? "true" : "false");
  if (cfg.source == SourceKind::Simulator) {
    std::string labels;
    for (const auto& s : cfg.scenarios) {
      if (!labels.empty()) labels += ",";
      labels += to_string(s.label);
    }
    emit("scenarios", labels);
    for (const auto& s : cfg.scenarios) {
      const std::string p = std::string("sim.") + to_string(s.label) + ".";
      emit(p + "num_samples", std::to_string(s.sim.num_samples));
      emit(p + "snr_db", fmt_double(s.sim.snr_db));
      emit(p + "eve_correlation", fmt_double(s.sim.eve_correlation));
      emit(p + "probe_symbol", fmt_double(s.sim.probe_symbol));
      emit(p + "fading_coherence", fmt_double(s.sim.fading_coherence));
      emit(p + "sample_period_s", fmt_double(s.sim.sample_period_s));
      emit(p + "trend.base", fmt_double(s.sim.trend.base));
      emit(p + "trend.slope_per_sample",
           fmt_double(s.sim.trend.slope_per_sample));
      emit(p + "trend.shadowing_sigma",
           fmt_double(s.sim.trend.shadowing_sigma));
      emit(p + "trend.shadowing_cutoff",
           fmt_double(s.sim.trend.shadowing_cutoff));
    }
  } else {
    emit("dataset.alice", cfg.dataset.alice_path);
    emit("dataset.bob", cfg.dataset.bob_path);
    emit("dataset.eve", cfg.dataset.eve_path);
    emit("subsample.antenna_stride",
         std::to_string(cfg.dataset.subsample.antenna_stride));
    emit("subsample.subcarrier_stride",
         std::to_string(cfg.dataset.subsample.subcarrier_stride));
    emit("subsample.time_stride",
         std::to_string(cfg.dataset.subsample.time_stride));
  }
  std::string rs;
  for (double r : cfg.r_values) {
    if (!rs.empty()) rs += ",";
    rs += fmt_double(r);
  }
  emit("filter.r", rs);
  emit("filter.q", fmt_double(cfg.filter.process_noise_q));
  emit("filter.p0", fmt_double(cfg.filter.initial_covariance_p0));
  emit("filter.initial_state",
       cfg.filter.initial_state_policy == InitialState::FirstSample
           ? "first_sample"
           : (cfg.filter.initial_state_policy == InitialState::Zero
                  ? "zero"
                  : "explicit"));
  emit("filter.initial_state_value",
       fmt_double(cfg.filter.explicit_initial_state));
  emit("quantizer.levels", std::to_string(cfg.quantizer.levels));
  emit("quantizer.labeling",
       cfg.quantizer.labeling == Labeling::Gray ? "gray" : "natural");
  emit("code.n", std::to_string(cfg.code_n));
  std::string rates;
  for (double r : cfg.code_rates) {
    if (!rates.empty()) rates += ",";
    rates += fmt_double(r);
  }
  emit("code.rates", rates);
  emit("leakage.estimator", to_string(cfg.leakage.estimator));
  emit("leakage.digest_bits", std::to_string(cfg.leakage.digest_bits));
  emit("leakage.block_size", std::to_string(cfg.block_size_b));
  emit("nist.alpha", fmt_double(cfg.nist.significance_alpha));
  emit("nist.block_length", std::to_string(cfg.nist.block_length_m));
  emit("nist.serial_m", std::to_string(cfg.nist.serial_m));
  emit("nist.concat_keys", std::to_string(cfg.nist.concat_keys));
  emit("nist.per_key", cfg.nist.per_key ? "true" : "false");
  return out;
}

inline std::string config_hash(const PipelineConfig& cfg) {
  const auto digest = Sha256::digest(canonical_config_text(cfg));
  return to_hex(digest).substr(0, 16);
}

inline std::size_t worker_count(std::size_t jobs) {
  std::size_t cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("SKG_THREADS")) {
    std::size_t v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc{} && res.ptr == s.data() + s.size() && v >= 1)
      cap = v;
  }
  return std::max<std::size_t>(1, std::min(cap, jobs));
}

// Runs fn(0..jobs) across workers.  Output slots are preassigned by job
// index, so the result is independent of scheduling.
template <typename Fn>
inline void parallel_for(std::size_t jobs, Fn&& fn) {
  const std::size_t workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Per-scenario input: one or more aligned series per node (multiple series
// arise from multi-antenna/subcarrier datasets; their frames are pooled).
struct ScenarioData {
  Scenario label = Scenario::Unlabeled;
  std::vector<MeasurementSeries> alice;
  std::vector<MeasurementSeries> bob;
  std::vector<MeasurementSeries> eve;  // empty = no eavesdropper
};

inline std::vector<ScenarioData> build_sources(const PipelineConfig& cfg) {
  std::vector<ScenarioData> out;
  if (cfg.source == SourceKind::Simulator) {
    for (const ScenarioSpec& spec : cfg.scenarios) {
      ScenarioData data;
      data.label = spec.label;
      ChannelSimConfig sim = spec.sim;
      sim.seed = Prng::derive(cfg.seed,
                              std::string("scenario/") + to_string(spec.label));
      auto [a, b, e] = simulate_channel(sim);
      a.scenario = b.scenario = e.scenario = spec.label;
      data.alice.push_back(std::move(a));
      data.bob.push_back(std::move(b));
      if (cfg.include_eve) data.eve.push_back(std::move(e));
      out.push_back(std::move(data));
    }
    return out;
  }

  ScenarioData data;
  data.alice = load_dataset(cfg.dataset.alice_path, cfg.dataset.subsample);
  data.bob = load_dataset(cfg.dataset.bob_path, cfg.dataset.subsample);
  if (cfg.include_eve && !cfg.dataset.eve_path.empty())
    data.eve = load_dataset(cfg.dataset.eve_path, cfg.dataset.subsample);
  if (data.alice.empty()) throw DataError("alice dataset holds no series");
  if (data.alice.size() != data.bob.size())
    throw DataError("alice and bob datasets disagree on series count");
  if (!data.eve.empty() && data.eve.size() != data.alice.size())
    throw DataError("eve dataset disagrees on series count");
  for (std::size_t i = 0; i < data.alice.size(); ++i) {
    if (data.alice[i].samples.size() != data.bob[i].samples.size())
      throw DataError("series " + std::to_string(i) +
                      " lengths differ between alice and bob");
    if (!data.eve.empty() &&
        data.eve[i].samples.size() != data.alice[i].samples.size())
      throw DataError("series " + std::to_string(i) +
                      " lengths differ between alice and eve");
  }
  data.label = data.alice.front().scenario;
  out.push_back(std::move(data));
  return out;
}

struct NodeFrames {
  std::vector<BitFrame> frames;
  std::size_t skipped_rows = 0;
  double normalization = std::nan("");
};

// Detrends every series of one node at measurement variance r and pools the
// quantized frames with a global frame index (series are concatenated in
// order, so indices align across nodes as long as series lengths match).
inline NodeFrames process_node(const std::vector<MeasurementSeries>& series,
                               const PipelineConfig& cfg, double r) {
  NodeFrames out;
  FilterConfig filter = cfg.filter;
  filter.measurement_variance_r = r;
  std::size_t base = 0;
  double norm_sum = 0.0;
  for (const MeasurementSeries& s : series) {
    DetrendResult det = detrend_unit_power(s, filter);
    QuantizeResult q =
        quantize_frames(det.residuals, cfg.quantizer, cfg.samples_per_frame);
    for (BitFrame& f : q.frames) {
      f.frame_index += base;
      out.frames.push_back(std::move(f));
    }
    out.skipped_rows += q.skipped_rows;
    base += s.samples.size() / cfg.samples_per_frame;
    norm_sum += det.normalization;
  }
  out.normalization = norm_sum / static_cast<double>(series.size());
  return out;
}

inline double clamp_crossover(double p) {
  return std::clamp(p, 1e-4, 0.4999);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The pipeline

inline PipelineReport run_pipeline(const PipelineConfig& cfg) {
  validate(cfg);
  const std::vector<detail::ScenarioData> sources =
      detail::build_sources(cfg);

  struct Group {
    std::size_t scenario_idx;
    double r;
  };
  std::vector<Group> groups;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (double r : cfg.r_values) groups.push_back({s, r});
  }

  const std::size_t rates = cfg.code_rates.size();
  std::vector<PipelineCell> cells(groups.size() * rates);

  detail::parallel_for(groups.size(), [&](std::size_t gi) {
    const detail::ScenarioData& src = sources[groups[gi].scenario_idx];
    const double r = groups[gi].r;
    PipelineCell* slot = cells.data() + gi * rates;

    for (std::size_t ri = 0; ri < rates; ++ri) {
      PipelineCell& cell = slot[ri];
      cell.scenario = src.label;
      cell.r = r;
      cell.code_n = cfg.code_n;
      cell.frame_bits = cfg.samples_per_frame *
                        static_cast<std::size_t>(
                            cfg.quantizer.bits_per_sample);
      cell.sampling_period_s = cfg.sampling_period_T_s;
      cell.estimator = to_string(cfg.leakage.estimator);
      cell.block_size = cfg.block_size_b;
    }

    try {
      const detail::NodeFrames fa = detail::process_node(src.alice, cfg, r);
      const detail::NodeFrames fb = detail::process_node(src.bob, cfg, r);
      detail::NodeFrames fe;
      const bool with_eve = !src.eve.empty();
      if (with_eve) fe = detail::process_node(src.eve, cfg, r);

      // Frames aligned between Alice and Bob drive the legitimate pipeline;
      // Eve's branch covers whatever subset of them she also produced.
      std::map<std::size_t, const BitFrame*> bob_by_index, eve_by_index;
      for (const BitFrame& f : fb.frames) bob_by_index[f.frame_index] = &f;
      for (const BitFrame& f : fe.frames) eve_by_index[f.frame_index] = &f;

      std::vector<BitFrame> a_all, b_all;
      std::vector<const BitFrame*> e_all;  // null where Eve lacks the frame
      for (const BitFrame& f : fa.frames) {
        const auto it = bob_by_index.find(f.frame_index);
        if (it == bob_by_index.end()) continue;
        a_all.push_back(f);
        b_all.push_back(*it->second);
        const auto ite = eve_by_index.find(f.frame_index);
        e_all.push_back(ite == eve_by_index.end() ? nullptr : ite->second);
      }
      if (a_all.size() < 2)
        throw DataError("fewer than two aligned frames in this cell");

      const double mismatch_ab = mismatch_rate(a_all, b_all);
      const std::size_t calib = std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::ceil(cfg.calibration_fraction *
                           static_cast<double>(a_all.size()))));
      if (calib >= a_all.size())
        throw DataError("calibration split leaves no evaluation frames");

      const std::span<const BitFrame> a_cal(a_all.data(), calib);
      const std::span<const BitFrame> b_cal(b_all.data(), calib);
      const std::span<const BitFrame> a_eval(a_all.data() + calib,
                                             a_all.size() - calib);
      const std::span<const BitFrame> b_eval(b_all.data() + calib,
                                             b_all.size() - calib);
      const double crossover_ab = mismatch_rate(a_cal, b_cal);

      // Eve's mismatch and calibration crossover over her aligned subset.
      double mismatch_eve = std::nan("");
      double crossover_eve = std::nan("");
      if (with_eve) {
        std::vector<BitFrame> ea, ee, ca, ce;
        for (std::size_t i = 0; i < a_all.size(); ++i) {
          if (e_all[i] == nullptr) continue;
          (i < calib ? ca : ea).push_back(a_all[i]);
          (i < calib ? ce : ee).push_back(*e_all[i]);
        }
        if (!ea.empty() || !ca.empty()) {
          std::vector<BitFrame> all_a = ca, all_e = ce;
          all_a.insert(all_a.end(), ea.begin(), ea.end());
          all_e.insert(all_e.end(), ee.begin(), ee.end());
          mismatch_eve = mismatch_rate(all_a, all_e);
        }
        crossover_eve = ca.empty() ? 0.4999 : mismatch_rate(ca, ce);
      }

      for (std::size_t ri = 0; ri < rates; ++ri) {
        PipelineCell& cell = slot[ri];
        cell.frames_total = a_all.size();
        cell.frames_calibration = calib;
        cell.frames_eval = a_eval.size();
        cell.skipped_rows_ab = fa.skipped_rows + fb.skipped_rows;
        cell.skipped_rows_eve = fe.skipped_rows;
        cell.mismatch_ab = mismatch_ab;
        cell.mismatch_eve = mismatch_eve;
        cell.crossover_ab = crossover_ab;
        cell.crossover_eve = crossover_eve;
        cell.normalization_alice = fa.normalization;
        cell.normalization_bob = fb.normalization;
        cell.normalization_eve =
            with_eve ? fe.normalization : std::nan("");

        try {
          // Round the design crossover through float so the code Bob (and
          // Eve) reconstruct from the serialized header is the same code.
          const double design_p = static_cast<double>(
              static_cast<float>(detail::clamp_crossover(crossover_ab)));
          const PolarCodeSpec spec =
              construct_code(cfg.code_n, cfg.code_rates[ri], design_p);
          cell.code_rate = spec.code_rate;
          cell.syndrome_bits = spec.syndrome_positions.size();

          std::vector<Syndrome> syndromes;
          syndromes.reserve(a_eval.size());
          for (const BitFrame& f : a_eval)
            syndromes.push_back(make_syndrome(f, spec));
          const std::vector<std::uint8_t> wire =
              serialize_syndromes(spec, syndromes);

          // Bob's branch parses the published bytes and decodes.
          const SyndromeStream bob_view = parse_syndromes(wire);
          if (bob_view.records.size() != a_eval.size())
            throw DataError("syndrome stream record count mismatch");
          const double p_ab = detail::clamp_crossover(crossover_ab);
          std::vector<BitFrame> decoded;
          decoded.reserve(a_eval.size());
          for (std::size_t i = 0; i < a_eval.size(); ++i)
            decoded.push_back(decode(b_eval[i], bob_view.records[i],
                                     bob_view.spec, p_ab));
          cell.fer = frame_error_rate(decoded, a_eval);

          const EntropyEstimate marginal =
              min_entropy(a_eval, cfg.block_size_b);
          cell.h_min = marginal.bits_per_symbol;

          double h_cond = std::nan("");
          if (with_eve) {
            // Eve consumes the identical serialized bytes Bob consumed.
            const SyndromeStream eve_view = parse_syndromes(wire);
            const double p_e = detail::clamp_crossover(
                std::isnan(crossover_eve) ? 0.4999 : crossover_eve);
            std::vector<BitFrame> sub_a, sub_e, eve_decoded;
            std::vector<Syndrome> sub_s;
            for (std::size_t i = 0; i < a_eval.size(); ++i) {
              const BitFrame* ef = e_all[calib + i];
              if (ef == nullptr) continue;
              sub_a.push_back(a_eval[i]);
              sub_e.push_back(*ef);
              sub_s.push_back(eve_view.records[i]);
              eve_decoded.push_back(
                  decode(*ef, eve_view.records[i], eve_view.spec, p_e));
            }
            const EntropyEstimate cond = conditional_min_entropy(
                sub_a, sub_e, sub_s, eve_decoded, cfg.block_size_b,
                cfg.leakage);
            h_cond = cond.bits_per_symbol;
            cell.entropy_samples = cond.sample_count;
            cell.leakage_bits = leakage(marginal, cond).leakage_bits;
          }
          cell.h_min_cond = h_cond;

          std::size_t reconciled = 0;
          for (const BitFrame& f : a_eval) reconciled += f.bits.size();
          cell.reconciled_bits = reconciled;

          if (with_eve) {
            cell.key_rate_bps = key_rate(cell.frame_bits, cell.fer, h_cond,
                                         cfg.sampling_period_T_s);
            try {
              AmplifyStreamResult amp = amplify_stream(a_eval, h_cond);
              cell.keys = std::move(amp.keys);
              cell.keys_emitted = cell.keys.size();
              cell.leftover_bits = amp.leftover_bits;
            } catch (const CannotAmplifyError&) {
              cell.keys_emitted = 0;
            }
            if (!cell.keys.empty()) {
              const SuiteReport suite = run_suite(cell.keys, cfg.nist);
              cell.nist.ran = true;
              cell.nist.streams = suite.streams;
              cell.nist.keys_per_stream = suite.keys_per_stream;
              for (std::size_t t = 0; t < suite.rows.size(); ++t)
                cell.nist.success_rates[t] =
                    suite.rows[t].applicable ? suite.rows[t].success_rate
                                             : std::nan("");
            } else {
              cell.nist.success_rates.fill(std::nan(""));
            }
          } else {
            cell.nist.success_rates.fill(std::nan(""));
          }
        } catch (const Error& e) {
          cell.error = e.what();
        }
      }
    } catch (const Error& e) {
      for (std::size_t ri = 0; ri < rates; ++ri) {
        if (slot[ri].error.empty()) slot[ri].error = e.what();
      }
    }
  });

  PipelineReport report;
  report.cells = std::move(cells);
  report.seed = cfg.seed;
  report.config_hash = detail::config_hash(cfg);
  report.version = SKG_VERSION;
  return report;
}

}  // namespace skg
