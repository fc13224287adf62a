#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "skg/amplify.hpp"
#include "skg/errors.hpp"
#include "skg/pipeline.hpp"

namespace skg {

namespace detail {

// CSV cells must not break the row structure; error strings are free text.
inline std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace detail

inline std::string report_csv_header() {
  return "scenario,r,code_rate,code_n,frame_bits,frames_total,"
         "frames_calibration,frames_eval,skipped_rows_ab,skipped_rows_eve,"
         "mismatch_ab,mismatch_eve,crossover_ab,crossover_eve,fer,h_min,"
         "h_min_cond,leakage_bits,estimator,block_size,entropy_samples,"
         "key_rate_bps,sampling_period_s,keys_emitted,reconciled_bits,"
         "leftover_bits,syndrome_bits,normalization_alice,normalization_bob,"
         "normalization_eve,nist_monobit,nist_block_frequency,nist_runs,"
         "nist_longest_run,nist_serial,nist_cumulative_sums,nist_streams,"
         "nist_keys_per_stream,error";
}

inline std::string report_csv_row(const PipelineCell& cell) {
  using detail::fmt_double;
  std::string row;
  auto add = [&row](const std::string& v) {
    if (!row.empty()) row += ',';
    row += v;
  };
  add(to_string(cell.scenario));
  add(fmt_double(cell.r));
  add(fmt_double(cell.code_rate));
  add(std::to_string(cell.code_n));
  add(std::to_string(cell.frame_bits));
  add(std::to_string(cell.frames_total));
  add(std::to_string(cell.frames_calibration));
  add(std::to_string(cell.frames_eval));
  add(std::to_string(cell.skipped_rows_ab));
  add(std::to_string(cell.skipped_rows_eve));
  add(fmt_double(cell.mismatch_ab));
  add(fmt_double(cell.mismatch_eve));
  add(fmt_double(cell.crossover_ab));
  add(fmt_double(cell.crossover_eve));
  add(fmt_double(cell.fer));
  add(fmt_double(cell.h_min));
  add(fmt_double(cell.h_min_cond));
  add(fmt_double(cell.leakage_bits));
  add(cell.estimator);
  add(std::to_string(cell.block_size));
  add(std::to_string(cell.entropy_samples));
  add(fmt_double(cell.key_rate_bps));
  add(fmt_double(cell.sampling_period_s));
  add(std::to_string(cell.keys_emitted));
  add(std::to_string(cell.reconciled_bits));
  add(std::to_string(cell.leftover_bits));
  add(std::to_string(cell.syndrome_bits));
  add(fmt_double(cell.normalization_alice));
  add(fmt_double(cell.normalization_bob));
  add(fmt_double(cell.normalization_eve));
  for (double rate : cell.nist.success_rates) add(fmt_double(rate));
  add(std::to_string(cell.nist.streams));
  add(std::to_string(cell.nist.keys_per_stream));
  add(detail::csv_safe(cell.error));
  return row;
}

inline std::string report_to_csv(const PipelineReport& report) {
  std::string out = report_csv_header();
  out += '\n';
  for (const PipelineCell& cell : report.cells) {
    out += report_csv_row(cell);
    out += '\n';
  }
  return out;
}

// One row per (scenario, R) pair: the per-cell mismatch does not depend on
// the code rate, so duplicates across rates collapse.
inline std::string mismatch_to_csv(const PipelineReport& report) {
  using detail::fmt_double;
  std::string out = "scenario,r,mismatch_ab,mismatch_eve\n";
  std::string last_key;
  for (const PipelineCell& cell : report.cells) {
    std::string key = std::string(to_string(cell.scenario)) + "/" +
                      fmt_double(cell.r);
    if (key == last_key) continue;
    last_key = std::move(key);
    out += to_string(cell.scenario);
    out += ',';
    out += fmt_double(cell.r);
    out += ',';
    out += fmt_double(cell.mismatch_ab);
    out += ',';
    out += fmt_double(cell.mismatch_eve);
    out += '\n';
  }
  return out;
}

inline nlohmann::json cell_to_json(const PipelineCell& cell) {
  nlohmann::json j;
  j["scenario"] = to_string(cell.scenario);
  j["r"] = cell.r;
  j["code_rate"] = cell.code_rate;
  j["code_n"] = cell.code_n;
  j["frame_bits"] = cell.frame_bits;
  j["frames_total"] = cell.frames_total;
  j["frames_calibration"] = cell.frames_calibration;
  j["frames_eval"] = cell.frames_eval;
  j["skipped_rows_ab"] = cell.skipped_rows_ab;
  j["skipped_rows_eve"] = cell.skipped_rows_eve;
  j["mismatch_ab"] = cell.mismatch_ab;
  j["mismatch_eve"] = cell.mismatch_eve;
  j["crossover_ab"] = cell.crossover_ab;
  j["crossover_eve"] = cell.crossover_eve;
  j["fer"] = cell.fer;
  j["h_min"] = cell.h_min;
  j["h_min_cond"] = cell.h_min_cond;
  j["leakage_bits"] = cell.leakage_bits;
  j["estimator"] = cell.estimator;
  j["block_size"] = cell.block_size;
  j["entropy_samples"] = cell.entropy_samples;
  j["key_rate_bps"] = cell.key_rate_bps;
  j["sampling_period_s"] = cell.sampling_period_s;
  j["keys_emitted"] = cell.keys_emitted;
  j["reconciled_bits"] = cell.reconciled_bits;
  j["leftover_bits"] = cell.leftover_bits;
  j["syndrome_bits"] = cell.syndrome_bits;
  j["normalization_alice"] = cell.normalization_alice;
  j["normalization_bob"] = cell.normalization_bob;
  j["normalization_eve"] = cell.normalization_eve;
  nlohmann::json nist;
  nist["ran"] = cell.nist.ran;
  nist["streams"] = cell.nist.streams;
  nist["keys_per_stream"] = cell.nist.keys_per_stream;
  for (std::size_t t = 0; t < kAllTests.size(); ++t)
    nist[to_string(kAllTests[t])] = cell.nist.success_rates[t];
  j["nist"] = nist;
  j["error"] = cell.error;
  return j;
}

inline std::string report_to_json(const PipelineReport& report) {
  nlohmann::json j;
  j["version"] = report.version;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  nlohmann::json cells = nlohmann::json::array();
  for (const PipelineCell& cell : report.cells)
    cells.push_back(cell_to_json(cell));
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write to " + path.string());
}

// Writes report.csv, report.json and mismatch.csv into dir.
inline void write_report_files(const PipelineReport& report,
                               const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  write_text_file(dir / "report.csv", report_to_csv(report));
  write_text_file(dir / "report.json", report_to_json(report));
  write_text_file(dir / "mismatch.csv", mismatch_to_csv(report));
}

// ---------------------------------------------------------------------------
// Key container: "SKGK" magic followed by raw 32-byte key records.

inline void write_keys(const std::filesystem::path& path,
                       std::span<const KeyMaterial> keys) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write("SKGK", 4);
  for (const KeyMaterial& k : keys)
    out.write(reinterpret_cast<const char*>(k.key.data()),
              static_cast<std::streamsize>(k.key.size()));
  if (!out) throw IoError("short write to " + path.string());
}

inline std::vector<std::array<std::uint8_t, 32>> read_keys(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (raw.size() < 4 || std::string_view(raw.data(), 4) != "SKGK")
    throw FormatError("missing SKGK magic in " + path.string());
  if ((raw.size() - 4) % 32 != 0)
    throw FormatError("key payload in " + path.string() +
                      " is not a whole number of 32-byte records");
  std::vector<std::array<std::uint8_t, 32>> keys((raw.size() - 4) / 32);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t b = 0; b < 32; ++b)
      keys[i][b] = static_cast<std::uint8_t>(raw[4 + i * 32 + b]);
  }
  return keys;
}

}  // namespace skg
