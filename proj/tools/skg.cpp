// Command-line front end for the SKG toolkit.
//
//   skg simulate  --out DIR [--config FILE] [--seed N]
//   skg run       --out DIR [--config FILE] [--seed N] [--r X] [--rate Y]
//   skg sweep     --out DIR [--config FILE] [--seed N]
//   skg keys      --out FILE [--config FILE] [--seed N]
//                 [--scenario S] [--r X] [--rate Y]
//   skg nist      --keys FILE [--alpha A] [--block-length M] [--serial-m M]
//                 [--concat-keys K] [--per-key] [--json FILE]
//
// Exit codes: 0 success, 2 configuration error, 3 data/format error,
// 1 anything else (I/O failures included).

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skg/skg.hpp"

namespace {

skg::PipelineConfig load_config(const std::string& config_path,
                                std::optional<std::uint64_t> seed_override) {
  skg::KeyValueConfig kv;
  if (!config_path.empty()) kv = skg::KeyValueConfig::parse_file(config_path);
  skg::PipelineConfig cfg = skg::parse_pipeline_config(kv);
  if (seed_override) cfg.seed = *seed_override;
  return cfg;
}

void print_summary(const skg::PipelineReport& report) {
  std::printf("%-10s %-10s %-6s %-9s %-8s %-8s %-12s %-6s %s\n", "scenario",
              "r", "rate", "mismatch", "fer", "h_cond", "key_rate", "keys",
              "error");
  for (const skg::PipelineCell& cell : report.cells) {
    std::printf("%-10s %-10.4g %-6.3g %-9.5f %-8.5f %-8.4f %-12.1f %-6zu %s\n",
                skg::to_string(cell.scenario), cell.r, cell.code_rate,
                cell.mismatch_ab, cell.fer, cell.h_min_cond,
                cell.key_rate_bps, cell.keys_emitted, cell.error.c_str());
  }
  std::printf("config %s, seed %llu\n", report.config_hash.c_str(),
              static_cast<unsigned long long>(report.seed));
}

int cmd_simulate(const std::string& config_path,
                 std::optional<std::uint64_t> seed, const std::string& out) {
  skg::PipelineConfig cfg = load_config(config_path, seed);
  if (cfg.source != skg::SourceKind::Simulator)
    throw skg::ConfigError("simulate requires a simulator-source config");
  std::filesystem::create_directories(out);
  for (const skg::ScenarioSpec& spec : cfg.scenarios) {
    skg::ChannelSimConfig sim = spec.sim;
    sim.seed = skg::Prng::derive(
        cfg.seed, std::string("scenario/") + skg::to_string(spec.label));
    auto [a, b, e] = skg::simulate_channel(sim);
    a.scenario = b.scenario = e.scenario = spec.label;
    const skg::MeasurementSeries* nodes[3] = {&a, &b, &e};
    for (const skg::MeasurementSeries* s : nodes) {
      skg::DatasetInfo info;
      info.time = s->samples.size();
      info.antennas = 1;
      info.subcarriers = 1;
      info.sample_period_s = s->sample_period_s;
      info.node = s->node_id;
      info.scenario = s->scenario;
      std::vector<float> payload(s->samples.begin(), s->samples.end());
      const std::string path = out + "/" + skg::to_string(spec.label) + "_" +
                               skg::to_string(s->node_id) + ".skg1";
      skg::write_dataset(path, info, payload);
      std::printf("wrote %s (%zu samples)\n", path.c_str(),
                  payload.size());
    }
  }
  return 0;
}

int cmd_run(const std::string& config_path,
            std::optional<std::uint64_t> seed, const std::string& out,
            std::optional<double> r_only, std::optional<double> rate_only) {
  skg::PipelineConfig cfg = load_config(config_path, seed);
  if (r_only) cfg.r_values = {*r_only};
  if (rate_only) cfg.code_rates = {*rate_only};
  skg::validate(cfg);
  const skg::PipelineReport report = skg::run_pipeline(cfg);
  skg::write_report_files(report, out);
  print_summary(report);
  return 0;
}

int cmd_keys(const std::string& config_path,
             std::optional<std::uint64_t> seed, const std::string& out,
             const std::string& scenario, std::optional<double> r_sel,
             std::optional<double> rate_sel) {
  skg::PipelineConfig cfg = load_config(config_path, seed);
  if (r_sel) cfg.r_values = {*r_sel};
  if (rate_sel) cfg.code_rates = {*rate_sel};
  skg::validate(cfg);
  const skg::PipelineReport report = skg::run_pipeline(cfg);
  const skg::PipelineCell* chosen = nullptr;
  for (const skg::PipelineCell& cell : report.cells) {
    if (!scenario.empty() && skg::to_string(cell.scenario) != scenario)
      continue;
    if (cell.keys_emitted == 0) continue;
    chosen = &cell;
    break;
  }
  if (chosen == nullptr)
    throw skg::DataError("no cell produced keys under this configuration");
  skg::write_keys(out, chosen->keys);
  std::printf("wrote %zu keys to %s (scenario %s, r %g, rate %g)\n",
              chosen->keys.size(), out.c_str(),
              skg::to_string(chosen->scenario), chosen->r,
              chosen->code_rate);
  std::printf("first key: %s\n", skg::to_hex(chosen->keys.front().key).c_str());
  return 0;
}

int cmd_nist(const std::string& keys_path, double alpha, int block_length,
             int serial_m, int concat_keys, bool per_key,
             const std::string& json_out) {
  const auto raw = skg::read_keys(keys_path);
  if (raw.empty()) throw skg::DataError("key container holds no keys");
  std::vector<skg::KeyMaterial> keys(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) keys[i].key = raw[i];

  skg::SuiteConfig cfg;
  cfg.significance_alpha = alpha;
  cfg.block_length_m = block_length;
  cfg.serial_m = serial_m;
  cfg.concat_keys = concat_keys;
  cfg.per_key = per_key;
  const skg::SuiteReport report = skg::run_suite(keys, cfg);

  std::printf("keys %zu, streams %zu x %zu bits, alpha %g\n",
              report.keys_total, report.streams, report.stream_bits,
              report.alpha);
  std::printf("%-18s %-11s %-8s %s\n", "test", "applicable", "passed",
              "success_rate");
  for (const skg::SuiteReport::Row& row : report.rows) {
    if (!row.applicable) {
      std::printf("%-18s %-11s %-8s %s\n", skg::to_string(row.test_id), "no",
                  "-", "-");
      continue;
    }
    std::printf("%-18s %-11s %zu/%-6zu %.4f\n", skg::to_string(row.test_id),
                "yes", row.streams_passed, row.streams_evaluated,
                row.success_rate);
  }

  if (!json_out.empty()) {
    nlohmann::json j;
    j["alpha"] = report.alpha;
    j["stream_bits"] = report.stream_bits;
    j["streams"] = report.streams;
    j["keys_total"] = report.keys_total;
    j["keys_per_stream"] = report.keys_per_stream;
    j["keys_dropped"] = report.keys_dropped;
    nlohmann::json rows = nlohmann::json::array();
    for (const skg::SuiteReport::Row& row : report.rows) {
      nlohmann::json r;
      r["test"] = skg::to_string(row.test_id);
      r["applicable"] = row.applicable;
      r["streams_passed"] = row.streams_passed;
      r["streams_evaluated"] = row.streams_evaluated;
      r["success_rate"] = row.success_rate;
      r["p_values"] = row.p_values;
      rows.push_back(r);
    }
    j["tests"] = rows;
    skg::write_text_file(json_out, j.dump(2) + "\n");
    std::printf("wrote %s\n", json_out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secret key generation toolkit"};
  app.set_version_flag("--version", std::string("skg ") + skg::version());
  app.require_subcommand(1);

  std::string config_path, out_path, scenario, keys_path, json_out;
  std::optional<std::uint64_t> seed;
  std::optional<double> r_only, rate_only;
  std::optional<int> threads;
  double alpha = 0.01;
  int block_length = 128, serial_m = 16, concat_keys = 16;
  bool per_key = false;

  app.add_option("--threads", threads, "worker thread cap (default: cores)");

  CLI::App* sim = app.add_subcommand("simulate", "write synthetic containers");
  sim->add_option("--config", config_path, "key = value config file");
  sim->add_option("--seed", seed, "override the config seed");
  sim->add_option("--out", out_path, "output directory")->required();

  CLI::App* run = app.add_subcommand("run", "run the pipeline");
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_path, "output directory")->required();
  run->add_option("--r", r_only, "restrict to one measurement variance R");
  run->add_option("--rate", rate_only, "restrict to one code rate");

  CLI::App* sweep = app.add_subcommand("sweep", "run the full sweep grid");
  sweep->add_option("--config", config_path, "key = value config file");
  sweep->add_option("--seed", seed, "override the config seed");
  sweep->add_option("--out", out_path, "output directory")->required();

  CLI::App* keys = app.add_subcommand("keys", "derive and store keys");
  keys->add_option("--config", config_path, "key = value config file");
  keys->add_option("--seed", seed, "override the config seed");
  keys->add_option("--out", out_path, "output key container")->required();
  keys->add_option("--scenario", scenario, "pick cells from one scenario");
  keys->add_option("--r", r_only, "restrict to one measurement variance R");
  keys->add_option("--rate", rate_only, "restrict to one code rate");

  CLI::App* nist = app.add_subcommand("nist", "validate a key container");
  nist->add_option("--keys", keys_path, "key container path")->required();
  nist->add_option("--alpha", alpha, "significance level");
  nist->add_option("--block-length", block_length,
                   "block-frequency block length");
  nist->add_option("--serial-m", serial_m, "serial pattern length");
  nist->add_option("--concat-keys", concat_keys, "keys per stream");
  nist->add_flag("--per-key", per_key, "one stream per key");
  nist->add_option("--json", json_out, "also write a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (threads) setenv("SKG_THREADS", std::to_string(*threads).c_str(), 1);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, seed, out_path);
    if (run->parsed())
      return cmd_run(config_path, seed, out_path, r_only, rate_only);
    if (sweep->parsed())
      return cmd_run(config_path, seed, out_path, std::nullopt, std::nullopt);
    if (keys->parsed())
      return cmd_keys(config_path, seed, out_path, scenario, r_only,
                      rate_only);
    if (nist->parsed())
      return cmd_nist(keys_path, alpha, block_length, serial_m, concat_keys,
                      per_key, json_out);
  } catch (const skg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const skg::FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 3;
  } catch (const skg::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const skg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
