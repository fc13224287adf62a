#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "skg/dataset.hpp"
#include "skg/report.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

struct CliFixture {
  fs::path dir;
  CliFixture() {
    dir = fs::temp_directory_path() / ("skg-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~CliFixture() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  std::string path(const std::string& name) const {
    return (dir / name).string();
  }

  CliResult run(const std::string& args) const {
    const std::string log = path("cli-output.log");
    const std::string cmd = std::string("\"") + SKG_CLI_PATH + "\" " + args +
                            " > \"" + log + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    CliResult result;
    if (status == -1) return result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream text;
    text << in.rdbuf();
    result.output = text.str();
    return result;
  }

  std::string write_config(const std::string& name,
                           const std::string& text) const {
    const std::string p = path(name);
    std::ofstream out(p);
    out << text;
    return p;
  }
};

constexpr const char* kSmallConfig =
    "seed = 7\n"
    "scenarios = los\n"
    "sim.num_samples = 4096\n"
    "filter.r = 1e-2\n"
    "code.rates = 0.5\n";

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

TEST_CASE("cli reports its version", "[cli]") {
  CliFixture fx;
  const CliResult r = fx.run("--version");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("skg 0.1.0") != std::string::npos);
}

TEST_CASE("cli requires a subcommand and its required options", "[cli]") {
  CliFixture fx;
  REQUIRE(fx.run("").exit_code == 2);
  REQUIRE(fx.run("frobnicate").exit_code == 2);
  REQUIRE(fx.run("run").exit_code == 2);  // missing --out
}

TEST_CASE("cli simulate writes one container per node", "[cli]") {
  CliFixture fx;
  const std::string cfg = fx.write_config("sim.cfg", kSmallConfig);
  const CliResult r =
      fx.run("simulate --config \"" + cfg + "\" --out \"" + fx.path("data") +
             "\"");
  INFO(r.output);
  REQUIRE(r.exit_code == 0);

  for (const char* node : {"alice", "bob", "eve"}) {
    const std::string file =
        fx.path("data") + "/los_" + node + ".skg1";
    REQUIRE(fs::exists(file));
    const auto [info, payload] = skg::read_dataset(file);
    REQUIRE(info.time == 4096);
    REQUIRE(info.scenario == skg::Scenario::LoS);
    REQUIRE(payload.size() == 4096);
  }
}

TEST_CASE("cli run writes the three report files", "[cli]") {
  CliFixture fx;
  const std::string cfg = fx.write_config("run.cfg", kSmallConfig);
  const CliResult r = fx.run("--threads 2 run --config \"" + cfg +
                             "\" --out \"" + fx.path("out") + "\"");
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("scenario") != std::string::npos);  // summary table

  const std::string csv = slurp(fx.path("out") + "/report.csv");
  REQUIRE(count_lines(csv) == 2);  // header + 1 cell
  REQUIRE(csv.find("los") != std::string::npos);
  REQUIRE(fs::exists(fx.path("out") + "/mismatch.csv"));

  const nlohmann::json j =
      nlohmann::json::parse(slurp(fx.path("out") + "/report.json"));
  REQUIRE(j.at("seed").get<std::uint64_t>() == 7);
  REQUIRE(j.at("cells").size() == 1);
  REQUIRE(j.at("cells")[0].at("error").get<std::string>().empty());
}

TEST_CASE("cli run can restrict the sweep to one point", "[cli]") {
  CliFixture fx;
  const std::string cfg = fx.write_config(
      "grid.cfg",
      "seed = 7\n"
      "scenarios = los\n"
      "sim.num_samples = 4096\n"
      "filter.r = 1e-2, 1e-3\n"
      "code.rates = 0.5, 0.3\n");
  const CliResult r =
      fx.run("run --config \"" + cfg + "\" --out \"" + fx.path("one") +
             "\" --r 1e-3 --rate 0.3");
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  const std::string csv = slurp(fx.path("one") + "/report.csv");
  REQUIRE(count_lines(csv) == 2);  // the grid collapsed to a single cell
}

TEST_CASE("cli keys and nist round-trip a key container", "[cli]") {
  CliFixture fx;
  const std::string cfg = fx.write_config("keys.cfg", kSmallConfig);
  const std::string container = fx.path("run.skgk");
  const CliResult made =
      fx.run("keys --config \"" + cfg + "\" --out \"" + container + "\"");
  INFO(made.output);
  REQUIRE(made.exit_code == 0);
  REQUIRE(made.output.find("first key:") != std::string::npos);

  const auto keys = skg::read_keys(container);
  REQUIRE(!keys.empty());

  const CliResult checked = fx.run("nist --keys \"" + container +
                                   "\" --per-key --json \"" +
                                   fx.path("nist.json") + "\"");
  INFO(checked.output);
  REQUIRE(checked.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(fx.path("nist.json")));
  REQUIRE(j.at("tests").size() == 6);
  REQUIRE(j.at("keys_total").get<std::size_t>() == keys.size());
  REQUIRE(j.at("stream_bits").get<std::size_t>() == 256);
}

TEST_CASE("cli maps error kinds onto exit codes", "[cli]") {
  CliFixture fx;

  // Unknown config key -> configuration error.
  const std::string bad = fx.write_config("bad.cfg", "mystery.knob = 1\n");
  const CliResult cfg_err =
      fx.run("run --config \"" + bad + "\" --out \"" + fx.path("x") + "\"");
  REQUIRE(cfg_err.exit_code == 2);
  REQUIRE(cfg_err.output.find("config error") != std::string::npos);

  // Malformed key container -> format error.
  {
    std::ofstream out(fx.path("junk.skgk"), std::ios::binary);
    out << "not a key container";
  }
  const CliResult fmt_err =
      fx.run("nist --keys \"" + fx.path("junk.skgk") + "\"");
  REQUIRE(fmt_err.exit_code == 3);

  // Missing input file -> generic failure.
  const CliResult io_err =
      fx.run("nist --keys \"" + fx.path("absent.skgk") + "\"");
  REQUIRE(io_err.exit_code == 1);
}
