#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "skg/config.hpp"

TEST_CASE("config parses key-value lines with comments", "[config]") {
  const std::string text =
      "# run description\n"
      "seed = 42\n"
      "\n"
      "filter.r = 1e-3   # per-sweep override\n"
      "code.rates = 0.5, 0.3, 0.1\n"
      "scenario = los\n"
      "nist.per_key = false\n";
  const skg::KeyValueConfig cfg = skg::KeyValueConfig::parse(text);

  REQUIRE(cfg.has("seed"));
  REQUIRE_FALSE(cfg.has("missing"));
  REQUIRE(cfg.get_u64("seed", 0) == 42);
  REQUIRE(cfg.get_double("filter.r", 0.0) == 1e-3);
  REQUIRE(cfg.get_string("scenario", "") == "los");
  REQUIRE(cfg.get_bool("nist.per_key", true) == false);
  REQUIRE(cfg.get_double_list("code.rates") ==
          std::vector<double>{0.5, 0.3, 0.1});
}

TEST_CASE("config getters fall back when a key is absent", "[config]") {
  const skg::KeyValueConfig cfg = skg::KeyValueConfig::parse("");
  REQUIRE(cfg.get_u64("seed", 7) == 7);
  REQUIRE(cfg.get_double("x", 2.5) == 2.5);
  REQUIRE(cfg.get_string("s", "dflt") == "dflt");
  REQUIRE(cfg.get_bool("b", true));
  REQUIRE(cfg.get_double_list("l").empty());
  REQUIRE(cfg.get_string_list("sl").empty());
}

TEST_CASE("config understands infinity for unbounded values", "[config]") {
  const skg::KeyValueConfig cfg =
      skg::KeyValueConfig::parse("sim.snr_db = inf\n");
  REQUIRE(std::isinf(cfg.get_double("sim.snr_db", 0.0)));
}

TEST_CASE("config reports malformed lines with their line number",
          "[config]") {
  const auto check_message = [](const std::string& text,
                                const std::string& needle) {
    try {
      skg::KeyValueConfig::parse(text);
      FAIL("expected ConfigError");
    } catch (const skg::ConfigError& e) {
      REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  check_message("seed = 1\nnot a pair\n", "line 2");
  check_message("\n\n = 5\n", "line 3");
  check_message("seed = 1\nseed = 2\n", "more than once");
}

TEST_CASE("config rejects malformed typed values", "[config]") {
  const skg::KeyValueConfig cfg = skg::KeyValueConfig::parse(
      "a = fast\nb = -3\nc = 1.5x\nd = maybe\nl = 1,,2\n");
  REQUIRE_THROWS_AS(cfg.get_u64("a", 0), skg::ConfigError);
  REQUIRE_THROWS_AS(cfg.get_u64("b", 0), skg::ConfigError);
  REQUIRE_THROWS_AS(cfg.get_double("c", 0.0), skg::ConfigError);
  REQUIRE_THROWS_AS(cfg.get_bool("d", false), skg::ConfigError);
  REQUIRE_THROWS_AS(cfg.get_double_list("l"), skg::ConfigError);
}

TEST_CASE("unused keys are tracked and can be rejected", "[config]") {
  const skg::KeyValueConfig cfg =
      skg::KeyValueConfig::parse("seed = 1\nmystery.knob = 3\n");
  REQUIRE(cfg.get_u64("seed", 0) == 1);
  REQUIRE(cfg.unused_keys() == std::vector<std::string>{"mystery.knob"});
  try {
    cfg.reject_unused();
    FAIL("expected ConfigError");
  } catch (const skg::ConfigError& e) {
    REQUIRE(std::string(e.what()).find("mystery.knob") != std::string::npos);
  }

  REQUIRE(cfg.get_double("mystery.knob", 0.0) == 3.0);
  REQUIRE_NOTHROW(cfg.reject_unused());
}

TEST_CASE("canonical form sorts keys and normalizes spacing", "[config]") {
  const skg::KeyValueConfig cfg = skg::KeyValueConfig::parse(
      "zebra=1\n# noise\nalpha   =   two\nmiddle = 3.5\n");
  REQUIRE(cfg.canonical() == "alpha = two\nmiddle = 3.5\nzebra = 1\n");
}

TEST_CASE("config files load through the same parser", "[config]") {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("skg-config-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path file = dir / "run.cfg";
  {
    std::ofstream out(file);
    out << "seed = 9\nfilter.r = 4e-3\n";
  }
  const skg::KeyValueConfig cfg = skg::KeyValueConfig::parse_file(file.string());
  REQUIRE(cfg.get_u64("seed", 0) == 9);
  REQUIRE(cfg.get_double("filter.r", 0.0) == 4e-3);

  REQUIRE_THROWS_AS(skg::KeyValueConfig::parse_file((dir / "nope.cfg").string()),
                    skg::IoError);
  std::error_code ec;
  fs::remove_all(dir, ec);
}
