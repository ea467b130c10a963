#include <doctest.h>

#include <algorithm>

#include "qplane/config.hpp"

using namespace qplane;

TEST_CASE("strict unit parsing") {
  Config cfg;
  cfg.set("arch.modules_per_side", "2");
  cfg.set("arch.cells_per_module_side", "4");
  cfg.set("arch.qubit_pitch", "12um");
  cfg.set("arch.coarse_resolution", "1mV");
  cfg.set("arch.fine_resolution", "1uV");
  cfg.set("arch.temperature", "1K");
  cfg.set("elec.leakage_current", "1aA");
  cfg.set("timing.readout_time", "10us");
  cfg.set("timing.shuttle_frequency", "100MHz");
  CHECK(cfg.arch.qubit_pitch.si() == doctest::Approx(12e-6));
  CHECK(cfg.elec.hold_leakage.si() == doctest::Approx(1e-18));
  CHECK(cfg.timing.shuttle_frequency.si() == doctest::Approx(100e6));
  CHECK_NOTHROW(cfg.validate());

  // a space between number and unit is fine; wrong dimensions are not
  cfg.set("arch.gate_pitch", "50 nm");
  CHECK(cfg.arch.gate_pitch.si() == doctest::Approx(50e-9));
  CHECK_THROWS_AS(cfg.set("arch.qubit_pitch", "12"), ConfigError);
  CHECK_THROWS_AS(cfg.set("arch.qubit_pitch", "12V"), ConfigError);
  CHECK_THROWS_AS(cfg.set("arch.qubit_pitch", "um"), ConfigError);
  CHECK_THROWS_AS(cfg.set("arch.modules_per_side", "2.5"), ConfigError);
  CHECK_THROWS_AS(cfg.set("arch.modules_per_side", "two"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
  Config cfg;
  CHECK_THROWS_WITH_AS(cfg.set("arch.module_per_side", "2"),
                       "unknown configuration key: arch.module_per_side",
                       ConfigError);
}

TEST_CASE("config file parsing with comments and blank lines") {
  Config cfg;
  cfg.load_string(
      "# sparse array run\n"
      "arch.modules_per_side = 2\n"
      "\n"
      "arch.cells_per_module_side = 16  # balanced\n"
      "elec.update_time = 100ns\n",
      "inline");
  CHECK(cfg.arch.modules_per_side == 2);
  CHECK(cfg.arch.cells_per_module_side == 16);
  CHECK_THROWS_AS(cfg.load_string("arch.modules_per_side 2", "inline"),
                  ConfigError);
  CHECK_THROWS_AS(cfg.load_file("/nonexistent/qplane.conf"), ConfigError);
}

TEST_CASE("layering: later sources override earlier ones") {
  Config cfg;
  cfg.load_string("arch.modules_per_side = 2\narch.cells_per_module_side = 4\n",
                  "file");
  cfg.set("arch.modules_per_side", "3");  // command-line override
  CHECK(cfg.arch.modules_per_side == 3);
  CHECK(cfg.arch.cells_per_module_side == 4);
}

TEST_CASE("missing required fields fail validation") {
  Config cfg;
  CHECK_THROWS_WITH_AS(cfg.validate(), "arch.modules_per_side is required",
                       ConfigError);
  cfg.set("arch.modules_per_side", "1");
  CHECK_THROWS_WITH_AS(cfg.validate(),
                       "arch.cells_per_module_side is required", ConfigError);
  cfg.set("arch.cells_per_module_side", "1");
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("assumption defaults are tracked until configured") {
  Config cfg;
  auto assumed = cfg.assumed_defaults();
  CHECK(std::count(assumed.begin(), assumed.end(), "elec.leakage_current") ==
        1);
  CHECK(std::count(assumed.begin(), assumed.end(), "timing.readout_time") ==
        1);
  cfg.set("elec.leakage_current", "1aA");
  assumed = cfg.assumed_defaults();
  CHECK(std::count(assumed.begin(), assumed.end(), "elec.leakage_current") ==
        0);
  CHECK(std::count(assumed.begin(), assumed.end(), "timing.readout_time") ==
        1);

  // the echo embeds the markers
  cfg.set("arch.modules_per_side", "1");
  cfg.set("arch.cells_per_module_side", "1");
  const auto j = cfg.echo_json();
  CHECK(j.at("arch").at("modules_per_side") == 1);
  bool found = false;
  for (const auto& k : j.at("assumed_defaults"))
    if (k == "timing.readout_time") found = true;
  CHECK(found);
}
