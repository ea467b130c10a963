#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qplane/arch.hpp"
#include "qplane/errors.hpp"
#include "qplane/estimator.hpp"
#include "qplane/protocol.hpp"

namespace qplane {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// Parse "<number><unit>" with a strict unit table; e.g. "12um", "1 mV".
inline double parse_quantity(const std::string& key, const std::string& text,
                             const std::map<std::string, double>& units,
                             const std::string& dimension) {
  const std::string t = trim(text);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double number = std::strtod(begin, &end);
  if (end == begin)
    throw ConfigError(key + ": expected a number with a " + dimension +
                      " unit, got '" + text + "'");
  std::string suffix = trim(std::string(end));
  const auto it = units.find(suffix);
  if (it == units.end()) {
    std::string expected;
    for (const auto& [u, _] : units) expected += (expected.empty() ? "" : ", ") + u;
    throw ConfigError(key + ": unknown " + dimension + " unit '" + suffix +
                      "' (expected one of: " + expected + ")");
  }
  return number * it->second;
}

inline long long parse_integer(const std::string& key,
                               const std::string& text) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  if (pos != t.size())
    throw ConfigError(key + ": expected a bare integer, got '" + text + "'");
  return v;
}

inline const std::map<std::string, double>& length_units() {
  static const std::map<std::string, double> u{
      {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}};
  return u;
}
inline const std::map<std::string, double>& voltage_units() {
  static const std::map<std::string, double> u{
      {"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}, {"nV", 1e-9}};
  return u;
}
inline const std::map<std::string, double>& time_units() {
  static const std::map<std::string, double> u{
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
  return u;
}
inline const std::map<std::string, double>& frequency_units() {
  static const std::map<std::string, double> u{
      {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  return u;
}
inline const std::map<std::string, double>& temperature_units() {
  static const std::map<std::string, double> u{{"K", 1.0}, {"mK", 1e-3}};
  return u;
}
inline const std::map<std::string, double>& current_units() {
  static const std::map<std::string, double> u{
      {"A", 1.0},   {"mA", 1e-3}, {"uA", 1e-6}, {"nA", 1e-9},
      {"pA", 1e-12}, {"fA", 1e-15}, {"aA", 1e-18}};
  return u;
}
inline const std::map<std::string, double>& area_units() {
  static const std::map<std::string, double> u{
      {"m^2", 1.0}, {"mm^2", 1e-6}, {"um^2", 1e-12}};
  return u;
}
inline const std::map<std::string, double>& cap_density_units() {
  // 1 pF/um^2 == 1 F/m^2
  static const std::map<std::string, double> u{
      {"F/m^2", 1.0}, {"pF/um^2", 1.0}, {"fF/um^2", 1e-3}};
  return u;
}

}  // namespace detail

/// Layered run configuration: built-in defaults <- config file <- overrides.
/// Keys are dotted, values carry explicit unit suffixes, unknown keys are
/// errors. Assumption-backed defaults (timings, leakage) are tracked so that
/// reports can mark them.
class Config {
 public:
  ArchParams arch;
  ElectronicsParams elec;
  TimingParams timing;

  /// Keys whose built-in defaults are assumptions rather than published
  /// values; they are flagged in reports until explicitly configured.
  static const std::vector<std::string>& assumption_keys() {
    static const std::vector<std::string> keys{
        "elec.update_time",         "elec.leakage_current",
        "timing.readout_time",      "timing.single_qubit_time",
        "timing.two_qubit_time",    "timing.shuttle_frequency",
    };
    return keys;
  }

  /// Apply one key/value pair; throws ConfigError on unknown keys or
  /// malformed values.
  void set(const std::string& key, const std::string& value) {
    using namespace detail;
    auto as_int = [&](int lo, int hi) {
      const long long v = parse_integer(key, value);
      if (v < lo || v > hi)
        throw ConfigError(key + ": value out of range [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "]");
      return static_cast<int>(v);
    };
    if (key == "arch.modules_per_side")
      arch.modules_per_side = as_int(1, 1 << 20);
    else if (key == "arch.cells_per_module_side")
      arch.cells_per_module_side = as_int(1, 1 << 20);
    else if (key == "arch.qubit_pitch")
      arch.qubit_pitch = Length{parse_quantity(key, value, length_units(), "length")};
    else if (key == "arch.gate_pitch")
      arch.gate_pitch = Length{parse_quantity(key, value, length_units(), "length")};
    else if (key == "arch.coarse_resolution")
      arch.coarse_resolution =
          Voltage{parse_quantity(key, value, voltage_units(), "voltage")};
    else if (key == "arch.fine_resolution")
      arch.fine_resolution =
          Voltage{parse_quantity(key, value, voltage_units(), "voltage")};
    else if (key == "arch.temperature")
      arch.operating_temperature = Temperature{
          parse_quantity(key, value, temperature_units(), "temperature")};
    else if (key == "arch.defect_crossbars")
      arch.defect_crossbars = as_int(1, 1 << 16);
    else if (key == "arch.die_width")
      arch.die_width = Length{parse_quantity(key, value, length_units(), "length")};
    else if (key == "arch.die_height")
      arch.die_height = Length{parse_quantity(key, value, length_units(), "length")};
    else if (key == "elec.capacitor_density")
      elec.capacitor_density = CapacitancePerArea{
          parse_quantity(key, value, cap_density_units(), "capacitance density")};
    else if (key == "elec.demux_footprint")
      elec.demux_footprint_per_cell =
          Area{parse_quantity(key, value, area_units(), "area")};
    else if (key == "elec.update_time")
      elec.gate_update_time =
          Time{parse_quantity(key, value, time_units(), "time")};
    else if (key == "elec.leakage_current")
      elec.hold_leakage =
          Current{parse_quantity(key, value, current_units(), "current")};
    else if (key == "elec.module_size_ceiling")
      elec.module_size_ceiling = as_int(1, 1 << 20);
    else if (key == "timing.readout_time")
      timing.readout_time = Time{parse_quantity(key, value, time_units(), "time")};
    else if (key == "timing.single_qubit_time")
      timing.single_qubit_time =
          Time{parse_quantity(key, value, time_units(), "time")};
    else if (key == "timing.two_qubit_time")
      timing.two_qubit_time =
          Time{parse_quantity(key, value, time_units(), "time")};
    else if (key == "timing.shuttle_frequency")
      timing.shuttle_frequency = Frequency{
          parse_quantity(key, value, frequency_units(), "frequency")};
    else if (key == "timing.readout_group_cells")
      timing.readout_group_cells = as_int(0, 1 << 30);
    else
      throw ConfigError("unknown configuration key: " + key);
    explicitly_set_.insert(key);
  }

  /// Parse "key = value" lines; '#' starts a comment, blank lines ignored.
  void load_string(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
      set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    load_string(buf.str(), path);
  }

  /// Assumption keys still running on built-in defaults.
  [[nodiscard]] std::vector<std::string> assumed_defaults() const {
    std::vector<std::string> out;
    for (const auto& k : assumption_keys())
      if (!explicitly_set_.count(k)) out.push_back(k);
    return out;
  }

  void validate() const {
    if (arch.modules_per_side == 0)
      throw ConfigError("arch.modules_per_side is required");
    if (arch.cells_per_module_side == 0)
      throw ConfigError("arch.cells_per_module_side is required");
    arch.validate();
    elec.validate();
    timing.validate();
  }

  /// Resolved configuration echoed into reports, with assumption markers.
  [[nodiscard]] nlohmann::ordered_json echo_json() const {
    nlohmann::ordered_json j;
    j["arch"] = {
        {"modules_per_side", arch.modules_per_side},
        {"cells_per_module_side", arch.cells_per_module_side},
        {"qubit_pitch_um", as_micrometers(arch.qubit_pitch)},
        {"gate_pitch_nm", as_nanometers(arch.gate_pitch)},
        {"coarse_resolution_V", arch.coarse_resolution.si()},
        {"fine_resolution_V", arch.fine_resolution.si()},
        {"temperature_K", arch.operating_temperature.si()},
        {"defect_crossbars", arch.defect_crossbars},
        {"die_width_mm", as_millimeters(arch.die_width)},
        {"die_height_mm", as_millimeters(arch.die_height)},
    };
    j["elec"] = {
        {"capacitor_density_F_per_m2", elec.capacitor_density.si()},
        {"demux_footprint_um2",
         as_square_micrometers(elec.demux_footprint_per_cell)},
        {"update_time_s", elec.gate_update_time.si()},
        {"leakage_current_A", elec.hold_leakage.si()},
        {"module_size_ceiling", elec.module_size_ceiling},
    };
    j["timing"] = {
        {"readout_time_s", timing.readout_time.si()},
        {"single_qubit_time_s", timing.single_qubit_time.si()},
        {"two_qubit_time_s", timing.two_qubit_time.si()},
        {"shuttle_frequency_Hz", timing.shuttle_frequency.si()},
        {"readout_group_cells", timing.readout_group_cells},
    };
    j["assumed_defaults"] = assumed_defaults();
    return j;
  }

 private:
  std::set<std::string> explicitly_set_;
};

}  // namespace qplane
