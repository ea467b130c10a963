#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "qplane/arch.hpp"
#include "qplane/errors.hpp"
#include "qplane/units.hpp"

namespace qplane {

/// Local-electronics technology and hold-circuit parameters. The update time
/// and leakage current have no published values; the defaults are
/// assumptions and are marked as such in every report.
struct ElectronicsParams {
  CapacitancePerArea capacitor_density =
      picofarads_per_square_micrometer(1);             ///< deep-trench caps
  Area demux_footprint_per_cell = square_micrometers(60);
  Time gate_update_time = nanoseconds(100);            ///< assumption
  Current hold_leakage = amperes(1e-18);               ///< assumption
  int module_size_ceiling = 65536;  ///< cap on N when leakage never binds

  void validate() const {
    if (capacitor_density.si() <= 0)
      throw ValidationError("capacitor_density must be > 0");
    if (demux_footprint_per_cell.si() <= 0)
      throw ValidationError("demux_footprint_per_cell must be > 0");
    if (gate_update_time.si() <= 0)
      throw ValidationError("gate_update_time must be > 0");
    if (hold_leakage.si() < 0)
      throw ValidationError("hold_leakage must be >= 0");
    if (module_size_ceiling < 1)
      throw ValidationError("module_size_ceiling must be >= 1");
  }
};

enum class BiasMode : std::uint8_t { Coarse, Fine };

/// Minimum hold capacitance for a bias resolution.
///
/// Coarse gates are limited by the single-electron step e/dV on the hold
/// node. Fine gates are limited by thermal noise: the capacitance at which
/// the rms voltage noise sqrt(kT/C) equals the resolution, i.e. kT/dV^2.
inline Capacitance min_hold_capacitance(Voltage resolution, BiasMode mode,
                                        Temperature t_op) {
  if (resolution.si() <= 0) throw ValidationError("resolution must be > 0");
  if (t_op.si() <= 0) throw ValidationError("temperature must be > 0");
  if (mode == BiasMode::Coarse) return kElementaryCharge / resolution;
  return kBoltzmann * t_op / (resolution * resolution);
}

/// Total hold capacitance of a unit cell with the given inventory split.
inline Capacitance unit_cell_capacitance(int coarse_gates, int fine_gates,
                                         const ArchParams& params) {
  if (coarse_gates < 0 || fine_gates < 0)
    throw ValidationError("gate counts must be >= 0");
  const Capacitance c_coarse = min_hold_capacitance(
      params.coarse_resolution, BiasMode::Coarse, params.operating_temperature);
  const Capacitance c_fine = min_hold_capacitance(
      params.fine_resolution, BiasMode::Fine, params.operating_temperature);
  return static_cast<double>(coarse_gates) * c_coarse +
         static_cast<double>(fine_gates) * c_fine;
}

inline Capacitance unit_cell_capacitance(const UnitCellLayout& layout,
                                         const ArchParams& params) {
  return unit_cell_capacitance(layout.coarse_count(), layout.fine_count(),
                               params);
}

/// Per-cell electronics footprint and the smallest qubit pitch that packs it
/// into the 2d x 2d unit-cell square.
struct FootprintReport {
  Area capacitor_area;
  Area demux_area;
  Area total_area;
  Length min_pitch;     ///< smallest d with 4 d^2 >= total_area
  bool fits_configured; ///< 4 d^2 >= total_area at the configured pitch
};

inline FootprintReport footprint(const UnitCellLayout& layout,
                                 const ElectronicsParams& elec,
                                 const ArchParams& params) {
  elec.validate();
  FootprintReport r;
  r.capacitor_area =
      unit_cell_capacitance(layout, params) / elec.capacitor_density;
  r.demux_area = elec.demux_footprint_per_cell;
  r.total_area = r.capacitor_area + r.demux_area;
  r.min_pitch = sqrt(r.total_area / 4.0);
  const Area cell = (2.0 * params.qubit_pitch) * (2.0 * params.qubit_pitch);
  r.fits_configured = cell >= r.total_area;
  return r;
}

/// Quantum-plane area against the die budget. Feasibility requires the
/// square plane to physically fit on the rectangular die (side within both
/// die dimensions), not merely its area to be smaller.
struct PlaneAreaReport {
  std::int64_t qubits = 0;
  Length plane_side;
  Area plane_area;
  Area die_area;
  Area remaining_area;  // die - plane, may be negative when infeasible
  bool fits_die = false;
};

inline PlaneAreaReport plane_area_report(const ArchParams& params) {
  params.validate();
  const Geometry g = geometry(params);
  PlaneAreaReport r;
  const std::int64_t mn = static_cast<std::int64_t>(params.modules_per_side) *
                          params.cells_per_module_side;
  r.qubits = 4 * mn * mn;
  r.plane_side = g.plane_side;
  r.plane_area = g.plane_area;
  r.die_area = params.die_width * params.die_height;
  r.remaining_area = r.die_area - r.plane_area;
  const Length die_min = std::min(params.die_width, params.die_height);
  r.fits_die = r.plane_side <= die_min && r.remaining_area.si() >= 0;
  return r;
}

/// Same report for a target qubit count 4(MN)^2. Rejects targets that no
/// integer MN can realize and names the nearest achievable count.
inline PlaneAreaReport plane_area_report_for_qubits(ArchParams params,
                                                    std::int64_t target_qubits) {
  if (target_qubits < 4) throw ValidationError("target qubit count must be >= 4");
  const double mn_real = std::sqrt(static_cast<double>(target_qubits) / 4.0);
  const std::int64_t mn = std::llround(mn_real);
  if (4 * mn * mn != target_qubits) {
    const std::int64_t lo = static_cast<std::int64_t>(mn_real);
    const std::int64_t near =
        (target_qubits - 4 * lo * lo <= 4 * (lo + 1) * (lo + 1) - target_qubits)
            ? lo
            : lo + 1;
    throw ValidationError(
        "target qubit count is not 4*(MN)^2 for integer MN; nearest is MN=" +
        std::to_string(std::max<std::int64_t>(near, 1)) + " (" +
        std::to_string(4 * std::max<std::int64_t>(near, 1) *
                       std::max<std::int64_t>(near, 1)) +
        " qubits)");
  }
  // Only the product MN enters the area; realize it as a single module row.
  params.modules_per_side = 1;
  params.cells_per_module_side = static_cast<int>(mn);
  return plane_area_report(params);
}

/// Leakage-limited module size: the largest N whose full sequential refresh
/// keeps the worst-case droop on a fine hold node within half an LSB.
///
/// Refresh period: gates_per_cell * N^2 * gate_update_time (all gates of a
/// module updated one after another; modules refresh in parallel). Droop is
/// linear discharge I * t / C on the fine capacitance, the binding class:
/// the coarse minimum is a single-electron bound, not a design value, and
/// coarse caps are assumed sized with margin (see README).
struct ModuleSizeLimit {
  int max_cells_per_side = 0;   ///< N_max, 0 when even N=1 violates the bound
  bool feasible = false;
  bool capped = false;          ///< hit the configured ceiling (leakage ~ 0)
  Time refresh_period;          ///< at N_max (or N=1 when infeasible)
  Frequency refresh_rate;
  Voltage worst_droop;          ///< at N_max (or N=1 when infeasible)
  Voltage droop_budget;         ///< resolution / 2
};

inline ModuleSizeLimit max_module_size(const ElectronicsParams& elec,
                                       const UnitCellLayout& layout,
                                       Voltage fine_resolution,
                                       Temperature t_op) {
  elec.validate();
  const Capacitance c_fine =
      min_hold_capacitance(fine_resolution, BiasMode::Fine, t_op);
  const double gates = layout.gate_count();
  ModuleSizeLimit r;
  r.droop_budget = fine_resolution / 2.0;

  auto droop_at = [&](double n) -> Voltage {
    const Time period = gates * n * n * elec.gate_update_time;
    return elec.hold_leakage * period / c_fine;
  };

  const double budget_charge =
      (c_fine * r.droop_budget).si();  // coulombs the node may lose
  const double leak = elec.hold_leakage.si();
  double n_max_real = std::numeric_limits<double>::infinity();
  if (leak > 0)
    n_max_real =
        std::sqrt(budget_charge / (gates * elec.gate_update_time.si() * leak));

  if (n_max_real >= static_cast<double>(elec.module_size_ceiling)) {
    r.max_cells_per_side = elec.module_size_ceiling;
    r.capped = true;
    r.feasible = true;
  } else if (n_max_real < 1.0) {
    r.max_cells_per_side = 0;
    r.feasible = false;
  } else {
    r.max_cells_per_side = static_cast<int>(std::floor(n_max_real));
    r.feasible = true;
  }

  const double n_report = r.feasible ? r.max_cells_per_side : 1;
  r.refresh_period = gates * n_report * n_report * elec.gate_update_time;
  r.refresh_rate = Frequency{1.0 / r.refresh_period.si()};
  r.worst_droop = droop_at(n_report);
  return r;
}

/// Aggregate report produced by the estimate command.
struct ResourceReport {
  Capacitance coarse_capacitance;
  Capacitance fine_capacitance;
  Capacitance unit_cell_capacitance;
  FootprintReport footprint;
  PlaneAreaReport plane;
  ModuleSizeLimit module_limit;
  bool feasible = false;  // footprint packs and plane fits the die

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "qplane.estimate/1";
    j["capacitance"] = {
        {"coarse_hold_F", coarse_capacitance.si()},
        {"fine_hold_F", fine_capacitance.si()},
        {"unit_cell_F", unit_cell_capacitance.si()},
    };
    j["footprint"] = {
        {"capacitor_area_um2", as_square_micrometers(footprint.capacitor_area)},
        {"demux_area_um2", as_square_micrometers(footprint.demux_area)},
        {"total_area_um2", as_square_micrometers(footprint.total_area)},
        {"min_pitch_um", as_micrometers(footprint.min_pitch)},
        {"fits_configured_pitch", footprint.fits_configured},
    };
    j["plane"] = {
        {"qubits", plane.qubits},
        {"side_mm", as_millimeters(plane.plane_side)},
        {"area_mm2", as_square_millimeters(plane.plane_area)},
        {"die_area_mm2", as_square_millimeters(plane.die_area)},
        {"remaining_area_mm2", as_square_millimeters(plane.remaining_area)},
        {"fits_die", plane.fits_die},
    };
    j["refresh_limit"] = {
        {"max_cells_per_side", module_limit.max_cells_per_side},
        {"feasible", module_limit.feasible},
        {"capped", module_limit.capped},
        {"refresh_period_s", module_limit.refresh_period.si()},
        {"refresh_rate_hz", module_limit.refresh_rate.si()},
        {"worst_droop_V", module_limit.worst_droop.si()},
        {"droop_budget_V", module_limit.droop_budget.si()},
    };
    j["feasible"] = feasible;
    return j;
  }

  void print_text(std::ostream& os) const {
    auto line = [&os](const char* k, double v, const char* unit) {
      os << "  " << std::left << std::setw(26) << k << std::setprecision(6)
         << v << " " << unit << "\n";
    };
    os << "hold capacitance\n";
    line("coarse (e/dV)", as_femtofarads(coarse_capacitance), "fF");
    line("fine (kT/dV^2)", as_picofarads(fine_capacitance), "pF");
    line("unit cell total", as_picofarads(unit_cell_capacitance), "pF");
    os << "unit-cell footprint\n";
    line("capacitors", as_square_micrometers(footprint.capacitor_area), "um^2");
    line("demultiplexers", as_square_micrometers(footprint.demux_area), "um^2");
    line("total", as_square_micrometers(footprint.total_area), "um^2");
    line("min qubit pitch", as_micrometers(footprint.min_pitch), "um");
    os << "  packs at configured pitch  "
       << (footprint.fits_configured ? "yes" : "NO") << "\n";
    os << "quantum plane\n";
    line("qubits", static_cast<double>(plane.qubits), "");
    line("side", as_millimeters(plane.plane_side), "mm");
    line("area", as_square_millimeters(plane.plane_area), "mm^2");
    line("die area", as_square_millimeters(plane.die_area), "mm^2");
    line("remaining", as_square_millimeters(plane.remaining_area), "mm^2");
    os << "  fits die                   " << (plane.fits_die ? "yes" : "NO")
       << "\n";
    os << "refresh limit (fine nodes)\n";
    line("max module size N", module_limit.max_cells_per_side, "");
    line("refresh period", module_limit.refresh_period.si(), "s");
    line("worst droop", as_microvolts(module_limit.worst_droop), "uV");
    line("droop budget", as_microvolts(module_limit.droop_budget), "uV");
    if (module_limit.capped) os << "  (capped at configured ceiling)\n";
    if (!module_limit.feasible)
      os << "  INFEASIBLE: droop exceeds budget even for N=1\n";
    os << "feasible                     " << (feasible ? "yes" : "NO") << "\n";
  }
};

inline ResourceReport resource_report(const ArchParams& params,
                                      const ElectronicsParams& elec,
                                      const UnitCellLayout& layout) {
  params.validate();
  elec.validate();
  ResourceReport r;
  r.coarse_capacitance = min_hold_capacitance(
      params.coarse_resolution, BiasMode::Coarse, params.operating_temperature);
  r.fine_capacitance = min_hold_capacitance(
      params.fine_resolution, BiasMode::Fine, params.operating_temperature);
  r.unit_cell_capacitance = qplane::unit_cell_capacitance(layout, params);
  r.footprint = qplane::footprint(layout, elec, params);
  r.plane = plane_area_report(params);
  r.module_limit = max_module_size(elec, layout, params.fine_resolution,
                                   params.operating_temperature);
  r.feasible = r.footprint.fits_configured && r.plane.fits_die;
  return r;
}

}  // namespace qplane
