#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qplane/arch.hpp"
#include "qplane/errors.hpp"
#include "qplane/estimator.hpp"
#include "qplane/units.hpp"

namespace qplane {

/// Protocol timing knobs. None of these have published values; the defaults
/// are assumptions and are echoed as such in reports.
struct TimingParams {
  Time readout_time = microseconds(10);
  Time single_qubit_time = microseconds(1);
  Time two_qubit_time = nanoseconds(100);
  Frequency shuttle_frequency = megahertz(100);
  /// Unit cells per readout group (read sequentially on one drain line);
  /// 0 means the whole module, the sequential baseline.
  int readout_group_cells = 0;

  void validate() const {
    if (readout_time.si() <= 0) throw ValidationError("readout_time must be > 0");
    if (single_qubit_time.si() <= 0)
      throw ValidationError("single_qubit_time must be > 0");
    if (two_qubit_time.si() <= 0)
      throw ValidationError("two_qubit_time must be > 0");
    if (shuttle_frequency.si() <= 0)
      throw ValidationError("shuttle_frequency must be > 0");
    if (readout_group_cells < 0)
      throw ValidationError("readout_group_cells must be >= 0");
  }
  [[nodiscard]] int resolved_group_cells(std::int64_t cells_per_module) const {
    const int r = readout_group_cells == 0
                      ? static_cast<int>(cells_per_module)
                      : readout_group_cells;
    if (r < 1 || r > cells_per_module)
      throw ValidationError("readout_group_cells must be in [1, N^2]");
    return r;
  }
};

enum class EventKind : std::uint8_t {
  GateRefresh,
  Shuttle,
  ExchangePulse,
  MicrowavePulse,
  Readout,
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::GateRefresh: return "gate-refresh";
    case EventKind::Shuttle: return "shuttle";
    case EventKind::ExchangePulse: return "exchange-pulse";
    case EventKind::MicrowavePulse: return "microwave-pulse";
    case EventKind::Readout: return "readout";
  }
  return "?";
}

/// Activity bucket the event's wall time belongs to in the phase breakdown.
inline const char* phase_of(EventKind k) {
  switch (k) {
    case EventKind::GateRefresh: return "refresh";
    case EventKind::Shuttle: return "shuttle";
    case EventKind::ExchangePulse: return "two-qubit";
    case EventKind::MicrowavePulse: return "single-qubit";
    case EventKind::Readout: return "readout";
  }
  return "?";
}

struct TimedEvent {
  Time start;
  EventKind kind = EventKind::GateRefresh;
  std::string location;  // the occupied resource (gate, arm, drain line)
  Time duration;
};

struct PhaseTotal {
  std::string name;
  Time duration;  // wall-clock time attributed to this activity
};

/// Deterministic simulated schedule with a per-activity breakdown.
struct EventTimeline {
  std::vector<TimedEvent> events;
  std::vector<PhaseTotal> phases;
  Time period;
  bool events_complete = true;  // false when truncated for size

  void sort_events() {
    std::stable_sort(events.begin(), events.end(),
                     [](const TimedEvent& a, const TimedEvent& b) {
                       if (a.start.si() != b.start.si())
                         return a.start.si() < b.start.si();
                       return a.location < b.location;
                     });
  }

  /// Throws StructuralError if two events occupy one resource at once.
  void check_exclusive() const {
    std::map<std::string, std::vector<std::pair<double, double>>> spans;
    for (const auto& e : events)
      spans[e.location].push_back(
          {e.start.si(), e.start.si() + e.duration.si()});
    for (auto& [loc, v] : spans) {
      std::sort(v.begin(), v.end());
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i].first < v[i - 1].second - 1e-15)
          throw StructuralError("overlapping events on resource " + loc);
    }
  }

  [[nodiscard]] std::string dominant_phase() const {
    std::string best;
    double best_d = -1;
    for (const auto& p : phases)
      if (p.duration.si() > best_d) {
        best_d = p.duration.si();
        best = p.name;
      }
    return best;
  }

  void to_csv(std::ostream& os) const {
    os << "time,kind,location,duration\n";
    for (const auto& e : events)
      os << e.start.si() << "," << to_string(e.kind) << "," << e.location
         << "," << e.duration.si() << "\n";
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "qplane.timeline/1";
    j["period_s"] = period.si();
    j["events_complete"] = events_complete;
    auto& jp = j["phases"] = nlohmann::ordered_json::array();
    for (const auto& p : phases)
      jp.push_back({{"name", p.name}, {"duration_s", p.duration.si()}});
    auto& je = j["events"] = nlohmann::ordered_json::array();
    for (const auto& e : events)
      je.push_back({{"time_s", e.start.si()},
                    {"kind", to_string(e.kind)},
                    {"location", e.location},
                    {"duration_s", e.duration.si()}});
    return j;
  }
};

// ---------------------------------------------------------------------------
// Sequential DC refresh with capacitor droop
// ---------------------------------------------------------------------------

struct RefreshReport {
  EventTimeline timeline;  // canonical module; all modules run it in parallel
  Time refresh_period;
  Voltage worst_droop_fine;
  Voltage worst_droop_coarse;
  Voltage budget_fine;    // fine_resolution / 2
  Voltage budget_coarse;  // coarse_resolution / 2
  /// Binding criterion: fine hold nodes within half an LSB (see README on
  /// why the fine class sets the limit).
  bool within_budget = false;
  bool coarse_within_budget = false;
};

/// Simulate one refresh cycle of a module: the enable crossbar walks the
/// 2N x 2N demux grid row-major and each enabled demux updates its 16
/// channels in order. Modules refresh in parallel, so this period refreshes
/// the whole array. Droop per gate is linear discharge over the time between
/// its consecutive refresh slots, which the cyclic schedule makes exactly one
/// period for every gate.
inline RefreshReport refresh_schedule(const ArchParams& params,
                                      const ElectronicsParams& elec,
                                      const UnitCellLayout& layout,
                                      std::size_t max_events = 1u << 20) {
  params.validate();
  elec.validate();
  layout.validate();
  const int n = params.cells_per_module_side;
  const std::int64_t gates_per_cell = layout.gate_count();
  const std::int64_t slots = gates_per_cell * n * n;

  // (demux, channel) -> gate spec index
  std::array<std::array<int, UnitCellLayout::kDemuxChannels>,
             UnitCellLayout::kDemuxCount>
      slot_gate{};
  for (std::size_t g = 0; g < layout.gates.size(); ++g)
    slot_gate[layout.gates[g].demux][layout.gates[g].channel] =
        static_cast<int>(g);

  const Capacitance c_fine = min_hold_capacitance(
      params.fine_resolution, BiasMode::Fine, params.operating_temperature);
  const Capacitance c_coarse =
      min_hold_capacitance(params.coarse_resolution, BiasMode::Coarse,
                           params.operating_temperature);

  RefreshReport r;
  r.refresh_period = static_cast<double>(slots) * elec.gate_update_time;
  r.budget_fine = params.fine_resolution / 2.0;
  r.budget_coarse = params.coarse_resolution / 2.0;

  const bool materialize = static_cast<std::size_t>(slots) <= max_events;
  std::vector<char> refreshed(static_cast<std::size_t>(slots), 0);
  Voltage worst_fine{0}, worst_coarse{0};
  std::int64_t slot = 0;
  for (int er = 0; er < 2 * n; ++er)
    for (int ec = 0; ec < 2 * n; ++ec) {
      const int cell_row = er / 2, cell_col = ec / 2;
      const int cell = cell_row * n + cell_col;
      const int demux = (er % 2) * 2 + (ec % 2);
      for (int ch = 0; ch < UnitCellLayout::kDemuxChannels; ++ch, ++slot) {
        const int g = slot_gate[demux][ch];
        const std::size_t gate_global =
            static_cast<std::size_t>(cell) * gates_per_cell + g;
        if (refreshed[gate_global])
          throw StructuralError("gate refreshed twice in one cycle");
        refreshed[gate_global] = 1;
        // Steady state: the gap back to this gate's previous refresh is one
        // full period.
        const DcGate& spec = layout.gates[g];
        const Voltage droop =
            elec.hold_leakage * r.refresh_period /
            (spec.resolution == BiasResolution::Fine ? c_fine : c_coarse);
        if (spec.resolution == BiasResolution::Fine)
          worst_fine = std::max(worst_fine, droop);
        else
          worst_coarse = std::max(worst_coarse, droop);
        if (materialize)
          r.timeline.events.push_back(TimedEvent{
              static_cast<double>(slot) * elec.gate_update_time,
              EventKind::GateRefresh,
              "gate[m*.c" + std::to_string(cell) + "." + spec.name + "]",
              elec.gate_update_time});
      }
    }
  for (auto f : refreshed)
    if (!f) throw StructuralError("refresh cycle missed a gate");

  r.worst_droop_fine = worst_fine;
  r.worst_droop_coarse = worst_coarse;
  r.within_budget = worst_fine <= r.budget_fine;
  r.coarse_within_budget = worst_coarse <= r.budget_coarse;
  r.timeline.period = r.refresh_period;
  r.timeline.events_complete = materialize;
  r.timeline.phases = {{"refresh", r.refresh_period}};
  return r;
}

// ---------------------------------------------------------------------------
// Traveling-wave shuttling
// ---------------------------------------------------------------------------

/// Four phase-shifted sinusoids on four consecutive electrodes, reused every
/// fifth gate. Reversing the phase assignment reverses the motion.
struct ShuttleWaveConfig {
  Voltage amplitude = volts(1);
  Frequency frequency = megahertz(100);
  Length gate_pitch = nanometers(50);
  Length kernel_width = nanometers(50);  // width of the per-gate bump
  bool reverse = false;

  void validate() const {
    if (amplitude.si() <= 0) throw ValidationError("amplitude must be > 0");
    if (frequency.si() <= 0) throw ValidationError("frequency must be > 0");
    if (gate_pitch.si() <= 0) throw ValidationError("gate_pitch must be > 0");
    if (kernel_width.si() <= 0)
      throw ValidationError("kernel_width must be > 0");
  }
  [[nodiscard]] double phase(int gate_index) const {
    const double p = -2.0 * std::numbers::pi * (gate_index % 4) / 4.0;
    return reverse ? -p : p;
  }
};

/// Summed potential V(x, t) = sum_i A K((x - x_i)/w) sin(2 pi f t + phi_i)
/// with a Gaussian bump kernel K.
inline Voltage wave_potential(const ShuttleWaveConfig& cfg, int n_gates,
                              Length x, Time t) {
  const double a = cfg.gate_pitch.si();
  const double w = cfg.kernel_width.si();
  const double omega_t = 2.0 * std::numbers::pi * cfg.frequency.si() * t.si();
  double v = 0;
  // Gaussian tail below 1e-9 after ~6.5 widths; skip distant gates.
  const int reach = static_cast<int>(std::ceil(6.5 * w / a)) + 1;
  const int i_mid = static_cast<int>(std::floor(x.si() / a));
  const int lo = std::max(0, i_mid - reach);
  const int hi = std::min(n_gates - 1, i_mid + reach);
  for (int i = lo; i <= hi; ++i) {
    const double u = (x.si() - i * a) / w;
    v += std::exp(-0.5 * u * u) * std::sin(omega_t + cfg.phase(i));
  }
  return cfg.amplitude * v;
}

struct WaveTrack {
  std::vector<std::pair<Time, Length>> trajectory;
  Length initial_position;
  Length final_position;
  [[nodiscard]] Length displacement() const {
    return final_position - initial_position;
  }
};

/// Track the potential minimum from its t = 0 location to time t_end by fine
/// time stepping with a local window search. Throws TrackingError if the
/// minimum jumps more than two gate pitches in one step.
inline WaveTrack track_wave_minimum(const ShuttleWaveConfig& cfg, int n_gates,
                                    Time t_end, int steps_per_period = 256) {
  cfg.validate();
  if (n_gates < 8) throw ValidationError("traveling wave needs >= 8 gates");
  if (t_end.si() < 0) throw ValidationError("time must be >= 0");
  const double a = cfg.gate_pitch.si();
  const double span = (n_gates - 1) * a;

  auto refine = [&](double x0, double h, Time t) {
    // Parabolic refinement around the best sample, clamped to one grid step.
    const double vm = wave_potential(cfg, n_gates, Length{x0 - h}, t).si();
    const double v0 = wave_potential(cfg, n_gates, Length{x0}, t).si();
    const double vp = wave_potential(cfg, n_gates, Length{x0 + h}, t).si();
    const double denom = vm - 2 * v0 + vp;
    if (denom <= 0) return x0;
    const double offset = 0.5 * h * (vm - vp) / denom;
    return x0 + std::clamp(offset, -h, h);
  };
  auto window_min = [&](double lo, double hi, Time t) {
    lo = std::max(lo, 0.0);
    hi = std::min(hi, span);
    const int samples = 192;
    double best_x = lo, best_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
      const double x = lo + (hi - lo) * i / samples;
      const double v = wave_potential(cfg, n_gates, Length{x}, t).si();
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    return refine(best_x, (hi - lo) / samples, t);
  };

  WaveTrack track;
  // Minimum at t = 0 nearest the array center: the wells repeat every four
  // electrodes, and the central one is free of edge-truncation artifacts.
  double x = window_min(span / 2 - 2.0 * a, span / 2 + 2.0 * a, Time{0});
  track.initial_position = Length{x};
  track.trajectory.push_back({Time{0}, Length{x}});

  // The search window spans +-2.5 pitches: wells repeat every 4 pitches, so
  // the window holds at most the occupied well and its successor, yet is
  // wide enough to witness a lost-tracking jump beyond 2 pitches when the
  // time stepping is too coarse for the wave speed.
  const double period = 1.0 / cfg.frequency.si();
  const int steps = std::max(
      1, static_cast<int>(std::ceil(t_end.si() / period * steps_per_period)));
  for (int s = 1; s <= steps; ++s) {
    const Time t{t_end.si() * s / steps};
    const double nx = window_min(x - 2.5 * a, x + 2.5 * a, t);
    if (std::abs(nx - x) > 2.0 * a)
      throw TrackingError("traveling-wave minimum jumped " +
                          std::to_string(std::abs(nx - x) / a) +
                          " pitches in one step");
    x = nx;
    track.trajectory.push_back({t, Length{x}});
  }
  track.final_position = Length{x};
  return track;
}

/// Position of the tracked minimum at time t (continuation from t = 0).
inline Length traveling_wave_minimum(const ShuttleWaveConfig& cfg, int n_gates,
                                     Time t) {
  return track_wave_minimum(cfg, n_gates, t).final_position;
}

// ---------------------------------------------------------------------------
// Lattice routing
// ---------------------------------------------------------------------------

struct Route {
  VertexId from, to;
  std::vector<VertexId> steps;  // vertices after each hop; empty if from == to
  Time duration;
  [[nodiscard]] int hops() const { return static_cast<int>(steps.size()); }
};

/// Time for the traveling wave to carry an electron across one arm: the wave
/// advances one spatial period (four electrodes) per signal period.
inline Time arm_transit_time(const ArchParams& params,
                             const TimingParams& timing) {
  return Time{params.arm_gate_count() / 4.0 / timing.shuttle_frequency.si()};
}

/// Shortest lattice path; ties broken by moving along x (columns) before y.
inline Route shuttle_route(const QuantumPlane& plane, VertexId from,
                           VertexId to, const TimingParams& timing) {
  timing.validate();
  if (!plane.contains(from) || !plane.contains(to))
    throw ValidationError("route endpoints must be on the lattice");
  Route r;
  r.from = from;
  r.to = to;
  VertexId cur = from;
  while (cur.col != to.col) {
    cur.col += to.col > cur.col ? 1 : -1;
    r.steps.push_back(cur);
  }
  while (cur.row != to.row) {
    cur.row += to.row > cur.row ? 1 : -1;
    r.steps.push_back(cur);
  }
  r.duration = static_cast<double>(r.hops()) *
               arm_transit_time(plane.params(), timing);
  return r;
}

// ---------------------------------------------------------------------------
// Sequential readout with module partitioning
// ---------------------------------------------------------------------------

struct ReadoutReport {
  EventTimeline timeline;  // canonical module; modules read out in parallel
  Time duration;           // R * readout_time
  int group_cells = 0;     // R
  int groups = 0;          // ceil(N^2 / R) concurrent drain groups
  std::int64_t extra_drain_lines_per_module = 0;  // groups - 1
};

/// Read every cell of a module: cells are split into `groups` drain groups
/// that proceed concurrently, each reading its cells sequentially. The
/// baseline R = N^2 reads the whole module on one drain line; smaller groups
/// buy time at the price of extra drain lines.
inline ReadoutReport readout_schedule(const ArchParams& params,
                                      const TimingParams& timing) {
  params.validate();
  timing.validate();
  const std::int64_t cells = static_cast<std::int64_t>(
                                 params.cells_per_module_side) *
                             params.cells_per_module_side;
  const int r_cells = timing.resolved_group_cells(cells);
  ReadoutReport rep;
  rep.group_cells = r_cells;
  rep.groups = static_cast<int>((cells + r_cells - 1) / r_cells);
  rep.extra_drain_lines_per_module = rep.groups - 1;
  rep.duration = static_cast<double>(r_cells) * timing.readout_time;
  for (int g = 0; g < rep.groups; ++g)
    for (int s = 0; s < r_cells; ++s) {
      const std::int64_t cell = static_cast<std::int64_t>(g) * r_cells + s;
      if (cell >= cells) break;
      rep.timeline.events.push_back(
          TimedEvent{static_cast<double>(s) * timing.readout_time,
                     EventKind::Readout,
                     "drain[m*.g" + std::to_string(g) + "]",
                     timing.readout_time});
    }
  rep.timeline.period = rep.duration;
  rep.timeline.phases = {{"readout", rep.duration}};
  rep.timeline.sort_events();
  return rep;
}

// ---------------------------------------------------------------------------
// Surface-code cycle
// ---------------------------------------------------------------------------

struct CycleOptions {
  /// Order of the neighbor-interaction rounds; the cycle is order-invariant,
  /// the knob exists to demonstrate it.
  std::array<const char*, 4> neighbor_order = {"north", "east", "south",
                                               "west"};
};

struct CycleReport {
  EventTimeline timeline;
  Time period;
  std::string dominant_phase;
  ReadoutReport readout;  // embedded partition arithmetic / lines delta
};

/// One surface-code cycle, fully serialized (v1): four neighbor-interaction
/// rounds (each ancilla shuttles to the mid-arm interaction region, exchange
/// pulse, shuttle back), a single-qubit round at the readout/1Q region, then
/// the module readout. Per-activity wall time makes up the phase breakdown,
/// so the phase durations sum exactly to the period.
inline CycleReport surface_code_cycle(const ArchParams& params,
                                      const TimingParams& timing,
                                      const CycleOptions& opt = {}) {
  params.validate();
  timing.validate();
  CycleReport rep;
  const Time half_arm{arm_transit_time(params, timing).si() / 2.0};
  double t = 0;
  std::map<std::string, double> phase_wall;
  auto emit = [&](EventKind kind, const std::string& loc, Time dur) {
    rep.timeline.events.push_back(TimedEvent{Time{t}, kind, loc, dur});
    phase_wall[phase_of(kind)] += dur.si();
    t += dur.si();
  };

  // Neighbor-interaction rounds, two ancillas per cell, fully serialized.
  for (const char* dir : opt.neighbor_order)
    for (int anc = 0; anc < 2; ++anc) {
      const std::string arm =
          "arm[anc" + std::to_string(anc) + "." + dir + "]";
      emit(EventKind::Shuttle, arm, half_arm);
      emit(EventKind::ExchangePulse,
           "j[anc" + std::to_string(anc) + "." + dir + "]",
           timing.two_qubit_time);
      emit(EventKind::Shuttle, arm, half_arm);
    }

  // Single-qubit round at the readout/1Q region.
  for (int anc = 0; anc < 2; ++anc) {
    const std::string arm = "arm[anc" + std::to_string(anc) + ".readout]";
    emit(EventKind::Shuttle, arm, half_arm);
    emit(EventKind::MicrowavePulse, "mw[cell0]", timing.single_qubit_time);
    emit(EventKind::Shuttle, arm, half_arm);
  }

  // Module readout; drain groups proceed in parallel.
  rep.readout = readout_schedule(params, timing);
  const double readout_start = t;
  for (const auto& e : rep.readout.timeline.events)
    rep.timeline.events.push_back(TimedEvent{
        Time{readout_start + e.start.si()}, e.kind, e.location, e.duration});
  phase_wall["readout"] += rep.readout.duration.si();
  t += rep.readout.duration.si();

  rep.period = Time{t};
  rep.timeline.period = rep.period;
  for (const char* name : {"shuttle", "two-qubit", "single-qubit", "readout"})
    rep.timeline.phases.push_back({name, Time{phase_wall[name]}});
  rep.timeline.sort_events();
  rep.dominant_phase = rep.timeline.dominant_phase();
  return rep;
}

}  // namespace qplane
