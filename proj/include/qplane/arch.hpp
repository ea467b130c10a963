#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qplane/errors.hpp"
#include "qplane/units.hpp"

namespace qplane {

/// Full parameter set of the sparse-array architecture. Everything else in
/// the library is derived from these values.
struct ArchParams {
  int modules_per_side = 0;       ///< modules per side of the quantum plane
  int cells_per_module_side = 0;  ///< unit cells per side of a module
  Length qubit_pitch = micrometers(12);  ///< lattice vertex spacing
  Length gate_pitch = nanometers(50);    ///< electrode pitch along an arm
  Voltage coarse_resolution = millivolts(1);
  Voltage fine_resolution = microvolts(1);
  Temperature operating_temperature = kelvin(1);
  int defect_crossbars = 1;  ///< independent defect crossbars over the plane
  Length die_width = millimeters(22);
  Length die_height = millimeters(33);

  /// Throws ValidationError naming the violated invariant.
  void validate() const {
    if (modules_per_side < 1)
      throw ValidationError("modules_per_side must be >= 1");
    if (cells_per_module_side < 1)
      throw ValidationError("cells_per_module_side must be >= 1");
    // keep 64 * (MN)^2 gate counts inside 64-bit arithmetic
    if (static_cast<std::int64_t>(modules_per_side) * cells_per_module_side >
        (std::int64_t{1} << 28))
      throw ValidationError("modules_per_side * cells_per_module_side must "
                            "not exceed 2^28");
    if (qubit_pitch.si() <= 0) throw ValidationError("qubit_pitch must be > 0");
    if (gate_pitch.si() <= 0) throw ValidationError("gate_pitch must be > 0");
    if (coarse_resolution.si() <= 0)
      throw ValidationError("coarse_resolution must be > 0");
    if (fine_resolution.si() <= 0)
      throw ValidationError("fine_resolution must be > 0");
    if (!(fine_resolution < coarse_resolution))
      throw ValidationError("fine_resolution must be < coarse_resolution");
    if (operating_temperature.si() <= 0)
      throw ValidationError("operating_temperature must be > 0");
    if (defect_crossbars < 1)
      throw ValidationError("defect_crossbars must be >= 1");
    if (die_width.si() <= 0 || die_height.si() <= 0)
      throw ValidationError("die dimensions must be > 0");
    (void)arm_gate_count();  // checks divisibility
  }

  /// Electrodes per lattice arm, qubit_pitch / gate_pitch. The pitch must be
  /// an integer multiple of the electrode pitch.
  [[nodiscard]] int arm_gate_count() const {
    const double r = ratio(qubit_pitch, gate_pitch);
    const double n = std::round(r);
    if (n < 1 || std::abs(r - n) > 1e-6)
      throw ValidationError(
          "qubit_pitch must be an integer multiple of gate_pitch");
    return static_cast<int>(n);
  }
};

/// Functional classification of the electrodes in a unit cell.
enum class GateKind : std::uint8_t {
  Shuttle,        // traveling-wave electrode, AC only, never DC biased
  VertexBarrier,  // confinement barrier at a qubit idle site
  PulsedJ,        // exchange gate in a two-qubit region
  PulsedMW,       // microwave gate in the readout/1Q region
  PulsedBarrier,  // operation-region barrier / plunger
  SensorPlunger,  // sensing-dot plunger
  OhmicSource,
  OhmicDrain,
};

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::Shuttle: return "shuttle";
    case GateKind::VertexBarrier: return "vertex-barrier";
    case GateKind::PulsedJ: return "pulsed-j";
    case GateKind::PulsedMW: return "pulsed-mw";
    case GateKind::PulsedBarrier: return "pulsed-barrier";
    case GateKind::SensorPlunger: return "sensor-plunger";
    case GateKind::OhmicSource: return "ohmic-source";
    case GateKind::OhmicDrain: return "ohmic-drain";
  }
  return "?";
}

/// DC bias granularity class of a gate.
enum class BiasResolution : std::uint8_t { Coarse, Fine };

/// How AC reaches a DC-biased gate, if at all.
enum class AcDrive : std::uint8_t {
  None,         // static hold voltage only
  SharedLine,   // one plane-shared pulse line per gate position
  ReadoutDemux  // routed through the global readout demultiplexer
};

/// One DC-biased electrode slot in the unit cell.
struct DcGate {
  std::string name;  // unique within the cell, e.g. "vb2.1", "j1", "mw"
  GateKind kind = GateKind::PulsedBarrier;
  BiasResolution resolution = BiasResolution::Fine;
  AcDrive ac = AcDrive::None;
  std::int8_t region = -1;   // 0..3 operation region, -1 = idle-site barrier
  std::int8_t site = -1;     // qubit site 0..3 for vertex barriers, else -1
  std::uint8_t demux = 0;    // local demultiplexer 0..3
  std::uint8_t channel = 0;  // demux output channel 0..15
};

enum class RegionKind : std::uint8_t { Readout1Q, TwoQubitOnly };

/// Operation region of a unit cell with the indices of its gates.
struct Region {
  RegionKind kind = RegionKind::TwoQubitOnly;
  std::vector<int> gate_indices;
  bool has_ohmics = false;
};

/// Fixed electrical inventory of a unit cell: four qubit sites, operation
/// regions and the 64 DC-biased gates split over four 16-channel local
/// demultiplexers.
///
/// The standard breakdown (only the totals are contract-bearing; the
/// itemization is this model's documented default):
///   coarse (32): 16 vertex barriers (4 per site) + 16 region entry barriers
///   fine   (32): readout/1Q region mw + sensor + 5 pulsed + 4 static
///                plungers, and per two-qubit region j + 3 pulsed + 3 static
/// Pulse wiring: every pulsed gate position shares one plane-wide AC line;
/// the sensor plunger is pulsed through the global readout demultiplexer and
/// the shuttle electrodes ride the eight traveling-wave lines, which puts the
/// plane-shared pulse-line roster at 8 + 49 + 1 (mw) = 58.
class UnitCellLayout {
 public:
  static constexpr int kDemuxCount = 4;
  static constexpr int kDemuxChannels = 16;
  static constexpr int kGateCount = kDemuxCount * kDemuxChannels;

  std::vector<DcGate> gates;
  std::vector<Region> regions;

  /// The documented default inventory described above.
  static UnitCellLayout standard() {
    UnitCellLayout l;
    l.gates.reserve(kGateCount);
    auto emit = [&l](std::string name, GateKind kind, BiasResolution res,
                     AcDrive ac, int region, int site) {
      const int idx = static_cast<int>(l.gates.size());
      DcGate g;
      g.name = std::move(name);
      g.kind = kind;
      g.resolution = res;
      g.ac = ac;
      g.region = static_cast<std::int8_t>(region);
      g.site = static_cast<std::int8_t>(site);
      g.demux = static_cast<std::uint8_t>(idx / kDemuxChannels);
      g.channel = static_cast<std::uint8_t>(idx % kDemuxChannels);
      l.gates.push_back(std::move(g));
    };

    // Demux 0: vertex barriers, four per qubit site.
    for (int site = 0; site < 4; ++site)
      for (int b = 0; b < 4; ++b)
        emit("vb" + std::to_string(site) + "." + std::to_string(b),
             GateKind::VertexBarrier, BiasResolution::Coarse,
             AcDrive::SharedLine, -1, site);

    // Demux 1: entry barriers, four per operation region.
    for (int region = 0; region < 4; ++region)
      for (int b = 0; b < 4; ++b)
        emit("eb" + std::to_string(region) + "." + std::to_string(b),
             GateKind::PulsedBarrier, BiasResolution::Coarse,
             AcDrive::SharedLine, region, -1);

    // Demuxes 2 and 3: fine-resolution region gates.
    l.regions.resize(4);
    l.regions[0].kind = RegionKind::Readout1Q;
    l.regions[0].has_ohmics = true;
    emit("mw", GateKind::PulsedMW, BiasResolution::Fine, AcDrive::SharedLine,
         0, -1);
    emit("sensor", GateKind::SensorPlunger, BiasResolution::Fine,
         AcDrive::ReadoutDemux, 0, -1);
    for (int p = 0; p < 5; ++p)
      emit("pp0." + std::to_string(p), GateKind::PulsedBarrier,
           BiasResolution::Fine, AcDrive::SharedLine, 0, -1);
    for (int p = 0; p < 4; ++p)
      emit("sb0." + std::to_string(p), GateKind::PulsedBarrier,
           BiasResolution::Fine, AcDrive::None, 0, -1);
    for (int region = 1; region < 4; ++region) {
      l.regions[region].kind = RegionKind::TwoQubitOnly;
      emit("j" + std::to_string(region), GateKind::PulsedJ,
           BiasResolution::Fine, AcDrive::SharedLine, region, -1);
      for (int p = 0; p < 3; ++p)
        emit("pp" + std::to_string(region) + "." + std::to_string(p),
             GateKind::PulsedBarrier, BiasResolution::Fine,
             AcDrive::SharedLine, region, -1);
      for (int p = 0; p < 3; ++p)
        emit("sb" + std::to_string(region) + "." + std::to_string(p),
             GateKind::PulsedBarrier, BiasResolution::Fine, AcDrive::None,
             region, -1);
    }
    for (int i = 0; i < kGateCount; ++i) {
      const auto& g = l.gates[i];
      if (g.region >= 0) l.regions[g.region].gate_indices.push_back(i);
    }
    l.validate();
    return l;
  }

  /// Role of a qubit site within the cell's 2x2 block: sites 0 and 3 sit on
  /// the even (data) sublattice, 1 and 2 on the odd (ancilla) one.
  [[nodiscard]] static bool site_hosts_data(int site) {
    return site == 0 || site == 3;
  }

  [[nodiscard]] int gate_count() const {
    return static_cast<int>(gates.size());
  }
  [[nodiscard]] int coarse_count() const {
    int n = 0;
    for (const auto& g : gates) n += g.resolution == BiasResolution::Coarse;
    return n;
  }
  [[nodiscard]] int fine_count() const { return gate_count() - coarse_count(); }

  /// Gates driven by a dedicated plane-shared pulse line (includes the mw
  /// gate; excludes the sensor plunger, whose AC path is the readout demux).
  [[nodiscard]] int shared_pulse_gate_count() const {
    int n = 0;
    for (const auto& g : gates) n += g.ac == AcDrive::SharedLine;
    return n;
  }

  void validate() const {
    if (gate_count() != kGateCount)
      throw ValidationError("unit cell must carry exactly " +
                            std::to_string(kGateCount) + " DC-biased gates");
    std::array<std::array<bool, kDemuxChannels>, kDemuxCount> seen{};
    for (const auto& g : gates) {
      if (g.demux >= kDemuxCount || g.channel >= kDemuxChannels)
        throw ValidationError("gate demux slot out of range");
      if (seen[g.demux][g.channel])
        throw ValidationError("duplicate demux channel assignment");
      seen[g.demux][g.channel] = true;
    }
    int readout_regions = 0;
    for (const auto& r : regions)
      if (r.kind == RegionKind::Readout1Q) {
        ++readout_regions;
        if (!r.has_ohmics)
          throw ValidationError("readout region must carry ohmic contacts");
      }
    if (readout_regions != 1)
      throw ValidationError("unit cell must have exactly one readout region");
    int sensors = 0;
    for (const auto& g : gates) sensors += g.kind == GateKind::SensorPlunger;
    if (sensors != 1)
      throw ValidationError("unit cell must have exactly one sensor plunger");
    for (const auto& g : gates)
      if (g.kind == GateKind::Shuttle)
        throw ValidationError("shuttle electrodes carry no DC bias");
  }
};

/// Areas and perimeters of the three hierarchy levels.
struct Geometry {
  Area unit_cell_area;
  Length unit_cell_perimeter;
  Area module_area;
  Length module_perimeter;
  Area plane_area;
  Length plane_perimeter;
  Length plane_side;
};

/// Unit cell spans 2d x 2d, a module 2dN x 2dN, the plane 2dNM x 2dNM.
inline Geometry geometry(const ArchParams& p) {
  p.validate();
  const Length d = p.qubit_pitch;
  const double n = p.cells_per_module_side;
  const double m = p.modules_per_side;
  Geometry g;
  g.unit_cell_area = (2.0 * d) * (2.0 * d);
  g.unit_cell_perimeter = 8.0 * d;
  g.module_area = (2.0 * n * d) * (2.0 * n * d);
  g.module_perimeter = 8.0 * n * d;
  g.plane_side = 2.0 * n * m * d;
  g.plane_area = g.plane_side * g.plane_side;
  g.plane_perimeter = 8.0 * n * m * d;
  return g;
}

/// A lattice vertex (qubit idle site). Row/col index the global vertex grid
/// of side 2MN.
struct VertexId {
  int row = 0;
  int col = 0;
  friend constexpr auto operator<=>(VertexId, VertexId) = default;
};

/// Structural model of the quantum plane: an M x M array of modules of
/// N x N unit cells on a square shuttling lattice. The lattice itself is
/// implicit (it is a grid), so construction is O(1) and the plane is safe to
/// share between threads.
class QuantumPlane {
 public:
  QuantumPlane(ArchParams params, UnitCellLayout layout)
      : params_(std::move(params)), layout_(std::move(layout)) {
    params_.validate();
    layout_.validate();
  }

  [[nodiscard]] const ArchParams& params() const { return params_; }
  [[nodiscard]] const UnitCellLayout& cell_layout() const { return layout_; }

  [[nodiscard]] std::int64_t module_count() const {
    const std::int64_t m = params_.modules_per_side;
    return m * m;
  }
  [[nodiscard]] std::int64_t cells_per_module() const {
    const std::int64_t n = params_.cells_per_module_side;
    return n * n;
  }
  [[nodiscard]] std::int64_t cell_count() const {
    return module_count() * cells_per_module();
  }
  [[nodiscard]] std::int64_t qubit_count() const { return 4 * cell_count(); }
  [[nodiscard]] std::int64_t data_qubit_count() const {
    return qubit_count() / 2;
  }

  /// Side of the global vertex grid (= 2MN).
  [[nodiscard]] int vertex_grid_side() const {
    return 2 * params_.modules_per_side * params_.cells_per_module_side;
  }
  [[nodiscard]] std::int64_t vertex_count() const {
    const std::int64_t s = vertex_grid_side();
    return s * s;
  }
  /// Shuttle arms (lattice edges); the plane edge terminates, no wraparound.
  [[nodiscard]] std::int64_t arm_count() const {
    const std::int64_t s = vertex_grid_side();
    return 2 * s * (s - 1);
  }

  [[nodiscard]] bool contains(VertexId v) const {
    const int s = vertex_grid_side();
    return v.row >= 0 && v.row < s && v.col >= 0 && v.col < s;
  }
  /// Data qubits sit on the even parity sublattice, ancillas on the odd one.
  [[nodiscard]] static bool is_data(VertexId v) {
    return (v.row + v.col) % 2 == 0;
  }
  [[nodiscard]] int degree(VertexId v) const {
    if (!contains(v)) throw ValidationError("vertex outside the plane");
    const int s = vertex_grid_side();
    int deg = 4;
    deg -= (v.row == 0) + (v.row == s - 1) + (v.col == 0) + (v.col == s - 1);
    return deg;
  }
  [[nodiscard]] std::vector<VertexId> neighbors(VertexId v) const {
    if (!contains(v)) throw ValidationError("vertex outside the plane");
    std::vector<VertexId> out;
    const std::array<VertexId, 4> cand{VertexId{v.row - 1, v.col},
                                       VertexId{v.row, v.col - 1},
                                       VertexId{v.row, v.col + 1},
                                       VertexId{v.row + 1, v.col}};
    for (auto c : cand)
      if (contains(c)) out.push_back(c);
    return out;
  }

  [[nodiscard]] Geometry geometry() const { return qplane::geometry(params_); }

  [[nodiscard]] nlohmann::ordered_json summary_json() const {
    const Geometry g = geometry();
    nlohmann::ordered_json j;
    j["schema"] = "qplane.plane/1";
    j["parameters"] = {
        {"modules_per_side", params_.modules_per_side},
        {"cells_per_module_side", params_.cells_per_module_side},
        {"qubit_pitch_um", as_micrometers(params_.qubit_pitch)},
        {"gate_pitch_nm", as_nanometers(params_.gate_pitch)},
        {"defect_crossbars", params_.defect_crossbars},
        {"die_mm", {as_millimeters(params_.die_width),
                    as_millimeters(params_.die_height)}},
    };
    j["counts"] = {
        {"modules", module_count()},
        {"unit_cells", cell_count()},
        {"qubits", qubit_count()},
        {"data_qubits", data_qubit_count()},
        {"ancilla_qubits", qubit_count() - data_qubit_count()},
        {"lattice_arms", arm_count()},
        {"gates_per_arm", params_.arm_gate_count()},
        {"dc_gates_per_cell", layout_.gate_count()},
        {"dc_gates_coarse", layout_.coarse_count()},
        {"dc_gates_fine", layout_.fine_count()},
    };
    j["geometry"] = {
        {"unit_cell_area_um2", as_square_micrometers(g.unit_cell_area)},
        {"unit_cell_perimeter_um", as_micrometers(g.unit_cell_perimeter)},
        {"module_area_um2", as_square_micrometers(g.module_area)},
        {"module_perimeter_um", as_micrometers(g.module_perimeter)},
        {"plane_area_mm2", as_square_millimeters(g.plane_area)},
        {"plane_side_mm", as_millimeters(g.plane_side)},
        {"plane_perimeter_mm", as_millimeters(g.plane_perimeter)},
    };
    return j;
  }

 private:
  ArchParams params_;
  UnitCellLayout layout_;
};

/// Construct the plane from parameters with the standard unit-cell layout.
inline QuantumPlane build_plane(const ArchParams& params) {
  return QuantumPlane(params, UnitCellLayout::standard());
}
inline QuantumPlane build_plane(const ArchParams& params,
                                UnitCellLayout layout) {
  return QuantumPlane(params, std::move(layout));
}

}  // namespace qplane
