#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qplane/arch.hpp"
#include "qplane/errors.hpp"

namespace qplane {

/// Signal family of a control line / netlist edge.
enum class SignalClass : std::uint8_t {
  DcBiasInput,        // remote sDAC feeding a module's demultiplexers
  DemuxAddress,       // plane-wide demux channel-select bus
  DemuxEnable,        // plane-shared demux enable crossbar (2N + 2N lines)
  SharedPulsed,       // shuttle / pulsed-gate AC / microwave, shared plane-wide
  DefectCrossbarRow,
  DefectCrossbarCol,
  ReadoutDrain,       // per-module drain line to the measurement chain
  ReadoutAddress,     // global readout demultiplexer select bus
  ReadoutSourceBias,  // shared readout excitation / source-ohmic bias rail
};
inline constexpr int kSignalClassCount = 9;

inline const char* to_string(SignalClass c) {
  switch (c) {
    case SignalClass::DcBiasInput: return "dc-bias-input";
    case SignalClass::DemuxAddress: return "demux-address";
    case SignalClass::DemuxEnable: return "demux-enable";
    case SignalClass::SharedPulsed: return "shared-pulsed";
    case SignalClass::DefectCrossbarRow: return "defect-row";
    case SignalClass::DefectCrossbarCol: return "defect-col";
    case SignalClass::ReadoutDrain: return "readout-drain";
    case SignalClass::ReadoutAddress: return "readout-address";
    case SignalClass::ReadoutSourceBias: return "readout-source-bias";
  }
  return "?";
}

/// Subkind of a SharedPulsed line.
enum class SharedKind : std::uint8_t { None, Shuttle, PulsedGateAc, Microwave };

inline const char* to_string(SharedKind k) {
  switch (k) {
    case SharedKind::None: return "none";
    case SharedKind::Shuttle: return "shuttle";
    case SharedKind::PulsedGateAc: return "pulsed-gate-ac";
    case SharedKind::Microwave: return "microwave";
  }
  return "?";
}

enum class NodeKind : std::uint8_t {
  RemoteSource,
  CrossbarDriver,
  Junction,  // wire branch point; lets a multi-terminal line cross the
             // boundary exactly once, as the physical wire does
  Demux,
  HoldCapacitor,
  ComplementarySwitch,
  DefectSwitch,
  Gate,
  Ohmic,
  GlobalReadoutDemux,
};

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::RemoteSource: return "remote-source";
    case NodeKind::CrossbarDriver: return "crossbar-driver";
    case NodeKind::Junction: return "junction";
    case NodeKind::Demux: return "demux";
    case NodeKind::HoldCapacitor: return "hold-capacitor";
    case NodeKind::ComplementarySwitch: return "complementary-switch";
    case NodeKind::DefectSwitch: return "defect-switch";
    case NodeKind::Gate: return "gate";
    case NodeKind::Ohmic: return "ohmic";
    case NodeKind::GlobalReadoutDemux: return "global-readout-demux";
  }
  return "?";
}

/// Which side of the quantum-plane boundary a node sits on.
enum class Side : std::uint8_t { Inside, Outside, Unset };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::Inside: return "inside";
    case Side::Outside: return "outside";
    case Side::Unset: return "unset";
  }
  return "?";
}

struct NetNode {
  std::string label;
  NodeKind kind = NodeKind::Junction;
  Side side = Side::Unset;
  // Number of physical electrodes strapped to this node (shuttle taps
  // aggregate the arm electrodes wired to one phase line).
  std::int32_t strap = 1;
};

struct NetEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  SignalClass sig = SignalClass::DcBiasInput;
  SharedKind sub = SharedKind::None;
};

/// Wires crossing the quantum-plane boundary, grouped by signal class.
struct BoundaryCount {
  std::array<std::int64_t, kSignalClassCount> by_class{};

  std::int64_t& operator[](SignalClass c) {
    return by_class[static_cast<int>(c)];
  }
  std::int64_t operator[](SignalClass c) const {
    return by_class[static_cast<int>(c)];
  }
  [[nodiscard]] std::int64_t total() const {
    std::int64_t t = 0;
    for (auto v : by_class) t += v;
    return t;
  }
  friend bool operator==(const BoundaryCount&, const BoundaryCount&) = default;

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (int i = 0; i < kSignalClassCount; ++i)
      j[to_string(static_cast<SignalClass>(i))] = by_class[i];
    j["total"] = total();
    return j;
  }
};

/// Explicit typed wiring graph between remote electronics and the gates of
/// the quantum plane. Nodes carry an inside/outside flag; the boundary line
/// count is a pure cut of this graph, independent of the closed forms.
class Netlist {
 public:
  std::uint32_t add_node(std::string label, NodeKind kind, Side side,
                         std::int32_t strap = 1) {
    nodes_.push_back(NetNode{std::move(label), kind, side, strap});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }
  void add_edge(std::uint32_t src, std::uint32_t dst, SignalClass sig,
                SharedKind sub = SharedKind::None) {
    if (src >= nodes_.size() || dst >= nodes_.size())
      throw StructuralError("edge endpoint does not exist");
    edges_.push_back(NetEdge{src, dst, sig, sub});
  }

  [[nodiscard]] const std::vector<NetNode>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<NetEdge>& edges() const { return edges_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }

  void reserve(std::size_t nodes, std::size_t edges) {
    nodes_.reserve(nodes);
    edges_.reserve(edges);
  }

  /// Structural checks: demux fan-in/fan-out, hold-capacitor degree, and
  /// reachability of every gate from a remote source or crossbar driver.
  void validate() const {
    std::vector<std::int32_t> in_bias(nodes_.size(), 0);
    std::vector<std::int32_t> out_bias(nodes_.size(), 0);
    std::vector<std::int32_t> in_deg(nodes_.size(), 0);
    std::vector<std::int32_t> out_deg(nodes_.size(), 0);
    std::vector<std::vector<std::uint32_t>> adj(nodes_.size());
    for (const auto& e : edges_) {
      ++in_deg[e.dst];
      ++out_deg[e.src];
      if (e.sig == SignalClass::DcBiasInput) {
        ++in_bias[e.dst];
        ++out_bias[e.src];
      }
      adj[e.src].push_back(e.dst);
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      switch (n.kind) {
        case NodeKind::Demux:
          if (in_bias[i] != 1)
            throw StructuralError(n.label + ": demux needs exactly one DC input");
          if (out_bias[i] != UnitCellLayout::kDemuxChannels)
            throw StructuralError(n.label + ": demux must drive 16 channels");
          break;
        case NodeKind::HoldCapacitor:
          if (in_deg[i] != 1 || out_deg[i] != 1)
            throw StructuralError(n.label +
                                  ": hold capacitor needs one demux output "
                                  "and one gate");
          break;
        default:
          break;
      }
      if (in_deg[i] == 0 && out_deg[i] == 0)
        throw StructuralError(n.label + ": isolated node");
    }
    // Every gate must be fed from outside the plane.
    std::vector<char> seen(nodes_.size(), 0);
    std::deque<std::uint32_t> work;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].side == Side::Outside &&
          (nodes_[i].kind == NodeKind::RemoteSource ||
           nodes_[i].kind == NodeKind::CrossbarDriver)) {
        seen[i] = 1;
        work.push_back(static_cast<std::uint32_t>(i));
      }
    while (!work.empty()) {
      const auto u = work.front();
      work.pop_front();
      for (auto v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          work.push_back(v);
        }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].kind == NodeKind::Gate && !seen[i])
        throw StructuralError(nodes_[i].label +
                              ": gate unreachable from any remote source");
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "qplane.netlist/1";
    auto& jn = j["nodes"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      jn.push_back({{"id", i},
                    {"label", n.label},
                    {"kind", to_string(n.kind)},
                    {"side", to_string(n.side)},
                    {"strap", n.strap}});
    }
    auto& je = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : edges_)
      je.push_back({{"src", e.src},
                    {"dst", e.dst},
                    {"sig", to_string(e.sig)},
                    {"sub", to_string(e.sub)}});
    return j;
  }

  static Netlist from_json(const nlohmann::json& j);

  void to_dot(std::ostream& os) const {
    os << "digraph qplane_netlist {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      os << "  n" << i << " [label=\"" << n.label << "\" kind=\""
         << to_string(n.kind) << "\" side=\"" << to_string(n.side) << "\"";
      if (n.strap != 1) os << " strap=" << n.strap;
      os << "];\n";
    }
    for (const auto& e : edges_) {
      os << "  n" << e.src << " -> n" << e.dst << " [sig=\""
         << to_string(e.sig) << "\"";
      if (e.sub != SharedKind::None)
        os << " sub=\"" << to_string(e.sub) << "\"";
      if (nodes_[e.src].side != nodes_[e.dst].side) os << " style=bold";
      os << "];\n";
    }
    os << "}\n";
  }

 private:
  std::vector<NetNode> nodes_;
  std::vector<NetEdge> edges_;
};

/// Pure graph cut: count edges with one endpoint inside and one outside the
/// plane, per signal class. No formulas involved.
inline BoundaryCount count_boundary_lines(const Netlist& net) {
  BoundaryCount out;
  const auto& nodes = net.nodes();
  for (const auto& e : net.edges()) {
    const Side a = nodes[e.src].side;
    const Side b = nodes[e.dst].side;
    if (a == Side::Unset || b == Side::Unset)
      throw StructuralError("edge touches a node without a boundary flag: " +
                            nodes[e.src].label + " -> " + nodes[e.dst].label);
    if (a != b) ++out[e.sig];
  }
  return out;
}

inline Netlist Netlist::from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j.at("schema") != "qplane.netlist/1")
    throw StructuralError("unrecognized netlist schema");
  auto parse_kind = [](const std::string& s) {
    for (int k = 0; k <= static_cast<int>(NodeKind::GlobalReadoutDemux); ++k)
      if (s == to_string(static_cast<NodeKind>(k)))
        return static_cast<NodeKind>(k);
    throw StructuralError("unknown node kind: " + s);
  };
  auto parse_side = [](const std::string& s) {
    for (int k = 0; k <= static_cast<int>(Side::Unset); ++k)
      if (s == to_string(static_cast<Side>(k))) return static_cast<Side>(k);
    throw StructuralError("unknown side: " + s);
  };
  auto parse_sig = [](const std::string& s) {
    for (int k = 0; k < kSignalClassCount; ++k)
      if (s == to_string(static_cast<SignalClass>(k)))
        return static_cast<SignalClass>(k);
    throw StructuralError("unknown signal class: " + s);
  };
  auto parse_sub = [](const std::string& s) {
    for (int k = 0; k <= static_cast<int>(SharedKind::Microwave); ++k)
      if (s == to_string(static_cast<SharedKind>(k)))
        return static_cast<SharedKind>(k);
    throw StructuralError("unknown shared subkind: " + s);
  };
  Netlist net;
  for (const auto& jn : j.at("nodes")) {
    if (jn.at("id").get<std::size_t>() != net.node_count())
      throw StructuralError("node ids must be dense and ordered");
    net.add_node(jn.at("label").get<std::string>(),
                 parse_kind(jn.at("kind").get<std::string>()),
                 parse_side(jn.at("side").get<std::string>()),
                 jn.at("strap").get<std::int32_t>());
  }
  for (const auto& je : j.at("edges"))
    net.add_edge(je.at("src").get<std::uint32_t>(),
                 je.at("dst").get<std::uint32_t>(),
                 parse_sig(je.at("sig").get<std::string>()),
                 parse_sub(je.at("sub").get<std::string>()));
  return net;
}

inline int ceil_log2(int n) {
  if (n < 1) throw ValidationError("ceil_log2 needs n >= 1");
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return bits;
}

/// Tunable constants of the wiring instantiation. The defaults are the
/// minimal counts consistent with the routing scheme; the readout group
/// count grows when readout is parallelized within modules.
struct NetlistOptions {
  int shuttle_phases = 4;             ///< phase lines per lattice axis
  int readout_groups_per_module = 1;  ///< independent drain lines per module
};

namespace detail {
/// Names of the plane-shared pulse lines: the shuttle phase lines per axis
/// followed by one line per pulsed gate position in the unit cell.
struct SharedLine {
  std::string name;
  SharedKind sub;
};
inline std::vector<SharedLine> shared_lines(const UnitCellLayout& layout,
                                            const NetlistOptions& opt) {
  std::vector<SharedLine> lines;
  for (int p = 0; p < opt.shuttle_phases; ++p)
    lines.push_back({"shuttle-x[" + std::to_string(p) + "]",
                     SharedKind::Shuttle});
  for (int p = 0; p < opt.shuttle_phases; ++p)
    lines.push_back({"shuttle-y[" + std::to_string(p) + "]",
                     SharedKind::Shuttle});
  for (const auto& g : layout.gates)
    if (g.ac == AcDrive::SharedLine)
      lines.push_back({"pulse:" + g.name, g.kind == GateKind::PulsedMW
                                              ? SharedKind::Microwave
                                              : SharedKind::PulsedGateAc});
  return lines;
}
}  // namespace detail

/// Exact boundary line counts from the wiring contract, per class:
///   dc-bias-input       M^2       (one shared sDAC line per module)
///   demux-address       ceil(log2 16) = 4, plane-wide
///   demux-enable        2N + 2N over the 2N x 2N demux grid, plane-shared
///   shared-pulsed       roster total (58 with the standard layout)
///   defect rows/cols    x * 2MN and x * MN
///   readout-drain       G * M^2   (G = readout groups per module)
///   readout-address     2 * ceil(log2 N)
///   readout-source-bias 1
inline BoundaryCount closed_form_lines(const ArchParams& params,
                                       const UnitCellLayout& layout,
                                       const NetlistOptions& opt = {}) {
  params.validate();
  const std::int64_t m = params.modules_per_side;
  const std::int64_t n = params.cells_per_module_side;
  const std::int64_t x = params.defect_crossbars;
  BoundaryCount c;
  c[SignalClass::DcBiasInput] = m * m;
  c[SignalClass::DemuxAddress] = ceil_log2(UnitCellLayout::kDemuxChannels);
  c[SignalClass::DemuxEnable] = 4 * n;
  c[SignalClass::SharedPulsed] =
      2 * opt.shuttle_phases + layout.shared_pulse_gate_count();
  c[SignalClass::DefectCrossbarRow] = x * 2 * m * n;
  c[SignalClass::DefectCrossbarCol] = x * m * n;
  c[SignalClass::ReadoutDrain] = opt.readout_groups_per_module * m * m;
  c[SignalClass::ReadoutAddress] = 2 * ceil_log2(static_cast<int>(n));
  c[SignalClass::ReadoutSourceBias] = 1;
  return c;
}

inline BoundaryCount closed_form_lines(const ArchParams& params,
                                       const NetlistOptions& opt = {}) {
  return closed_form_lines(params, UnitCellLayout::standard(), opt);
}

/// Distinct control lines tapped by one unit cell: the module DC input, the
/// address bus, two enable rows and two enable columns, the full shared
/// pulse roster, the defect row/column lines over its vertices (3 per
/// crossbar), its drain group, the readout bias rail and the global-demux
/// feed of its sensor plunger. This bounds the wire count through the cell
/// perimeter; physical routing and layer assignment are out of scope.
inline std::int64_t unit_cell_line_taps(const ArchParams& params,
                                        const UnitCellLayout& layout,
                                        const NetlistOptions& opt = {}) {
  params.validate();
  const std::int64_t shared =
      2 * opt.shuttle_phases + layout.shared_pulse_gate_count();
  return 1 + ceil_log2(UnitCellLayout::kDemuxChannels) + 4 + shared +
         3 * params.defect_crossbars + 1 + 1 + 1;
}

/// Build the explicit wiring graph for a plane. Every boundary line is
/// materialized as source(outside) -> junction(inside) -> consumers, so the
/// graph cut counts each physical wire once. Shuttle electrodes are
/// aggregated per arm and phase line (a `strap` count records how many
/// electrodes the tap nodes bundle); everything else is one node per device.
inline Netlist generate_netlist(const QuantumPlane& plane,
                                const NetlistOptions& opt = {}) {
  const ArchParams& p = plane.params();
  const UnitCellLayout& layout = plane.cell_layout();
  if (opt.shuttle_phases < 1)
    throw ValidationError("shuttle_phases must be >= 1");
  if (opt.readout_groups_per_module < 1 ||
      opt.readout_groups_per_module > plane.cells_per_module())
    throw ValidationError("readout_groups_per_module must be in [1, N^2]");
  if (plane.cell_count() > 16384)
    throw SizeError(
        "explicit netlist limited to 16384 unit cells; use the closed form "
        "for larger planes");

  const int m_side = p.modules_per_side;
  const int n_side = p.cells_per_module_side;
  const std::int64_t modules = plane.module_count();
  const std::int64_t cells_per_module = plane.cells_per_module();
  const int groups = opt.readout_groups_per_module;
  const std::int64_t group_cells =
      (cells_per_module + groups - 1) / groups;  // cells per drain group
  const int vertex_side = plane.vertex_grid_side();
  const int arm_gates = p.arm_gate_count();

  Netlist net;
  {
    const std::size_t cells = static_cast<std::size_t>(plane.cell_count());
    net.reserve(cells * 190 + static_cast<std::size_t>(plane.arm_count()) * 4,
                cells * 260 + static_cast<std::size_t>(plane.arm_count()) * 4);
  }

  // A boundary line: source outside, one crossing edge, junction inside.
  auto line = [&net](const std::string& name, NodeKind source_kind,
                     SignalClass sig, SharedKind sub = SharedKind::None) {
    const auto src = net.add_node("src:" + name, source_kind, Side::Outside);
    const auto jn = net.add_node("net:" + name, NodeKind::Junction,
                                 Side::Inside);
    net.add_edge(src, jn, sig, sub);
    return jn;
  };

  // Plane-wide demux address bus.
  const int addr_bits = ceil_log2(UnitCellLayout::kDemuxChannels);
  std::vector<std::uint32_t> addr_net;
  for (int b = 0; b < addr_bits; ++b)
    addr_net.push_back(line("demux-address[" + std::to_string(b) + "]",
                            NodeKind::RemoteSource, SignalClass::DemuxAddress));

  // Plane-shared demux enable crossbar over the per-module 2N x 2N grid.
  std::vector<std::uint32_t> enable_row_net, enable_col_net;
  for (int r = 0; r < 2 * n_side; ++r)
    enable_row_net.push_back(line("demux-enable-row[" + std::to_string(r) + "]",
                                  NodeKind::CrossbarDriver,
                                  SignalClass::DemuxEnable));
  for (int c = 0; c < 2 * n_side; ++c)
    enable_col_net.push_back(line("demux-enable-col[" + std::to_string(c) + "]",
                                  NodeKind::CrossbarDriver,
                                  SignalClass::DemuxEnable));

  // Shared pulse lines: shuttle phases then one line per pulsed gate slot.
  const auto shared = detail::shared_lines(layout, opt);
  std::vector<std::uint32_t> shared_net;
  for (const auto& s : shared)
    shared_net.push_back(
        line(s.name, NodeKind::RemoteSource, SignalClass::SharedPulsed, s.sub));
  // Map gate index -> shared line index (after the 2*phases shuttle lines).
  std::vector<int> gate_shared_line(layout.gates.size(), -1);
  {
    int next = 2 * opt.shuttle_phases;
    for (std::size_t g = 0; g < layout.gates.size(); ++g)
      if (layout.gates[g].ac == AcDrive::SharedLine)
        gate_shared_line[g] = next++;
  }

  // Defect crossbars over the data-qubit grid (2MN rows, MN columns).
  const int defect_rows = vertex_side;
  const int defect_cols = vertex_side / 2;
  std::vector<std::vector<std::uint32_t>> defect_row_net(p.defect_crossbars);
  std::vector<std::vector<std::uint32_t>> defect_col_net(p.defect_crossbars);
  for (int k = 0; k < p.defect_crossbars; ++k) {
    for (int r = 0; r < defect_rows; ++r)
      defect_row_net[k].push_back(
          line("defect-row[" + std::to_string(k) + "][" + std::to_string(r) +
                   "]",
               NodeKind::CrossbarDriver, SignalClass::DefectCrossbarRow));
    for (int c = 0; c < defect_cols; ++c)
      defect_col_net[k].push_back(
          line("defect-col[" + std::to_string(k) + "][" + std::to_string(c) +
                   "]",
               NodeKind::CrossbarDriver, SignalClass::DefectCrossbarCol));
  }

  // Global readout demultiplexer with its address bus and the shared
  // excitation / source bias rail.
  const int readout_bits = 2 * ceil_log2(n_side);
  std::vector<std::uint32_t> readout_addr_net;
  for (int b = 0; b < readout_bits; ++b)
    readout_addr_net.push_back(line("readout-address[" + std::to_string(b) +
                                        "]",
                                    NodeKind::RemoteSource,
                                    SignalClass::ReadoutAddress));
  const auto bias_net = line("readout-bias", NodeKind::RemoteSource,
                             SignalClass::ReadoutSourceBias);
  const auto readout_demux = net.add_node("readout-demux",
                                          NodeKind::GlobalReadoutDemux,
                                          Side::Inside);
  for (auto a : readout_addr_net)
    net.add_edge(a, readout_demux, SignalClass::ReadoutAddress);
  net.add_edge(bias_net, readout_demux, SignalClass::ReadoutSourceBias);

  // Per-module DC input and drain lines.
  std::vector<std::uint32_t> dc_net(modules);
  std::vector<std::vector<std::uint32_t>> drain_net(modules);
  for (std::int64_t m = 0; m < modules; ++m) {
    const std::string mm = "m" + std::to_string(m);
    dc_net[m] = line("dc[" + mm + "]", NodeKind::RemoteSource,
                     SignalClass::DcBiasInput);
    for (int g = 0; g < groups; ++g) {
      std::string suffix = groups == 1 ? mm : mm + ".g" + std::to_string(g);
      const auto jn = net.add_node("net:drain[" + suffix + "]",
                                   NodeKind::Junction, Side::Inside);
      const auto port = net.add_node("port:readout-drain[" + suffix + "]",
                                     NodeKind::RemoteSource, Side::Outside);
      net.add_edge(jn, port, SignalClass::ReadoutDrain);
      drain_net[m].push_back(jn);
    }
  }

  // Unit cells: demuxes, hold capacitors, switches, gates, ohmics.
  std::vector<std::uint32_t> gate_node(
      static_cast<std::size_t>(plane.cell_count()) * layout.gates.size());
  for (std::int64_t m = 0; m < modules; ++m) {
    for (std::int64_t ci = 0; ci < cells_per_module; ++ci) {
      const std::int64_t cell_global = m * cells_per_module + ci;
      const std::string cc =
          "m" + std::to_string(m) + ".c" + std::to_string(ci);
      const int cell_row = static_cast<int>(ci) / n_side;
      const int cell_col = static_cast<int>(ci) % n_side;

      std::array<std::uint32_t, UnitCellLayout::kDemuxCount> demux_node{};
      for (int k = 0; k < UnitCellLayout::kDemuxCount; ++k) {
        const auto d = net.add_node("demux[" + cc + "." + std::to_string(k) +
                                        "]",
                                    NodeKind::Demux, Side::Inside);
        demux_node[k] = d;
        net.add_edge(dc_net[m], d, SignalClass::DcBiasInput);
        for (auto a : addr_net) net.add_edge(a, d, SignalClass::DemuxAddress);
        const int er = 2 * cell_row + k / 2;
        const int ec = 2 * cell_col + k % 2;
        net.add_edge(enable_row_net[er], d, SignalClass::DemuxEnable);
        net.add_edge(enable_col_net[ec], d, SignalClass::DemuxEnable);
      }

      for (std::size_t g = 0; g < layout.gates.size(); ++g) {
        const DcGate& spec = layout.gates[g];
        const auto cap = net.add_node("cap[" + cc + "." + spec.name + "]",
                                      NodeKind::HoldCapacitor, Side::Inside);
        net.add_edge(demux_node[spec.demux], cap, SignalClass::DcBiasInput);
        const auto gate = net.add_node("gate[" + cc + "." + spec.name + "]",
                                       NodeKind::Gate, Side::Inside);
        gate_node[cell_global * layout.gates.size() + g] = gate;
        switch (spec.ac) {
          case AcDrive::None:
            net.add_edge(cap, gate, SignalClass::DcBiasInput);
            break;
          case AcDrive::SharedLine: {
            const auto sw = net.add_node("sw[" + cc + "." + spec.name + "]",
                                         NodeKind::ComplementarySwitch,
                                         Side::Inside);
            net.add_edge(cap, sw, SignalClass::DcBiasInput);
            const int ln = gate_shared_line[g];
            net.add_edge(shared_net[ln], sw, SignalClass::SharedPulsed,
                         shared[ln].sub);
            net.add_edge(sw, gate, SignalClass::DcBiasInput);
            break;
          }
          case AcDrive::ReadoutDemux: {
            const auto sw = net.add_node("sw[" + cc + "." + spec.name + "]",
                                         NodeKind::ComplementarySwitch,
                                         Side::Inside);
            net.add_edge(cap, sw, SignalClass::DcBiasInput);
            net.add_edge(readout_demux, sw, SignalClass::ReadoutAddress);
            net.add_edge(sw, gate, SignalClass::DcBiasInput);
            break;
          }
        }
      }

      const auto src_ohmic = net.add_node("ohmic-source[" + cc + "]",
                                          NodeKind::Ohmic, Side::Inside);
      net.add_edge(bias_net, src_ohmic, SignalClass::ReadoutSourceBias);
      const auto drn_ohmic = net.add_node("ohmic-drain[" + cc + "]",
                                          NodeKind::Ohmic, Side::Inside);
      net.add_edge(drn_ohmic, drain_net[m][static_cast<int>(ci / group_cells)],
                   SignalClass::ReadoutDrain);
    }
  }

  // Shuttle arms: four taps per arm, one per phase line of the arm's axis.
  auto strap_count = [arm_gates](int phases, int p_idx) {
    return arm_gates / phases + (p_idx < arm_gates % phases ? 1 : 0);
  };
  for (int r = 0; r < vertex_side; ++r)
    for (int c = 0; c + 1 < vertex_side; ++c)
      for (int ph = 0; ph < opt.shuttle_phases; ++ph) {
        const auto tap = net.add_node(
            "tap[x.r" + std::to_string(r) + ".c" + std::to_string(c) + ".p" +
                std::to_string(ph) + "]",
            NodeKind::Gate, Side::Inside, strap_count(opt.shuttle_phases, ph));
        net.add_edge(shared_net[ph], tap, SignalClass::SharedPulsed,
                     SharedKind::Shuttle);
      }
  for (int r = 0; r + 1 < vertex_side; ++r)
    for (int c = 0; c < vertex_side; ++c)
      for (int ph = 0; ph < opt.shuttle_phases; ++ph) {
        const auto tap = net.add_node(
            "tap[y.r" + std::to_string(r) + ".c" + std::to_string(c) + ".p" +
                std::to_string(ph) + "]",
            NodeKind::Gate, Side::Inside, strap_count(opt.shuttle_phases, ph));
        net.add_edge(shared_net[opt.shuttle_phases + ph], tap,
                     SignalClass::SharedPulsed, SharedKind::Shuttle);
      }

  // Defect switches on the data sublattice; activation closes the vertex
  // barriers so the qubit cannot enter a shuttle channel.
  std::vector<int> barrier_of_site[4];
  for (int s = 0; s < 4; ++s)
    for (std::size_t g = 0; g < layout.gates.size(); ++g)
      if (layout.gates[g].kind == GateKind::VertexBarrier &&
          layout.gates[g].site == s)
        barrier_of_site[s].push_back(static_cast<int>(g));
  for (int k = 0; k < p.defect_crossbars; ++k)
    for (int r = 0; r < vertex_side; ++r)
      for (int c = (r % 2 == 0) ? 0 : 1; c < vertex_side; c += 2) {
        const auto sw = net.add_node("defect-sw[" + std::to_string(k) + ".r" +
                                         std::to_string(r) + ".c" +
                                         std::to_string(c) + "]",
                                     NodeKind::DefectSwitch, Side::Inside);
        net.add_edge(defect_row_net[k][r], sw, SignalClass::DefectCrossbarRow);
        net.add_edge(defect_col_net[k][c / 2], sw,
                     SignalClass::DefectCrossbarCol);
        const int cell_row = r / 2, cell_col = c / 2;
        const std::int64_t module =
            static_cast<std::int64_t>(cell_row / n_side) * m_side +
            cell_col / n_side;
        const std::int64_t ci =
            static_cast<std::int64_t>(cell_row % n_side) * n_side +
            cell_col % n_side;
        const int site = (r % 2) * 2 + (c % 2);
        for (int g : barrier_of_site[site])
          net.add_edge(sw,
                       gate_node[(module * cells_per_module + ci) *
                                     layout.gates.size() +
                                 g],
                       SignalClass::DefectCrossbarRow);
      }

  return net;
}

// ---------------------------------------------------------------------------
// Rent's-rule fit
// ---------------------------------------------------------------------------

enum class RentBasis : std::uint8_t { Qubits, DcGates };

/// One sweep point for the Rent analysis.
struct RentPoint {
  int modules_per_side = 0;
  int cells_per_module_side = 0;
  int defect_crossbars = 1;
  BoundaryCount lines;
};

struct RentFitOptions {
  RentBasis basis = RentBasis::Qubits;
  /// Count the constant plane-wide broadcast rails (shared pulse drives,
  /// demux address bus, readout bias) as terminals. Off by default: Rent's
  /// rule is conventionally fit on signal terminals, excluding clock- and
  /// supply-like nets, and these rails are exactly that — always-on drives
  /// shared by every cell regardless of array size.
  bool include_constant_rails = false;
};

/// Terminal count entering the Rent fit for one sweep point.
inline std::int64_t rent_terminal_count(const BoundaryCount& c,
                                        bool include_constant_rails) {
  if (include_constant_rails) return c.total();
  return c.total() - c[SignalClass::SharedPulsed] -
         c[SignalClass::DemuxAddress] - c[SignalClass::ReadoutSourceBias];
}

inline std::int64_t rent_gate_count(const RentPoint& pt, RentBasis basis,
                                    const UnitCellLayout& layout) {
  const std::int64_t cells = static_cast<std::int64_t>(pt.modules_per_side) *
                             pt.modules_per_side * pt.cells_per_module_side *
                             pt.cells_per_module_side;
  return basis == RentBasis::Qubits ? 4 * cells
                                    : layout.gate_count() * cells;
}

/// Result of the log-log least-squares fit T = k * G^p.
struct RentFitResult {
  double exponent = 0;   // p
  double prefactor = 0;  // k
  double residual_rms = 0;
  int points = 0;
};

inline RentFitResult rent_fit(const std::vector<RentPoint>& sweep,
                              const RentFitOptions& opt = {},
                              const UnitCellLayout& layout =
                                  UnitCellLayout::standard()) {
  if (sweep.size() < 3)
    throw FitError("rent fit needs at least 3 sweep points");
  std::vector<double> lx, ly;
  lx.reserve(sweep.size());
  ly.reserve(sweep.size());
  for (const auto& pt : sweep) {
    const auto g = rent_gate_count(pt, opt.basis, layout);
    const auto t = rent_terminal_count(pt.lines, opt.include_constant_rails);
    if (g <= 0 || t <= 0)
      throw FitError("rent fit needs positive gate and terminal counts");
    lx.push_back(std::log(static_cast<double>(g)));
    ly.push_back(std::log(static_cast<double>(t)));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx <= 0) throw FitError("rent fit needs distinct gate counts");
  RentFitResult r;
  r.exponent = sxy / sxx;
  r.prefactor = std::exp(my - r.exponent * mx);
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (std::log(r.prefactor) + r.exponent * lx[i]);
    ss += e * e;
  }
  r.residual_rms = std::sqrt(ss / n);
  r.points = static_cast<int>(lx.size());
  return r;
}

/// Closed-form sweep point (no graph construction; any size).
inline RentPoint rent_point_closed_form(const ArchParams& params,
                                        const UnitCellLayout& layout,
                                        const NetlistOptions& opt = {}) {
  RentPoint pt;
  pt.modules_per_side = params.modules_per_side;
  pt.cells_per_module_side = params.cells_per_module_side;
  pt.defect_crossbars = params.defect_crossbars;
  pt.lines = closed_form_lines(params, layout, opt);
  return pt;
}

/// Sweep point from an explicit netlist cut (the brute-force route).
inline RentPoint rent_point_from_netlist(const QuantumPlane& plane,
                                         const NetlistOptions& opt = {}) {
  RentPoint pt;
  pt.modules_per_side = plane.params().modules_per_side;
  pt.cells_per_module_side = plane.params().cells_per_module_side;
  pt.defect_crossbars = plane.params().defect_crossbars;
  pt.lines = count_boundary_lines(generate_netlist(plane, opt));
  return pt;
}

/// CSV emission for sweep points; one row per point.
inline void write_sweep_csv(std::ostream& os,
                            const std::vector<RentPoint>& sweep,
                            const UnitCellLayout& layout =
                                UnitCellLayout::standard(),
                            RentBasis basis = RentBasis::Qubits) {
  os << "M,N,x,G,T_total,T_rent";
  for (int i = 0; i < kSignalClassCount; ++i)
    os << "," << to_string(static_cast<SignalClass>(i));
  os << "\n";
  for (const auto& pt : sweep) {
    os << pt.modules_per_side << "," << pt.cells_per_module_side << ","
       << pt.defect_crossbars << "," << rent_gate_count(pt, basis, layout)
       << "," << pt.lines.total() << ","
       << rent_terminal_count(pt.lines, false);
    for (int i = 0; i < kSignalClassCount; ++i)
      os << "," << pt.lines.by_class[i];
    os << "\n";
  }
}

}  // namespace qplane
