#include <doctest.h>

#include "qplane/arch.hpp"

using namespace qplane;

namespace {
ArchParams params(int m, int n) {
  ArchParams p;
  p.modules_per_side = m;
  p.cells_per_module_side = n;
  return p;
}
}  // namespace

TEST_CASE("smallest plane: one module, one cell, four qubits") {
  const auto plane = build_plane(params(1, 1));
  CHECK(plane.module_count() == 1);
  CHECK(plane.cell_count() == 1);
  CHECK(plane.qubit_count() == 4);
  CHECK(plane.vertex_grid_side() == 2);
  CHECK(plane.arm_count() == 4);
}

TEST_CASE("qubit count is 4 M^2 N^2") {
  CHECK(build_plane(params(2, 16)).qubit_count() == 4096);
  // MN = 512 is the 2^20-qubit flagship configuration
  CHECK(build_plane(params(1, 512)).qubit_count() == (1 << 20));
  CHECK(build_plane(params(2, 256)).qubit_count() == (1 << 20));
  for (int m = 1; m <= 8; ++m)
    for (int n = 1; n <= 8; ++n)
      CHECK(build_plane(params(m, n)).qubit_count() ==
            4ll * m * m * n * n);
}

TEST_CASE("invalid parameters name the violated invariant") {
  CHECK_THROWS_WITH_AS(build_plane(params(0, 1)),
                       "modules_per_side must be >= 1", ValidationError);
  CHECK_THROWS_WITH_AS(build_plane(params(1, 0)),
                       "cells_per_module_side must be >= 1", ValidationError);
  ArchParams p = params(1, 1);
  p.fine_resolution = millivolts(2);
  CHECK_THROWS_AS(build_plane(p), ValidationError);
  p = params(1, 1);
  p.qubit_pitch = micrometers(-1);
  CHECK_THROWS_AS(build_plane(p), ValidationError);
}

TEST_CASE("arm gate count is pitch ratio and must be integral") {
  CHECK(params(1, 1).arm_gate_count() == 240);  // 12 um / 50 nm
  ArchParams p = params(1, 1);
  p.qubit_pitch = micrometers(1);
  p.gate_pitch = micrometers(1);
  CHECK(p.arm_gate_count() == 1);
  p.qubit_pitch = micrometers(10);
  p.gate_pitch = nanometers(50);
  CHECK(p.arm_gate_count() == 200);
  p.qubit_pitch = micrometers(10);
  p.gate_pitch = nanometers(300);  // 33.33 gates
  CHECK_THROWS_AS((void)p.arm_gate_count(), ValidationError);
}

TEST_CASE("geometry matches the closed forms") {
  const Geometry g1 = geometry(params(1, 512));
  CHECK(as_square_micrometers(g1.unit_cell_area) == doctest::Approx(576.0));
  CHECK(as_micrometers(g1.unit_cell_perimeter) == doctest::Approx(96.0));
  CHECK(as_square_millimeters(g1.plane_area) ==
        doctest::Approx(150.994944).epsilon(1e-9));

  ArchParams unit = params(1, 1);
  unit.qubit_pitch = micrometers(1);
  unit.gate_pitch = micrometers(1);
  const Geometry gu = geometry(unit);
  CHECK(as_square_micrometers(gu.module_area) == doctest::Approx(4.0));
  CHECK(as_micrometers(gu.module_perimeter) == doctest::Approx(8.0));

  // plane = M^2 modules exactly, across a few sizes
  for (int m : {1, 2, 3, 5})
    for (int n : {1, 2, 4}) {
      const Geometry g = geometry(params(m, n));
      CHECK(g.plane_area.si() ==
            doctest::Approx(m * m * g.module_area.si()).epsilon(1e-12));
      CHECK(g.module_area.si() ==
            doctest::Approx(n * n * g.unit_cell_area.si()).epsilon(1e-12));
    }
}

TEST_CASE("lattice connectivity: nearest neighbors, no wraparound") {
  const auto plane = build_plane(params(2, 2));
  const int s = plane.vertex_grid_side();
  CHECK(s == 8);
  int degree_sum = 0;
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) {
      const int d = plane.degree({r, c});
      CHECK(d <= 4);
      const bool interior = r > 0 && r < s - 1 && c > 0 && c < s - 1;
      if (interior) CHECK(d == 4);
      CHECK(d == static_cast<int>(plane.neighbors({r, c}).size()));
      degree_sum += d;
    }
  CHECK(degree_sum == 2 * plane.arm_count());
  CHECK_THROWS_AS((void)plane.degree({-1, 0}), ValidationError);
}

TEST_CASE("data/ancilla coloring is a balanced checkerboard") {
  const auto plane = build_plane(params(1, 3));
  const int s = plane.vertex_grid_side();
  std::int64_t data = 0;
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) data += QuantumPlane::is_data({r, c});
  CHECK(data == plane.data_qubit_count());
  // every 2x2 cell holds two data and two ancilla qubits
  CHECK(QuantumPlane::is_data({0, 0}));
  CHECK(!QuantumPlane::is_data({0, 1}));
  CHECK(!QuantumPlane::is_data({1, 0}));
  CHECK(QuantumPlane::is_data({1, 1}));
  // and the cell-local site roles agree with the global coloring
  CHECK(UnitCellLayout::site_hosts_data(0));
  CHECK(!UnitCellLayout::site_hosts_data(1));
  CHECK(!UnitCellLayout::site_hosts_data(2));
  CHECK(UnitCellLayout::site_hosts_data(3));
}

TEST_CASE("standard unit cell inventory") {
  const auto layout = UnitCellLayout::standard();
  CHECK(layout.gate_count() == 64);
  CHECK(layout.coarse_count() == 32);
  CHECK(layout.fine_count() == 32);
  // 49 pulsed-gate lines + 1 mw line; the sensor plunger is demux-routed
  CHECK(layout.shared_pulse_gate_count() == 50);
  int vertex_barriers = 0, sensors = 0, mw = 0, j = 0;
  for (const auto& g : layout.gates) {
    vertex_barriers += g.kind == GateKind::VertexBarrier;
    sensors += g.kind == GateKind::SensorPlunger;
    mw += g.kind == GateKind::PulsedMW;
    j += g.kind == GateKind::PulsedJ;
  }
  CHECK(vertex_barriers == 16);
  CHECK(sensors == 1);
  CHECK(mw == 1);
  CHECK(j == 3);
  // vertex barriers carry coarse bias; every gate is classified
  for (const auto& g : layout.gates)
    if (g.kind == GateKind::VertexBarrier)
      CHECK(g.resolution == BiasResolution::Coarse);
}

TEST_CASE("plane construction is deterministic") {
  const auto a = build_plane(params(2, 3)).summary_json().dump();
  const auto b = build_plane(params(2, 3)).summary_json().dump();
  CHECK(a == b);
}
