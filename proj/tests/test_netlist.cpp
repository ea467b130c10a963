#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "qplane/netlist.hpp"

using namespace qplane;

namespace {
ArchParams params(int m, int n, int x = 1) {
  ArchParams p;
  p.modules_per_side = m;
  p.cells_per_module_side = n;
  p.defect_crossbars = x;
  return p;
}

// Log-log least squares written out independently of rent_fit.
double local_loglog_slope(const std::vector<std::pair<double, double>>& pts) {
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) {
    sxy += (std::log(x) - mx) * (std::log(y) - my);
    sxx += (std::log(x) - mx) * (std::log(x) - mx);
  }
  return sxy / sxx;
}
}  // namespace

TEST_CASE("single-cell plane: brute-force cut reproduces every class") {
  const auto net = generate_netlist(build_plane(params(1, 1)));
  net.validate();
  const auto cut = count_boundary_lines(net);
  CHECK(cut[SignalClass::DcBiasInput] == 1);
  CHECK(cut[SignalClass::DemuxAddress] == 4);
  CHECK(cut[SignalClass::DemuxEnable] == 4);
  CHECK(cut[SignalClass::SharedPulsed] == 58);
  CHECK(cut[SignalClass::DefectCrossbarRow] == 2);
  CHECK(cut[SignalClass::DefectCrossbarCol] == 1);
  CHECK(cut[SignalClass::ReadoutDrain] == 1);
  CHECK(cut[SignalClass::ReadoutAddress] == 0);  // 2*ceil(log2 1)
  CHECK(cut[SignalClass::ReadoutSourceBias] == 1);
  CHECK(cut.total() == 72);
}

TEST_CASE("defect crossbar lines: 2MN rows + MN columns per crossbar") {
  const auto cut =
      count_boundary_lines(generate_netlist(build_plane(params(2, 2, 1))));
  CHECK(cut[SignalClass::DefectCrossbarRow] +
            cut[SignalClass::DefectCrossbarCol] ==
        12);  // 3 * M * N with one crossbar
  const auto cut2 =
      count_boundary_lines(generate_netlist(build_plane(params(2, 2, 2))));
  CHECK(cut2[SignalClass::DefectCrossbarRow] +
            cut2[SignalClass::DefectCrossbarCol] ==
        24);
}

TEST_CASE("shared pulsed lines stay at 58 for every plane size") {
  for (auto [m, n] : {std::pair{1, 1}, {1, 4}, {3, 2}, {4, 4}}) {
    const auto cut =
        count_boundary_lines(generate_netlist(build_plane(params(m, n))));
    CHECK(cut[SignalClass::SharedPulsed] == 58);
  }
  CHECK(closed_form_lines(params(7, 31))[SignalClass::SharedPulsed] == 58);
}

TEST_CASE("doubling M at fixed N quadruples the DC input count") {
  const auto a =
      count_boundary_lines(generate_netlist(build_plane(params(2, 3))));
  const auto b =
      count_boundary_lines(generate_netlist(build_plane(params(4, 3))));
  CHECK(b[SignalClass::DcBiasInput] == 4 * a[SignalClass::DcBiasInput]);
}

TEST_CASE("closed form equals the brute-force cut (sampled sizes)") {
  // The full 1..6 x {1,2} grid runs in the acceptance suite.
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; n <= 4; ++n)
      for (int x : {1, 2}) {
        const auto p = params(m, n, x);
        const auto cut = count_boundary_lines(generate_netlist(build_plane(p)));
        const auto closed = closed_form_lines(p);
        CHECK(cut == closed);
      }
}

TEST_CASE("closed-form algebra") {
  // N = 1 kills the readout address term
  CHECK(closed_form_lines(params(3, 1))[SignalClass::ReadoutAddress] == 0);
  // M -> 2M at fixed N grows the DC class by 3 M^2
  const auto a = closed_form_lines(params(3, 5));
  const auto b = closed_form_lines(params(6, 5));
  const auto dc = [](const BoundaryCount& c) {
    return c[SignalClass::DcBiasInput] + c[SignalClass::DemuxAddress] +
           c[SignalClass::DemuxEnable];
  };
  CHECK(dc(b) - dc(a) == 3 * 3 * 3);
}

TEST_CASE("boundary totals are monotone in M, N and x") {
  auto total = [](int m, int n, int x) {
    return closed_form_lines(params(m, n, x)).total();
  };
  for (int m = 1; m <= 6; ++m)
    for (int n = 1; n <= 6; ++n)
      for (int x = 1; x <= 2; ++x) {
        CHECK(total(m + 1, n, x) >= total(m, n, x));
        CHECK(total(m, n + 1, x) >= total(m, n, x));
        CHECK(total(m, n, x + 1) >= total(m, n, x));
      }
}

TEST_CASE("readout partitioning adds drain lines per module") {
  NetlistOptions opt;
  opt.readout_groups_per_module = 3;
  const auto plane = build_plane(params(2, 3));
  const auto cut = count_boundary_lines(generate_netlist(plane, opt));
  CHECK(cut[SignalClass::ReadoutDrain] == 3 * 4);
  CHECK(cut == closed_form_lines(plane.params(), opt));
}

TEST_CASE("graph sanity: structure validates, cuts need boundary flags") {
  const auto net = generate_netlist(build_plane(params(2, 2)));
  CHECK_NOTHROW(net.validate());

  Netlist broken;
  const auto a = broken.add_node("a", NodeKind::RemoteSource, Side::Outside);
  const auto b = broken.add_node("b", NodeKind::Gate, Side::Unset);
  broken.add_edge(a, b, SignalClass::DcBiasInput);
  CHECK_THROWS_AS((void)count_boundary_lines(broken), StructuralError);
  CHECK_THROWS_AS(broken.add_edge(5, 0, SignalClass::DcBiasInput),
                  StructuralError);
}

TEST_CASE("empty netlist counts nothing") {
  const Netlist net;
  CHECK(count_boundary_lines(net).total() == 0);
}

TEST_CASE("dot export labels the drain port once on the smallest plane") {
  const auto net = generate_netlist(build_plane(params(1, 1)));
  std::ostringstream os;
  net.to_dot(os);
  const std::string dot = os.str();
  CHECK(dot.rfind("digraph", 0) == 0);
  std::size_t count = 0, pos = 0;
  while ((pos = dot.find("port:readout-drain", pos)) != std::string::npos) {
    ++count;
    pos += 1;
  }
  CHECK(count == 1);
  // invocations are deterministic
  std::ostringstream os2;
  net.to_dot(os2);
  CHECK(dot == os2.str());
}

TEST_CASE("json export round-trips byte-identically") {
  const auto net = generate_netlist(build_plane(params(1, 2)));
  const std::string first = net.to_json().dump(2);
  const auto reimported = Netlist::from_json(nlohmann::json::parse(first));
  CHECK(reimported.to_json().dump(2) == first);
  CHECK(count_boundary_lines(reimported) == count_boundary_lines(net));
  CHECK_NOTHROW(reimported.validate());
}

TEST_CASE("json import rejects malformed graphs") {
  auto parse = [](const char* text) {
    return Netlist::from_json(nlohmann::json::parse(text));
  };
  CHECK_THROWS_AS((void)parse(R"({"schema":"other/9"})"), StructuralError);
  CHECK_THROWS_AS(
      (void)parse(
          R"({"schema":"qplane.netlist/1",
              "nodes":[{"id":0,"label":"a","kind":"teapot","side":"inside","strap":1}],
              "edges":[]})"),
      StructuralError);
  CHECK_THROWS_AS(
      (void)parse(
          R"({"schema":"qplane.netlist/1",
              "nodes":[{"id":1,"label":"a","kind":"gate","side":"inside","strap":1}],
              "edges":[]})"),
      StructuralError);  // ids must be dense
  CHECK_THROWS_AS(
      (void)parse(
          R"({"schema":"qplane.netlist/1",
              "nodes":[{"id":0,"label":"a","kind":"gate","side":"inside","strap":1}],
              "edges":[{"src":0,"dst":4,"sig":"dc-bias-input","sub":"none"}]})"),
      StructuralError);  // dangling edge
}

TEST_CASE("oversized planes are refused with a pointer to the closed form") {
  CHECK_THROWS_AS((void)generate_netlist(build_plane(params(16, 16))),
                  SizeError);
}

TEST_CASE("rent fit: balanced sweep approaches the square-root law") {
  const auto layout = UnitCellLayout::standard();
  std::vector<RentPoint> pts;
  std::vector<std::pair<double, double>> local;
  for (int v : {2, 4, 8, 16}) {
    // cuts for the small sizes are oracle-verified elsewhere; the closed
    // form is the same numbers at any size
    const auto pt = rent_point_closed_form(params(v, v), layout);
    pts.push_back(pt);
    local.push_back(
        {static_cast<double>(4ll * v * v * v * v),
         static_cast<double>(rent_terminal_count(pt.lines, false))});
  }
  const auto fit = rent_fit(pts);
  CHECK(fit.exponent ==
        doctest::Approx(local_loglog_slope(local)).epsilon(1e-12));
  CHECK(fit.exponent > 0.45);
  CHECK(fit.exponent < 0.55);
  CHECK(fit.points == 4);

  // the balanced path converges to p = 0.5 as the sweep grows
  double prev_err = 1.0;
  for (int top = 16; top <= 256; top *= 2) {
    std::vector<RentPoint> sweep;
    for (int v = 2; v <= top; v *= 2)
      sweep.push_back(rent_point_closed_form(params(v, v), layout));
    const double err = std::abs(rent_fit(sweep).exponent - 0.5);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("rent fit: fixed-N sweep is dominated by the quadratic classes") {
  const auto layout = UnitCellLayout::standard();
  std::vector<RentPoint> pts;
  std::vector<std::pair<double, double>> local;
  for (int m : {2, 4, 8, 16}) {
    // oracle route: cut of the explicit graph
    const auto pt = rent_point_from_netlist(build_plane(params(m, 1)));
    pts.push_back(pt);
    local.push_back(
        {static_cast<double>(4ll * m * m),
         static_cast<double>(rent_terminal_count(pt.lines, false))});
  }
  const auto fit = rent_fit(pts);
  CHECK(fit.exponent ==
        doctest::Approx(local_loglog_slope(local)).epsilon(1e-12));
  CHECK(fit.exponent > 0.7);
  CHECK(fit.exponent <= 1.0);

  // larger sweeps push it toward p = 1
  std::vector<RentPoint> big;
  for (int m : {8, 16, 32, 64, 128})
    big.push_back(rent_point_closed_form(params(m, 1), layout));
  CHECK(rent_fit(big).exponent > 0.9);
}

TEST_CASE("rent fit: constant-only netlist gives p near zero") {
  // hypothetical netlist carrying only the shared pulsed rails
  std::vector<RentPoint> pts;
  for (int v : {2, 4, 8, 16}) {
    RentPoint pt;
    pt.modules_per_side = v;
    pt.cells_per_module_side = v;
    pt.lines[SignalClass::SharedPulsed] = 58;
    pts.push_back(pt);
  }
  RentFitOptions opt;
  opt.include_constant_rails = true;
  const auto fit = rent_fit(pts, opt);
  CHECK(std::abs(fit.exponent) < 1e-12);
}

TEST_CASE("rent fit input validation") {
  const auto layout = UnitCellLayout::standard();
  std::vector<RentPoint> two{rent_point_closed_form(params(2, 2), layout),
                             rent_point_closed_form(params(4, 4), layout)};
  CHECK_THROWS_AS((void)rent_fit(two), FitError);
  std::vector<RentPoint> flat{rent_point_closed_form(params(2, 2), layout),
                              rent_point_closed_form(params(2, 2), layout),
                              rent_point_closed_form(params(2, 2), layout)};
  CHECK_THROWS_AS((void)rent_fit(flat), FitError);
}

TEST_CASE("rent fit is independent of sweep-point order") {
  const auto layout = UnitCellLayout::standard();
  std::vector<RentPoint> fwd, rev;
  for (int v : {2, 4, 8, 16})
    fwd.push_back(rent_point_closed_form(params(v, v), layout));
  rev.assign(fwd.rbegin(), fwd.rend());
  const auto a = rent_fit(fwd);
  const auto b = rent_fit(rev);
  CHECK(a.exponent == doctest::Approx(b.exponent).epsilon(1e-14));
  CHECK(a.prefactor == doctest::Approx(b.prefactor).epsilon(1e-14));
}

TEST_CASE("a unit cell taps a wire bundle in the hundreds") {
  const auto layout = UnitCellLayout::standard();
  // 1 dc + 4 address + 4 enable + 58 shared + 3x defect + drain + bias +
  // sensor feed
  CHECK(unit_cell_line_taps(params(2, 2, 1), layout) == 73);
  CHECK(unit_cell_line_taps(params(2, 2, 3), layout) == 79);
  const auto taps = unit_cell_line_taps(params(4, 4, 2), layout);
  CHECK(taps >= 70);
  CHECK(taps < 1000);
}

TEST_CASE("sweep csv carries the documented columns") {
  const auto layout = UnitCellLayout::standard();
  std::vector<RentPoint> pts{rent_point_closed_form(params(2, 2), layout),
                             rent_point_closed_form(params(4, 4), layout)};
  std::ostringstream os;
  write_sweep_csv(os, pts, layout);
  const std::string csv = os.str();
  CHECK(csv.rfind("M,N,x,G,T_total,T_rent,dc-bias-input,", 0) == 0);
  CHECK(csv.find("\n2,2,1,64,") != std::string::npos);
}
