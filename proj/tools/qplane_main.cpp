// qplane: parameterized model, netlist generator, resource estimator and
// protocol simulator for a sparse spin-qubit array with locally integrated
// control electronics.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qplane/arch.hpp"
#include "qplane/config.hpp"
#include "qplane/estimator.hpp"
#include "qplane/netlist.hpp"
#include "qplane/protocol.hpp"
#include "qplane/surgery.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasibleDesign = 2;
constexpr int kExitInfeasiblePattern = 3;

struct SweepSpec {
  std::vector<std::pair<int, int>> points;  // (M, N)
};

// Grammar: "M=N:2,4,8,16" | "M:2,4,8;N=1" | "N:2,4,8;M=2"
SweepSpec parse_sweep(const std::string& text) {
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
  };
  auto values = [&](const std::string& list) {
    std::vector<int> v;
    for (const auto& tok : split(list, ','))
      v.push_back(static_cast<int>(qplane::detail::parse_integer("sweep", tok)));
    return v;
  };
  SweepSpec spec;
  const auto parts = split(text, ';');
  if (parts.size() == 1 && parts[0].rfind("M=N:", 0) == 0) {
    for (int v : values(parts[0].substr(4))) spec.points.push_back({v, v});
    return spec;
  }
  if (parts.size() == 2) {
    auto var = parts[0];
    auto fixed = parts[1];
    const auto colon = var.find(':');
    const auto eq = fixed.find('=');
    if (colon != std::string::npos && eq != std::string::npos) {
      const std::string var_name = qplane::detail::trim(var.substr(0, colon));
      const std::string fixed_name =
          qplane::detail::trim(fixed.substr(0, eq));
      const int fixed_val = static_cast<int>(
          qplane::detail::parse_integer("sweep", fixed.substr(eq + 1)));
      if (var_name == "M" && fixed_name == "N") {
        for (int v : values(var.substr(colon + 1)))
          spec.points.push_back({v, fixed_val});
        return spec;
      }
      if (var_name == "N" && fixed_name == "M") {
        for (int v : values(var.substr(colon + 1)))
          spec.points.push_back({fixed_val, v});
        return spec;
      }
    }
  }
  throw qplane::ConfigError(
      "cannot parse sweep '" + text +
      "' (expected \"M=N:2,4,8\", \"M:2,4;N=1\" or \"N:2,4;M=1\")");
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qplane::ConfigError("cannot write file: " + path);
  out << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qplane::ConfigError("cannot read file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_boundary(std::ostream& os, const qplane::BoundaryCount& c) {
  for (int i = 0; i < qplane::kSignalClassCount; ++i)
    os << "  " << qplane::to_string(static_cast<qplane::SignalClass>(i)) << ": "
       << c.by_class[i] << "\n";
  os << "  total: " << c.total() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse spin-qubit array control-architecture model"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  int opt_m = 0, opt_n = 0, opt_x = 0;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--set", overrides, "override a config key (key=value)");
  app.add_option("-M,--modules", opt_m, "modules per plane side");
  app.add_option("-N,--cells", opt_n, "unit cells per module side");
  app.add_option("-x,--crossbars", opt_x, "defect crossbars");

  auto* cmd_estimate = app.add_subcommand("estimate", "resource report");
  bool est_json = false;
  std::int64_t est_qubits = 0;
  std::string est_sweep, est_csv;
  cmd_estimate->add_flag("--json", est_json, "emit JSON instead of text");
  cmd_estimate->add_option("--qubits", est_qubits,
                           "target qubit count (4*(MN)^2); overrides -M/-N");
  cmd_estimate->add_option("--sweep", est_sweep,
                           "sweep one config key: \"key:v1,v2,...\"");
  cmd_estimate->add_option("--csv", est_csv, "write sweep rows as CSV");

  auto* cmd_plane = app.add_subcommand("plane", "plane summary (JSON)");
  std::string plane_out;
  cmd_plane->add_option("--out", plane_out, "write to file instead of stdout");

  auto* cmd_netlist =
      app.add_subcommand("netlist", "generate the wiring graph");
  std::string nl_format = "json", nl_out;
  int nl_groups = 1;
  cmd_netlist->add_option("--format", nl_format, "dot|json")
      ->check(CLI::IsMember({"dot", "json"}));
  cmd_netlist->add_option("--out", nl_out, "graph output file");
  cmd_netlist->add_option("--readout-groups", nl_groups,
                          "drain groups per module");

  auto* cmd_rent = app.add_subcommand("rent", "Rent-exponent sweep and fit");
  std::string rent_sweep, rent_csv, rent_basis = "qubits";
  bool rent_graph = false, rent_rails = false;
  cmd_rent->add_option("--sweep", rent_sweep, "e.g. \"M=N:2,4,8,16\"")
      ->required();
  cmd_rent->add_option("--csv", rent_csv, "write sweep points as CSV");
  cmd_rent->add_option("--basis", rent_basis, "qubits|gates")
      ->check(CLI::IsMember({"qubits", "gates"}));
  cmd_rent->add_flag("--graph", rent_graph,
                     "count lines on explicit netlists instead of the closed "
                     "form");
  cmd_rent->add_flag("--include-constant-rails", rent_rails,
                     "count the constant broadcast rails as Rent terminals");

  auto* cmd_sim = app.add_subcommand("simulate", "protocol timelines");
  std::string sim_protocol, sim_out;
  std::vector<int> sim_from, sim_to;
  cmd_sim->add_option("--protocol", sim_protocol, "refresh|readout|cycle|shuttle")
      ->required()
      ->check(CLI::IsMember({"refresh", "readout", "cycle", "shuttle"}));
  cmd_sim->add_option("--out", sim_out,
                      "timeline file prefix (writes .csv and .json)");
  cmd_sim->add_option("--from", sim_from, "shuttle start vertex: row col")
      ->expected(2);
  cmd_sim->add_option("--to", sim_to, "shuttle end vertex: row col")
      ->expected(2);

  auto* cmd_defects = app.add_subcommand("defects", "crossbar defect cover");
  std::string def_pattern, def_protect;
  std::vector<int> def_grid;
  bool def_oracle = false, def_spill = false;
  cmd_defects->add_option("--pattern", def_pattern,
                          "JSON file: list of [row, col]")
      ->required();
  cmd_defects->add_option("--grid", def_grid, "grid rows cols (defaults to plane)")
      ->expected(2);
  cmd_defects->add_flag("--oracle", def_oracle,
                        "use the exhaustive oracle (small grids only)");
  cmd_defects->add_flag("--allow-spillover", def_spill,
                        "tolerate activations outside the pattern");
  cmd_defects->add_option("--protect", def_protect,
                          "JSON file of cells that must stay inactive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message / help text
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    qplane::Config cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw qplane::ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opt_m > 0) cfg.set("arch.modules_per_side", std::to_string(opt_m));
    if (opt_n > 0) cfg.set("arch.cells_per_module_side", std::to_string(opt_n));
    if (opt_x > 0) cfg.set("arch.defect_crossbars", std::to_string(opt_x));

    if (cmd_estimate->parsed()) {
      if (!est_sweep.empty()) {
        const auto colon = est_sweep.find(':');
        if (colon == std::string::npos)
          throw qplane::ConfigError("--sweep expects \"key:v1,v2,...\"");
        const std::string key = est_sweep.substr(0, colon);
        std::ostringstream csv;
        csv << "key,value,unit_cell_pF,capacitor_area_um2,total_area_um2,"
               "min_pitch_um,plane_area_mm2,remaining_mm2,n_max,feasible\n";
        std::stringstream vals(est_sweep.substr(colon + 1));
        std::string v;
        const auto layout = qplane::UnitCellLayout::standard();
        while (std::getline(vals, v, ',')) {
          qplane::Config point = cfg;
          point.set(key, v);
          point.validate();
          const auto rep =
              qplane::resource_report(point.arch, point.elec, layout);
          csv << key << "," << v << ","
              << qplane::as_picofarads(rep.unit_cell_capacitance) << ","
              << qplane::as_square_micrometers(rep.footprint.capacitor_area)
              << ","
              << qplane::as_square_micrometers(rep.footprint.total_area) << ","
              << qplane::as_micrometers(rep.footprint.min_pitch) << ","
              << qplane::as_square_millimeters(rep.plane.plane_area) << ","
              << qplane::as_square_millimeters(rep.plane.remaining_area) << ","
              << rep.module_limit.max_cells_per_side << ","
              << (rep.feasible ? 1 : 0) << "\n";
        }
        if (est_csv.empty())
          std::cout << csv.str();
        else {
          write_file(est_csv, csv.str());
          std::cout << "wrote " << est_csv << "\n";
        }
        return kExitOk;
      }
      if (est_qubits > 0) {
        // Only the product MN matters; realize the target as one module row.
        const auto probe =
            qplane::plane_area_report_for_qubits(cfg.arch, est_qubits);
        cfg.set("arch.modules_per_side", "1");
        cfg.set("arch.cells_per_module_side",
                std::to_string(static_cast<std::int64_t>(std::llround(
                    std::sqrt(static_cast<double>(probe.qubits) / 4.0)))));
      }
      cfg.validate();
      const auto layout = qplane::UnitCellLayout::standard();
      const auto report = qplane::resource_report(cfg.arch, cfg.elec, layout);
      if (est_json) {
        auto j = report.to_json();
        j["config"] = cfg.echo_json();
        std::cout << j.dump(2) << "\n";
      } else {
        report.print_text(std::cout);
        const auto assumed = cfg.assumed_defaults();
        if (!assumed.empty()) {
          std::cout << "assumed defaults:";
          for (const auto& k : assumed) std::cout << " " << k;
          std::cout << "\n";
        }
      }
      return report.feasible ? kExitOk : kExitInfeasibleDesign;
    }

    if (cmd_plane->parsed()) {
      cfg.validate();
      const auto plane = qplane::build_plane(cfg.arch);
      auto j = plane.summary_json();
      j["config"] = cfg.echo_json();
      const std::string text = j.dump(2) + "\n";
      if (plane_out.empty())
        std::cout << text;
      else
        write_file(plane_out, text);
      return kExitOk;
    }

    if (cmd_netlist->parsed()) {
      cfg.validate();
      const auto plane = qplane::build_plane(cfg.arch);
      qplane::NetlistOptions opt;
      opt.readout_groups_per_module = nl_groups;
      const auto net = qplane::generate_netlist(plane, opt);
      net.validate();
      const auto cut = qplane::count_boundary_lines(net);
      std::cout << "boundary lines (graph cut):\n";
      print_boundary(std::cout, cut);
      std::cout << "unit-cell line taps: "
                << qplane::unit_cell_line_taps(cfg.arch,
                                               plane.cell_layout(), opt)
                << "\n";
      if (!nl_out.empty()) {
        if (nl_format == "dot") {
          std::ostringstream os;
          net.to_dot(os);
          write_file(nl_out, os.str());
        } else {
          write_file(nl_out, net.to_json().dump(2) + "\n");
        }
        std::cout << "wrote " << nl_out << "\n";
      }
      return kExitOk;
    }

    if (cmd_rent->parsed()) {
      const auto spec = parse_sweep(rent_sweep);
      const auto layout = qplane::UnitCellLayout::standard();
      std::vector<qplane::RentPoint> points;
      for (auto [m, n] : spec.points) {
        qplane::ArchParams p = cfg.arch;
        p.modules_per_side = m;
        p.cells_per_module_side = n;
        if (rent_graph)
          points.push_back(
              qplane::rent_point_from_netlist(qplane::build_plane(p)));
        else
          points.push_back(qplane::rent_point_closed_form(p, layout));
      }
      qplane::RentFitOptions fopt;
      fopt.basis = rent_basis == "gates" ? qplane::RentBasis::DcGates
                                         : qplane::RentBasis::Qubits;
      fopt.include_constant_rails = rent_rails;
      const auto fit = qplane::rent_fit(points, fopt, layout);
      std::cout << "points: " << fit.points << "\n"
                << "basis: " << rent_basis << "\n"
                << "rent_exponent_p: " << fit.exponent << "\n"
                << "prefactor_k: " << fit.prefactor << "\n"
                << "residual_rms: " << fit.residual_rms << "\n";
      if (!rent_csv.empty()) {
        std::ostringstream os;
        qplane::write_sweep_csv(os, points, layout, fopt.basis);
        write_file(rent_csv, os.str());
        std::cout << "wrote " << rent_csv << "\n";
      }
      return kExitOk;
    }

    if (cmd_sim->parsed()) {
      cfg.validate();
      const auto layout = qplane::UnitCellLayout::standard();
      {
        const auto assumed = cfg.assumed_defaults();
        if (!assumed.empty()) {
          std::cout << "assumed defaults:";
          for (const auto& k : assumed) std::cout << " " << k;
          std::cout << "\n";
        }
      }
      auto emit_timeline = [&](const qplane::EventTimeline& tl) {
        if (sim_out.empty()) return;
        std::ostringstream csv;
        tl.to_csv(csv);
        write_file(sim_out + ".csv", csv.str());
        auto j = tl.to_json();
        j["config"] = cfg.echo_json();
        write_file(sim_out + ".json", j.dump(2) + "\n");
        std::cout << "wrote " << sim_out << ".csv, " << sim_out << ".json\n";
      };
      if (sim_protocol == "refresh") {
        const auto rep =
            qplane::refresh_schedule(cfg.arch, cfg.elec, layout);
        std::cout << "refresh_period_s: " << rep.refresh_period.si() << "\n"
                  << "worst_droop_fine_V: " << rep.worst_droop_fine.si() << "\n"
                  << "worst_droop_coarse_V: " << rep.worst_droop_coarse.si()
                  << "\n"
                  << "budget_fine_V: " << rep.budget_fine.si() << "\n"
                  << "within_budget: " << (rep.within_budget ? "yes" : "NO")
                  << "\n";
        emit_timeline(rep.timeline);
      } else if (sim_protocol == "readout") {
        const auto rep = qplane::readout_schedule(cfg.arch, cfg.timing);
        std::cout << "group_cells_R: " << rep.group_cells << "\n"
                  << "groups: " << rep.groups << "\n"
                  << "duration_s: " << rep.duration.si() << "\n"
                  << "extra_drain_lines_per_module: "
                  << rep.extra_drain_lines_per_module << "\n";
        emit_timeline(rep.timeline);
      } else if (sim_protocol == "cycle") {
        const auto rep = qplane::surface_code_cycle(cfg.arch, cfg.timing);
        std::cout << "cycle_period_s: " << rep.period.si() << "\n";
        for (const auto& ph : rep.timeline.phases)
          std::cout << "phase_" << ph.name << "_s: " << ph.duration.si()
                    << "\n";
        std::cout << "dominant_phase: " << rep.dominant_phase << "\n"
                  << "extra_drain_lines_per_module: "
                  << rep.readout.extra_drain_lines_per_module << "\n";
        emit_timeline(rep.timeline);
      } else {  // shuttle
        const auto plane = qplane::build_plane(cfg.arch);
        const qplane::Time per_arm =
            qplane::arm_transit_time(cfg.arch, cfg.timing);
        std::cout << "arm_transit_s: " << per_arm.si() << "\n";
        if (!sim_from.empty() && !sim_to.empty()) {
          const auto route = qplane::shuttle_route(
              plane, {sim_from[0], sim_from[1]}, {sim_to[0], sim_to[1]},
              cfg.timing);
          std::cout << "hops: " << route.hops() << "\n"
                    << "duration_s: " << route.duration.si() << "\n"
                    << "path:";
          for (const auto& v : route.steps)
            std::cout << " (" << v.row << "," << v.col << ")";
          std::cout << "\n";
        }
      }
      return kExitOk;
    }

    if (cmd_defects->parsed()) {
      qplane::CrossbarGrid grid;
      if (!def_grid.empty()) {
        grid.rows = def_grid[0];
        grid.cols = def_grid[1];
      } else {
        cfg.validate();
        grid = qplane::CrossbarGrid::for_plane(cfg.arch);
      }
      const int budget = cfg.arch.defect_crossbars;  // -x sets it
      const auto pattern = qplane::DefectPattern::from_json(
          nlohmann::json::parse(read_file(def_pattern)));
      qplane::RealizeOptions opts;
      opts.allow_spillover = def_spill;
      if (!def_protect.empty()) {
        const auto protect = qplane::DefectPattern::from_json(
            nlohmann::json::parse(read_file(def_protect)));
        opts.protected_cells = protect.cells;
      }
      const auto result =
          def_oracle ? qplane::realizable_oracle(pattern, budget, grid, opts)
                     : qplane::realizable(pattern, budget, grid, opts);
      nlohmann::ordered_json j;
      j["schema"] = "qplane.defects/1";
      j["grid"] = {{"rows", grid.rows}, {"cols", grid.cols}};
      j["crossbar_budget"] = budget;
      j["allow_spillover"] = opts.allow_spillover;
      j["pattern"] = pattern.to_json();
      j["feasible"] = result.has_value();
      if (result) {
        j["assignment"] = result->to_json();
        j["activation"] =
            qplane::crossbar_activation(*result, grid).to_json();
      }
      std::cout << j.dump(2) << "\n";
      return result ? kExitOk : kExitInfeasiblePattern;
    }

    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const qplane::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
