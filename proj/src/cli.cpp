#include "wapf/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "wapf/compare.hpp"
#include "wapf/error.hpp"
#include "wapf/integrate.hpp"
#include "wapf/monitor.hpp"
#include "wapf/nbody.hpp"
#include "wapf/scenarios.hpp"
#include "wapf/snapshot.hpp"
#include "wapf/verify.hpp"

namespace wapf {

namespace {

namespace fs = std::filesystem;

const std::map<std::string, Integrator> kIntegrators = {
    {"euler", Integrator::Euler}, {"rk4", Integrator::RK4}, {"exact-transport-2d", Integrator::ExactTransport2D}};

// options shared by run and convergence
struct ScenarioFlags {
  std::string scenario;
  std::vector<std::string> params;  // key=value
  std::optional<double> alpha, G;
  std::uint64_t seed = 0;
  std::optional<std::string> integrator;  // default depends on the scenario
  std::optional<double> cfl;
};

Integrator pick_integrator(const ScenarioFlags& f, ScenarioName name) {
  return f.integrator ? kIntegrators.at(*f.integrator) : default_integrator(name);
}

void add_scenario_flags(CLI::App* app, ScenarioFlags& f, bool scenario_required = true) {
  std::vector<std::string> names;
  for (auto n : all_scenarios()) names.emplace_back(scenario_name(n));
  auto* opt = app->add_option("--scenario", f.scenario, "initial condition")->check(CLI::IsMember(names));
  if (scenario_required) opt->required();
  app->add_option("--param", f.params, "scenario parameter override key=value (repeatable)");
  app->add_option("--alpha", f.alpha, "mollifier exponent, softening = eps^alpha");
  app->add_option("--G", f.G, "gravitational constant");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--integrator", f.integrator, "euler | rk4 | exact-transport-2d (default: per scenario)")
      ->check(CLI::IsMember({"euler", "rk4", "exact-transport-2d"}));
  app->add_option("--cfl", f.cfl, "CFL number in (0, 1]");
}

ScenarioSpec make_spec(const ScenarioFlags& f) {
  ScenarioSpec spec;
  spec.name = parse_scenario_name(f.scenario);
  spec.seed = f.seed;
  for (const auto& kv : f.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Config, "--param expects key=value, got '" + kv + "'");
    double v = 0.0;
    try {
      v = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "--param " + kv + ": value is not a number");
    }
    spec.params[kv.substr(0, eq)] = v;
  }
  const auto& table = scenario_parameters(spec.name);
  auto has = [&](const char* key) {
    return std::any_of(table.begin(), table.end(), [&](const ParamInfo& p) { return p.key == key; });
  };
  if (f.alpha) {
    if (!has("alpha")) throw Error(ErrorKind::Config, "--alpha: scenario " + f.scenario + " has no gravity");
    spec.params["alpha"] = *f.alpha;
  }
  if (f.G) {
    if (!has("G")) throw Error(ErrorKind::Config, "--G: scenario " + f.scenario + " has no gravity");
    spec.params["G"] = *f.G;
  }
  spec.validate();
  return spec;
}

void write_diagnostics_header(std::ostream& os, int dim) {
  os << "step,t,dt,mass_total";
  for (int a = 0; a < dim; ++a) os << ",mom_" << "xyz"[a];
  os << ",min_rho,max_speed,max_gradphi,flags\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
  os << r.step << ',' << r.t << ',' << r.dt << ',' << r.mass_total;
  for (double m : r.momentum) os << ',' << m;
  os << ',' << r.min_rho << ',' << r.max_speed << ',' << r.max_gradphi << ',' << r.violations() << '\n';
}

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%05zu.wapf", k);
  return buf;
}

int cmd_run(const ScenarioFlags& f, std::optional<int> cells, std::optional<double> eps, std::optional<double> t_end,
            double snapshot_every, const std::string& out_dir, bool csv, std::ostream& out) {
  const ScenarioSpec spec = make_spec(f);
  const DomainSpec domain = scenario_domain(spec, cells, eps);
  const ScenarioSetup setup = build_scenario(spec, domain);
  SolverConfig solver;
  solver.integrator = pick_integrator(f, spec.name);
  solver.cfl = f.cfl.value_or(default_cfl(solver.integrator));
  if (t_end) {
    solver.t_end = *t_end;
  } else {
    const auto& table = scenario_parameters(spec.name);
    const bool documented = std::any_of(table.begin(), table.end(), [](const ParamInfo& p) { return p.key == "t_end"; });
    solver.t_end = documented ? spec.param("t_end") : 1.0;
  }
  solver.snapshot_every = snapshot_every;
  solver.seed = f.seed;
  solver.validate();
  if (solver.integrator == Integrator::ExactTransport2D && domain.dim != 2) {
    throw Error(ErrorKind::Config, "exact-transport-2d requires a 2-D scenario");
  }

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  std::ofstream diag(dir / "diagnostics.csv");
  if (!diag) throw Error(ErrorKind::Io, "cannot write " + (dir / "diagnostics.csv").string());
  diag << std::setprecision(17);
  write_diagnostics_header(diag, domain.dim);

  std::size_t nsnap = 0;
  RunObserver obs;
  obs.on_record = [&](const DiagnosticsRecord& r) { write_diagnostics_row(diag, r); };
  obs.on_snapshot = [&](const FluidState& s) {
    const Snapshot snap{domain, s};
    const fs::path p = dir / snapshot_name(nsnap++);
    write_snapshot(p, snap);
    if (csv) write_snapshot_csv(fs::path(p).replace_extension(".csv"), snap);
  };
  const RunResult res = run(setup.state, domain, setup.gravity, solver, obs, false);
  diag.flush();
  if (!diag) throw Error(ErrorKind::Io, "write failed: diagnostics.csv");
  out << "steps=" << res.steps << " snapshots=" << nsnap << " t=" << res.final_state.time
      << " star_fraction=" << star_fraction(res.final_state, domain) << '\n';
  return 0;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, std::string(what) + ": bad number '" + item + "'");
    }
  }
  return v;
}

// The config file is flat: keys without a section belong to the subcommand named on the command line.
class FlatConfig : public CLI::ConfigINI {
 public:
  explicit FlatConfig(std::string section) : section_(std::move(section)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    if (section_.empty()) return items;
    for (auto& item : items) {
      if (item.parents.empty() || (item.parents.size() == 1 && item.parents[0] == "default")) {
        item.parents = {section_};
      }
    }
    return items;
  }

 private:
  std::string section_;
};

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak asymptotic solver for pressureless and self-gravitating fluids", "wapf"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  ScenarioFlags run_flags;
  std::optional<int> cells;
  std::optional<double> eps;
  std::optional<double> t_end;
  double snapshot_every = 0.0;
  std::string out_dir = "out";
  bool csv = false;
  auto* run_cmd = app.add_subcommand("run", "evolve a scenario and write snapshots and diagnostics");
  add_scenario_flags(run_cmd, run_flags);
  run_cmd->add_option("--cells", cells, "cells per axis")->check(CLI::PositiveNumber);
  run_cmd->add_option("--epsilon", eps, "cell size")->check(CLI::PositiveNumber);
  run_cmd->add_option("--t-end", t_end, "duration (default: the scenario's t_end parameter, else 1)")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--snapshot-every", snapshot_every, "snapshot interval (0: first and last only)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--csv", csv, "also export every snapshot as CSV");

  ScenarioFlags conv_flags;
  std::string eps_list, t_list = "0.1", conv_out;
  auto* conv_cmd = app.add_subcommand("convergence", "weak-residual convergence study over epsilon");
  add_scenario_flags(conv_cmd, conv_flags);
  conv_cmd->add_option("--eps-list", eps_list, "comma-separated, strictly decreasing epsilons")->required();
  conv_cmd->add_option("--t-samples", t_list, "comma-separated sample times");
  conv_cmd->add_option("--out", conv_out, "CSV path (default: stdout)");

  std::string bodies_file, nb_out;
  std::optional<int> nb_cells;
  std::optional<double> nb_eps, nb_alpha, nb_G, nb_t;
  std::size_t nb_samples = 8;
  std::optional<double> nb_cfl;
  std::string nb_integrator = "rk4";
  auto* nb_cmd = app.add_subcommand("nbody-compare", "fluid vs point-body evolution of a few bodies in 2-D");
  nb_cmd->add_option("--bodies", bodies_file, "CSV m,x,y,ux,uy (default: circular equal pair)")
      ->check(CLI::ExistingFile);
  nb_cmd->add_option("--cells", nb_cells, "cells per axis")->check(CLI::PositiveNumber);
  nb_cmd->add_option("--epsilon", nb_eps, "cell size")->check(CLI::PositiveNumber);
  nb_cmd->add_option("--alpha", nb_alpha, "softening exponent");
  nb_cmd->add_option("--G", nb_G, "gravitational constant");
  nb_cmd->add_option("--t-end", nb_t, "duration (default: quarter orbit of the default pair)");
  nb_cmd->add_option("--samples", nb_samples, "comparison times")->check(CLI::PositiveNumber);
  nb_cmd->add_option("--cfl", nb_cfl, "CFL number of the fluid run");
  nb_cmd->add_option("--integrator", nb_integrator, "fluid integrator")
      ->check(CLI::IsMember({"euler", "rk4", "exact-transport-2d"}));
  nb_cmd->add_option("--out", nb_out, "CSV of matched positions (default: stdout)");

  std::string snap_file;
  double radius_cells = 2.0;
  auto* sf_cmd = app.add_subcommand("star-fraction", "mass fraction near the density maximum of a snapshot");
  sf_cmd->add_option("--snapshot", snap_file, "snapshot file")->required();
  sf_cmd->add_option("--radius-cells", radius_cells, "radius in cells")->check(CLI::NonNegativeNumber);

  std::string section;
  for (int i = 1; i < argc && section.empty(); ++i) {
    for (const auto* sub : app.get_subcommands({})) {
      if (sub->get_name() == argv[i]) section = argv[i];
    }
  }
  app.config_formatter(std::make_shared<FlatConfig>(section));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    out << std::setprecision(10);
    if (run_cmd->parsed()) return cmd_run(run_flags, cells, eps, t_end, snapshot_every, out_dir, csv, out);

    if (conv_cmd->parsed()) {
      const ScenarioSpec spec = make_spec(conv_flags);
      ConvergenceOptions opt;
      opt.integrator = pick_integrator(conv_flags, parse_scenario_name(conv_flags.scenario));
      opt.cfl = conv_flags.cfl;
      const auto series =
          convergence_study(spec, parse_list(eps_list, "--eps-list"), parse_list(t_list, "--t-samples"), {}, opt);
      if (!conv_out.empty()) {
        write_convergence_csv(conv_out, series);
      } else {
        write_convergence_csv(out, series);
      }
      for (const auto& s : series) {
        if (!s.monotone_rho || !s.monotone_mom) err << "warning: non-monotone residuals at t=" << s.t << '\n';
      }
      return 0;
    }

    if (nb_cmd->parsed()) {
      ScenarioSpec spec;
      spec.name = ScenarioName::NBodyCompare;
      if (nb_alpha) spec.params["alpha"] = *nb_alpha;
      if (nb_G) spec.params["G"] = *nb_G;
      if (!bodies_file.empty()) {
        int dim = 0;
        spec.bodies = read_bodies_csv(bodies_file, &dim);
        if (dim != 2) throw Error(ErrorKind::Config, "nbody-compare needs 2-D bodies (columns m,x,y,ux,uy)");
        if (!nb_t) throw Error(ErrorKind::Config, "--t-end is required with --bodies");
      }
      spec.validate();
      const DomainSpec domain = scenario_domain(spec, nb_cells, nb_eps);
      NBodyComparisonOptions opt;
      opt.t_end = nb_t.value_or(0.0);
      opt.samples = nb_samples;
      opt.cfl = nb_cfl;
      opt.integrator = kIntegrators.at(nb_integrator);
      const NBodyComparison cmp = compare_nbody(spec, domain, opt);
      std::ofstream file;
      if (!nb_out.empty()) {
        file.open(nb_out);
        if (!file) throw Error(ErrorKind::Io, "cannot write " + nb_out);
      }
      std::ostream& os = nb_out.empty() ? out : file;
      os << std::setprecision(12) << "t,body,nbody_x,nbody_y,fluid_x,fluid_y\n";
      for (std::size_t k = 0; k < cmp.times.size(); ++k)
        for (std::size_t i = 0; i < cmp.nbody[k].size(); ++i) {
          os << cmp.times[k] << ',' << i << ',' << cmp.nbody[k][i].r[0] << ',' << cmp.nbody[k][i].r[1];
          if (i < cmp.fluid[k].size()) {
            os << ',' << cmp.fluid[k][i].r[0] << ',' << cmp.fluid[k][i].r[1] << '\n';
          } else {
            os << ",,\n";
          }
        }
      out << "max_deviation=" << cmp.max_deviation << " (" << cmp.max_deviation / cmp.epsilon
          << " eps) momentum_drift=" << cmp.momentum_drift << '\n';
      return 0;
    }

    if (sf_cmd->parsed()) {
      const Snapshot snap = read_snapshot(snap_file);
      out << star_fraction(snap.state, snap.domain, radius_cells) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.category() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace wapf
