#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "oracles.hpp"
#include "wapf/error.hpp"
#include "wapf/integrate.hpp"
#include "wapf/monitor.hpp"
#include "wapf/nbody.hpp"
#include "wapf/scenarios.hpp"
#include "wapf/snapshot.hpp"

using namespace wapf;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("wapf_scen_" + name); }

std::string read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

void write_bytes(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
}

ScenarioSetup setup_of(ScenarioName name, std::optional<int> cells = std::nullopt, std::uint64_t seed = 0,
                       std::map<std::string, double> params = {}) {
  ScenarioSpec spec;
  spec.name = name;
  spec.seed = seed;
  spec.params = std::move(params);
  return build_scenario(spec, scenario_domain(spec, cells));
}

}  // namespace

TEST_CASE("mollified initial data sits on or above the floor") {
  const double eps = 0.01;
  Field ones(10, 1.0);
  const auto a = mollify_initial(ones, {Field(10, 0.5)}, eps);
  CHECK(a.species[0].rho == ones);
  for (double m : a.species[0].mom[0]) CHECK(m == 0.5);

  Field half(10, 0.0);
  for (int i = 5; i < 10; ++i) half[i] = 2.0;
  const auto b = mollify_initial(half, {Field(10, -1.0)}, eps);
  double l1 = 0.0;
  for (int i = 0; i < 10; ++i) {
    CHECK(b.species[0].rho[i] == (i < 5 ? eps : 2.0));
    CHECK(b.species[0].mom[0][i] / b.species[0].rho[i] == doctest::Approx(-1.0));
    l1 += std::abs(b.species[0].rho[i] - half[i]) * eps;
  }
  CHECK(l1 <= eps * 10 * eps);

  Field neg = ones;
  neg[3] = -0.1;
  CHECK_THROWS_AS(mollify_initial(neg, {Field(10, 0.0)}, eps), Error);
  Field nan_u(10, 0.0);
  nan_u[2] = std::nan("");
  CHECK_THROWS_AS(mollify_initial(ones, {nan_u}, eps), Error);
}

TEST_CASE("scenario names and parameter tables") {
  for (auto n : all_scenarios()) {
    CHECK(parse_scenario_name(scenario_name(n)) == n);
    bool has_cells = false;
    for (const auto& p : scenario_parameters(n)) {
      CHECK(p.value >= p.min);
      CHECK(p.value <= p.max);
      has_cells = has_cells || p.key == "cells";
    }
    CHECK(has_cells);
  }
  try {
    parse_scenario_name("no-such-thing");
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("delta-shock-1d") != std::string::npos);
  }
  ScenarioSpec spec;
  spec.name = ScenarioName::DeltaShock1D;
  spec.params["bogus"] = 1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.params = {{"rho", -1.0}};
  CHECK_THROWS_AS(spec.validate(), Error);
  CHECK(default_integrator(ScenarioName::RotatingDisk2D) == Integrator::ExactTransport2D);
  CHECK(default_integrator(ScenarioName::DeltaShock1D) == Integrator::RK4);
}

TEST_CASE("scenario grids follow cells and epsilon overrides") {
  ScenarioSpec spec;
  spec.name = ScenarioName::RiemannTwoStream;
  const auto a = scenario_domain(spec);
  CHECK(a.cells[0] == 200);
  CHECK(a.epsilon == doctest::Approx(1.0 / 200));
  CHECK(a.origin[0] == doctest::Approx(-0.5));
  CHECK(a.topology == Topology::OpenBox);
  const auto b = scenario_domain(spec, std::nullopt, 0.01);
  CHECK(b.cells[0] == 100);
  const auto c = scenario_domain(spec, 50);
  CHECK(c.epsilon == doctest::Approx(0.02));
  spec.name = ScenarioName::RotatingDisk2D;
  const auto d = scenario_domain(spec);
  CHECK(d.dim == 2);
  CHECK(d.cells[1] == 200);
  DomainSpec wrong = oracle::domain(1, 10, 0.1);
  CHECK_THROWS_AS(build_scenario(spec, wrong), Error);
}

TEST_CASE("every scenario builds deterministically from its seed") {
  for (auto n : all_scenarios()) {
    const std::optional<int> cells = n == ScenarioName::RotatingDisk2D || n == ScenarioName::JeansCollapse2D ||
                                             n == ScenarioName::NBodyCompare
                                         ? std::optional<int>(40)
                                         : std::nullopt;
    const auto a = setup_of(n, cells, 42), b = setup_of(n, cells, 42);
    CHECK(a.state == b.state);
    for (double r : a.state.species[0].rho) CHECK(r > 0.0);
  }
  const auto c = setup_of(ScenarioName::RotatingDisk2D, 40, 43);
  CHECK_FALSE(c.state == setup_of(ScenarioName::RotatingDisk2D, 40, 42).state);
}

TEST_CASE("rotating disk: noisy density inside the disk, rigid core at rest, floor outside") {
  ScenarioSpec spec;
  spec.name = ScenarioName::RotatingDisk2D;
  spec.seed = 42;
  const auto d = scenario_domain(spec, 100);
  const auto s = build_scenario(spec, d);
  CHECK(s.gravity.enabled);
  CHECK(s.gravity.boundary == GravityBoundary::FreeSpace);
  const double R = spec.param("radius"), rd = spec.param("rho_disk"), a = spec.param("noise");
  const double rc = spec.param("r_core"), v0 = spec.param("v0"), r0 = spec.param("r0");
  for (std::size_t c = 0; c < d.size(); ++c) {
    const auto ij = d.coords(c);
    const double x = d.center(0, ij[0]), y = d.center(1, ij[1]), r = std::hypot(x, y);
    const double rho = s.state.species[0].rho[c];
    const double ux = s.state.species[0].mom[0][c] / rho, uy = s.state.species[0].mom[1][c] / rho;
    if (r >= R) {
      CHECK(rho == d.epsilon);
      CHECK(ux == 0.0);
    } else {
      CHECK(rho >= rd * (1 - a));
      CHECK(rho <= rd * (1 + a));
      const double speed = std::hypot(ux, uy);
      CHECK(speed == doctest::Approx(r < rc ? 0.0 : v0 * std::min(r / r0, 1.0)).epsilon(1e-12));
      CHECK(std::abs(ux * x + uy * y) <= 1e-12 * (1 + speed * r));  // tangential
    }
  }
}

TEST_CASE("rotating disk without noise keeps its angular momentum") {
  ScenarioSpec spec;
  spec.name = ScenarioName::RotatingDisk2D;
  spec.params = {{"noise", 0.0}};
  const auto d = scenario_domain(spec, 80);
  const auto s = build_scenario(spec, d);
  auto angular = [&](const FluidState& st) {
    double L = 0.0;
    for (std::size_t c = 0; c < d.size(); ++c) {
      const auto ij = d.coords(c);
      L += d.center(0, ij[0]) * st.species[0].mom[1][c] - d.center(1, ij[1]) * st.species[0].mom[0][c];
    }
    return L * d.cell_volume();
  };
  SolverConfig cfg;
  cfg.integrator = Integrator::ExactTransport2D;
  cfg.cfl = default_cfl(cfg.integrator);
  cfg.t_end = 0.5;
  const auto res = run(s.state, d, s.gravity, cfg);
  // no mass has left the box yet
  CHECK(compensated_sum(res.final_state.species[0].rho) == doctest::Approx(compensated_sum(s.state.species[0].rho)).epsilon(1e-12));
  CHECK(angular(res.final_state) == doctest::Approx(angular(s.state)).epsilon(0.01));
}

TEST_CASE("delta shock: the concentration stays put and gains mass at the inflow rate") {
  ScenarioSpec spec;
  spec.name = ScenarioName::DeltaShock1D;
  const auto d = scenario_domain(spec, 201);
  const auto s = build_scenario(spec, d);
  const std::size_t mid = *d.locate({0.0, 0.0, 0.0});
  CHECK(s.state.species[0].mom[0][mid] == 0.0);
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.snapshot_every = 0.1;
  const auto res = run(s.state, d, s.gravity, cfg);
  const double m0 = 3 * d.epsilon * spec.param("rho");
  for (const auto& st : res.snapshots) {
    const auto& rho = st.species[0].rho;
    const std::size_t peak = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
    if (st.time > 0) CHECK(peak == mid);
    double window = 0.0;
    for (std::size_t i = mid - 1; i <= mid + 1; ++i) window += rho[i] * d.epsilon;
    CHECK(window == doctest::Approx(m0 + s.metadata.at("inflow_rate") * st.time).epsilon(0.05));
    // mirror symmetry
    for (std::size_t i = 1; i <= mid; ++i) CHECK(rho[mid - i] == doctest::Approx(rho[mid + i]).epsilon(1e-12));
  }
}

TEST_CASE("uniform advection error grows at most linearly from its first-step diffusion") {
  ScenarioSpec spec;
  spec.name = ScenarioName::UniformAdvection;
  const auto d = scenario_domain(spec, 100);
  const auto s = build_scenario(spec, d);
  const double c = spec.param("ux");
  auto l1_error = [&](const FluidState& st) {
    double e = 0.0;
    for (int i = 0; i < d.cells[0]; ++i) {
      // exact solution: the initial cell values translated by c t
      const double shift = c * st.time / d.epsilon;
      const double pos = i - shift;
      const int lo = static_cast<int>(std::floor(pos));
      const double w = pos - lo;
      const double exact = (1 - w) * oracle::at(s.state.species[0].rho, d, lo) + w * oracle::at(s.state.species[0].rho, d, lo + 1);
      e += std::abs(st.species[0].rho[i] - exact) * d.epsilon;
    }
    return e;
  };
  SolverConfig cfg;
  Stepper stepper(d, s.gravity, cfg);
  const double dt = choose_dt(s.state, stepper.field(s.state), cfg, d);
  const double rate = l1_error(stepper.step(s.state, dt)) / dt;
  cfg.t_end = 0.5;
  const auto res = run(s.state, d, s.gravity, cfg);
  CHECK(l1_error(res.final_state) <= 2 * rate * 0.5);
}

TEST_CASE("snapshot round trip is bit-identical") {
  auto s = setup_of(ScenarioName::TwoSpeciesWells1D, 64, 3);
  s.state.species.back().energy = Field(64, 0.125);
  s.state.time = 0.1 + 0.2;
  ScenarioSpec spec;
  spec.name = ScenarioName::TwoSpeciesWells1D;
  Snapshot snap{scenario_domain(spec, 64), s.state};
  const auto p = temp_path("round.wapf");
  write_snapshot(p, snap);
  const Snapshot back = read_snapshot(p);
  CHECK(back == snap);
  const auto p2 = temp_path("round2.wapf");
  write_snapshot(p2, back);
  CHECK(read_bytes(p) == read_bytes(p2));
  CHECK(read_bytes(p).substr(0, 4) == "WAPF");
  fs::remove(p2);

  // truncations name the missing section
  const std::string bytes = read_bytes(p);
  const std::pair<std::size_t, const char*> cuts[] = {{2, "magic"}, {10, "dim"}, {bytes.size() - 8, "energy"}};
  for (const auto& [len, section] : cuts) {
    write_bytes(p, bytes.substr(0, len));
    try {
      read_snapshot(p);
      FAIL("expected format error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Format);
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
      CHECK(std::string(e.what()).find(section) != std::string::npos);
    }
  }
  std::string bad_version = bytes;
  bad_version[4] = 9;
  write_bytes(p, bad_version);
  CHECK_THROWS_AS(read_snapshot(p), Error);
  write_bytes(p, bytes + "x");
  CHECK_THROWS_AS(read_snapshot(p), Error);
  fs::remove(p);
  try {
    read_snapshot(temp_path("does_not_exist.wapf"));
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("snapshot CSV has one row per cell") {
  ScenarioSpec spec;
  spec.name = ScenarioName::JeansCollapse2D;
  const auto d = scenario_domain(spec, 12);
  const Snapshot snap{d, build_scenario(spec, d).state};
  const auto p = temp_path("snap.csv");
  write_snapshot_csv(p, snap);
  std::ifstream f(p);
  std::string header, line;
  std::getline(f, header);
  std::size_t rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 144);
  CHECK(header.rfind("x,y,rho", 0) == 0);
  fs::remove(p);
}

TEST_CASE("star fraction of a deposited body") {
  DomainSpec d = oracle::domain(2, 30, 0.1, Topology::OpenBox);
  const double M = 5.0, f = 0.1;
  const auto st = bodies_to_fields({{M, {1.55, 1.45, 0}, {}}}, d, f);
  const double expected = (M + f * d.cell_volume() * 13) / (M + f * d.volume());
  CHECK(star_fraction(st, d, 2.0) == doctest::Approx(expected).epsilon(1e-13));
  // radius zero counts only the body cell
  CHECK(star_fraction(st, d, 0.0) == doctest::Approx((M + f * d.cell_volume()) / (M + f * d.volume())));
}

TEST_CASE("planet census separates the star from smaller peaks") {
  DomainSpec d = oracle::domain(2, 40, 0.1, Topology::OpenBox);
  const auto st = bodies_to_fields({{10.0, {2.0, 2.0, 0}, {}}, {2.0, {0.5, 0.5, 0}, {}}, {1.0, {3.5, 1.0, 0}, {}},
                                    {0.06, {1.0, 3.5, 0}, {}}},
                                   d, 0.1);
  const auto peaks = find_concentrations(st, d, 5.0);
  REQUIRE(peaks.size() == 4);
  CHECK(peaks[0].mass > peaks[1].mass);
  const auto census = planet_census(st, d, 5.0, 0.01);
  CHECK(census.star_fraction == doctest::Approx(peaks[0].fraction));
  REQUIRE(census.planets.size() == 2);
  CHECK(census.planets[0].position[0] == doctest::Approx(0.55));
  CHECK(census.planets[1].peak == doctest::Approx(0.1 + 1.0 / d.cell_volume()));
}
