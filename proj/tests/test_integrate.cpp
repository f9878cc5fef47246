#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "wapf/error.hpp"
#include "wapf/integrate.hpp"
#include "wapf/scenarios.hpp"

using namespace wapf;

namespace {

GravityField zero_field(const DomainSpec& d) {
  GravityField f;
  f.grad_phi.assign(d.dim, Field(d.size(), 0.0));
  return f;
}

FluidState uniform(const DomainSpec& d, double rho, std::array<double, 3> u) {
  SpeciesFields s = make_species(d);
  std::fill(s.rho.begin(), s.rho.end(), rho);
  for (int a = 0; a < d.dim; ++a) std::fill(s.mom[a].begin(), s.mom[a].end(), rho * u[a]);
  FluidState st;
  st.species.push_back(s);
  return st;
}

SolverConfig solver(Integrator i, double t_end = 1.0) {
  SolverConfig c;
  c.integrator = i;
  c.cfl = default_cfl(i);
  c.t_end = t_end;
  return c;
}

GravityConfig torus_gravity(double G = 1.0) {
  GravityConfig g;
  g.enabled = true;
  g.G = G;
  g.boundary = GravityBoundary::TorusMeanSubtracted;
  return g;
}

}  // namespace

TEST_CASE("time step from the locality condition") {
  DomainSpec d = oracle::domain(1, 10, 0.1);
  SolverConfig c;
  c.cfl = 0.5;
  CHECK(choose_dt(uniform(d, 1.0, {2.0, 0, 0}), zero_field(d), c, d) == doctest::Approx(0.025));
  CHECK(choose_dt(uniform(d, 1.0, {-2.0, 0, 0}), zero_field(d), c, d) == doctest::Approx(0.025));

  // all motion and gravity zero: only the cap remains
  c.dt_max = 0.3;
  CHECK(choose_dt(uniform(d, 1.0, {0, 0, 0}), zero_field(d), c, d) == 0.3);
  c.dt_max.reset();
  // both floors at 1e-30; the gravity one binds first
  CHECK(choose_dt(uniform(d, 1.0, {0, 0, 0}), zero_field(d), c, d) == doctest::Approx(0.5 * std::sqrt(0.1 / 1e-30)));

  // gravity limiter sqrt(eps / Gamma)
  DomainSpec g = oracle::domain(1, 10, 0.01);
  GravityField f = zero_field(g);
  f.grad_phi[0][3] = -100.0;
  c.cfl = 1.0;
  CHECK(choose_dt(uniform(g, 1.0, {0.5, 0, 0}), f, c, g) == doctest::Approx(0.01));
  CHECK(choose_dt(uniform(g, 1.0, {2.0, 0, 0}), f, c, g) == doctest::Approx(0.005));

  // in several dimensions the speeds of one cell add up
  DomainSpec d2 = oracle::domain(2, 4, 0.1);
  c.cfl = 1.0;
  CHECK(choose_dt(uniform(d2, 1.0, {1.0, -1.0, 0}), zero_field(d2), c, d2) == doctest::Approx(0.05));
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  for (double bad : {0.0, -0.1, 1.5}) {
    c.cfl = bad;
    try {
      c.validate();
      FAIL("expected config error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Config);
    }
  }
  c.cfl = 1.0;
  c.t_end = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(default_cfl(Integrator::RK4) == 0.5);
  CHECK(default_cfl(Integrator::Euler) == 0.9);

  DomainSpec d = oracle::domain(1, 8, 0.1);
  CHECK_THROWS_AS(Stepper(d, GravityConfig{}, solver(Integrator::ExactTransport2D)), Error);
}

TEST_CASE("a uniform fluid at rest is a fixed point of every integrator") {
  for (auto integ : {Integrator::Euler, Integrator::RK4, Integrator::ExactTransport2D}) {
    DomainSpec d = oracle::domain(2, 8, 0.125);
    const auto st = uniform(d, 1.5, {0, 0, 0});
    Stepper s(d, torus_gravity(), solver(integ));
    const auto next = s.step(st, 0.1);
    CHECK(next.species == st.species);
    CHECK(next.time == doctest::Approx(0.1));
  }
}

TEST_CASE("Euler with dt = eps moves a unit-speed flow by exactly one cell") {
  DomainSpec d = oracle::domain(1, 16, 1.0 / 16);
  FluidState st = uniform(d, 1.0, {1.0, 0, 0});
  for (int i = 0; i < 16; ++i) {
    st.species[0].rho[i] = 1.0 + 0.5 * std::sin(0.4 * i);
    st.species[0].mom[0][i] = st.species[0].rho[i];
  }
  const auto next = step(st, d, GravityConfig{}, solver(Integrator::Euler), d.epsilon);
  for (int i = 0; i < 16; ++i) {
    CHECK(next.species[0].rho[(i + 1) % 16] == doctest::Approx(st.species[0].rho[i]).epsilon(1e-15));
    CHECK(next.species[0].mom[0][(i + 1) % 16] == doctest::Approx(st.species[0].mom[0][i]).epsilon(1e-15));
  }
}

TEST_CASE("a step that empties a cell is reported as a positivity violation") {
  DomainSpec d = oracle::domain(1, 8, 0.1);
  const auto st = oracle::random_state(d, 3, 1.0, 0.5, 1.0);
  const double U = oracle::max_abs_velocity(st);
  CHECK_THROWS_AS(step(st, d, GravityConfig{}, solver(Integrator::Euler), 3.0 * d.epsilon / U), PositivityError);
}

TEST_CASE("1000 self-gravitating RK4 steps conserve mass on the torus") {
  DomainSpec d = oracle::domain(2, 16, 2 * 3.141592653589793 / 16);
  auto st = oracle::random_state(d, 12, 0.5, 0.5, 1.5);
  Stepper s(d, torus_gravity(0.5), solver(Integrator::RK4));
  const double m0 = compensated_sum(st.species[0].rho);
  for (int n = 0; n < 1000; ++n) {
    const auto f = s.field(st);
    st = s.step(st, choose_dt(st, f, s.solver_config(), d), &f);
  }
  CHECK(std::abs(compensated_sum(st.species[0].rho) - m0) <= 1e-10 * m0);
}

TEST_CASE("Euler keeps density positive under the locality bound") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DomainSpec d = oracle::domain(seed % 3 + 1, seed % 3 == 2 ? 6 : 12, 0.1,
                                  seed % 2 ? Topology::OpenBox : Topology::Torus);
    FluidState st = oracle::random_state(d, 900 + seed, 2.0, 1e-4, 2.0);
    SolverConfig c = solver(Integrator::Euler, 0.5);
    CHECK_NOTHROW(run(st, d, GravityConfig{}, c));
  }
}

TEST_CASE("gravity-free runs respect the velocity maximum principle") {
  for (auto integ : {Integrator::Euler, Integrator::RK4, Integrator::ExactTransport2D}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      DomainSpec d = oracle::domain(2, 12, 0.1);
      const auto st = oracle::random_state(d, 40 + seed, 1.0, 0.2, 2.0);
      const double u0 = oracle::max_abs_velocity(st);
      const auto res = run(st, d, GravityConfig{}, solver(integ, 0.5));
      for (const auto& r : res.diagnostics) {
        CHECK(r.max_speed <= u0 * (1 + 1e-8));
        CHECK(r.velocity_ok);
      }
    }
  }
}

TEST_CASE("run with t_end = 0 returns only the initial snapshot") {
  DomainSpec d = oracle::domain(1, 8, 0.1);
  const auto st = oracle::random_state(d, 1);
  const auto res = run(st, d, GravityConfig{}, solver(Integrator::RK4, 0.0));
  REQUIRE(res.snapshots.size() == 1);
  CHECK(res.snapshots[0] == st);
  CHECK(res.steps == 0);
  CHECK(res.final_state == st);
}

TEST_CASE("snapshots land exactly on the requested cadence") {
  DomainSpec d = oracle::domain(1, 20, 0.05);
  const auto st = oracle::random_state(d, 2);
  SolverConfig c = solver(Integrator::RK4, 1.0);
  c.snapshot_every = 0.25;
  const auto res = run(st, d, GravityConfig{}, c);
  REQUIRE(res.snapshots.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(res.snapshots[k].time == doctest::Approx(0.25 * k).epsilon(1e-12));
  CHECK(res.diagnostics.size() == res.steps + 1);
  CHECK(res.diagnostics.back().dt == 0.0);
}

TEST_CASE("runs are bit-for-bit reproducible") {
  ScenarioSpec spec;
  spec.name = ScenarioName::GravityCollapse1D;
  const auto d = scenario_domain(spec, 64);
  const auto setup = build_scenario(spec, d);
  const auto a = run(setup.state, d, setup.gravity, solver(Integrator::RK4, 0.3));
  const auto b = run(setup.state, d, setup.gravity, solver(Integrator::RK4, 0.3));
  CHECK(a.final_state == b.final_state);
  CHECK(a.snapshots == b.snapshots);
}

TEST_CASE("the two-stream Riemann problem runs to t = 0.5 without losing positivity") {
  ScenarioSpec spec;
  spec.name = ScenarioName::RiemannTwoStream;
  const auto d = scenario_domain(spec);
  const auto setup = build_scenario(spec, d);
  for (auto integ : {Integrator::Euler, Integrator::RK4}) {
    RunResult res;
    CHECK_NOTHROW(res = run(setup.state, d, setup.gravity, solver(integ, 0.5)));
    CHECK(res.final_state.time == doctest::Approx(0.5));
  }
}

TEST_CASE("finite-time 2-D step carries the gravity kick") {
  DomainSpec d = oracle::domain(2, 16, 2 * 3.141592653589793 / 16);
  FluidState st = uniform(d, 1.0, {0, 0, 0});
  for (std::size_t c = 0; c < d.size(); ++c) st.species[0].rho[c] += 0.2 * std::cos(d.center(0, d.coords(c)[0]));
  Stepper s(d, torus_gravity(), solver(Integrator::ExactTransport2D));
  const double dt = 1e-3;
  const auto next = s.step(st, dt);
  // at rest the transport part is the identity, so the kick is the whole change
  const auto f = s.field(st);
  for (std::size_t c = 0; c < d.size(); ++c)
    CHECK(next.species[0].mom[0][c] == doctest::Approx(-dt * st.species[0].rho[c] * f.grad_phi[0][c]).epsilon(1e-12));
}
