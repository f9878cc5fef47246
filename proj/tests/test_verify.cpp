#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "wapf/error.hpp"
#include "wapf/gravity.hpp"
#include "wapf/monitor.hpp"
#include "wapf/transport.hpp"
#include "wapf/verify.hpp"

using namespace wapf;
using std::numbers::pi;

namespace {

FluidState uniform(const DomainSpec& d, double rho, std::array<double, 3> u, bool energy = false) {
  SpeciesFields s = make_species(d, energy);
  std::fill(s.rho.begin(), s.rho.end(), rho);
  for (int a = 0; a < d.dim; ++a) std::fill(s.mom[a].begin(), s.mom[a].end(), rho * u[a]);
  if (energy) std::fill(s.energy->begin(), s.energy->end(), 0.7 * rho);
  FluidState st;
  st.species.push_back(s);
  return st;
}

GravityConfig gravity_on(GravityBoundary b) {
  GravityConfig g;
  g.enabled = true;
  g.boundary = b;
  return g;
}

}  // namespace

TEST_CASE("test function gradients match finite differences and vanish outside the support") {
  for (int dim = 1; dim <= 3; ++dim) {
    DomainSpec d = oracle::domain(dim, 20, 0.1);
    for (const auto& psi : standard_test_functions(d)) {
      std::mt19937_64 rng(dim);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int n = 0; n < 50; ++n) {
        Point x{0, 0, 0};
        for (int a = 0; a < dim; ++a) x[a] = psi.center[a] + 0.9 * psi.half_extent[a] * u(rng);
        const Point g = psi.gradient(x);
        for (int a = 0; a < dim; ++a) {
          const double h = 1e-6;
          Point xp = x, xm = x;
          xp[a] += h;
          xm[a] -= h;
          CHECK(g[a] == doctest::Approx((psi.value(xp) - psi.value(xm)) / (2 * h)).epsilon(1e-5).scale(1e-3));
        }
        Point far = psi.center;
        far[0] += psi.half_extent[0] * (1.0 + 0.1 * std::abs(u(rng)));
        CHECK(psi.value(far) == 0.0);
        CHECK(psi.gradient(far)[0] == 0.0);
      }
    }
  }
}

TEST_CASE("the standard set holds a radial, a separable and a translated function") {
  DomainSpec d = oracle::domain(2, 20, 0.1);
  const auto set = standard_test_functions(d);
  REQUIRE(set.size() == 3);
  const auto& radial = set[0];
  const auto& shifted = set[2];
  // the translated copy is the radial bump moved by a fixed offset
  const Point shift{shifted.center[0] - radial.center[0], shifted.center[1] - radial.center[1], 0.0};
  const Point x{radial.center[0] + 0.1, radial.center[1] - 0.05, 0.0};
  const Point y{x[0] + shift[0], x[1] + shift[1], 0.0};
  CHECK(shifted.value(y) == doctest::Approx(radial.value(x)));
  CHECK(translated(radial, shift).value(y) == doctest::Approx(radial.value(x)));
}

TEST_CASE("uniform torus flow has vanishing weak residuals") {
  for (int dim = 1; dim <= 3; ++dim) {
    DomainSpec d = oracle::domain(dim, dim == 3 ? 16 : 40, 0.05);
    const auto st = uniform(d, 2.0, {0.8, -0.4, 0.3}, true);
    const auto cfg = gravity_on(GravityBoundary::TorusMeanSubtracted);
    GravitySolver solver(d, cfg);
    const auto field = solver.compute(st);
    auto rhs = transport_rhs(st, d);
    apply_gravity_source(rhs, st, field);
    for (const auto& psi : standard_test_functions(d)) {
      const auto rep = weak_residual(st, rhs, field, psi, d, cfg);
      const double scale = 2.0 * 0.8;
      CHECK(std::abs(rep.species[0].continuity) <= 1e-12 * scale);
      for (double m : rep.species[0].momentum) CHECK(std::abs(m) <= 1e-12 * scale);
      CHECK(std::abs(*rep.species[0].energy) <= 1e-12 * scale);
      CHECK(std::abs(rep.poisson) <= 1e-12);
      CHECK(rep.epsilon == d.epsilon);
    }
  }
}

TEST_CASE("residuals change continuously when the test function is translated") {
  ScenarioSpec spec;
  spec.name = ScenarioName::JeansCollapse2D;
  const auto d = scenario_domain(spec, 48);
  const auto setup = build_scenario(spec, d);
  GravitySolver solver(d, setup.gravity);
  const auto field = solver.compute(setup.state);
  auto rhs = transport_rhs(setup.state, d);
  apply_gravity_source(rhs, setup.state, field);
  const auto base = standard_test_functions(d)[0];
  auto residual = [&](double s) {
    return weak_residual(setup.state, rhs, field, translated(base, {s, 0.3 * s, 0.0}), d, setup.gravity);
  };
  const auto r0 = residual(0.0);
  double scale = 0.0;
  for (double s = 0.0; s <= d.epsilon; s += d.epsilon / 8) scale = std::max(scale, std::abs(residual(s).species[0].continuity));
  // a tenth of a cell moves the residual by a small fraction, not a jump
  const auto r1 = residual(0.1 * d.epsilon);
  CHECK(std::abs(r1.species[0].continuity - r0.species[0].continuity) <= 0.2 * scale + 1e-12);
  const auto r2 = residual(0.01 * d.epsilon);
  CHECK(std::abs(r2.species[0].continuity - r0.species[0].continuity) <=
        0.2 * std::abs(r1.species[0].continuity - r0.species[0].continuity) + 1e-12);
}

TEST_CASE("support and shape checks") {
  DomainSpec d = oracle::domain(2, 20, 0.1, Topology::OpenBox);
  const auto st = uniform(d, 1.0, {0.1, 0.1, 0});
  const auto rhs = transport_rhs(st, d);
  GravityField none;
  const auto edge = radial_bump({0.05, 1.0, 0.0}, 0.5, 2);
  try {
    weak_residual(st, rhs, none, edge, d, GravityConfig{});
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  DomainSpec t = oracle::domain(2, 20, 0.1);
  CHECK_THROWS_AS(weak_residual(st, rhs, none, radial_bump({1.0, 1.0, 0.0}, 1.5, 2), t, GravityConfig{}), Error);
  RhsOutput wrong = rhs;
  wrong.species[0].rho.pop_back();
  CHECK_THROWS_AS(weak_residual(st, wrong, none, radial_bump({1.0, 1.0, 0.0}, 0.5, 2), d, GravityConfig{}), Error);
}

TEST_CASE("order fit on exact power laws") {
  const std::vector<double> x{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> y;
  for (double e : x) y.push_back(3.0 * std::pow(e, 1.5));
  CHECK(fit_order(x, y) == doctest::Approx(1.5).epsilon(1e-12));
  y[2] = 0.0;
  CHECK(std::isnan(fit_order(x, y)));
}

TEST_CASE("uniform advection converges at first order") {
  ScenarioSpec spec;
  spec.name = ScenarioName::UniformAdvection;
  const auto series = convergence_study(spec, {1.0 / 50, 1.0 / 100, 1.0 / 200}, {0.25});
  REQUIRE(series.size() == 1);
  REQUIRE(series[0].rows.size() == 3);
  CHECK(series[0].order_rho >= 0.7);
  CHECK(series[0].order_rho <= 1.3);
  CHECK(series[0].monotone_rho);
  CHECK(std::isnan(series[0].order_poisson));
}

TEST_CASE("two-stream Riemann residuals decrease with epsilon") {
  ScenarioSpec spec;
  spec.name = ScenarioName::RiemannTwoStream;
  const auto series = convergence_study(spec, {1.0 / 50, 1.0 / 100, 1.0 / 200}, {0.1, 0.2});
  REQUIRE(series.size() == 2);
  for (const auto& s : series) {
    CHECK(s.monotone_rho);
    CHECK(s.monotone_mom);
  }
}

TEST_CASE("convergence study input checks and CSV layout") {
  ScenarioSpec spec;
  spec.name = ScenarioName::UniformAdvection;
  CHECK_THROWS_AS(convergence_study(spec, {0.02, 0.01}, {0.1}), Error);
  CHECK_THROWS_AS(convergence_study(spec, {0.01, 0.02, 0.005}, {0.1}), Error);
  const auto series = convergence_study(spec, {1.0 / 20, 1.0 / 40, 1.0 / 80}, {0.05, 0.1});
  std::ostringstream os;
  write_convergence_csv(os, series);
  std::istringstream is(os.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  REQUIRE(lines.size() == 1 + 2 * (3 + 1));
  CHECK(lines[0] == "epsilon,t,R_rho,R_mom,R_poisson");
  CHECK(lines[4].rfind("order,", 0) == 0);
  CHECK(lines[8].rfind("order,", 0) == 0);
}

TEST_CASE("monitor flags and purity") {
  DomainSpec d = oracle::domain(1, 32, 2 * pi / 32);
  FluidState st = oracle::random_state(d, 6, 1.0, 0.5, 1.5);
  GravityConfig g = gravity_on(GravityBoundary::TorusMeanSubtracted);
  GravitySolver solver(d, g);
  const auto field = solver.compute(st);
  const auto init = initial_stats(st, d, g, field);
  CHECK(init.mass == doctest::Approx(compensated_sum(st.species[0].rho) * d.epsilon));
  CHECK(init.K == doctest::Approx(8 * pi * g.G * init.mass + 2 * std::abs(field.integration_constant)));
  const FluidState copy = st;
  const auto a = monitor(st, field, d, init);
  const auto b = monitor(st, field, d, init);
  CHECK(st == copy);
  CHECK(a.violations() == 0);
  CHECK(a.max_speed == b.max_speed);
  CHECK(a.mass_total == b.mass_total);
  CHECK(a.max_gradphi <= init.K / 2);

  // more mass than at the start
  FluidState heavier = st;
  heavier.species[0].rho[0] *= 2;
  CHECK((monitor(heavier, field, d, init).violations() & kMassViolated) != 0);

  // a speed above the bound once gravity has had no time to act
  FluidState fast = st;
  fast.species[0].mom[0][3] = fast.species[0].rho[3] * (init.max_speed + 1.0);
  CHECK((monitor(fast, field, d, init).violations() & kVelocityViolated) != 0);

  GravityField strong = field;
  strong.grad_phi[0][5] = init.K;
  CHECK((monitor(st, strong, d, init).violations() & kGradPhiViolated) != 0);
}

TEST_CASE("gravity-free run keeps every monitor flag clear over many steps") {
  DomainSpec d = oracle::domain(2, 16, 0.1);
  const auto st = oracle::random_state(d, 17, 1.0, 0.2, 2.0);
  SolverConfig c;
  c.t_end = 5.0;
  const auto res = run(st, d, GravityConfig{}, c);
  CHECK(res.steps > 100);
  for (const auto& r : res.diagnostics) CHECK(r.violations() == 0);
}
