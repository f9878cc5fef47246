#include "wapf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "wapf/error.hpp"

namespace wapf {

namespace {

// (1 - s^2)^4 and d/ds divided by s: -8 (1 - s^2)^3
double bump(double s2) { return s2 < 1.0 ? std::pow(1.0 - s2, 4) : 0.0; }
double bump_slope_over_s(double s2) { return s2 < 1.0 ? -8.0 * std::pow(1.0 - s2, 3) : 0.0; }

void check_support(const TestFunction& psi, const DomainSpec& domain) {
  for (int a = 0; a < domain.dim; ++a) {
    const double lo = domain.origin[a], hi = lo + domain.length(a);
    const double h = psi.half_extent[a];
    if (domain.topology == Topology::OpenBox) {
      if (psi.center[a] - h < lo || psi.center[a] + h > hi) {
        throw Error(ErrorKind::Domain, "test function '" + psi.name + "' support leaves the box along axis " +
                                           std::to_string(a));
      }
    } else if (2.0 * h > domain.length(a)) {
      throw Error(ErrorKind::Domain, "test function '" + psi.name + "' support does not fit the torus");
    }
  }
}

double rss(double acc) { return std::sqrt(acc); }

}  // namespace

TestFunction radial_bump(const Point& center, double radius, int dim) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidValue, "radial_bump: radius must be positive");
  TestFunction f;
  f.name = "radial";
  f.center = center;
  for (int a = 0; a < dim; ++a) f.half_extent[a] = radius;
  const double inv_r2 = 1.0 / (radius * radius);
  f.value = [=](const Point& x) {
    double s2 = 0.0;
    for (int a = 0; a < dim; ++a) s2 += (x[a] - center[a]) * (x[a] - center[a]);
    return bump(s2 * inv_r2);
  };
  f.gradient = [=](const Point& x) {
    double s2 = 0.0;
    for (int a = 0; a < dim; ++a) s2 += (x[a] - center[a]) * (x[a] - center[a]);
    const double k = bump_slope_over_s(s2 * inv_r2) * inv_r2;
    Point g{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) g[a] = k * (x[a] - center[a]);
    return g;
  };
  return f;
}

TestFunction separable_bump(const Point& center, const Point& half_widths, int dim) {
  for (int a = 0; a < dim; ++a)
    if (!(half_widths[a] > 0.0)) throw Error(ErrorKind::InvalidValue, "separable_bump: widths must be positive");
  TestFunction f;
  f.name = "separable";
  f.center = center;
  for (int a = 0; a < dim; ++a) f.half_extent[a] = half_widths[a];
  f.value = [=](const Point& x) {
    double p = 1.0;
    for (int a = 0; a < dim; ++a) {
      const double s = (x[a] - center[a]) / half_widths[a];
      p *= bump(s * s);
    }
    return p;
  };
  f.gradient = [=](const Point& x) {
    double v[3] = {1.0, 1.0, 1.0}, dv[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      const double s = (x[a] - center[a]) / half_widths[a];
      v[a] = bump(s * s);
      dv[a] = bump_slope_over_s(s * s) * s / half_widths[a];
    }
    Point g{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      double p = dv[a];
      for (int b = 0; b < dim; ++b)
        if (b != a) p *= v[b];
      g[a] = p;
    }
    return g;
  };
  return f;
}

TestFunction translated(const TestFunction& psi, const Point& shift) {
  TestFunction f;
  f.name = psi.name + "+shift";
  for (int a = 0; a < 3; ++a) f.center[a] = psi.center[a] + shift[a];
  f.half_extent = psi.half_extent;
  auto back = [shift](const Point& x) { return Point{x[0] - shift[0], x[1] - shift[1], x[2] - shift[2]}; };
  f.value = [v = psi.value, back](const Point& x) { return v(back(x)); };
  f.gradient = [g = psi.gradient, back](const Point& x) { return g(back(x)); };
  return f;
}

std::vector<TestFunction> standard_test_functions(const DomainSpec& domain) {
  const int dim = domain.dim;
  double L = std::numeric_limits<double>::infinity();
  Point mid{0.0, 0.0, 0.0}, c1{0.0, 0.0, 0.0}, c2{0.0, 0.0, 0.0}, shift{0.0, 0.0, 0.0}, h{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) L = std::min(L, domain.length(a));
  for (int a = 0; a < dim; ++a) {
    mid[a] = domain.origin[a] + 0.5 * domain.length(a);
    c1[a] = mid[a] + 0.05 * L;
    c2[a] = mid[a] - 0.03 * L;
    h[a] = 0.35 * L;
    shift[a] = (a == 0 ? 0.11 : -0.07) * L;
  }
  TestFunction radial = radial_bump(c1, 0.3 * L, dim);
  return {radial, separable_bump(c2, h, dim), translated(radial, shift)};
}

ResidualReport weak_residual(const FluidState& state, const RhsOutput& rhs, const GravityField& field,
                             const TestFunction& psi, const DomainSpec& domain, const GravityConfig& gravity) {
  check_shape(state, domain);
  if (rhs.species.size() != state.species.size()) throw Error(ErrorKind::Shape, "weak_residual: species mismatch");
  for (const auto& s : rhs.species) check_shape(s, domain);
  check_support(psi, domain);
  const int dim = domain.dim;
  const std::size_t n = domain.size();
  const double vol = domain.cell_volume();

  // psi at every cell center; its gradient is the centered difference of
  // those samples, so that summation by parts against the flux is exact
  Field w(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto ijk = domain.coords(c);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      double d = domain.center(a, ijk[a]) - psi.center[a];
      if (domain.topology == Topology::Torus) {
        const double L = domain.length(a);
        d -= L * std::round(d / L);
      }
      x[a] = psi.center[a] + d;
    }
    w[c] = psi.value(x);
  }
  std::vector<Field> dw(static_cast<std::size_t>(dim), Field(n, 0.0));
  for (int a = 0; a < dim; ++a) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto up = domain.neighbor(c, a, +1), dn = domain.neighbor(c, a, -1);
      // the support stays off the walls, so a missing neighbor holds psi = 0
      dw[a][c] = ((up ? w[*up] : 0.0) - (dn ? w[*dn] : 0.0)) / (2.0 * domain.epsilon);
    }
  }

  ResidualReport rep;
  rep.epsilon = domain.epsilon;
  rep.time = state.time;
  const bool grav = gravity.enabled && !field.grad_phi.empty();
  for (std::size_t s = 0; s < state.species.size(); ++s) {
    const auto& sp = state.species[s];
    const auto& d = rhs.species[s];
    const auto u = recover_velocity(sp, state.time);
    SpeciesResidual r;
    Field acc(n);
    for (std::size_t c = 0; c < n; ++c) {
      double flux = 0.0;
      for (int b = 0; b < dim; ++b) flux += sp.mom[b][c] * dw[b][c];
      acc[c] = d.rho[c] * w[c] - flux;
    }
    r.continuity = compensated_sum(acc) * vol;
    for (int a = 0; a < dim; ++a) {
      for (std::size_t c = 0; c < n; ++c) {
        double flux = 0.0;
        for (int b = 0; b < dim; ++b) flux += sp.mom[a][c] * u[b][c] * dw[b][c];
        double src = grav ? sp.rho[c] * field.grad_phi[a][c] * w[c] : 0.0;
        acc[c] = d.mom[a][c] * w[c] - flux + src;
      }
      r.momentum.push_back(compensated_sum(acc) * vol);
    }
    if (sp.energy) {
      if (!d.energy) throw Error(ErrorKind::Shape, "weak_residual: energy derivative missing");
      for (std::size_t c = 0; c < n; ++c) {
        double flux = 0.0;
        for (int b = 0; b < dim; ++b) flux += (*sp.energy)[c] * u[b][c] * dw[b][c];
        acc[c] = (*d.energy)[c] * w[c] - flux;
      }
      r.energy = compensated_sum(acc) * vol;
    }
    rep.species.push_back(std::move(r));
  }

  if (grav) {
    const Field rho = total_density(state);
    double mean = 0.0;
    if (gravity.boundary == GravityBoundary::TorusMeanSubtracted) mean = compensated_sum(rho) / static_cast<double>(n);
    const double four_pi_g = 4.0 * std::numbers::pi * gravity.G;
    Field acc(n);
    for (std::size_t c = 0; c < n; ++c) {
      if (w[c] == 0.0) {
        acc[c] = 0.0;
        continue;
      }
      double div = 0.0;
      for (int a = 0; a < dim; ++a) {
        const Field& g = field.grad_phi[a];
        const auto up = domain.neighbor(c, a, +1), dn = domain.neighbor(c, a, -1);
        if (up && dn) {
          div += (g[*up] - g[*dn]) / (2.0 * domain.epsilon);
        } else if (up) {
          div += (g[*up] - g[c]) / domain.epsilon;
        } else if (dn) {
          div += (g[c] - g[*dn]) / domain.epsilon;
        }
      }
      acc[c] = (div - four_pi_g * (rho[c] - mean)) * w[c];
    }
    rep.poisson = compensated_sum(acc) * vol;
  }
  return rep;
}

double fit_order(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::Shape, "fit_order: need matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<ConvergenceSeries> convergence_study(const ScenarioSpec& scenario, const std::vector<double>& eps_list,
                                                 const std::vector<double>& t_samples,
                                                 const std::vector<TestFunction>& psi,
                                                 const ConvergenceOptions& options) {
  if (eps_list.size() < 3) throw Error(ErrorKind::Config, "convergence study needs at least three epsilons");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw Error(ErrorKind::Config, "epsilon list must be strictly decreasing");
  if (t_samples.empty()) throw Error(ErrorKind::Config, "convergence study needs at least one sample time");
  std::vector<double> times = t_samples;
  std::sort(times.begin(), times.end());
  if (times.front() < 0.0) throw Error(ErrorKind::Config, "sample times must be non-negative");

  std::vector<ConvergenceSeries> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) out[k].t = times[k];

  for (double eps : eps_list) {
    const DomainSpec domain = scenario_domain(scenario, std::nullopt, eps);
    ScenarioSetup setup = build_scenario(scenario, domain);
    if (options.alpha && setup.gravity.enabled) setup.gravity.alpha = *options.alpha;
    SolverConfig solver;
    solver.integrator = options.integrator;
    solver.cfl = options.cfl.value_or(default_cfl(options.integrator));
    solver.dt_max = options.dt_max;
    const std::vector<TestFunction> tests = psi.empty() ? standard_test_functions(domain) : psi;

    FluidState state = setup.state;
    Stepper stepper(domain, setup.gravity, solver);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double remaining = times[k] - state.time;
      if (remaining > 0.0) {
        solver.t_end = remaining;
        state = run(state, domain, setup.gravity, solver, {}, false).final_state;
      }
      const GravityField field = stepper.field(state);
      const RhsOutput rhs = stepper.rhs(state, &field);
      double rho2 = 0.0, mom2 = 0.0, poi2 = 0.0;
      for (const auto& f : tests) {
        const ResidualReport rep = weak_residual(state, rhs, field, f, domain, setup.gravity);
        for (const auto& s : rep.species) {
          rho2 += s.continuity * s.continuity;
          for (double m : s.momentum) mom2 += m * m;
        }
        poi2 += rep.poisson * rep.poisson;
      }
      out[k].rows.push_back({eps, state.time, rss(rho2), rss(mom2), rss(poi2)});
    }
    if (!setup.gravity.enabled)
      for (auto& s : out) s.order_poisson = std::numeric_limits<double>::quiet_NaN();
  }

  for (auto& s : out) {
    std::vector<double> e, r, m, p;
    for (const auto& row : s.rows) {
      e.push_back(row.epsilon);
      r.push_back(row.R_rho);
      m.push_back(row.R_mom);
      p.push_back(row.R_poisson);
    }
    s.order_rho = fit_order(e, r);
    s.order_mom = fit_order(e, m);
    s.order_poisson = std::isnan(s.order_poisson) ? s.order_poisson : fit_order(e, p);
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
      s.monotone_rho = s.monotone_rho && r[i] < r[i - 1];
      s.monotone_mom = s.monotone_mom && m[i] < m[i - 1];
      s.monotone_poisson = s.monotone_poisson && p[i] < p[i - 1];
    }
  }
  return out;
}

void write_convergence_csv(std::ostream& f, const std::vector<ConvergenceSeries>& series) {
  const auto old = f.precision(17);
  f << "epsilon,t,R_rho,R_mom,R_poisson\n";
  for (const auto& s : series) {
    for (const auto& r : s.rows) f << r.epsilon << ',' << r.t << ',' << r.R_rho << ',' << r.R_mom << ',' << r.R_poisson << '\n';
    f << "order," << s.t << ',' << s.order_rho << ',' << s.order_mom << ',' << s.order_poisson << '\n';
  }
  f.precision(old);
}

void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceSeries>& series) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_convergence_csv(f, series);
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace wapf
