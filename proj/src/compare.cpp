#include "wapf/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wapf/error.hpp"

namespace wapf {

namespace {

double distance(const Body& a, const Body& b, int dim) {
  double d2 = 0.0;
  for (int k = 0; k < dim; ++k) d2 += (a.r[k] - b.r[k]) * (a.r[k] - b.r[k]);
  return std::sqrt(d2);
}

}  // namespace

NBodyComparison compare_nbody(const ScenarioSpec& spec, const DomainSpec& domain,
                              const NBodyComparisonOptions& options) {
  if (spec.name != ScenarioName::NBodyCompare) throw Error(ErrorKind::Config, "compare_nbody needs nbody-compare");
  if (options.samples == 0) throw Error(ErrorKind::Config, "compare_nbody: need at least one sample");
  const ScenarioSetup setup = build_scenario(spec, domain);
  const int dim = domain.dim;
  const double eps = domain.epsilon;
  double t_end = options.t_end;
  if (t_end <= 0.0) {
    auto it = setup.metadata.find("period");
    if (it == setup.metadata.end()) throw Error(ErrorKind::Config, "compare_nbody: t_end required for explicit bodies");
    t_end = 0.25 * it->second;
  }

  NBodyComparison out;
  out.softening = setup.metadata.at("softening");
  out.epsilon = eps;
  double min_mass = std::numeric_limits<double>::infinity();
  for (const auto& b : setup.bodies) min_mass = std::min(min_mass, b.mass);
  const double threshold =
      options.threshold.value_or(std::max(10.0 * eps, 1e-3 * min_mass / domain.cell_volume()));

  SolverConfig solver;
  solver.integrator = options.integrator;
  // RK4 stages are not positivity preserving next to a one-cell body; half
  // the usual CFL keeps the intermediate densities in check
  solver.cfl = options.cfl.value_or(options.integrator == Integrator::RK4 ? 0.25 : default_cfl(options.integrator));
  solver.t_end = t_end;
  solver.snapshot_every = t_end / static_cast<double>(options.samples);
  const RunResult fluid = run(setup.state, domain, setup.gravity, solver);

  std::vector<Body> bodies = setup.bodies;
  const auto p0 = total_momentum(bodies);
  double scale = 0.0;
  for (const auto& b : bodies) scale += b.mass * std::sqrt(b.U[0] * b.U[0] + b.U[1] * b.U[1] + b.U[2] * b.U[2]);
  double t_prev = 0.0;
  for (const FluidState& snap : fluid.snapshots) {
    const double t = snap.time;
    if (t > t_prev) {
      bodies = nbody_integrate(bodies, setup.gravity.G, out.softening, dim, t - t_prev,
                               options.nbody_steps_per_sample);
      t_prev = t;
    }
    std::vector<Body> found = extract_bodies(snap, domain, threshold);
    if (found.size() > bodies.size()) found.resize(bodies.size());
    // greedy nearest matching
    std::vector<Body> matched;
    std::vector<char> used(found.size(), 0);
    for (const auto& b : bodies) {
      std::size_t best = found.size();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < found.size(); ++j) {
        if (used[j]) continue;
        const double d = distance(b, found[j], dim);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best == found.size()) {
        out.all_found = false;
        continue;
      }
      used[best] = 1;
      matched.push_back(found[best]);
      out.max_deviation = std::max(out.max_deviation, best_d);
    }
    out.times.push_back(t);
    out.nbody.push_back(bodies);
    out.fluid.push_back(std::move(matched));
  }
  const auto p1 = total_momentum(bodies);
  double dp = 0.0;
  for (int k = 0; k < 3; ++k) dp += (p1[k] - p0[k]) * (p1[k] - p0[k]);
  out.momentum_drift = scale > 0.0 ? std::sqrt(dp) / scale : std::sqrt(dp);
  return out;
}

}  // namespace wapf
