#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "wapf/integrate.hpp"
#include "wapf/nbody.hpp"
#include "wapf/scenarios.hpp"

namespace wapf {

struct NBodyComparisonOptions {
  double t_end = 0.0;  // 0: a quarter of the default pair's period
  std::size_t samples = 8;
  std::size_t nbody_steps_per_sample = 1000;
  Integrator integrator = Integrator::RK4;
  std::optional<double> cfl;  // default 0.25 for RK4
  /// Extraction threshold; default max(10 floor, 1e-3 min mass / eps^dim).
  std::optional<double> threshold;
};

struct NBodyComparison {
  std::vector<double> times;
  std::vector<std::vector<Body>> nbody;  // per sample, in input order
  std::vector<std::vector<Body>> fluid;  // matched to nbody order; may be shorter if a body was lost
  double softening = 0.0;
  double epsilon = 0.0;
  double max_deviation = 0.0;  // max distance between matched positions
  double momentum_drift = 0.0;  // |P(t) - P(0)| / sum m |U|, N-body side
  bool all_found = true;
};

/// Evolves the nbody-compare scenario as a fluid (gravity FreeSpace,
/// softening eps^alpha) and as point bodies with the same force law; at each
/// sample the largest extracted concentrations are matched greedily to the
/// nearest N-body bodies.
NBodyComparison compare_nbody(const ScenarioSpec& spec, const DomainSpec& domain,
                              const NBodyComparisonOptions& options = {});

}  // namespace wapf
