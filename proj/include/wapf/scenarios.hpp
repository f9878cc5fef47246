#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"
#include "wapf/gravity.hpp"
#include "wapf/integrate.hpp"
#include "wapf/nbody.hpp"

namespace wapf {

enum class ScenarioName {
  UniformAdvection,
  RiemannTwoStream,
  DeltaShock1D,
  GravityCollapse1D,
  RotatingDisk2D,
  TwoSpeciesWells1D,
  NBodyCompare,
  JeansCollapse2D,
};

/// Kebab-case name used on the command line, e.g. "delta-shock-1d".
std::string_view scenario_name(ScenarioName name);
/// Throws Error(Config) for unknown names.
ScenarioName parse_scenario_name(std::string_view text);
std::vector<ScenarioName> all_scenarios();

/// Integrator a scenario is documented with: the finite-time 2-D step for the
/// disk, RK4 otherwise.
Integrator default_integrator(ScenarioName name);

struct ParamInfo {
  std::string key;
  double value;  // default
  double min;
  double max;
  std::string help;
};

/// Documented parameter table of a scenario (defaults and accepted ranges).
const std::vector<ParamInfo>& scenario_parameters(ScenarioName name);

struct ScenarioSpec {
  ScenarioName name = ScenarioName::UniformAdvection;
  std::map<std::string, double> params;  // overrides of the defaults
  std::uint64_t seed = 0;
  /// NBodyCompare only: explicit bodies replacing the default pair.
  std::vector<Body> bodies;

  /// Throws Error(Config) for unknown keys or values outside the table range.
  void validate() const;
  /// Override or the documented default.
  double param(const std::string& key) const;
};

/// Grid for a scenario. `cells` (per active axis) and `epsilon` are optional
/// overrides: with only cells, eps = length / cells; with only eps,
/// cells = round(length / eps); with both, the box is cells * eps wide.
DomainSpec scenario_domain(const ScenarioSpec& spec, std::optional<int> cells = std::nullopt,
                           std::optional<double> epsilon = std::nullopt);

struct ScenarioSetup {
  FluidState state;
  GravityConfig gravity;
  /// Reference values for checks (e.g. shock position, inflow rate).
  std::map<std::string, double> metadata;
  std::vector<Body> bodies;
};

/// Deterministic in (spec, seed). Throws Error(Domain) if the domain's
/// dimension does not suit the scenario.
ScenarioSetup build_scenario(const ScenarioSpec& spec, const DomainSpec& domain);

/// rho = max(rho0, eps) cellwise, momentum = rho * u0. Throws
/// Error(InvalidValue) for negative or non-finite rho0 or non-finite u0.
FluidState mollify_initial(const Field& rho0, const std::vector<Field>& u0, double epsilon);

}  // namespace wapf
