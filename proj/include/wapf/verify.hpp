#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"
#include "wapf/gravity.hpp"
#include "wapf/integrate.hpp"
#include "wapf/scenarios.hpp"
#include "wapf/transport.hpp"

namespace wapf {

using Point = std::array<double, 3>;

/// Smooth compactly supported test function with its analytic gradient.
/// The support lies inside the box center +- half_extent.
struct TestFunction {
  std::string name;
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  Point center{0.0, 0.0, 0.0};
  Point half_extent{0.0, 0.0, 0.0};
};

/// psi = (1 - |x - c|^2 / R^2)^4 inside the ball (C^3).
TestFunction radial_bump(const Point& center, double radius, int dim);
/// psi = prod_a (1 - ((x_a - c_a) / h_a)^2)^4.
TestFunction separable_bump(const Point& center, const Point& half_widths, int dim);
/// psi(x - shift).
TestFunction translated(const TestFunction& psi, const Point& shift);

/// A radial bump, a separable bump and a translated radial bump sized to the
/// domain.
std::vector<TestFunction> standard_test_functions(const DomainSpec& domain);

struct SpeciesResidual {
  double continuity = 0.0;
  std::vector<double> momentum;  // per axis
  std::optional<double> energy;
};

struct ResidualReport {
  double epsilon = 0.0;
  double time = 0.0;
  std::vector<SpeciesResidual> species;
  double poisson = 0.0;  // zero when gravity is off
};

/// Midpoint-rule weak residuals at cell centers:
///   R_rho  = sum [ drho/dt psi - sum_b rho u_b d_b psi ] eps^dim
///   R_mom  = sum [ d(rho u_a)/dt psi - sum_b rho u_a u_b d_b psi + rho d_a Phi psi ] eps^dim
///   R_e    = sum [ d(rho e)/dt psi - sum_b rho e u_b d_b psi ] eps^dim
///   R_Phi  = sum [ div_h grad Phi - 4 pi G s ] psi eps^dim
/// where rhs already contains the gravity source, div_h is the centered
/// difference and s is the summed density (minus its mean on the torus).
/// d_b psi is the centered difference of the cell-center samples of psi, which
/// makes the flux terms vanish identically for uniform states on the torus.
/// On the torus psi is evaluated at the minimum-image displacement. Throws
/// Error(Domain) if the support leaves an open box or does not fit the torus,
/// Error(Shape) on size mismatch.
ResidualReport weak_residual(const FluidState& state, const RhsOutput& rhs, const GravityField& field,
                             const TestFunction& psi, const DomainSpec& domain, const GravityConfig& gravity);

struct ConvergenceRow {
  double epsilon = 0.0;
  double t = 0.0;
  double R_rho = 0.0;      // root-sum-square over psi set and species
  double R_mom = 0.0;      // ... and axes
  double R_poisson = 0.0;  // ... over psi set
};

struct ConvergenceSeries {
  double t = 0.0;
  std::vector<ConvergenceRow> rows;  // one per epsilon, in input order
  double order_rho = 0.0;
  double order_mom = 0.0;
  double order_poisson = 0.0;  // NaN when gravity is off
  bool monotone_rho = true;    // residual decreases with epsilon
  bool monotone_mom = true;
  bool monotone_poisson = true;
};

struct ConvergenceOptions {
  Integrator integrator = Integrator::RK4;
  std::optional<double> cfl;
  std::optional<double> dt_max;
  /// Override of the scenario's mollifier exponent.
  std::optional<double> alpha;
};

/// Least-squares slope of log y against log x; NaN if any y <= 0.
double fit_order(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the scenario at each epsilon to every time in t_samples, evaluates the
/// residuals for the psi set (standard_test_functions of each grid when empty)
/// and fits observed orders per sampled time. eps_list must be strictly
/// decreasing with at least three entries.
std::vector<ConvergenceSeries> convergence_study(const ScenarioSpec& scenario, const std::vector<double>& eps_list,
                                                 const std::vector<double>& t_samples,
                                                 const std::vector<TestFunction>& psi = {},
                                                 const ConvergenceOptions& options = {});

/// Columns epsilon,t,R_rho,R_mom,R_poisson; each series is followed by a
/// footer row "order,t,<order_rho>,<order_mom>,<order_poisson>".
void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceSeries>& series);
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceSeries>& series);

}  // namespace wapf
