#pragma once

#include <array>
#include <memory>
#include <vector>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"
#include "wapf/transport.hpp"

namespace wapf {

enum class GravityBoundary {
  /// Periodic potential sourced by rho - mean(rho).
  TorusMeanSubtracted,
  /// Isolated system, potential vanishing at infinity.
  FreeSpace,
};

struct GravityConfig {
  double G = 1.0;
  double alpha = 0.25;
  bool enabled = false;
  GravityBoundary boundary = GravityBoundary::TorusMeanSubtracted;

  /// Throws Error(InvalidValue) when enabled with G <= 0 or alpha outside (0, 1/3].
  void validate() const;
};

/// Gradient of the gravitational potential at cell centers.
struct GravityField {
  std::vector<Field> grad_phi;
  /// 1-D only: the additive constant of the cumulative-integral form.
  double integration_constant = 0.0;

  /// max over cells of sum_a |d_a Phi|.
  double max_abs_sum() const;
  /// max over cells of |grad Phi|.
  double max_norm() const;
};

/// Samples of phi_delta(x) = delta^-dim phi(|x| / delta), delta = eps^alpha,
/// phi(r) proportional to (1 - r^2)^3 on the unit ball, on the cell-offset
/// lattice |i_a| <= radius. Renormalised so sum(values) * eps^dim == 1.
struct MollifierKernel {
  int dim = 1;
  int radius = 0;  // in cells
  double epsilon = 1.0;
  double width = 1.0;  // delta = eps^alpha
  std::vector<double> values;  // (2*radius+1)^dim, x fastest

  int side() const { return 2 * radius + 1; }
  double at(int i, int j = 0, int k = 0) const;
  double max_value() const;
  double discrete_integral() const;
};

MollifierKernel mollifier_kernel(double alpha, double epsilon, int dim);

/// Integral of the unnormalised bump (1 - r^2)^3 over the unit ball in `dim`
/// dimensions (32/35, pi/4, 64 pi/315).
double bump_integral(int dim);

/// 1-D field Phi_x = const + 4 pi G int rho. Torus: integrand rho - mean(rho),
/// constant chosen so that sum Phi_x = 0. FreeSpace: constant = -2 pi G M.
GravityField grad_phi_1d(const Field& rho, const DomainSpec& domain, const GravityConfig& cfg);

/// 2-D/3-D field of the mollified density rho * phi_delta. FreeSpace uses the
/// sampled Green gradient 2G r/|r|^2 (2-D) or G r/|r|^3 (3-D) with a zero
/// self-cell; TorusMeanSubtracted solves the periodic problem for
/// rho - mean(rho).
GravityField grad_phi_nd(const Field& rho, const DomainSpec& domain, const GravityConfig& cfg);

/// O(N^2) reference for the FreeSpace field: explicit mollification followed by
/// explicit summation against the Green gradient kernel.
GravityField grad_phi_nd_direct(const Field& rho, const DomainSpec& domain, const GravityConfig& cfg);

/// Subtracts rho_s * grad Phi from each species' momentum derivatives.
void apply_gravity_source(RhsOutput& rhs, const FluidState& state, const GravityField& field);

/// Reusable solver: builds kernels and transforms once per domain.
class GravitySolver {
 public:
  GravitySolver(const DomainSpec& domain, const GravityConfig& cfg);
  ~GravitySolver();
  GravitySolver(GravitySolver&&) noexcept;
  GravitySolver& operator=(GravitySolver&&) noexcept;

  /// Field sourced by the summed density of all species.
  GravityField compute(const FluidState& state) const;
  GravityField compute(const Field& rho) const;

  /// Zero field with the right shape (gravity disabled).
  GravityField zero() const;

  const DomainSpec& domain() const { return domain_; }
  const GravityConfig& config() const { return cfg_; }
  /// Only valid in 2-D/3-D.
  const MollifierKernel& kernel() const;

 private:
  struct Impl;
  DomainSpec domain_;
  GravityConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace wapf
