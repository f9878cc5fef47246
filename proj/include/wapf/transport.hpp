#pragma once

#include <vector>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"

namespace wapf {

/// Time derivatives of every conserved array, species by species.
struct RhsOutput {
  std::vector<SpeciesFields> species;
};

/// Upwind mass-exchange balance for each transported quantity w in
/// {rho, rho*u_a, rho*e}:
///
///   dw/dt(c) = (1/eps) [ -w(c) sum_a |u_a(c)|
///                        + sum_a (w u_a^+)(c - e_a) + (w u_a^-)(c + e_a) ]
///
/// Outside an OpenBox the neighbors are vacuum (no inflow); outflow through
/// the walls is lost. Works in any dimension; rhs_1d / rhs_nd are the
/// dimension-checked entry points.
RhsOutput transport_rhs(const FluidState& state, const DomainSpec& domain);

RhsOutput rhs_1d(const FluidState& state, const DomainSpec& domain);
RhsOutput rhs_nd(const FluidState& state, const DomainSpec& domain);

/// One finite-time 2-D transport step that accounts for the overlap of a
/// translated cell with its 4 edge and 4 vertex neighbors, i.e. the forward
/// Euler update plus the dt/eps^2 correction terms. Requires
/// dt*max|u| <= eps and dt*max|v| <= eps (equality allowed); otherwise throws
/// Error(StepRejected).
FluidState exact_transport_step_2d(const FluidState& state, const DomainSpec& domain, double dt);

}  // namespace wapf
