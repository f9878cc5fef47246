#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "wapf/domain.hpp"

namespace wapf {

using Field = std::vector<double>;

/// Conserved variables of one species. Velocity is never stored.
struct SpeciesFields {
  Field rho;
  std::vector<Field> mom;  // one per active axis
  std::optional<Field> energy;

  bool operator==(const SpeciesFields&) const = default;
};

struct FluidState {
  std::vector<SpeciesFields> species;
  double time = 0.0;

  bool operator==(const FluidState&) const = default;
};

struct VelocitySplit {
  double plus = 0.0;
  double minus = 0.0;
};

/// (max(0,u), max(0,-u)). Throws Error(InvalidValue) for non-finite u.
VelocitySplit split_velocity(double u);

/// Per-axis velocity u = mom / rho. Throws PositivityError on rho <= 0.
std::vector<Field> recover_velocity(const SpeciesFields& s, double time = 0.0);

/// Zero-initialised species sized for the domain.
SpeciesFields make_species(const DomainSpec& domain, bool with_energy = false);

/// Throws Error(Shape) if any array disagrees with the domain.
void check_shape(const SpeciesFields& s, const DomainSpec& domain);
void check_shape(const FluidState& state, const DomainSpec& domain);

/// Sum of rho over all species, cellwise.
Field total_density(const FluidState& state);

/// Compensated (Neumaier) sum; used wherever conservation is measured.
double compensated_sum(const Field& values);

}  // namespace wapf
