#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"

namespace wapf {

struct Body {
  double mass = 1.0;
  std::array<double, 3> r{0.0, 0.0, 0.0};
  std::array<double, 3> U{0.0, 0.0, 0.0};
};

struct BodyDerivative {
  std::array<double, 3> dr{0.0, 0.0, 0.0};
  std::array<double, 3> dU{0.0, 0.0, 0.0};
};

/// dr_i/dt = U_i and the softened pairwise attraction, matching the fluid
/// force law of each dimension:
///   1-D: -2 pi G m_j sign(d)
///   2-D: -2 G m_j d / (|d|^2 + s^2)
///   3-D: -G m_j d / (|d|^2 + s^2)^(3/2)
/// with d = r_i - r_j. Each pair is evaluated once and applied to both
/// bodies. Throws Error(Singularity) for coincident bodies when s = 0.
std::vector<BodyDerivative> nbody_rhs(const std::vector<Body>& bodies, double G, double softening, int dim);

/// One classical RK4 step.
std::vector<Body> nbody_step(const std::vector<Body>& bodies, double G, double softening, int dim, double dt);

/// `steps` equal RK4 steps covering `duration`.
std::vector<Body> nbody_integrate(std::vector<Body> bodies, double G, double softening, int dim, double duration,
                                  std::size_t steps);

/// sum_i m_i U_i
std::array<double, 3> total_momentum(const std::vector<Body>& bodies);
std::array<double, 3> center_of_mass(const std::vector<Body>& bodies);

/// Nearest-cell deposit of each body (density m/eps^dim, momentum m U/eps^dim)
/// on top of a uniform floor density `floor` with zero momentum. Single
/// species, no energy. Throws Error(Domain) for a body outside the box.
FluidState bodies_to_fields(const std::vector<Body>& bodies, const DomainSpec& domain, double floor);

/// Face-connected components of cells whose total density exceeds
/// `threshold`; each becomes a body with the component's mass, mass-weighted
/// centroid (unwrapped across torus seams) and mean velocity. Sorted by
/// decreasing mass.
std::vector<Body> extract_bodies(const FluidState& state, const DomainSpec& domain, double threshold);

/// CSV with header m,x[,y[,z]],ux[,uy[,uz]].
void write_bodies_csv(const std::filesystem::path& path, const std::vector<Body>& bodies, int dim);
/// Reads the format above; dim is inferred from the column count and returned
/// through `dim_out` when non-null.
std::vector<Body> read_bodies_csv(const std::filesystem::path& path, int* dim_out = nullptr);

}  // namespace wapf
