#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"
#include "wapf/gravity.hpp"

namespace wapf {

/// Reference quantities of the initial state against which the a priori
/// bounds are checked.
struct InitialStats {
  double t0 = 0.0;
  double max_speed = 0.0;  // max over cells/axes of |u_a|
  double max_rho = 0.0;
  double mass = 0.0;
  bool gravity = false;
  /// 1-D: K = 8 pi G M + 2 |const|. 2-D/3-D: twice the field bound below.
  double K = 0.0;
  /// 2-D/3-D bound on max sum_a |d_a Phi|; scales like eps^(-dim alpha).
  double gradphi_bound = 0.0;
};

InitialStats initial_stats(const FluidState& state, const DomainSpec& domain, const GravityConfig& gravity,
                           const GravityField& field);

/// Explicit bound on max sum_a |d_a Phi| for the mollified Newtonian field of
/// a source with L1 norm `mass` whose mollified sup norm is at most
/// mass * kernel_peak. Splitting the Green integral at r = 1:
///   |grad Phi| <= c G (mass + S kernel_peak mass),
/// c = 2, S = 2 pi in 2-D; c = 1, S = 4 pi in 3-D; times sqrt(dim) for the
/// axis sum and a factor 2 for lattice-sum overshoot.
double gradphi_bound_nd(int dim, double G, double mass, double kernel_peak);

enum DiagnosticsFlag : unsigned {
  kMassViolated = 1u << 0,
  kVelocityViolated = 1u << 1,
  kGradPhiViolated = 1u << 2,
};

struct DiagnosticsRecord {
  std::size_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass_total = 0.0;
  std::vector<double> momentum;  // per axis, all species
  double min_rho = 0.0;
  double max_speed = 0.0;
  double max_gradphi = 0.0;
  bool mass_ok = true;
  bool velocity_ok = true;
  bool gradphi_ok = true;
  std::vector<double> residuals;

  /// Bitmask of DiagnosticsFlag values for violated bounds (0 when all hold).
  unsigned violations() const;
};

/// Pure function of its inputs; never aborts.
DiagnosticsRecord monitor(const FluidState& state, const GravityField& field, const DomainSpec& domain,
                          const InitialStats& initial);

/// Max over cells and axes of |u_a| across all species.
double max_axis_speed(const FluidState& state);

/// Mass inside `radius_cells` (Euclidean, in cells) of the global density
/// maximum divided by the total mass in the box.
double star_fraction(const FluidState& state, const DomainSpec& domain, double radius_cells = 2.0);

/// A local maximum of the summed density and the mass around it.
struct Concentration {
  std::size_t cell = 0;
  std::array<double, 3> position{0.0, 0.0, 0.0};  // center of the peak cell
  double peak = 0.0;      // density at the peak
  double mass = 0.0;      // within radius_cells of the peak
  double fraction = 0.0;  // mass / total mass in the box
};

/// Cells with density >= min_density that no cell within a window of
/// half-width ceil(radius_cells) exceeds (ties go to the first in storage
/// order). Sorted by mass, largest first.
std::vector<Concentration> find_concentrations(const FluidState& state, const DomainSpec& domain,
                                               double min_density, double radius_cells = 2.0);

/// The star is the concentration at the global density maximum; planets are
/// the other concentrations holding at least min_fraction of the box mass.
struct PlanetCensus {
  double star_fraction = 0.0;
  std::vector<Concentration> planets;
};

PlanetCensus planet_census(const FluidState& state, const DomainSpec& domain, double min_density,
                           double min_fraction, double radius_cells = 2.0);

}  // namespace wapf
