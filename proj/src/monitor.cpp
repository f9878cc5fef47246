#include "wapf/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wapf/error.hpp"

namespace wapf {

namespace {

constexpr double kMassSlack = 1e-10;
constexpr double kSpeedSlack = 1e-8;
constexpr double kGravitySpeedTol = 1e-6;

double total_mass(const FluidState& state, const DomainSpec& domain) {
  return compensated_sum(total_density(state)) * domain.cell_volume();
}

}  // namespace

double max_axis_speed(const FluidState& state) {
  double best = 0.0;
  for (const auto& s : state.species)
    for (const auto& m : s.mom)
      for (std::size_t c = 0; c < s.rho.size(); ++c) best = std::max(best, std::abs(m[c] / s.rho[c]));
  return best;
}

double gradphi_bound_nd(int dim, double G, double mass, double kernel_peak) {
  const double pi = std::numbers::pi;
  double c = 0.0, S = 0.0;
  if (dim == 2) {
    c = 2.0;
    S = 2.0 * pi;
  } else if (dim == 3) {
    c = 1.0;
    S = 4.0 * pi;
  } else {
    throw Error(ErrorKind::Domain, "gradphi_bound_nd: dim must be 2 or 3");
  }
  return 2.0 * std::sqrt(static_cast<double>(dim)) * c * G * mass * (1.0 + S * kernel_peak);
}

InitialStats initial_stats(const FluidState& state, const DomainSpec& domain, const GravityConfig& gravity,
                           const GravityField& field) {
  InitialStats st;
  st.t0 = state.time;
  st.max_speed = max_axis_speed(state);
  for (const auto& s : state.species)
    for (double r : s.rho) st.max_rho = std::max(st.max_rho, r);
  st.mass = total_mass(state, domain);
  st.gravity = gravity.enabled;
  if (!gravity.enabled) return st;
  if (domain.dim == 1) {
    st.K = 8.0 * std::numbers::pi * gravity.G * st.mass + 2.0 * std::abs(field.integration_constant);
    return st;
  }
  const MollifierKernel kernel = mollifier_kernel(gravity.alpha, domain.epsilon, domain.dim);
  double source_mass = st.mass;
  if (gravity.boundary == GravityBoundary::TorusMeanSubtracted) {
    // the periodic problem is sourced by rho - mean(rho)
    const Field rho = total_density(state);
    const double mean = compensated_sum(rho) / static_cast<double>(rho.size());
    Field dev(rho.size());
    for (std::size_t c = 0; c < rho.size(); ++c) dev[c] = std::abs(rho[c] - mean);
    source_mass = compensated_sum(dev) * domain.cell_volume();
    // the uniform background counts as mass for the sup bound
    source_mass = std::max(source_mass, st.mass);
  }
  st.gradphi_bound = gradphi_bound_nd(domain.dim, gravity.G, source_mass, kernel.max_value());
  st.K = 2.0 * st.gradphi_bound;
  return st;
}

unsigned DiagnosticsRecord::violations() const {
  unsigned f = 0;
  if (!mass_ok) f |= kMassViolated;
  if (!velocity_ok) f |= kVelocityViolated;
  if (!gradphi_ok) f |= kGradPhiViolated;
  return f;
}

DiagnosticsRecord monitor(const FluidState& state, const GravityField& field, const DomainSpec& domain,
                          const InitialStats& initial) {
  DiagnosticsRecord r;
  r.t = state.time;
  r.mass_total = total_mass(state, domain);
  r.momentum.assign(static_cast<std::size_t>(domain.dim), 0.0);
  for (int a = 0; a < domain.dim; ++a) {
    Field m(domain.size(), 0.0);
    for (const auto& s : state.species)
      for (std::size_t c = 0; c < m.size(); ++c) m[c] += s.mom[a][c];
    r.momentum[a] = compensated_sum(m) * domain.cell_volume();
  }
  r.min_rho = std::numeric_limits<double>::infinity();
  for (const auto& s : state.species)
    for (double v : s.rho) r.min_rho = std::min(r.min_rho, v);
  r.max_speed = max_axis_speed(state);
  r.max_gradphi = field.grad_phi.empty() ? 0.0 : field.max_abs_sum();

  // mass never grows; on the torus it is exactly conserved
  const double m0 = initial.mass;
  r.mass_ok = r.mass_total <= m0 * (1.0 + kMassSlack);
  if (domain.topology == Topology::Torus) r.mass_ok = r.mass_ok && r.mass_total >= m0 * (1.0 - kMassSlack);

  const double elapsed = std::max(0.0, state.time - initial.t0);
  if (!initial.gravity) {
    r.velocity_ok = r.max_speed <= initial.max_speed * (1.0 + kSpeedSlack);
    r.gradphi_ok = true;
  } else {
    const double growth = domain.dim == 1 ? initial.K : initial.gradphi_bound;
    r.velocity_ok = r.max_speed <= initial.max_speed * (1.0 + kSpeedSlack) + growth * elapsed + kGravitySpeedTol;
    const double bound = domain.dim == 1 ? 0.5 * initial.K : initial.gradphi_bound;
    r.gradphi_ok = r.max_gradphi <= bound * (1.0 + 1e-12);
  }
  return r;
}

double star_fraction(const FluidState& state, const DomainSpec& domain, double radius_cells) {
  if (!(radius_cells >= 0.0)) throw Error(ErrorKind::InvalidValue, "star_fraction: radius must be non-negative");
  const Field rho = total_density(state);
  if (rho.empty()) throw Error(ErrorKind::Shape, "star_fraction: empty state");
  const std::size_t peak = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
  const auto pc = domain.coords(peak);
  const double total = compensated_sum(rho);
  Field inside(rho.size(), 0.0);
  for (std::size_t c = 0; c < rho.size(); ++c) {
    const auto cc = domain.coords(c);
    double d2 = 0.0;
    for (int a = 0; a < domain.dim; ++a) {
      double d = std::abs(cc[a] - pc[a]);
      if (domain.topology == Topology::Torus) d = std::min(d, domain.cells[a] - d);
      d2 += d * d;
    }
    if (d2 <= radius_cells * radius_cells) inside[c] = rho[c];
  }
  return compensated_sum(inside) / total;
}

std::vector<Concentration> find_concentrations(const FluidState& state, const DomainSpec& domain,
                                               double min_density, double radius_cells) {
  if (!(radius_cells >= 0.0)) throw Error(ErrorKind::InvalidValue, "find_concentrations: radius must be non-negative");
  const Field rho = total_density(state);
  if (rho.size() != domain.size()) throw Error(ErrorKind::Shape, "find_concentrations: state does not match domain");
  const double total = compensated_sum(rho);
  const int w = static_cast<int>(std::ceil(radius_cells));
  const double r2max = radius_cells * radius_cells;

  // Visits every in-box cell of the window around `c` (wrapped on the torus).
  auto window = [&](std::size_t c, auto&& fn) {
    const auto cc = domain.coords(c);
    const int wy = domain.dim > 1 ? w : 0, wz = domain.dim > 2 ? w : 0;
    for (int dz = -wz; dz <= wz; ++dz)
      for (int dy = -wy; dy <= wy; ++dy)
        for (int dx = -w; dx <= w; ++dx) {
          std::array<int, 3> q{cc[0] + dx, cc[1] + dy, cc[2] + dz};
          bool inside = true;
          for (int a = 0; a < domain.dim; ++a) {
            if (q[a] >= 0 && q[a] < domain.cells[a]) continue;
            if (domain.topology == Topology::OpenBox) inside = false;
            q[a] = (q[a] % domain.cells[a] + domain.cells[a]) % domain.cells[a];
          }
          if (inside) fn(domain.index(q[0], q[1], q[2]), dx * dx + dy * dy + dz * dz);
        }
  };

  std::vector<Concentration> out;
  for (std::size_t c = 0; c < rho.size(); ++c) {
    if (rho[c] < min_density) continue;
    bool is_max = true;
    window(c, [&](std::size_t q, int) {
      if (rho[q] > rho[c] || (rho[q] == rho[c] && q < c)) is_max = false;
    });
    if (!is_max) continue;
    Field near;
    window(c, [&](std::size_t q, int d2) {
      if (d2 <= r2max) near.push_back(rho[q]);
    });
    Concentration k;
    k.cell = c;
    const auto cc = domain.coords(c);
    for (int a = 0; a < domain.dim; ++a) k.position[a] = domain.center(a, cc[a]);
    k.peak = rho[c];
    k.mass = compensated_sum(near) * domain.cell_volume();
    k.fraction = compensated_sum(near) / total;
    out.push_back(k);
  }
  std::stable_sort(out.begin(), out.end(), [](const Concentration& a, const Concentration& b) { return a.mass > b.mass; });
  return out;
}

PlanetCensus planet_census(const FluidState& state, const DomainSpec& domain, double min_density,
                           double min_fraction, double radius_cells) {
  PlanetCensus census;
  census.star_fraction = star_fraction(state, domain, radius_cells);
  const Field rho = total_density(state);
  const std::size_t star = static_cast<std::size_t>(std::max_element(rho.begin(), rho.end()) - rho.begin());
  for (const auto& k : find_concentrations(state, domain, min_density, radius_cells)) {
    if (k.cell != star && k.fraction >= min_fraction) census.planets.push_back(k);
  }
  return census;
}

}  // namespace wapf
