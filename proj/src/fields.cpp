#include "wapf/fields.hpp"

#include <cmath>

#include "wapf/error.hpp"

namespace wapf {

VelocitySplit split_velocity(double u) {
  if (!std::isfinite(u)) {
    throw Error(ErrorKind::InvalidValue, "split_velocity: non-finite speed");
  }
  return {u > 0.0 ? u : 0.0, u < 0.0 ? -u : 0.0};
}

std::vector<Field> recover_velocity(const SpeciesFields& s, double time) {
  const std::size_t n = s.rho.size();
  for (std::size_t c = 0; c < n; ++c) {
    if (!(s.rho[c] > 0.0)) throw PositivityError(c, time, s.rho[c]);
  }
  std::vector<Field> vel(s.mom.size(), Field(n));
  for (std::size_t a = 0; a < s.mom.size(); ++a) {
    const Field& m = s.mom[a];
    Field& u = vel[a];
    for (std::size_t c = 0; c < n; ++c) u[c] = m[c] / s.rho[c];
  }
  return vel;
}

SpeciesFields make_species(const DomainSpec& domain, bool with_energy) {
  SpeciesFields s;
  s.rho.assign(domain.size(), 0.0);
  s.mom.assign(domain.dim, Field(domain.size(), 0.0));
  if (with_energy) s.energy = Field(domain.size(), 0.0);
  return s;
}

void check_shape(const SpeciesFields& s, const DomainSpec& domain) {
  const std::size_t n = domain.size();
  bool ok = s.rho.size() == n && s.mom.size() == static_cast<std::size_t>(domain.dim);
  for (const auto& m : s.mom) ok = ok && m.size() == n;
  if (s.energy) ok = ok && s.energy->size() == n;
  if (!ok) throw Error(ErrorKind::Shape, "species arrays do not match the domain");
}

void check_shape(const FluidState& state, const DomainSpec& domain) {
  if (state.species.empty()) throw Error(ErrorKind::Shape, "state has no species");
  for (const auto& s : state.species) check_shape(s, domain);
}

Field total_density(const FluidState& state) {
  Field rho = state.species.at(0).rho;
  for (std::size_t i = 1; i < state.species.size(); ++i) {
    const Field& r = state.species[i].rho;
    for (std::size_t c = 0; c < rho.size(); ++c) rho[c] += r[c];
  }
  return rho;
}

double compensated_sum(const Field& values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace wapf
