#include "wapf/transport.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "wapf/error.hpp"

namespace wapf {
namespace {

constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();

// lower[a][c] / upper[a][c]: neighbor of c at -e_a / +e_a, kOutside for vacuum.
struct NeighborTable {
  std::vector<std::vector<std::size_t>> lower;
  std::vector<std::vector<std::size_t>> upper;

  explicit NeighborTable(const DomainSpec& d) : lower(d.dim), upper(d.dim) {
    const std::size_t n = d.size();
    for (int a = 0; a < d.dim; ++a) {
      lower[a].resize(n);
      upper[a].resize(n);
      const std::size_t stride = d.stride(a);
      const int na = d.cells[a];
      const bool torus = d.topology == Topology::Torus;
      for (std::size_t c = 0; c < n; ++c) {
        const int i = static_cast<int>((c / stride) % na);
        if (i > 0) {
          lower[a][c] = c - stride;
        } else {
          lower[a][c] = torus ? c + stride * (na - 1) : kOutside;
        }
        if (i < na - 1) {
          upper[a][c] = c + stride;
        } else {
          upper[a][c] = torus ? c - stride * (na - 1) : kOutside;
        }
      }
    }
  }
};

void transport_quantity(const Field& w, const std::vector<Field>& up, const std::vector<Field>& um,
                        const Field& abs_sum, const NeighborTable& nb, double inv_eps, Field& out) {
  const std::size_t n = w.size();
  const std::size_t dim = up.size();
  out.assign(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    double acc = -w[c] * abs_sum[c];
    for (std::size_t a = 0; a < dim; ++a) {
      const std::size_t lo = nb.lower[a][c];
      const std::size_t hi = nb.upper[a][c];
      if (lo != kOutside) acc += w[lo] * up[a][lo];
      if (hi != kOutside) acc += w[hi] * um[a][hi];
    }
    out[c] = acc * inv_eps;
  }
}

}  // namespace

RhsOutput transport_rhs(const FluidState& state, const DomainSpec& domain) {
  check_shape(state, domain);
  const NeighborTable nb(domain);
  const double inv_eps = 1.0 / domain.epsilon;
  const std::size_t n = domain.size();

  RhsOutput out;
  out.species.reserve(state.species.size());
  for (const auto& s : state.species) {
    const auto vel = recover_velocity(s, state.time);
    std::vector<Field> up(domain.dim, Field(n)), um(domain.dim, Field(n));
    Field abs_sum(n, 0.0);
    for (int a = 0; a < domain.dim; ++a) {
      for (std::size_t c = 0; c < n; ++c) {
        const auto sp = split_velocity(vel[a][c]);
        up[a][c] = sp.plus;
        um[a][c] = sp.minus;
        abs_sum[c] += sp.plus + sp.minus;
      }
    }
    SpeciesFields d;
    transport_quantity(s.rho, up, um, abs_sum, nb, inv_eps, d.rho);
    d.mom.resize(s.mom.size());
    for (std::size_t a = 0; a < s.mom.size(); ++a) {
      transport_quantity(s.mom[a], up, um, abs_sum, nb, inv_eps, d.mom[a]);
    }
    if (s.energy) {
      d.energy.emplace();
      transport_quantity(*s.energy, up, um, abs_sum, nb, inv_eps, *d.energy);
    }
    out.species.push_back(std::move(d));
  }
  return out;
}

RhsOutput rhs_1d(const FluidState& state, const DomainSpec& domain) {
  if (domain.dim != 1) throw Error(ErrorKind::Domain, "rhs_1d requires a 1-D domain");
  return transport_rhs(state, domain);
}

RhsOutput rhs_nd(const FluidState& state, const DomainSpec& domain) {
  if (domain.dim != 2 && domain.dim != 3) {
    throw Error(ErrorKind::Domain, "rhs_nd requires a 2-D or 3-D domain");
  }
  return transport_rhs(state, domain);
}

FluidState exact_transport_step_2d(const FluidState& state, const DomainSpec& domain, double dt) {
  if (domain.dim != 2) {
    throw Error(ErrorKind::Domain, "exact_transport_step_2d requires a 2-D domain");
  }
  check_shape(state, domain);
  const std::size_t n = domain.size();
  const double eps = domain.epsilon;
  const NeighborTable nb(domain);

  // Fractions of a cell's content that move along x, along y, or diagonally.
  struct Split {
    Field ax, ay;  // |u| dt / eps, |v| dt / eps
    Field px, mx, py, my;  // sign indicators of u and v
  };

  FluidState next;
  next.time = state.time + dt;
  next.species.reserve(state.species.size());

  for (const auto& s : state.species) {
    const auto vel = recover_velocity(s, state.time);
    double courant = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (double u : vel[a]) courant = std::max(courant, std::abs(u) * dt / eps);
    }
    // The overlap formula stays valid at exact equality.
    if (courant > 1.0 + 1e-12) {
      std::ostringstream os;
      os.precision(6);
      os << "exact transport step rejected: max|u|dt/eps = " << courant << " > 1";
      throw Error(ErrorKind::StepRejected, os.str());
    }

    // Per-cell outgoing fractions: stay, to x-neighbor, to y-neighbor, to diagonal.
    Field stay(n), fx(n), fy(n), fxy(n);
    for (std::size_t c = 0; c < n; ++c) {
      const double a = std::min(1.0, std::abs(vel[0][c]) * dt / eps);
      const double b = std::min(1.0, std::abs(vel[1][c]) * dt / eps);
      stay[c] = (1.0 - a) * (1.0 - b);
      fx[c] = a * (1.0 - b);
      fy[c] = b * (1.0 - a);
      fxy[c] = a * b;
    }

    auto advance = [&](const Field& w) {
      Field out(n);
      for (std::size_t c = 0; c < n; ++c) {
        double acc = w[c] * stay[c];
        // Edge neighbors: the x-neighbor moving toward c along x, etc.
        const std::size_t west = nb.lower[0][c];
        const std::size_t east = nb.upper[0][c];
        const std::size_t south = nb.lower[1][c];
        const std::size_t north = nb.upper[1][c];
        if (west != kOutside && vel[0][west] > 0.0) acc += w[west] * fx[west];
        if (east != kOutside && vel[0][east] < 0.0) acc += w[east] * fx[east];
        if (south != kOutside && vel[1][south] > 0.0) acc += w[south] * fy[south];
        if (north != kOutside && vel[1][north] < 0.0) acc += w[north] * fy[north];
        // Vertex neighbors.
        auto diag = [&](std::size_t via, int ydir, bool want_u_pos, bool want_v_pos) {
          if (via == kOutside) return;
          const std::size_t d = ydir > 0 ? nb.upper[1][via] : nb.lower[1][via];
          if (d == kOutside) return;
          const bool upos = vel[0][d] > 0.0;
          const bool uneg = vel[0][d] < 0.0;
          const bool vpos = vel[1][d] > 0.0;
          const bool vneg = vel[1][d] < 0.0;
          if ((want_u_pos ? upos : uneg) && (want_v_pos ? vpos : vneg)) acc += w[d] * fxy[d];
        };
        diag(west, -1, true, true);    // (x-eps, y-eps): u+ v+
        diag(west, +1, true, false);   // (x-eps, y+eps): u+ v-
        diag(east, +1, false, false);  // (x+eps, y+eps): u- v-
        diag(east, -1, false, true);   // (x+eps, y-eps): u- v+
        out[c] = acc;
      }
      return out;
    };

    SpeciesFields ns;
    ns.rho = advance(s.rho);
    for (const auto& m : s.mom) ns.mom.push_back(advance(m));
    if (s.energy) ns.energy = advance(*s.energy);
    next.species.push_back(std::move(ns));
  }
  return next;
}

}  // namespace wapf
