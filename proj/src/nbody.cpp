#include "wapf/nbody.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "wapf/error.hpp"

namespace wapf {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::Domain, "nbody: dim must be 1, 2 or 3");
}

void check_bodies(const std::vector<Body>& bodies) {
  for (const auto& b : bodies) {
    if (!(b.mass > 0.0) || !std::isfinite(b.mass)) throw Error(ErrorKind::InvalidValue, "body mass must be positive");
    for (int a = 0; a < 3; ++a)
      if (!std::isfinite(b.r[a]) || !std::isfinite(b.U[a]))
        throw Error(ErrorKind::InvalidValue, "body coordinates must be finite");
  }
}

std::vector<Body> advance(const std::vector<Body>& b, const std::vector<BodyDerivative>& k, double h) {
  std::vector<Body> out = b;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (int a = 0; a < 3; ++a) {
      out[i].r[a] += h * k[i].dr[a];
      out[i].U[a] += h * k[i].dU[a];
    }
  return out;
}

}  // namespace

std::vector<BodyDerivative> nbody_rhs(const std::vector<Body>& bodies, double G, double softening, int dim) {
  check_dim(dim);
  check_bodies(bodies);
  if (!(softening >= 0.0)) throw Error(ErrorKind::InvalidValue, "softening must be non-negative");
  const std::size_t n = bodies.size();
  std::vector<BodyDerivative> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i].dr = bodies[i].U;
  const double s2 = softening * softening;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::array<double, 3> delta{0.0, 0.0, 0.0};
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        delta[a] = bodies[i].r[a] - bodies[j].r[a];
        r2 += delta[a] * delta[a];
      }
      if (r2 == 0.0 && (s2 == 0.0 || dim == 1)) {
        throw Error(ErrorKind::Singularity, "coincident bodies " + std::to_string(i) + " and " + std::to_string(j));
      }
      // f: acceleration of i per unit mass of j (j gets -f per unit mass of i)
      std::array<double, 3> f{0.0, 0.0, 0.0};
      if (dim == 1) {
        f[0] = -2.0 * std::numbers::pi * G * (delta[0] > 0 ? 1.0 : -1.0);
      } else {
        const double q = r2 + s2;
        const double scale = dim == 2 ? -2.0 * G / q : -G / (q * std::sqrt(q));
        for (int a = 0; a < dim; ++a) f[a] = scale * delta[a];
      }
      for (int a = 0; a < dim; ++a) {
        d[i].dU[a] += bodies[j].mass * f[a];
        d[j].dU[a] -= bodies[i].mass * f[a];
      }
    }
  }
  return d;
}

std::vector<Body> nbody_step(const std::vector<Body>& bodies, double G, double softening, int dim, double dt) {
  const auto k1 = nbody_rhs(bodies, G, softening, dim);
  const auto k2 = nbody_rhs(advance(bodies, k1, 0.5 * dt), G, softening, dim);
  const auto k3 = nbody_rhs(advance(bodies, k2, 0.5 * dt), G, softening, dim);
  const auto k4 = nbody_rhs(advance(bodies, k3, dt), G, softening, dim);
  std::vector<Body> out = bodies;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int a = 0; a < 3; ++a) {
      out[i].r[a] += dt / 6.0 * (k1[i].dr[a] + 2.0 * k2[i].dr[a] + 2.0 * k3[i].dr[a] + k4[i].dr[a]);
      out[i].U[a] += dt / 6.0 * (k1[i].dU[a] + 2.0 * k2[i].dU[a] + 2.0 * k3[i].dU[a] + k4[i].dU[a]);
    }
  return out;
}

std::vector<Body> nbody_integrate(std::vector<Body> bodies, double G, double softening, int dim, double duration,
                                  std::size_t steps) {
  if (steps == 0) return bodies;
  const double dt = duration / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) bodies = nbody_step(bodies, G, softening, dim, dt);
  return bodies;
}

std::array<double, 3> total_momentum(const std::vector<Body>& bodies) {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (const auto& b : bodies)
    for (int a = 0; a < 3; ++a) p[a] += b.mass * b.U[a];
  return p;
}

std::array<double, 3> center_of_mass(const std::vector<Body>& bodies) {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  double m = 0.0;
  for (const auto& b : bodies) {
    m += b.mass;
    for (int a = 0; a < 3; ++a) c[a] += b.mass * b.r[a];
  }
  if (m > 0.0)
    for (auto& v : c) v /= m;
  return c;
}

FluidState bodies_to_fields(const std::vector<Body>& bodies, const DomainSpec& domain, double floor) {
  domain.validate();
  check_bodies(bodies);
  if (!(floor > 0.0)) throw Error(ErrorKind::InvalidValue, "bodies_to_fields: floor density must be positive");
  SpeciesFields s = make_species(domain);
  std::fill(s.rho.begin(), s.rho.end(), floor);
  const double inv_vol = 1.0 / domain.cell_volume();
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const auto cell = domain.locate(bodies[i].r);
    if (!cell) throw Error(ErrorKind::Domain, "body " + std::to_string(i) + " lies outside the domain");
    s.rho[*cell] += bodies[i].mass * inv_vol;
    for (int a = 0; a < domain.dim; ++a) s.mom[a][*cell] += bodies[i].mass * bodies[i].U[a] * inv_vol;
  }
  FluidState st;
  st.species.push_back(std::move(s));
  return st;
}

std::vector<Body> extract_bodies(const FluidState& state, const DomainSpec& domain, double threshold) {
  check_shape(state, domain);
  const Field rho = total_density(state);
  const std::size_t n = rho.size();
  const double vol = domain.cell_volume();
  std::vector<char> seen(n, 0);
  // unwrapped integer position of each visited cell
  std::vector<std::array<long, 3>> pos(n);
  std::vector<Body> out;
  std::vector<std::size_t> queue;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (seen[seed] || !(rho[seed] > threshold)) continue;
    seen[seed] = 1;
    const auto c0 = domain.coords(seed);
    pos[seed] = {c0[0], c0[1], c0[2]};
    queue.assign(1, seed);
    double mass = 0.0;
    std::array<double, 3> first{0.0, 0.0, 0.0}, mom{0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t c = queue[q];
      const double m = rho[c] * vol;
      mass += m;
      for (int a = 0; a < domain.dim; ++a) {
        first[a] += m * (domain.origin[a] + (static_cast<double>(pos[c][a]) + 0.5) * domain.epsilon);
        for (const auto& s : state.species) mom[a] += s.mom[a][c] * vol;
      }
      for (int a = 0; a < domain.dim; ++a) {
        for (int dir : {-1, 1}) {
          const auto nb = domain.neighbor(c, a, dir);
          if (!nb || seen[*nb] || !(rho[*nb] > threshold)) continue;
          seen[*nb] = 1;
          pos[*nb] = pos[c];
          pos[*nb][a] += dir;
          queue.push_back(*nb);
        }
      }
    }
    Body b;
    b.mass = mass;
    for (int a = 0; a < domain.dim; ++a) {
      b.r[a] = first[a] / mass;
      if (domain.topology == Topology::Torus) {
        const double L = domain.length(a);
        b.r[a] = domain.origin[a] + std::fmod(std::fmod(b.r[a] - domain.origin[a], L) + L, L);
      }
      b.U[a] = mom[a] / mass;
    }
    out.push_back(b);
  }
  std::stable_sort(out.begin(), out.end(), [](const Body& x, const Body& y) { return x.mass > y.mass; });
  return out;
}

void write_bodies_csv(const std::filesystem::path& path, const std::vector<Body>& bodies, int dim) {
  check_dim(dim);
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  static const char* axes[] = {"x", "y", "z"};
  f << "m";
  for (int a = 0; a < dim; ++a) f << ',' << axes[a];
  for (int a = 0; a < dim; ++a) f << ",u" << axes[a];
  f << '\n';
  f.precision(17);
  for (const auto& b : bodies) {
    f << b.mass;
    for (int a = 0; a < dim; ++a) f << ',' << b.r[a];
    for (int a = 0; a < dim; ++a) f << ',' << b.U[a];
    f << '\n';
  }
  if (!f) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<Body> read_bodies_csv(const std::filesystem::path& path, int* dim_out) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw Error(ErrorKind::Format, path.string() + ": missing header");
  const auto columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns != 3 && columns != 5 && columns != 7) {
    throw Error(ErrorKind::Format, path.string() + ": expected 3, 5 or 7 columns, got " + std::to_string(columns));
  }
  const int dim = (columns - 1) / 2;
  std::vector<Body> bodies;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::vector<double> v;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Format, path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(v.size()) != columns) {
      throw Error(ErrorKind::Format, path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    }
    Body b;
    b.mass = v[0];
    for (int a = 0; a < dim; ++a) {
      b.r[a] = v[1 + a];
      b.U[a] = v[1 + dim + a];
    }
    bodies.push_back(b);
  }
  check_bodies(bodies);
  if (dim_out) *dim_out = dim;
  return bodies;
}

}  // namespace wapf
