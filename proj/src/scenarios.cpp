#include "wapf/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wapf/error.hpp"

namespace wapf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  ScenarioName name;
  std::string_view text;
  int dim;  // 0: taken from the "dim" parameter
  Topology topology;
};

const Entry kEntries[] = {
    {ScenarioName::UniformAdvection, "uniform-advection", 0, Topology::Torus},
    {ScenarioName::RiemannTwoStream, "riemann-two-stream", 1, Topology::OpenBox},
    {ScenarioName::DeltaShock1D, "delta-shock-1d", 1, Topology::OpenBox},
    {ScenarioName::GravityCollapse1D, "gravity-collapse-1d", 1, Topology::Torus},
    {ScenarioName::RotatingDisk2D, "rotating-disk-2d", 2, Topology::OpenBox},
    {ScenarioName::TwoSpeciesWells1D, "two-species-wells-1d", 1, Topology::Torus},
    {ScenarioName::NBodyCompare, "nbody-compare", 2, Topology::OpenBox},
    {ScenarioName::JeansCollapse2D, "jeans-collapse-2d", 2, Topology::Torus},
};

const Entry& entry(ScenarioName name) {
  for (const auto& e : kEntries)
    if (e.name == name) return e;
  throw Error(ErrorKind::Config, "unknown scenario");
}

int scenario_dim(const ScenarioSpec& spec) {
  const int d = entry(spec.name).dim;
  return d != 0 ? d : static_cast<int>(spec.param("dim"));
}

// uniform in [-1, 1] from the top 53 bits
double signed_uniform(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

struct Grid {
  const DomainSpec& d;
  double x(std::size_t c, int a) const { return d.center(a, d.coords(c)[a]); }
};

void require_dim(const ScenarioSpec& spec, const DomainSpec& domain) {
  const int want = scenario_dim(spec);
  if (domain.dim != want) {
    throw Error(ErrorKind::Domain, std::string(scenario_name(spec.name)) + " needs a " + std::to_string(want) +
                                       "-D domain, got " + std::to_string(domain.dim) + "-D");
  }
}

GravityConfig gravity_from(const ScenarioSpec& spec, GravityBoundary boundary) {
  GravityConfig g;
  g.enabled = true;
  g.G = spec.param("G");
  g.alpha = spec.param("alpha");
  g.boundary = boundary;
  g.validate();
  return g;
}

}  // namespace

std::string_view scenario_name(ScenarioName name) { return entry(name).text; }

ScenarioName parse_scenario_name(std::string_view text) {
  for (const auto& e : kEntries)
    if (e.text == text) return e.name;
  std::string known;
  for (const auto& e : kEntries) known += (known.empty() ? "" : ", ") + std::string(e.text);
  throw Error(ErrorKind::Config, "unknown scenario '" + std::string(text) + "' (known: " + known + ")");
}

std::vector<ScenarioName> all_scenarios() {
  std::vector<ScenarioName> out;
  for (const auto& e : kEntries) out.push_back(e.name);
  return out;
}

Integrator default_integrator(ScenarioName name) {
  return name == ScenarioName::RotatingDisk2D ? Integrator::ExactTransport2D : Integrator::RK4;
}

const std::vector<ParamInfo>& scenario_parameters(ScenarioName name) {
  static const std::map<ScenarioName, std::vector<ParamInfo>> tables = {
      {ScenarioName::UniformAdvection,
       {{"dim", 1, 1, 3, "spatial dimension"},
        {"length", 1.0, 0, kInf, "box side"},
        {"cells", 100, 3, 1e5, "default cells per axis"},
        {"rho0", 1.0, 0, kInf, "mean density"},
        {"amp", 0.5, 0, 1, "relative amplitude of the sine profile"},
        {"modes", 1, 1, 64, "wavenumber of the profile"},
        {"ux", 1.0, -kInf, kInf, "velocity along x"},
        {"uy", 0.5, -kInf, kInf, "velocity along y"},
        {"uz", 0.25, -kInf, kInf, "velocity along z"}}},
      {ScenarioName::RiemannTwoStream,
       {{"length", 1.0, 0, kInf, "box side, interface at 0"},
        {"cells", 200, 3, 1e6, "default cells"},
        {"rho_l", 1.0, 0, kInf, "left density"},
        {"u_l", 1.0, -kInf, kInf, "left velocity"},
        {"rho_r", 0.5, 0, kInf, "right density"},
        {"u_r", -0.5, -kInf, kInf, "right velocity"}}},
      {ScenarioName::DeltaShock1D,
       {{"length", 1.0, 0, kInf, "box side, collision at 0"},
        {"cells", 200, 3, 1e6, "default cells"},
        {"rho", 1.0, 0, kInf, "density of both streams"},
        {"speed", 1.0, 0, kInf, "approach speed of each stream"}}},
      {ScenarioName::GravityCollapse1D,
       {{"length", 2 * kPi, 0, kInf, "torus length"},
        {"cells", 256, 3, 1e6, "default cells"},
        {"rho0", 1.0, 0, kInf, "mean density"},
        {"amp", 0.5, 0, 1, "relative cosine perturbation"},
        {"u_amp", 0.0, -kInf, kInf, "amplitude of -sin velocity profile"},
        {"G", 1.0, 0, kInf, "gravitational constant"},
        {"alpha", 0.25, 0, 1.0 / 3.0, "mollifier exponent (unused in 1-D)"}}},
      {ScenarioName::RotatingDisk2D,
       {{"length", 20.0, 0, kInf, "window side"},
        {"cells", 200, 3, 1e5, "default cells per axis"},
        {"radius", 9.0, 0, kInf, "disk radius"},
        {"rho_disk", 10.0, 0, kInf, "mean disk density"},
        {"noise", 0.2, 0, 1, "multiplicative uniform noise amplitude"},
        {"v0", 12.5, 0, kInf, "plateau rotation speed"},
        {"r0", 6.5, 0, kInf, "radius where the speed reaches v0"},
        {"r_core", 6.5, 0, kInf, "radius of the non-rotating core"},
        {"G", 0.1, 0, kInf, "gravitational constant"},
        {"alpha", 0.25, 0, 1.0 / 3.0, "mollifier exponent"},
        {"t_end", 12.0, 0, kInf, "documented run length"}}},
      {ScenarioName::TwoSpeciesWells1D,
       {{"length", 2 * kPi, 0, kInf, "torus length"},
        {"cells", 256, 3, 1e6, "default cells"},
        {"rho_dark", 1.0, 0, kInf, "mean dark density"},
        {"well_amp", 0.5, 0, 1, "relative depth of the dark wells"},
        {"wells", 3, 1, 64, "number of wells"},
        {"rho_baryon", 0.2, 0, kInf, "mean baryon density"},
        {"noise", 0.2, 0, 1, "multiplicative baryon noise amplitude"},
        {"G", 1.0, 0, kInf, "gravitational constant"},
        {"alpha", 0.25, 0, 1.0 / 3.0, "mollifier exponent (unused in 1-D)"}}},
      {ScenarioName::NBodyCompare,
       {{"length", 12.0, 0, kInf, "window side"},
        {"cells", 120, 3, 1e5, "default cells per axis"},
        {"mass", 1000.0, 0, kInf, "mass of each body of the default pair"},
        {"separation", 6.0, 0, kInf, "distance between the default pair"},
        {"G", 1.0, 0, kInf, "gravitational constant"},
        {"alpha", 0.25, 0, 1.0 / 3.0, "mollifier exponent; softening = eps^alpha"}}},
      {ScenarioName::JeansCollapse2D,
       {{"length", 2 * kPi, 0, kInf, "torus side"},
        {"cells", 100, 3, 1e5, "default cells per axis"},
        {"rho0", 1.0, 0, kInf, "mean density"},
        {"amp", 0.3, 0, 1, "relative cos x cos y perturbation"},
        {"u_amp", 0.2, -kInf, kInf, "shear velocity amplitude"},
        {"G", 1.0, 0, kInf, "gravitational constant"},
        {"alpha", 0.25, 0, 1.0 / 3.0, "mollifier exponent"}}},
  };
  return tables.at(name);
}

void ScenarioSpec::validate() const {
  const auto& table = scenario_parameters(name);
  for (const auto& [key, value] : params) {
    auto it = std::find_if(table.begin(), table.end(), [&](const ParamInfo& p) { return p.key == key; });
    if (it == table.end()) {
      throw Error(ErrorKind::Config,
                  "scenario " + std::string(scenario_name(name)) + " has no parameter '" + key + "'");
    }
    if (!std::isfinite(value) || value < it->min || value > it->max) {
      throw Error(ErrorKind::Config, "parameter " + key + "=" + std::to_string(value) + " outside [" +
                                         std::to_string(it->min) + ", " + std::to_string(it->max) + "]");
    }
  }
  if (!bodies.empty() && name != ScenarioName::NBodyCompare) {
    throw Error(ErrorKind::Config, "explicit bodies are only accepted by nbody-compare");
  }
}

double ScenarioSpec::param(const std::string& key) const {
  if (auto it = params.find(key); it != params.end()) return it->second;
  for (const auto& p : scenario_parameters(name))
    if (p.key == key) return p.value;
  throw Error(ErrorKind::Config, "scenario " + std::string(scenario_name(name)) + " has no parameter '" + key + "'");
}

DomainSpec scenario_domain(const ScenarioSpec& spec, std::optional<int> cells, std::optional<double> epsilon) {
  spec.validate();
  DomainSpec d;
  d.dim = scenario_dim(spec);
  d.topology = entry(spec.name).topology;
  double length = spec.param("length");
  int n = 0;
  if (cells && epsilon) {
    n = *cells;
    d.epsilon = *epsilon;
    length = n * d.epsilon;
  } else if (cells) {
    n = *cells;
    d.epsilon = length / n;
  } else if (epsilon) {
    if (!(*epsilon > 0.0)) throw Error(ErrorKind::Domain, "epsilon must be positive");
    n = static_cast<int>(std::lround(length / *epsilon));
    d.epsilon = *epsilon;
    length = n * d.epsilon;
  } else {
    n = static_cast<int>(spec.param("cells"));
    d.epsilon = length / n;
  }
  for (int a = 0; a < 3; ++a) {
    d.cells[a] = a < d.dim ? n : 1;
    d.origin[a] = a < d.dim ? -0.5 * length : 0.0;
  }
  d.validate();
  return d;
}

FluidState mollify_initial(const Field& rho0, const std::vector<Field>& u0, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidValue, "mollify_initial: epsilon must be positive");
  SpeciesFields s;
  s.rho.resize(rho0.size());
  for (std::size_t c = 0; c < rho0.size(); ++c) {
    if (!(rho0[c] >= 0.0) || !std::isfinite(rho0[c])) {
      throw Error(ErrorKind::InvalidValue, "initial density must be finite and non-negative (cell " +
                                               std::to_string(c) + ")");
    }
    s.rho[c] = std::max(rho0[c], epsilon);
  }
  for (const Field& u : u0) {
    if (u.size() != rho0.size()) throw Error(ErrorKind::Shape, "mollify_initial: velocity size mismatch");
    Field m(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) {
      if (!std::isfinite(u[c])) throw Error(ErrorKind::InvalidValue, "initial velocity must be finite");
      m[c] = s.rho[c] * u[c];
    }
    s.mom.push_back(std::move(m));
  }
  FluidState st;
  st.species.push_back(std::move(s));
  return st;
}

ScenarioSetup build_scenario(const ScenarioSpec& spec, const DomainSpec& domain) {
  spec.validate();
  domain.validate();
  require_dim(spec, domain);
  const std::size_t n = domain.size();
  const double eps = domain.epsilon;
  const Grid g{domain};
  std::mt19937_64 rng(spec.seed);
  ScenarioSetup out;
  Field rho(n, 0.0);
  std::vector<Field> u(static_cast<std::size_t>(domain.dim), Field(n, 0.0));

  switch (spec.name) {
    case ScenarioName::UniformAdvection: {
      const double k = 2.0 * kPi * spec.param("modes") / spec.param("length");
      const double amp = spec.param("amp"), rho0 = spec.param("rho0");
      const double vel[3] = {spec.param("ux"), spec.param("uy"), spec.param("uz")};
      for (std::size_t c = 0; c < n; ++c) {
        double p = 1.0;
        for (int a = 0; a < domain.dim; ++a) p *= std::sin(k * g.x(c, a));
        rho[c] = rho0 * (1.0 + amp * p);
        for (int a = 0; a < domain.dim; ++a) u[a][c] = vel[a];
      }
      for (int a = 0; a < domain.dim; ++a) out.metadata[std::string("u") + "xyz"[a]] = vel[a];
      out.state = mollify_initial(rho, u, eps);
      break;
    }
    case ScenarioName::RiemannTwoStream: {
      const double rl = spec.param("rho_l"), ul = spec.param("u_l");
      const double rr = spec.param("rho_r"), ur = spec.param("u_r");
      for (std::size_t c = 0; c < n; ++c) {
        const bool left = g.x(c, 0) < 0.0;
        rho[c] = left ? rl : rr;
        u[0][c] = left ? ul : ur;
      }
      // delta-shock speed for colliding streams
      const double sl = std::sqrt(rl), sr = std::sqrt(rr);
      out.metadata["interface"] = 0.0;
      if (ul > ur && sl + sr > 0.0) out.metadata["shock_speed"] = (sl * ul + sr * ur) / (sl + sr);
      out.state = mollify_initial(rho, u, eps);
      break;
    }
    case ScenarioName::DeltaShock1D: {
      const double r = spec.param("rho"), v = spec.param("speed");
      for (std::size_t c = 0; c < n; ++c) {
        const double x = g.x(c, 0);
        rho[c] = r;
        // a cell centred on the midpoint is at rest
        u[0][c] = std::abs(x) < 1e-12 * eps ? 0.0 : (x < 0.0 ? v : -v);
      }
      out.metadata["midpoint"] = 0.0;
      out.metadata["inflow_rate"] = 2.0 * r * v;
      out.metadata["depletion_time"] = v > 0.0 ? 0.5 * domain.length(0) / v : kInf;
      out.state = mollify_initial(rho, u, eps);
      break;
    }
    case ScenarioName::GravityCollapse1D: {
      const double k = 2.0 * kPi / domain.length(0);
      const double rho0 = spec.param("rho0"), amp = spec.param("amp"), ua = spec.param("u_amp");
      for (std::size_t c = 0; c < n; ++c) {
        const double x = g.x(c, 0);
        rho[c] = rho0 * (1.0 + amp * std::cos(k * x));
        u[0][c] = -ua * std::sin(k * x);
      }
      out.state = mollify_initial(rho, u, eps);
      out.gravity = gravity_from(spec, GravityBoundary::TorusMeanSubtracted);
      break;
    }
    case ScenarioName::TwoSpeciesWells1D: {
      const double k = spec.param("wells") * 2.0 * kPi / domain.length(0);
      const double rd = spec.param("rho_dark"), wa = spec.param("well_amp");
      const double rb = spec.param("rho_baryon"), noise = spec.param("noise");
      Field baryon(n);
      for (std::size_t c = 0; c < n; ++c) {
        rho[c] = rd * (1.0 + wa * std::cos(k * g.x(c, 0)));
        baryon[c] = rb * (1.0 + noise * signed_uniform(rng));
      }
      out.state = mollify_initial(rho, u, eps);
      FluidState b = mollify_initial(baryon, u, eps);
      out.state.species.push_back(std::move(b.species[0]));
      out.gravity = gravity_from(spec, GravityBoundary::TorusMeanSubtracted);
      break;
    }
    case ScenarioName::RotatingDisk2D: {
      const double R = spec.param("radius"), rd = spec.param("rho_disk"), noise = spec.param("noise");
      const double v0 = spec.param("v0"), r0 = spec.param("r0"), rc = spec.param("r_core");
      for (std::size_t c = 0; c < n; ++c) {
        const double x = g.x(c, 0), y = g.x(c, 1);
        const double r = std::hypot(x, y);
        // one draw per cell, in storage order, whether or not it is used
        const double eta = signed_uniform(rng);
        if (r >= R) continue;
        rho[c] = rd * (1.0 + noise * eta);
        if (r >= rc && r > 0.0) {
          const double v = v0 * std::min(r / r0, 1.0);
          u[0][c] = -v * y / r;
          u[1][c] = v * x / r;
        }
      }
      out.metadata["radius"] = R;
      out.metadata["disk_mass"] = kPi * R * R * rd;
      out.state = mollify_initial(rho, u, eps);
      out.gravity = gravity_from(spec, GravityBoundary::FreeSpace);
      break;
    }
    case ScenarioName::NBodyCompare: {
      out.gravity = gravity_from(spec, GravityBoundary::FreeSpace);
      const double softening = std::pow(eps, out.gravity.alpha);
      if (!spec.bodies.empty()) {
        out.bodies = spec.bodies;
      } else {
        // equal pair on a circular orbit of the softened 2-D law, placed on
        // cell centers symmetric about the origin
        const double m = spec.param("mass"), G = out.gravity.G;
        const double half = 0.5 * spec.param("separation");
        const std::array<double, 3> pb{(std::floor(half / eps) + 0.5) * eps, 0.5 * eps, 0.0};
        const double sep = 2.0 * std::hypot(pb[0], pb[1]);
        const double r = 0.5 * sep;
        const double v = std::sqrt(2.0 * G * m * sep * r / (sep * sep + softening * softening));
        Body a, b;
        a.mass = b.mass = m;
        b.r = pb;
        a.r = {-pb[0], -pb[1], 0.0};
        b.U = {-v * pb[1] / r, v * pb[0] / r, 0.0};
        a.U = {-b.U[0], -b.U[1], 0.0};
        out.bodies = {a, b};
        out.metadata["orbit_radius"] = r;
        out.metadata["orbit_speed"] = v;
        out.metadata["period"] = 2.0 * kPi * r / v;
      }
      out.metadata["softening"] = softening;
      out.state = bodies_to_fields(out.bodies, domain, eps);
      break;
    }
    case ScenarioName::JeansCollapse2D: {
      const double k = 2.0 * kPi / domain.length(0);
      const double rho0 = spec.param("rho0"), amp = spec.param("amp"), ua = spec.param("u_amp");
      for (std::size_t c = 0; c < n; ++c) {
        const double x = g.x(c, 0), y = g.x(c, 1);
        rho[c] = rho0 * (1.0 + amp * std::cos(k * x) * std::cos(k * y));
        u[0][c] = ua * std::sin(k * y);
        u[1][c] = ua * std::sin(k * x);
      }
      out.state = mollify_initial(rho, u, eps);
      out.gravity = gravity_from(spec, GravityBoundary::TorusMeanSubtracted);
      break;
    }
  }
  return out;
}

}  // namespace wapf
