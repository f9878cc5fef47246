#include "wapf/gravity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "wapf/error.hpp"

namespace wapf {
namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double bump(double r) {
  if (r >= 1.0) return 0.0;
  const double s = 1.0 - r * r;
  return s * s * s;
}

// Green gradient of the free-space Laplacian normalised so that
// div = 4 pi G delta. `d` is a displacement in length units.
std::array<double, 3> green_gradient(const std::array<double, 3>& d, int dim, double G) {
  const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  if (r2 == 0.0) return {0.0, 0.0, 0.0};
  const double f = dim == 2 ? 2.0 * G / r2 : G / (r2 * std::sqrt(r2));
  return {f * d[0], f * d[1], f * d[2]};
}

std::size_t wrap_index(const std::array<long, 3>& off, const std::array<int, 3>& shape) {
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int a = 0; a < 3; ++a) {
    long m = off[a] % shape[a];
    if (m < 0) m += shape[a];
    idx += static_cast<std::size_t>(m) * stride;
    stride *= static_cast<std::size_t>(shape[a]);
  }
  return idx;
}

// Signed mode number for FFT index m on an axis of n points.
long signed_mode(long m, long n) { return m <= n / 2 ? m : m - n; }

}  // namespace

void GravityConfig::validate() const {
  if (!enabled) return;
  if (!(G > 0.0) || !std::isfinite(G)) {
    throw Error(ErrorKind::InvalidValue, "gravity: G must be positive");
  }
  if (!(alpha > 0.0) || alpha > 1.0 / 3.0 + 1e-15) {
    throw Error(ErrorKind::InvalidValue, "gravity: alpha must lie in (0, 1/3]");
  }
}

double GravityField::max_abs_sum() const {
  if (grad_phi.empty()) return 0.0;
  double m = 0.0;
  for (std::size_t c = 0; c < grad_phi[0].size(); ++c) {
    double s = 0.0;
    for (const auto& g : grad_phi) s += std::abs(g[c]);
    m = std::max(m, s);
  }
  return m;
}

double GravityField::max_norm() const {
  if (grad_phi.empty()) return 0.0;
  double m = 0.0;
  for (std::size_t c = 0; c < grad_phi[0].size(); ++c) {
    double s = 0.0;
    for (const auto& g : grad_phi) s += g[c] * g[c];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double bump_integral(int dim) {
  switch (dim) {
    case 1: return 32.0 / 35.0;
    case 2: return kPi / 4.0;
    case 3: return 64.0 * kPi / 315.0;
    default: throw Error(ErrorKind::Domain, "bump_integral: dim must be 1, 2 or 3");
  }
}

double MollifierKernel::at(int i, int j, int k) const {
  const int s = side();
  return values[static_cast<std::size_t>(i + radius) +
                static_cast<std::size_t>(s) * ((dim > 1 ? j + radius : 0) +
                                               static_cast<std::size_t>(s) * (dim > 2 ? k + radius : 0))];
}

double MollifierKernel::max_value() const { return *std::max_element(values.begin(), values.end()); }

double MollifierKernel::discrete_integral() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * std::pow(epsilon, dim);
}

MollifierKernel mollifier_kernel(double alpha, double epsilon, int dim) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::Domain, "mollifier_kernel: dim must be 1, 2 or 3");
  if (!(alpha > 0.0) || !(epsilon > 0.0)) {
    throw Error(ErrorKind::InvalidValue, "mollifier_kernel: alpha and epsilon must be positive");
  }
  const double width = std::pow(epsilon, alpha);
  if (width < epsilon) {
    std::ostringstream os;
    os << "mollifier support eps^alpha = " << width << " is smaller than one cell (eps = " << epsilon
       << "); use a larger alpha or a finer grid";
    throw Error(ErrorKind::DegenerateKernel, os.str());
  }
  MollifierKernel k;
  k.dim = dim;
  k.epsilon = epsilon;
  k.width = width;
  k.radius = static_cast<int>(std::floor(width / epsilon));
  const int s = k.side();
  const int sy = dim > 1 ? s : 1;
  const int sz = dim > 2 ? s : 1;
  k.values.assign(static_cast<std::size_t>(s) * sy * sz, 0.0);
  double sum = 0.0;
  for (int z = 0; z < sz; ++z) {
    for (int y = 0; y < sy; ++y) {
      for (int x = 0; x < s; ++x) {
        const double dx = (x - k.radius) * epsilon;
        const double dy = dim > 1 ? (y - k.radius) * epsilon : 0.0;
        const double dz = dim > 2 ? (z - k.radius) * epsilon : 0.0;
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz) / width;
        const double v = bump(r);
        k.values[x + static_cast<std::size_t>(s) * (y + static_cast<std::size_t>(sy) * z)] = v;
        sum += v;
      }
    }
  }
  const double scale = 1.0 / (sum * std::pow(epsilon, dim));
  for (double& v : k.values) v *= scale;
  return k;
}

GravityField grad_phi_1d(const Field& rho, const DomainSpec& domain, const GravityConfig& cfg) {
  if (domain.dim != 1) throw Error(ErrorKind::Domain, "grad_phi_1d requires a 1-D domain");
  if (rho.size() != domain.size()) throw Error(ErrorKind::Shape, "grad_phi_1d: density size mismatch");
  const std::size_t n = rho.size();
  const double eps = domain.epsilon;
  const double four_pi_g = 4.0 * kPi * cfg.G;
  GravityField f;
  f.grad_phi.assign(1, Field(n));
  Field& gx = f.grad_phi[0];

  const double mean = cfg.boundary == GravityBoundary::TorusMeanSubtracted
                          ? compensated_sum(rho) / static_cast<double>(n)
                          : 0.0;
  // Cumulative integral from the low wall to each cell center.
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (rho[i] - mean) * eps;
    gx[i] = four_pi_g * (cum + 0.5 * q);
    cum += q;
  }
  if (cfg.boundary == GravityBoundary::TorusMeanSubtracted) {
    f.integration_constant = -compensated_sum(gx) / static_cast<double>(n);
  } else {
    f.integration_constant = -0.5 * four_pi_g * cum;
  }
  for (double& g : gx) g += f.integration_constant;
  return f;
}

struct GravitySolver::Impl {
  MollifierKernel kernel;
  std::unique_ptr<detail::RealFft> fft;
  std::vector<std::vector<cplx>> spectra;  // per axis, multiplies rho-hat
  std::array<int, 3> padded{1, 1, 1};
};

GravitySolver::GravitySolver(const DomainSpec& domain, const GravityConfig& cfg)
    : domain_(domain), cfg_(cfg) {
  domain_.validate();
  cfg_.validate();
  if (domain_.dim == 1 || !cfg_.enabled) return;

  impl_ = std::make_unique<Impl>();
  Impl& m = *impl_;
  const int dim = domain_.dim;
  const double eps = domain_.epsilon;
  m.kernel = mollifier_kernel(cfg_.alpha, eps, dim);
  const int r = m.kernel.radius;
  const double cell_vol = domain_.cell_volume();

  auto for_each_offset = [dim](const std::array<int, 3>& lo, const std::array<int, 3>& hi, auto&& fn) {
    for (int z = dim > 2 ? lo[2] : 0; z <= (dim > 2 ? hi[2] : 0); ++z)
      for (int y = dim > 1 ? lo[1] : 0; y <= (dim > 1 ? hi[1] : 0); ++y)
        for (int x = lo[0]; x <= hi[0]; ++x) fn(std::array<long, 3>{x, y, z});
  };

  if (cfg_.boundary == GravityBoundary::FreeSpace) {
    // Combined kernel Kc = (mollifier weights) * (Green gradient), built by a
    // circular convolution large enough to be alias free on the range used.
    std::array<int, 3> qshape{1, 1, 1}, ext{0, 0, 0}, need{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      need[a] = domain_.cells[a] - 1;
      ext[a] = need[a] + r;
      qshape[a] = 2 * domain_.cells[a] + 4 * r;
    }
    detail::RealFft qfft(qshape, dim);
    std::vector<double> weights(qfft.real_size(), 0.0);
    for_each_offset({-r, -r, -r}, {r, r, r}, [&](const std::array<long, 3>& w) {
      weights[wrap_index(w, qshape)] =
          m.kernel.at(static_cast<int>(w[0]), static_cast<int>(w[1]), static_cast<int>(w[2])) * cell_vol;
    });
    std::vector<cplx> wspec(qfft.complex_size());
    qfft.forward(weights.data(), wspec.data());

    for (int a = 0; a < dim; ++a) m.padded[a] = 2 * domain_.cells[a];
    m.fft = std::make_unique<detail::RealFft>(m.padded, dim);
    std::vector<double> green(qfft.real_size()), comb(qfft.real_size()), padded(m.fft->real_size());
    std::vector<cplx> gspec(qfft.complex_size());
    const std::array<int, 3> neg_ext{-ext[0], -ext[1], -ext[2]};
    const std::array<int, 3> neg_need{-need[0], -need[1], -need[2]};
    for (int a = 0; a < dim; ++a) {
      std::fill(green.begin(), green.end(), 0.0);
      for_each_offset(neg_ext, ext, [&](const std::array<long, 3>& d) {
        const std::array<double, 3> disp{d[0] * eps, d[1] * eps, d[2] * eps};
        green[wrap_index(d, qshape)] = green_gradient(disp, dim, cfg_.G)[a];
      });
      qfft.forward(green.data(), gspec.data());
      for (std::size_t i = 0; i < gspec.size(); ++i) gspec[i] *= wspec[i];
      qfft.inverse(gspec.data(), comb.data());
      const double qnorm = 1.0 / static_cast<double>(qfft.real_size());
      std::fill(padded.begin(), padded.end(), 0.0);
      for_each_offset(neg_need, need, [&](const std::array<long, 3>& d) {
        padded[wrap_index(d, m.padded)] = comb[wrap_index(d, qshape)] * qnorm * cell_vol;
      });
      std::vector<cplx> spec(m.fft->complex_size());
      m.fft->forward(padded.data(), spec.data());
      const double pnorm = 1.0 / static_cast<double>(m.fft->real_size());
      for (auto& s : spec) s *= pnorm;
      m.spectra.push_back(std::move(spec));
    }
  } else {
    m.padded = domain_.cells;
    m.fft = std::make_unique<detail::RealFft>(m.padded, dim);
    std::vector<double> weights(m.fft->real_size(), 0.0);
    for_each_offset({-r, -r, -r}, {r, r, r}, [&](const std::array<long, 3>& w) {
      weights[wrap_index(w, m.padded)] +=
          m.kernel.at(static_cast<int>(w[0]), static_cast<int>(w[1]), static_cast<int>(w[2])) * cell_vol;
    });
    std::vector<cplx> wspec(m.fft->complex_size());
    m.fft->forward(weights.data(), wspec.data());
    const int cnx = m.fft->complex_nx();
    const double norm = 1.0 / static_cast<double>(m.fft->real_size());
    for (int a = 0; a < dim; ++a) {
      std::vector<cplx> spec(m.fft->complex_size());
      for (int kz = 0; kz < m.padded[2]; ++kz) {
        for (int ky = 0; ky < m.padded[1]; ++ky) {
          for (int kx = 0; kx < cnx; ++kx) {
            const std::size_t idx =
                static_cast<std::size_t>(kx) + static_cast<std::size_t>(cnx) * (ky + static_cast<std::size_t>(m.padded[1]) * kz);
            const std::array<long, 3> mode{kx, signed_mode(ky, m.padded[1]), signed_mode(kz, m.padded[2])};
            std::array<double, 3> k{0.0, 0.0, 0.0};
            double k2 = 0.0;
            for (int b = 0; b < dim; ++b) {
              k[b] = 2.0 * kPi * static_cast<double>(mode[b]) / domain_.length(b);
              k2 += k[b] * k[b];
            }
            const bool nyquist = domain_.cells[a] % 2 == 0 && std::abs(mode[a]) == domain_.cells[a] / 2;
            if (k2 == 0.0 || nyquist) {
              spec[idx] = 0.0;
              continue;
            }
            // grad Phi-hat = -4 pi G i k rho_moll-hat / |k|^2
            spec[idx] = cplx(0.0, -4.0 * kPi * cfg_.G * k[a] / k2) * wspec[idx] * norm;
          }
        }
      }
      m.spectra.push_back(std::move(spec));
    }
  }
}

GravitySolver::~GravitySolver() = default;
GravitySolver::GravitySolver(GravitySolver&&) noexcept = default;
GravitySolver& GravitySolver::operator=(GravitySolver&&) noexcept = default;

const MollifierKernel& GravitySolver::kernel() const {
  if (!impl_) throw Error(ErrorKind::Domain, "gravity solver has no mollifier kernel (1-D or disabled)");
  return impl_->kernel;
}

GravityField GravitySolver::zero() const {
  GravityField f;
  f.grad_phi.assign(domain_.dim, Field(domain_.size(), 0.0));
  return f;
}

GravityField GravitySolver::compute(const FluidState& state) const {
  if (!cfg_.enabled) return zero();
  if (state.species.size() == 1) return compute(state.species[0].rho);
  return compute(total_density(state));
}

GravityField GravitySolver::compute(const Field& rho) const {
  if (rho.size() != domain_.size()) throw Error(ErrorKind::Shape, "gravity: density size mismatch");
  if (!cfg_.enabled) return zero();
  if (domain_.dim == 1) return grad_phi_1d(rho, domain_, cfg_);

  const Impl& m = *impl_;
  const auto& fft = *m.fft;
  std::vector<double> work(fft.real_size(), 0.0);
  const int nx = domain_.cells[0], ny = domain_.cells[1], nz = domain_.cells[2];
  const std::size_t px = m.padded[0], py = m.padded[1];
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) work[i + px * (j + py * k)] = rho[domain_.index(i, j, k)];

  std::vector<cplx> rho_hat(fft.complex_size()), prod(fft.complex_size());
  fft.forward(work.data(), rho_hat.data());

  GravityField f;
  f.grad_phi.assign(domain_.dim, Field(domain_.size()));
  for (int a = 0; a < domain_.dim; ++a) {
    const auto& spec = m.spectra[a];
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = rho_hat[i] * spec[i];
    fft.inverse(prod.data(), work.data());
    Field& g = f.grad_phi[a];
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) g[domain_.index(i, j, k)] = work[i + px * (j + py * k)];
  }
  return f;
}

GravityField grad_phi_nd(const Field& rho, const DomainSpec& domain, const GravityConfig& cfg) {
  if (domain.dim != 2 && domain.dim != 3) throw Error(ErrorKind::Domain, "grad_phi_nd requires 2-D or 3-D");
  GravityConfig on = cfg;
  on.enabled = true;
  return GravitySolver(domain, on).compute(rho);
}

GravityField grad_phi_nd_direct(const Field& rho, const DomainSpec& domain, const GravityConfig& cfg) {
  if (domain.dim != 2 && domain.dim != 3) throw Error(ErrorKind::Domain, "grad_phi_nd_direct requires 2-D or 3-D");
  if (cfg.boundary != GravityBoundary::FreeSpace) {
    throw Error(ErrorKind::Domain, "grad_phi_nd_direct only implements the FreeSpace boundary");
  }
  if (rho.size() != domain.size()) throw Error(ErrorKind::Shape, "gravity: density size mismatch");
  const int dim = domain.dim;
  const double eps = domain.epsilon;
  const double vol = domain.cell_volume();
  const auto kern = mollifier_kernel(cfg.alpha, eps, dim);
  const int r = kern.radius;
  const std::array<int, 3> n = domain.cells;
  std::array<int, 3> e{1, 1, 1};
  for (int a = 0; a < dim; ++a) e[a] = n[a] + 2 * r;
  const int ry = dim > 1 ? r : 0, rz = dim > 2 ? r : 0;

  // Mollified density on the grid extended by the kernel radius.
  std::vector<double> moll(static_cast<std::size_t>(e[0]) * e[1] * e[2], 0.0);
  for (int z = 0; z < e[2]; ++z)
    for (int y = 0; y < e[1]; ++y)
      for (int x = 0; x < e[0]; ++x) {
        double acc = 0.0;
        for (int wz = -rz; wz <= rz; ++wz)
          for (int wy = -ry; wy <= ry; ++wy)
            for (int wx = -r; wx <= r; ++wx) {
              const int sx = x - r - wx, sy = y - ry - wy, sz = z - rz - wz;
              if (sx < 0 || sx >= n[0] || sy < 0 || sy >= n[1] || sz < 0 || sz >= n[2]) continue;
              acc += kern.at(wx, wy, wz) * vol * rho[domain.index(sx, sy, sz)];
            }
        moll[x + static_cast<std::size_t>(e[0]) * (y + static_cast<std::size_t>(e[1]) * z)] = acc;
      }

  GravityField f;
  f.grad_phi.assign(dim, Field(domain.size(), 0.0));
  for (std::size_t c = 0; c < domain.size(); ++c) {
    const auto xc = domain.coords(c);
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (int z = 0; z < e[2]; ++z)
      for (int y = 0; y < e[1]; ++y)
        for (int x = 0; x < e[0]; ++x) {
          const double q = moll[x + static_cast<std::size_t>(e[0]) * (y + static_cast<std::size_t>(e[1]) * z)];
          if (q == 0.0) continue;
          const std::array<double, 3> d{(xc[0] - (x - r)) * eps, (xc[1] - (y - ry)) * eps,
                                        (xc[2] - (z - rz)) * eps};
          const auto g = green_gradient(d, dim, cfg.G);
          for (int a = 0; a < dim; ++a) acc[a] += q * vol * g[a];
        }
    for (int a = 0; a < dim; ++a) f.grad_phi[a][c] = acc[a];
  }
  return f;
}

void apply_gravity_source(RhsOutput& rhs, const FluidState& state, const GravityField& field) {
  if (rhs.species.size() != state.species.size()) {
    throw Error(ErrorKind::Shape, "apply_gravity_source: species count mismatch");
  }
  for (std::size_t s = 0; s < state.species.size(); ++s) {
    const Field& rho = state.species[s].rho;
    auto& dmom = rhs.species[s].mom;
    if (dmom.size() != field.grad_phi.size()) {
      throw Error(ErrorKind::Shape, "apply_gravity_source: field dimension mismatch");
    }
    for (std::size_t a = 0; a < dmom.size(); ++a) {
      const Field& g = field.grad_phi[a];
      for (std::size_t c = 0; c < rho.size(); ++c) dmom[a][c] -= rho[c] * g[c];
    }
  }
}

}  // namespace wapf
