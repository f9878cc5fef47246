#include "wapf/domain.hpp"

#include <cmath>
#include <sstream>

#include "wapf/error.hpp"

namespace wapf {

void DomainSpec::validate() const {
  if (dim < 1 || dim > 3) {
    throw Error(ErrorKind::Domain, "dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::Domain, "epsilon must be positive and finite");
  }
  for (int a = 0; a < 3; ++a) {
    if (a < dim && cells[a] < 3) {
      std::ostringstream os;
      os << "axis " << a << " needs at least 3 cells, got " << cells[a];
      throw Error(ErrorKind::Domain, os.str());
    }
    if (a >= dim && cells[a] != 1) {
      throw Error(ErrorKind::Domain, "inactive axes must have exactly one cell");
    }
  }
}

double DomainSpec::cell_volume() const { return std::pow(epsilon, dim); }

double DomainSpec::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= length(a);
  return v;
}

std::array<int, 3> DomainSpec::coords(std::size_t cell) const {
  const auto nx = static_cast<std::size_t>(cells[0]);
  const auto ny = static_cast<std::size_t>(cells[1]);
  return {static_cast<int>(cell % nx), static_cast<int>((cell / nx) % ny),
          static_cast<int>(cell / (nx * ny))};
}

std::optional<std::size_t> DomainSpec::neighbor(std::size_t cell, int axis, int dir) const {
  auto c = coords(cell);
  int n = c[axis] + dir;
  if (n < 0 || n >= cells[axis]) {
    if (topology == Topology::OpenBox) return std::nullopt;
    n = (n + cells[axis]) % cells[axis];
  }
  c[axis] = n;
  return index(c[0], c[1], c[2]);
}

std::optional<std::size_t> DomainSpec::locate(const std::array<double, 3>& point) const {
  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const double s = (point[a] - origin[a]) / epsilon;
    if (!std::isfinite(s)) return std::nullopt;
    const auto i = static_cast<long>(std::floor(s));
    if (i < 0 || i >= cells[a]) return std::nullopt;
    c[a] = static_cast<int>(i);
  }
  return index(c[0], c[1], c[2]);
}

}  // namespace wapf
