#pragma once

#include <array>
#include <cstddef>
#include <optional>

namespace wapf {

enum class Topology { Torus, OpenBox };

/// Uniform Cartesian grid of cubes of side epsilon. Axes beyond `dim` have a
/// single cell. Storage order is row-major with x fastest.
struct DomainSpec {
  int dim = 1;
  std::array<int, 3> cells{1, 1, 1};
  double epsilon = 1.0;
  Topology topology = Topology::Torus;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  /// Throws Error(Domain) unless dim in {1,2,3}, epsilon > 0 and every active
  /// axis has at least 3 cells.
  void validate() const;

  std::size_t size() const {
    return static_cast<std::size_t>(cells[0]) * cells[1] * cells[2];
  }
  std::size_t stride(int axis) const {
    return axis == 0 ? 1 : axis == 1 ? static_cast<std::size_t>(cells[0])
                                     : static_cast<std::size_t>(cells[0]) * cells[1];
  }
  double cell_volume() const;
  double length(int axis) const { return cells[axis] * epsilon; }
  double volume() const;

  std::size_t index(int i, int j = 0, int k = 0) const {
    return static_cast<std::size_t>(i) + stride(1) * j + stride(2) * k;
  }
  std::array<int, 3> coords(std::size_t cell) const;
  double center(int axis, int i) const { return origin[axis] + (i + 0.5) * epsilon; }

  /// Neighbor one cell along `axis` in direction `dir` (+1/-1). Torus wraps;
  /// OpenBox returns nullopt outside the box.
  std::optional<std::size_t> neighbor(std::size_t cell, int axis, int dir) const;

  /// Cell containing the point, or nullopt if outside the box.
  std::optional<std::size_t> locate(const std::array<double, 3>& point) const;

  bool operator==(const DomainSpec&) const = default;
};

}  // namespace wapf
