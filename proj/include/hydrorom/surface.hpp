#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace rom {

/// Panelized sphere: per-panel quadrature points, outward unit normals, and
/// areas.  Panel areas are uniform and sum to the exact sphere area.
struct SphereSurface {
  std::vector<std::array<double, 3>> centers;
  std::vector<std::array<double, 3>> normals;
  std::vector<double> areas;
  std::array<double, 3> center{0, 0, 0};
  double diameter = 0;

  std::size_t n_panels() const { return centers.size(); }
};

}  // namespace rom
