#include "hdg5/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hdg5/errors.hpp"

namespace hdg5 {

Mesh::Mesh(std::vector<double> nodes, BoundaryKind kind) : nodes_(std::move(nodes)), kind_(kind) {
  if (nodes_.size() < 3)
    throw InvalidMeshError("mesh needs at least two elements, got " +
                           std::to_string(static_cast<int>(nodes_.size()) - 1));
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1]))
      throw InvalidMeshError("mesh nodes must be strictly increasing (node " + std::to_string(i) + ")");
  }
  const double h0 = nodes_[1] - nodes_[0];
  bool uniform = true;
  for (int e = 2; e <= element_count(); ++e) {
    // Widths of a uniform partition agree up to rounding in the node coordinates.
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(nodes_[e]));
    if (std::abs(nodes_[e] - nodes_[e - 1] - h0) > tol) {
      uniform = false;
      break;
    }
  }
  if (uniform) uniform_width_ = length() / element_count();
  uniform_ = uniform;
}

double Mesh::max_width() const {
  double h = 0.0;
  for (int e = 1; e <= element_count(); ++e) h = std::max(h, width(e));
  return h;
}

Mesh build_mesh(double a, double b, int n, BoundaryKind kind) {
  if (n < 2) throw InvalidMeshError("mesh needs at least two elements, got " + std::to_string(n));
  if (!(b > a)) throw InvalidMeshError("domain length must be positive");
  std::vector<double> nodes(n + 1);
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) nodes[i] = a + i * h;
  nodes[n] = b;
  return Mesh(std::move(nodes), kind);
}

}  // namespace hdg5
