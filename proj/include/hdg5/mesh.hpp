#pragma once

#include <vector>

namespace hdg5 {

enum class BoundaryKind { Periodic, Dirichlet };

/// 1D partition 0 = x_0 < x_1 < ... < x_N = L. Element i (1-based) is (x_{i-1}, x_i).
class Mesh {
 public:
  Mesh(std::vector<double> nodes, BoundaryKind kind);

  int element_count() const { return static_cast<int>(nodes_.size()) - 1; }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int i) const { return nodes_[i]; }
  double left(int element) const { return nodes_[element - 1]; }
  double right(int element) const { return nodes_[element]; }
  /// Uniform meshes report one shared width so that every element sees identical data.
  double width(int element) const {
    return uniform_ ? uniform_width_ : nodes_[element] - nodes_[element - 1];
  }
  double max_width() const;
  double length() const { return nodes_.back() - nodes_.front(); }
  BoundaryKind boundary() const { return kind_; }
  bool periodic() const { return kind_ == BoundaryKind::Periodic; }
  bool uniform() const { return uniform_; }

 private:
  std::vector<double> nodes_;
  BoundaryKind kind_;
  bool uniform_ = false;
  double uniform_width_ = 0.0;
};

/// Uniform partition of [a, b] into n elements.
Mesh build_mesh(double a, double b, int n, BoundaryKind kind);

}  // namespace hdg5
