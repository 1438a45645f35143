#pragma once

#include <Eigen/Dense>
#include <vector>

namespace buridan {

/// Attraction targets: the vertices of a convex polygon (d = 2) or the two
/// ends of a segment (d = 1). Row i of vertices() is the target of state i.
class PolygonTargets {
 public:
  /// Throws InvalidParameters unless the rows are distinct, number at least
  /// two, and are in convex position (every vertex strictly extreme).
  explicit PolygonTargets(Eigen::MatrixXd vertices);

  /// Targets 0 and 1 on the real line.
  static PolygonTargets line();
  /// Vertices (0,0), (1,0), (0,1).
  static PolygonTargets unit_triangle();

  int size() const { return static_cast<int>(vertices_.rows()); }
  int dim() const { return static_cast<int>(vertices_.cols()); }
  const Eigen::MatrixXd& vertices() const { return vertices_; }
  Eigen::VectorXd vertex(int i) const { return vertices_.row(i).transpose(); }

  /// True when p lies in the open convex hull of the vertices.
  bool strictly_inside(const Eigen::Ref<const Eigen::VectorXd>& p) const;

 private:
  Eigen::MatrixXd vertices_;
  std::vector<int> hull_;  // counter-clockwise vertex order, d = 2 only
};

}  // namespace buridan
