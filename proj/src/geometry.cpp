#include "buridan/geometry.hpp"

#include <algorithm>
#include <numeric>

#include "buridan/error.hpp"

namespace buridan {

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain; collinear points are dropped from the hull.
std::vector<int> convex_hull(const Eigen::MatrixXd& v) {
  const int n = static_cast<int>(v.rows());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return v(a, 0) < v(b, 0) || (v(a, 0) == v(b, 0) && v(a, 1) < v(b, 1));
  });
  auto pt = [&](int i) { return Eigen::Vector2d(v(i, 0), v(i, 1)); };
  std::vector<int> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(pt(hull[k - 2]), pt(hull[k - 1]), pt(idx[i])) <= 0) --k;
    hull[k++] = idx[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(pt(hull[k - 2]), pt(hull[k - 1]), pt(idx[i])) <= 0) --k;
    hull[k++] = idx[i];
  }
  hull.resize(std::max(k - 1, 1));
  return hull;
}

}  // namespace

PolygonTargets::PolygonTargets(Eigen::MatrixXd vertices) : vertices_(std::move(vertices)) {
  const auto n = vertices_.rows();
  require(n >= 2, ErrorKind::InvalidParameters, "need at least two targets");
  require(dim() == 1 || dim() == 2, ErrorKind::InvalidParameters, "targets must be 1-D or 2-D points");
  require(vertices_.allFinite(), ErrorKind::InvalidParameters, "targets must be finite");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      require(vertices_.row(i) != vertices_.row(j), ErrorKind::InvalidParameters, "duplicate target vertex");

  if (dim() == 1) {
    require(n == 2, ErrorKind::InvalidParameters, "a 1-D pen has exactly two targets");
    return;
  }
  if (n == 2) {
    hull_ = {0, 1};
    return;
  }
  hull_ = convex_hull(vertices_);
  require(static_cast<Eigen::Index>(hull_.size()) == n, ErrorKind::InvalidParameters,
          "targets are not in convex position");
}

PolygonTargets PolygonTargets::line() {
  Eigen::MatrixXd v(2, 1);
  v << 0.0, 1.0;
  return PolygonTargets(v);
}

PolygonTargets PolygonTargets::unit_triangle() {
  Eigen::MatrixXd v(3, 2);
  v << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  return PolygonTargets(v);
}

bool PolygonTargets::strictly_inside(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (p.size() != dim() || !p.allFinite()) return false;
  if (dim() == 1) {
    const double lo = std::min(vertices_(0, 0), vertices_(1, 0));
    const double hi = std::max(vertices_(0, 0), vertices_(1, 0));
    return lo < p[0] && p[0] < hi;
  }
  if (hull_.size() < 3) return false;
  const Eigen::Vector2d q(p[0], p[1]);
  for (std::size_t e = 0; e < hull_.size(); ++e) {
    const int a = hull_[e];
    const int b = hull_[(e + 1) % hull_.size()];
    const Eigen::Vector2d va(vertices_(a, 0), vertices_(a, 1));
    const Eigen::Vector2d vb(vertices_(b, 0), vertices_(b, 1));
    if (cross(va, vb, q) <= 0) return false;
  }
  return true;
}

}  // namespace buridan
