#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>

#include "buridan/error.hpp"

namespace buridan {

/// Per-step switching probabilities tau(i, j), i != j, of an n-state chain.
///
/// Entries are validated to lie in [0, 1] on construction. The per-row
/// budget sum_j tau(i, j) <= 1 is checked when the transition matrix is
/// built, so a TauMatrix can be assembled entry by entry.
template <typename Scalar>
class BasicTauMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit BasicTauMatrix(int n_states) : tau_(Matrix::Zero(n_states, n_states)) {
    require(n_states >= 1, ErrorKind::InvalidParameters, "tau matrix needs at least one state");
  }

  /// Off-diagonal entries of `values` are tau(i, j); the diagonal is ignored.
  explicit BasicTauMatrix(const Matrix& values) : tau_(values) {
    require(values.rows() == values.cols() && values.rows() >= 1, ErrorKind::InvalidParameters,
            "tau matrix must be square and non-empty");
    tau_.diagonal().setZero();
    for (Eigen::Index i = 0; i < tau_.rows(); ++i)
      for (Eigen::Index j = 0; j < tau_.cols(); ++j) check_entry(i, j, tau_(i, j));
  }

  static BasicTauMatrix two_state(Scalar tau01, Scalar tau10) {
    BasicTauMatrix t(2);
    t.set(0, 1, tau01);
    t.set(1, 0, tau10);
    return t;
  }

  int n_states() const { return static_cast<int>(tau_.rows()); }

  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return tau_(i, j); }

  void set(Eigen::Index i, Eigen::Index j, Scalar value) {
    require(i != j, ErrorKind::InvalidParameters, "tau is only defined off the diagonal");
    check_entry(i, j, value);
    tau_(i, j) = value;
  }

  /// Total probability of leaving state i in one step.
  Scalar exit_probability(Eigen::Index i) const { return tau_.row(i).sum(); }

  const Matrix& values() const { return tau_; }

 private:
  static void check_entry(Eigen::Index i, Eigen::Index j, Scalar value) {
    if (!(value >= Scalar(0) && value <= Scalar(1))) {
      std::ostringstream os;
      os << "tau(" << i << "," << j << ") = " << value << " is not a probability";
      fail(ErrorKind::InvalidParameters, os.str());
    }
  }

  Matrix tau_;
};

using TauMatrix = BasicTauMatrix<double>;

/// Square matrix with nonnegative entries whose columns each sum to one.
template <typename Scalar>
class ColumnStochasticMatrix {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static constexpr double kColumnSumTolerance = 1e-12;

  explicit ColumnStochasticMatrix(Matrix entries) : a_(std::move(entries)) {
    require(a_.rows() == a_.cols() && a_.rows() >= 1, ErrorKind::InvalidParameters,
            "stochastic matrix must be square and non-empty");
    for (Eigen::Index c = 0; c < a_.cols(); ++c) {
      for (Eigen::Index r = 0; r < a_.rows(); ++r)
        require(a_(r, c) >= Scalar(0) && a_(r, c) <= Scalar(1), ErrorKind::InvalidParameters,
                "stochastic matrix entries must lie in [0, 1]");
      using std::abs;
      require(abs(a_.col(c).sum() - Scalar(1)) <= Scalar(kColumnSumTolerance),
              ErrorKind::InvalidParameters, "stochastic matrix column does not sum to 1");
    }
  }

  Eigen::Index size() const { return a_.rows(); }
  Scalar operator()(Eigen::Index r, Eigen::Index c) const { return a_(r, c); }
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

/// Nonnegative vector summing to one.
template <typename Scalar>
class ProbabilityVector {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit ProbabilityVector(Vector p) : p_(std::move(p)) {
    using std::abs;
    require(p_.size() >= 1 && (p_.array() >= Scalar(0)).all(), ErrorKind::InvalidParameters,
            "probability vector entries must be nonnegative");
    require(abs(p_.sum() - Scalar(1)) <= Scalar(1e-12), ErrorKind::InvalidParameters,
            "probability vector must sum to 1");
  }

  Eigen::Index size() const { return p_.size(); }
  Scalar operator[](Eigen::Index i) const { return p_[i]; }
  const Vector& vector() const { return p_; }

 private:
  Vector p_;
};

/// A(j, i) = tau(i, j) off the diagonal, A(i, i) = 1 - sum_j tau(i, j).
template <typename Scalar>
ColumnStochasticMatrix<Scalar> build_transition_matrix(const BasicTauMatrix<Scalar>& params) {
  const auto n = params.n_states();
  typename ColumnStochasticMatrix<Scalar>::Matrix a = params.values().transpose();
  for (int i = 0; i < n; ++i) {
    const Scalar leave = params.exit_probability(i);
    if (leave > Scalar(1)) {
      std::ostringstream os;
      os << "switching probabilities out of state " << i << " sum to " << leave << " > 1";
      fail(ErrorKind::InvalidParameters, os.str());
    }
    a(i, i) = Scalar(1) - leave;
  }
  return ColumnStochasticMatrix<Scalar>(std::move(a));
}

namespace detail {

template <typename Derived>
typename Derived::Scalar small_determinant(const Eigen::MatrixBase<Derived>& m) {
  switch (m.rows()) {
    case 0:
      return typename Derived::Scalar(1);
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    default:
      return m.partialPivLu().determinant();
  }
}

// Copy of m with row k and column k removed.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> principal_minor(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, Eigen::Index k) {
  const Eigen::Index n = m.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n - 1, n - 1);
  for (Eigen::Index r = 0, ro = 0; r < n; ++r) {
    if (r == k) continue;
    for (Eigen::Index c = 0, co = 0; c < n; ++c) {
      if (c == k) continue;
      out(ro, co++) = m(r, c);
    }
    ++ro;
  }
  return out;
}

}  // namespace detail

/// Stationary vector from the principal minors of M = A - I.
///
/// v_k = |det M_kk|, normalized to sum one. All minors carry the sign
/// (-1)^(n-1), so taking magnitudes only discards that common factor.
/// Minors of size <= 2 use cofactor formulas, larger ones partial-pivot LU.
template <typename Scalar>
ProbabilityVector<Scalar> stationary_minor_determinant(const ColumnStochasticMatrix<Scalar>& a) {
  using std::abs;
  using std::pow;
  const Eigen::Index n = a.size();
  require(n >= 2, ErrorKind::InvalidParameters, "stationary vector needs at least two states");

  typename ColumnStochasticMatrix<Scalar>::Matrix m = a.matrix();
  m.diagonal().array() -= Scalar(1);

  // Degeneracy is judged against the natural size of an (n-1)-fold product
  // of entries of M, not an absolute floor.
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) fail(ErrorKind::DegenerateChain, "chain never switches; stationary vector not unique");

  typename ProbabilityVector<Scalar>::Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = abs(detail::small_determinant(detail::principal_minor(m, k)));

  const Scalar floor = Scalar(1e-14) * pow(scale, Scalar(n - 1));
  if (!(v.maxCoeff() >= floor))
    fail(ErrorKind::DegenerateChain, "all principal minors vanish; chain has no unique stationary vector");
  v /= v.sum();
  return ProbabilityVector<Scalar>(std::move(v));
}

/// Iterates p <- A p from the uniform vector until successive iterates
/// differ by less than `tol` in the max norm.
template <typename Scalar>
ProbabilityVector<Scalar> stationary_power_iteration(const ColumnStochasticMatrix<Scalar>& a, Scalar tol,
                                                     std::size_t max_iterations = 1'000'000) {
  const Eigen::Index n = a.size();
  using Vector = typename ProbabilityVector<Scalar>::Vector;
  Vector p = Vector::Constant(n, Scalar(1) / Scalar(n));
  for (std::size_t it = 0; it < max_iterations; ++it) {
    Vector next = a.matrix() * p;
    next /= next.sum();
    const Scalar change = (next - p).cwiseAbs().maxCoeff();
    p = std::move(next);
    if (change < tol) return ProbabilityVector<Scalar>(std::move(p));
  }
  fail(ErrorKind::NonConvergence, "power iteration hit its iteration cap");
}

/// Max-norm of A v - v.
template <typename Scalar>
Scalar eigen_residual(const ColumnStochasticMatrix<Scalar>& a, const ProbabilityVector<Scalar>& v) {
  return (a.matrix() * v.vector() - v.vector()).cwiseAbs().maxCoeff();
}

/// Number of distinct monomials in det(M_kk) of the fully symbolic n-state
/// chain, expanded exactly. Also verifies every coefficient is +-1 with one
/// common sign and that all coordinates k agree. Supports 2 <= n <= 5.
std::size_t count_stationary_monomials(int n);

}  // namespace buridan
