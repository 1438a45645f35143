#include <cmath>

#include "buridan/markov_core.hpp"
#include "buridan/polynomial.hpp"
#include "buridan/rng.hpp"
#include "doctest.h"

using namespace buridan;

namespace {

// Independent route: solve (A - I) v = 0 with the last equation replaced by sum(v) = 1.
Eigen::VectorXd null_space_oracle(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd m = a - Eigen::MatrixXd::Identity(n, n);
  m.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  return m.fullPivLu().solve(rhs);
}

TauMatrix random_tau(int n, Rng& rng) {
  TauMatrix tau(n);
  for (int i = 0; i < n; ++i) {
    const double budget = 0.05 + 0.9 * rng.uniform();
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w[j] = j == i ? 0.0 : 0.01 + rng.uniform();
    w *= budget / w.sum();
    for (int j = 0; j < n; ++j)
      if (j != i) tau.set(i, j, w[j]);
  }
  return tau;
}

double evaluate(const SparsePolynomial& p, const Eigen::VectorXd& vars) {
  double total = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double term = static_cast<double>(c);
    for (std::size_t k = 0; k < e.size(); ++k) term *= std::pow(vars[static_cast<Eigen::Index>(k)], e[k]);
    total += term;
  }
  return total;
}

}  // namespace

TEST_CASE("transition matrix layout") {
  const auto a = build_transition_matrix(TauMatrix::two_state(0.05, 0.08));
  CHECK(a(0, 0) == doctest::Approx(0.95));
  CHECK(a(1, 0) == doctest::Approx(0.05));
  CHECK(a(0, 1) == doctest::Approx(0.08));
  CHECK(a(1, 1) == doctest::Approx(0.92));
  CHECK(a.matrix().colwise().sum().isOnes(1e-15));
}

TEST_CASE("over-budget switching row is rejected") {
  Eigen::MatrixXd t(3, 3);
  t << 0, 0.7, 0.5, 0.1, 0, 0.1, 0.1, 0.1, 0;
  CHECK_THROWS_AS(build_transition_matrix(TauMatrix(t)), Error);
  CHECK_THROWS_AS(TauMatrix::two_state(1.2, 0.1), Error);
  CHECK_THROWS_AS(TauMatrix::two_state(-0.1, 0.1), Error);
}

TEST_CASE("two-state stationary vector") {
  const auto v = stationary_minor_determinant(build_transition_matrix(TauMatrix::two_state(0.05, 0.08)));
  CHECK(v[0] == doctest::Approx(0.08 / 0.13).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(0.05 / 0.13).epsilon(1e-14));
}

TEST_CASE("triangle benchmark stationary vector") {
  Eigen::MatrixXd t(3, 3);
  t << 0, 1e-3, 6e-3, 2e-3, 0, 3e-3, 4e-3, 5e-3, 0;
  const auto a = build_transition_matrix(TauMatrix(t));
  const auto v = stationary_minor_determinant(a);
  // Hand-evaluated minors are 30, 39, 33 (x 1e-6).
  CHECK(v[0] == doctest::Approx(30.0 / 102).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx(39.0 / 102).epsilon(1e-13));
  CHECK(v[2] == doctest::Approx(33.0 / 102).epsilon(1e-13));
  CHECK((v.vector() - null_space_oracle(a.matrix())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("minor determinant agrees with power iteration and the null-space solve") {
  Rng rng(2024, 7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    const auto a = build_transition_matrix(random_tau(n, rng));
    const auto v = stationary_minor_determinant(a);
    const auto p = stationary_power_iteration(a, 1e-15);
    CHECK((v.vector() - p.vector()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((v.vector() - null_space_oracle(a.matrix())).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(eigen_residual(a, v) < 1e-12);
    CHECK(v.vector().minCoeff() > 0.0);
  }
}

TEST_CASE("long double instantiation") {
  using LTau = BasicTauMatrix<long double>;
  const auto v = stationary_minor_determinant(build_transition_matrix(LTau::two_state(0.05L, 0.08L)));
  CHECK(std::abs(static_cast<double>(v[1] - 0.05L / 0.13L)) < 1e-17);
}

TEST_CASE("degenerate chains") {
  CHECK_THROWS_AS(stationary_minor_determinant(build_transition_matrix(TauMatrix(3))), Error);
  // Two absorbing halves: every principal minor vanishes.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
  t(0, 1) = 0.2;
  t(1, 0) = 0.3;
  t(2, 3) = 0.1;
  t(3, 2) = 0.4;
  try {
    stationary_minor_determinant(build_transition_matrix(TauMatrix(t)));
    FAIL("expected DegenerateChain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateChain);
  }
}

TEST_CASE("small switching rates in large chains are not flagged degenerate") {
  Rng rng(5, 3);
  auto tau = random_tau(8, rng);
  Eigen::MatrixXd small = tau.values() * 1e-3;
  const auto a = build_transition_matrix(TauMatrix(small));
  const auto v = stationary_minor_determinant(a);
  CHECK((v.vector() - null_space_oracle(a.matrix())).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("monomial counts") {
  CHECK(count_stationary_monomials(2) == 1);
  CHECK(count_stationary_monomials(3) == 3);
  CHECK(count_stationary_monomials(4) == 16);
  CHECK(count_stationary_monomials(5) == 125);
  CHECK_THROWS_AS(count_stationary_monomials(6), Error);
  CHECK_THROWS_AS(count_stationary_monomials(1), Error);
}

TEST_CASE("symbolic minor matches numeric determinant with uniform coefficient sign") {
  Rng rng(11, 2);
  for (int n = 2; n <= 4; ++n) {
    const auto tau = random_tau(n, rng);
    Eigen::VectorXd vars(n * (n - 1));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) vars[i * (n - 1) + (j < i ? j : j - 1)] = tau(i, j);
    Eigen::MatrixXd m = build_transition_matrix(tau).matrix() - Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k) {
      const auto poly = stationary_minor_polynomial(n, k);
      CHECK(evaluate(poly, vars) == doctest::Approx(detail::principal_minor(m, k).determinant()).epsilon(1e-12));
      const std::int64_t sign = n % 2 ? 1 : -1;
      for (const auto& [e, c] : poly.terms()) CHECK(c == sign);
    }
  }
}

TEST_CASE("sparse polynomial cancellation") {
  const auto x = SparsePolynomial::variable(2, 0);
  const auto y = SparsePolynomial::variable(2, 1);
  auto p = (x + y) * (x + -y);  // x^2 - y^2
  CHECK(p.size() == 2);
  p += y * y;
  CHECK(p.size() == 1);
  p -= x * x;
  CHECK(p.is_zero());
}
