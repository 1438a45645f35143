#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace buridan {

/// Multivariate polynomial with exact integer coefficients.
///
/// Monomials are keyed by their exponent vector; terms whose coefficient
/// cancels to zero are erased, so size() is the number of surviving
/// monomials.
class SparsePolynomial {
 public:
  using Exponents = std::vector<std::uint8_t>;
  using Terms = std::map<Exponents, std::int64_t>;

  explicit SparsePolynomial(int n_vars) : n_vars_(n_vars) {}

  static SparsePolynomial constant(int n_vars, std::int64_t c);
  static SparsePolynomial variable(int n_vars, int index);

  int n_vars() const { return n_vars_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  const Terms& terms() const { return terms_; }

  void add_term(const Exponents& e, std::int64_t c);

  SparsePolynomial& operator+=(const SparsePolynomial& o);
  SparsePolynomial& operator-=(const SparsePolynomial& o);
  SparsePolynomial operator-() const;
  friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b);
  friend SparsePolynomial operator+(SparsePolynomial a, const SparsePolynomial& b) { return a += b; }

 private:
  int n_vars_;
  Terms terms_;
};

/// det(M_kk) for the symbolic n-state chain, M = A - I, with one variable
/// per switching probability tau(i, j). Variable index of tau(i, j) is
/// i * (n - 1) + (j < i ? j : j - 1).
SparsePolynomial stationary_minor_polynomial(int n, int k);

}  // namespace buridan
