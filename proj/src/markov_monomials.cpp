#include <algorithm>
#include <numeric>
#include <string>

#include "buridan/markov_core.hpp"
#include "buridan/polynomial.hpp"

namespace buridan {

SparsePolynomial SparsePolynomial::constant(int n_vars, std::int64_t c) {
  SparsePolynomial p(n_vars);
  p.add_term(Exponents(n_vars, 0), c);
  return p;
}

SparsePolynomial SparsePolynomial::variable(int n_vars, int index) {
  SparsePolynomial p(n_vars);
  Exponents e(n_vars, 0);
  e[index] = 1;
  p.add_term(e, 1);
  return p;
}

void SparsePolynomial::add_term(const Exponents& e, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

SparsePolynomial& SparsePolynomial::operator+=(const SparsePolynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

SparsePolynomial& SparsePolynomial::operator-=(const SparsePolynomial& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

SparsePolynomial SparsePolynomial::operator-() const {
  SparsePolynomial out(n_vars_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
  return out;
}

SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
  SparsePolynomial out(a.n_vars_);
  SparsePolynomial::Exponents e(a.n_vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.n_vars_; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

namespace {

int tau_index(int n, int i, int j) { return i * (n - 1) + (j < i ? j : j - 1); }

int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t s = 0; s < perm.size(); ++s) {
    if (seen[s]) continue;
    std::size_t len = 0;
    for (std::size_t c = s; !seen[c]; c = static_cast<std::size_t>(perm[c])) {
      seen[c] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

}  // namespace

SparsePolynomial stationary_minor_polynomial(int n, int k) {
  require(n >= 2, ErrorKind::UnsupportedSize, "symbolic chain needs at least two states");
  require(k >= 0 && k < n, ErrorKind::InvalidParameters, "minor index out of range");
  const int vars = n * (n - 1);

  // M(r, c) = A(r, c) - delta(r, c); A(r, c) = tau(c, r) off the diagonal.
  auto entry = [&](int r, int c) {
    if (r != c) return SparsePolynomial::variable(vars, tau_index(n, c, r));
    SparsePolynomial d(vars);
    for (int j = 0; j < n; ++j)
      if (j != c) d -= SparsePolynomial::variable(vars, tau_index(n, c, j));
    return d;
  };

  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (i != k) keep.push_back(i);
  const int m = static_cast<int>(keep.size());

  std::vector<std::vector<SparsePolynomial>> minor;
  for (int r = 0; r < m; ++r) {
    minor.emplace_back();
    for (int c = 0; c < m; ++c) minor.back().push_back(entry(keep[r], keep[c]));
  }

  // Leibniz expansion; (n-1)! terms is small for the supported sizes.
  SparsePolynomial det(vars);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    SparsePolynomial term = SparsePolynomial::constant(vars, permutation_sign(perm));
    for (int r = 0; r < m && !term.is_zero(); ++r) term = term * minor[r][perm[r]];
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

std::size_t count_stationary_monomials(int n) {
  if (n < 2 || n > 5)
    fail(ErrorKind::UnsupportedSize, "monomial count is only supported for 2 <= n <= 5, got " + std::to_string(n));

  const std::int64_t expected_sign = (n - 1) % 2 == 0 ? 1 : -1;
  std::size_t count = 0;
  for (int k = 0; k < n; ++k) {
    const SparsePolynomial p = stationary_minor_polynomial(n, k);
    for (const auto& [e, c] : p.terms())
      require(c == expected_sign, ErrorKind::Internal,
              "stationary minor has a coefficient other than " + std::to_string(expected_sign));
    if (k == 0)
      count = p.size();
    else
      require(p.size() == count, ErrorKind::Internal, "coordinates have different monomial counts");
  }
  return count;
}

}  // namespace buridan
