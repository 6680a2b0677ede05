#include "thetalab/rational_linalg.hpp"

#include <utility>

#include "thetalab/errors.hpp"

namespace thetalab::linalg {

namespace {

std::size_t width(const RationalMatrix& A) { return A.empty() ? 0 : A.front().size(); }

void check_rect(const RationalMatrix& A) {
  for (const auto& r : A)
    if (r.size() != width(A)) throw ValidationError("linalg: ragged matrix");
}

}  // namespace

std::size_t rank(const RationalMatrix& A) {
  check_rect(A);
  const std::size_t m = A.size();
  const std::size_t n = width(A);
  std::vector<std::vector<BigInt>> M(m, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < m; ++i) {
    BigInt l = 1;
    for (const auto& q : A[i]) {
      const BigInt d = boost::multiprecision::denominator(q);
      l = l / boost::multiprecision::gcd(l, d) * d;
    }
    for (std::size_t j = 0; j < n; ++j)
      M[i][j] = boost::multiprecision::numerator(A[i][j]) * (l / boost::multiprecision::denominator(A[i][j]));
  }
  std::size_t r = 0;
  BigInt prev = 1;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    std::size_t p = r;
    while (p < m && M[p][col] == 0) ++p;
    if (p == m) continue;
    std::swap(M[p], M[r]);
    for (std::size_t i = r + 1; i < m; ++i) {
      for (std::size_t j = col + 1; j < n; ++j) M[i][j] = (M[i][j] * M[r][col] - M[i][col] * M[r][j]) / prev;
      M[i][col] = 0;
    }
    prev = M[r][col];
    ++r;
  }
  return r;
}

RationalMatrix rref(RationalMatrix A, std::vector<std::size_t>* pivots) {
  check_rect(A);
  const std::size_t m = A.size();
  const std::size_t n = width(A);
  if (pivots) pivots->clear();
  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    std::size_t p = r;
    while (p < m && A[p][col] == 0) ++p;
    if (p == m) continue;
    std::swap(A[p], A[r]);
    const Rational piv = A[r][col];
    for (std::size_t j = col; j < n; ++j) A[r][j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || A[i][col] == 0) continue;
      const Rational f = A[i][col];
      for (std::size_t j = col; j < n; ++j) A[i][j] -= f * A[r][j];
    }
    if (pivots) pivots->push_back(col);
    ++r;
  }
  return A;
}

RationalMatrix nullspace(const RationalMatrix& A, std::size_t cols) {
  if (!A.empty() && width(A) != cols) throw ValidationError("linalg: column count mismatch");
  std::vector<std::size_t> piv;
  const RationalMatrix R = rref(A, &piv);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : piv) is_pivot[p] = true;
  RationalMatrix out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    RationalVector v(cols);
    v[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -R[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

RationalMatrix row_basis(const RationalMatrix& A) {
  std::vector<std::size_t> piv;
  RationalMatrix R = rref(A, &piv);
  R.resize(piv.size());
  return R;
}

RationalMatrix intersect_row_spaces(const RationalMatrix& A, const RationalMatrix& B, std::size_t cols) {
  const RationalMatrix a = row_basis(A);
  const RationalMatrix b = row_basis(B);
  if (a.empty() || b.empty()) return {};
  // sum alpha_i a_i - sum beta_j b_j = 0, one equation per coordinate
  const std::size_t k = a.size() + b.size();
  RationalMatrix eq(cols, RationalVector(k));
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t i = 0; i < a.size(); ++i) eq[c][i] = a[i][c];
    for (std::size_t j = 0; j < b.size(); ++j) eq[c][a.size() + j] = -b[j][c];
  }
  RationalMatrix out;
  for (const auto& coeff : nullspace(eq, k)) {
    RationalVector v(cols);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (coeff[i] != 0)
        for (std::size_t c = 0; c < cols; ++c) v[c] += coeff[i] * a[i][c];
    out.push_back(std::move(v));
  }
  return row_basis(out);
}

RationalMatrix multiply(const RationalMatrix& A, const RationalMatrix& B) {
  check_rect(A);
  check_rect(B);
  if (width(A) != B.size()) throw ValidationError("linalg: dimension mismatch in product");
  const std::size_t n = width(B);
  RationalMatrix C(A.size(), RationalVector(n));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t k = 0; k < B.size(); ++k) {
      if (A[i][k] == 0) continue;
      for (std::size_t j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
    }
  return C;
}

RationalMatrix identity(std::size_t n) {
  RationalMatrix I(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

RationalMatrix transpose(const RationalMatrix& A, std::size_t cols) {
  RationalMatrix T(cols, RationalVector(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) T[j][i] = A[i][j];
  return T;
}

}  // namespace thetalab::linalg
