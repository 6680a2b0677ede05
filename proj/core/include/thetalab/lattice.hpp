#pragma once

// Exact integer-matrix and finite-abelian-group machinery: Smith normal form,
// quotient groups Z^g / K Z^g, torsion points of the complex torus, the
// characteristic-group fibers of the isogeny
//   phi_N(x_1, ..., x_N) = (x_1 + ... + x_N, x_1 - x_2, ..., x_1 - x_N),
// and the order/degree formulas for K(R_N).
//
// Everything here is exact; no fixed-width arithmetic leaks into results.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thetalab/numeric.hpp"

namespace thetalab::lattice {

/// Square integer matrix with arbitrary-precision entries, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(std::size_t n);
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix diagonal(std::span<const BigInt> diag);

  std::size_t size() const noexcept { return n_; }

  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  IntMatrix operator*(const IntMatrix& rhs) const;
  std::vector<BigInt> operator*(std::span<const BigInt> v) const;
  IntMatrix scaled(const BigInt& k) const;
  IntMatrix transposed() const;

  /// Exact determinant by fraction-free (Bareiss) elimination.
  BigInt determinant() const;
  bool is_symmetric() const;
  /// All leading principal minors strictly positive.
  bool is_positive_definite() const;
  bool is_diagonal() const;

  bool operator==(const IntMatrix& rhs) const = default;

  std::string str() const;

 private:
  std::size_t n_ = 0;
  std::vector<BigInt> data_;
};

/// U * K * V = D with U, V unimodular and D = diag(d_1 | d_2 | ... | d_g), d_i > 0.
struct SmithDecomposition {
  IntMatrix U;
  IntMatrix V;
  IntMatrix D;
  IntMatrix U_inv;

  std::vector<BigInt> invariant_factors() const;
};

/// Deterministic Smith normal form. Pivot: smallest nonzero magnitude in the
/// active block, ties broken by row-major position.
/// Throws DegenerateLattice if K is singular, ValidationError if K is empty.
SmithDecomposition smith_normal_form(const IntMatrix& K);

/// Element of a finite abelian group in invariant-factor coordinates,
/// 0 <= residues[i] < n_i.
struct GroupElement {
  std::vector<BigInt> residues;

  auto operator<=>(const GroupElement&) const = default;
  bool operator==(const GroupElement&) const = default;
};

/// Z/n_1 + ... + Z/n_g. When built from a matrix K, keeps the SNF so raw
/// Z^g residues can be converted to and from invariant coordinates.
class FiniteAbelianGroup {
 public:
  FiniteAbelianGroup() = default;
  explicit FiniteAbelianGroup(std::vector<BigInt> factors);

  /// Z^g / K Z^g through the Smith normal form of K.
  static FiniteAbelianGroup from_matrix(const IntMatrix& K);

  const std::vector<BigInt>& factors() const noexcept { return factors_; }
  std::size_t rank() const noexcept { return factors_.size(); }
  BigInt order() const;
  const std::optional<SmithDecomposition>& smith() const noexcept { return smith_; }

  GroupElement zero() const;
  GroupElement element(std::span<const BigInt> residues) const;
  GroupElement element(std::initializer_list<long long> residues) const;
  GroupElement add(const GroupElement& a, const GroupElement& b) const;
  GroupElement sub(const GroupElement& a, const GroupElement& b) const;
  GroupElement neg(const GroupElement& a) const;
  GroupElement mul(const GroupElement& a, const BigInt& k) const;
  bool contains(const GroupElement& a) const;

  /// Mixed-radix index in [0, order()).
  std::size_t index_of(const GroupElement& a) const;
  GroupElement element_at(std::size_t index) const;
  std::vector<GroupElement> elements() const;

  /// Raw residue class c + K Z^g -> invariant coordinates (U c mod D).
  GroupElement from_raw(std::span<const BigInt> raw) const;
  /// Canonical raw representative U^{-1} e of an element.
  std::vector<BigInt> to_raw(const GroupElement& a) const;

  /// The group with every factor multiplied by k (Z^g / kK Z^g); SNF shared.
  FiniteAbelianGroup scaled(const BigInt& k) const;

  std::string str() const;

 private:
  std::vector<BigInt> factors_;
  std::optional<SmithDecomposition> smith_;
};

/// Z^g / K Z^g. Throws DegenerateLattice for singular K.
FiniteAbelianGroup quotient_group(const IntMatrix& K);

/// Polarization level of a line bundle: scalar m (L_m = O(m Theta)), a
/// diagonal level vector (n_1..n_g), or a symmetric positive-definite K.
class LevelStructure {
 public:
  enum class Kind { Scalar, Diagonal, Matrix };

  static LevelStructure scalar(long long m, std::size_t g);
  static LevelStructure diagonal(std::vector<long long> levels);
  static LevelStructure matrix(IntMatrix K);

  Kind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return K_.size(); }
  const IntMatrix& matrix() const noexcept { return K_; }

  /// Level vector of the diagonalized basis: (m,..,m), (n_1..n_g) or the
  /// invariant factors of K.
  std::vector<BigInt> diagonal_levels() const;
  /// m for scalar levels; throws ValidationError otherwise.
  BigInt scalar_level() const;
  bool is_scalar() const noexcept { return kind_ == Kind::Scalar; }

  /// B(L) = Z^g / K Z^g.
  FiniteAbelianGroup base_group() const;
  /// L^{tensor N}: level multiplied by N.
  LevelStructure power(long long N) const;

  std::string str() const;

 private:
  LevelStructure(Kind kind, IntMatrix K) : kind_(kind), K_(std::move(K)) {}
  Kind kind_ = Kind::Scalar;
  IntMatrix K_;
};

/// B(L) embedded into B(L^{tensor N}) by multiplication by N.
GroupElement embed_times(const FiniteAbelianGroup& target, const GroupElement& d,
                         const BigInt& factor);

/// Solutions b in G^N of b_1 + ... + b_N = sum_target and b_1 - b_j = diff_targets[j-2].
/// G must be the level-N group (every factor divisible by N); the solution set is
/// empty or a coset of the N-torsion diagonal, of size N^g.
std::vector<std::vector<GroupElement>> fiber_solve(const FiniteAbelianGroup& G, long long N,
                                                   const GroupElement& sum_target,
                                                   std::span<const GroupElement> diff_targets);

/// Fiber of the characteristic map over d = (d_1..d_N) in B(L)^N:
/// b_1 + ... + b_N = N d_1 and b_1 - b_j = N d_j, arithmetic in B(L^{tensor N}).
std::vector<std::vector<GroupElement>> fiber_enumerate(std::span<const GroupElement> d, long long N,
                                                       const LevelStructure& level);

/// Point u + Omega v of the torus with u, v in Q^g / Z^g (stored reduced to [0, 1)).
class TorsionPoint {
 public:
  TorsionPoint() = default;
  TorsionPoint(std::vector<Rational> u, std::vector<Rational> v);
  static TorsionPoint zero(std::size_t g);

  const std::vector<Rational>& u() const noexcept { return u_; }
  const std::vector<Rational>& v() const noexcept { return v_; }
  std::size_t dimension() const noexcept { return u_.size(); }

  /// M x == 0 on the torus.
  bool is_torsion_of(const BigInt& M) const;
  /// Least M > 0 with M x == 0.
  BigInt order() const;

  TorsionPoint operator+(const TorsionPoint& rhs) const;
  TorsionPoint operator-(const TorsionPoint& rhs) const;
  TorsionPoint operator-() const;
  TorsionPoint times(const BigInt& k) const;

  auto operator<=>(const TorsionPoint&) const = default;
  bool operator==(const TorsionPoint&) const = default;

  std::string str() const;

 private:
  std::vector<Rational> u_;
  std::vector<Rational> v_;
};

/// All points of X_M (M^{2g} of them).
std::vector<TorsionPoint> torsion_subgroup(const BigInt& M, std::size_t g);

/// Source-side criterion: every x_i in X_{Nm} and x_1 + ... + x_N in X_m.
bool krn_membership(std::span<const TorsionPoint> p, long long N, long long m);

/// Image of a source tuple under phi_N.
std::vector<TorsionPoint> apply_isogeny(std::span<const TorsionPoint> p);

/// Target-side test y in K(R_N): constructs a preimage p with phi_N(p) = y
/// (x_1 is an N-th root of y_1 + y_2 + ... + y_N) and applies krn_membership.
bool krn_contains(std::span<const TorsionPoint> y, long long N, long long m);

/// |K(R_N)| = N^{2(N-2)g} m^{2Ng}.
BigInt krn_order(long long N, long long m, long long g);

/// Distinct images phi_N(p) over p in X_{Nm}^N with sum in X_m. Exhaustive;
/// refuses instances with more than 10^7 source tuples.
BigInt krn_count_brute_force(long long N, long long m, long long g);

/// deg R_N = (Ng)! N^{(N-2)g} m^{Ng}.
BigInt deg_rn(long long N, long long m, long long g);

BigInt factorial(long long n);
BigInt ipow(const BigInt& base, long long exp);

}  // namespace thetalab::lattice
