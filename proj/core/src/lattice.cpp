#include "thetalab/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "thetalab/errors.hpp"

namespace thetalab::lattice {

namespace {

BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

Rational frac_part(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  return Rational(mod_floor(num, den), den);
}

BigInt lcm_big(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return abs_big(a / boost::multiprecision::gcd(a, b) * b);
}

}  // namespace

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::size_t n) : n_(n), data_(n * n) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
    : n_(rows.size()), data_(rows.size() * rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != n_) throw ValidationError("IntMatrix: rows must form a square matrix");
    std::size_t j = 0;
    for (long long v : row) data_[i * n_ + j++] = v;
    ++i;
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix I(n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

IntMatrix IntMatrix::diagonal(std::span<const BigInt> diag) {
  IntMatrix D(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) D(i, i) = diag[i];
  return D;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  if (rhs.n_ != n_) throw ValidationError("IntMatrix: dimension mismatch in product");
  IntMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < n_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

std::vector<BigInt> IntMatrix::operator*(std::span<const BigInt> v) const {
  if (v.size() != n_) throw ValidationError("IntMatrix: dimension mismatch in matrix-vector product");
  std::vector<BigInt> out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i] += (*this)(i, j) * v[j];
  return out;
}

IntMatrix IntMatrix::scaled(const BigInt& k) const {
  IntMatrix out = *this;
  for (auto& e : out.data_) e *= k;
  return out;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

BigInt IntMatrix::determinant() const {
  if (n_ == 0) return 1;
  std::vector<BigInt> a = data_;
  auto at = [&](std::size_t i, std::size_t j) -> BigInt& { return a[i * n_ + j]; };
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n_; ++k) {
    if (at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n_ && at(p, k) == 0) ++p;
      if (p == n_) return 0;
      for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n_; ++i) {
      for (std::size_t j = k + 1; j < n_; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
      }
      at(i, k) = 0;
    }
    prev = at(k, k);
  }
  return sign * at(n_ - 1, n_ - 1);
}

bool IntMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool IntMatrix::is_positive_definite() const {
  if (!is_symmetric()) return false;
  for (std::size_t k = 1; k <= n_; ++k) {
    IntMatrix minor(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor(i, j) = (*this)(i, j);
    if (minor.determinant() <= 0) return false;
  }
  return true;
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j && (*this)(i, j) != 0) return false;
  return true;
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < n_; ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < n_; ++j) os << (j ? "," : "") << (*this)(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Smith normal form

std::vector<BigInt> SmithDecomposition::invariant_factors() const {
  std::vector<BigInt> out(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) out[i] = D(i, i);
  return out;
}

SmithDecomposition smith_normal_form(const IntMatrix& K) {
  const std::size_t n = K.size();
  if (n == 0) throw ValidationError("smith_normal_form: empty matrix");
  if (K.determinant() == 0) throw DegenerateLattice("smith_normal_form: degenerate lattice (det K = 0)");

  IntMatrix A = K;
  IntMatrix U = IntMatrix::identity(n);
  IntMatrix Uinv = IntMatrix::identity(n);
  IntMatrix V = IntMatrix::identity(n);

  auto swap_rows = [&](std::size_t r1, std::size_t r2) {
    if (r1 == r2) return;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(A(r1, j), A(r2, j));
      std::swap(U(r1, j), U(r2, j));
      std::swap(Uinv(j, r1), Uinv(j, r2));
    }
  };
  auto swap_cols = [&](std::size_t c1, std::size_t c2) {
    if (c1 == c2) return;
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(A(i, c1), A(i, c2));
      std::swap(V(i, c1), V(i, c2));
    }
  };
  // row_dst -= q * row_src
  auto row_axpy = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t j = 0; j < n; ++j) {
      A(dst, j) -= q * A(src, j);
      U(dst, j) -= q * U(src, j);
      Uinv(j, src) += q * Uinv(j, dst);
    }
  };
  // col_dst -= q * col_src
  auto col_axpy = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t i = 0; i < n; ++i) {
      A(i, dst) -= q * A(i, src);
      V(i, dst) -= q * V(i, src);
    }
  };

  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // smallest nonzero |a_ij| in the active block, row-major tie break
      std::size_t pr = n, pc = n;
      BigInt best;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j) {
          if (A(i, j) == 0) continue;
          BigInt mag = abs_big(A(i, j));
          if (pr == n || mag < best) {
            best = mag;
            pr = i;
            pc = j;
          }
        }
      if (pr == n) throw DegenerateLattice("smith_normal_form: degenerate lattice");
      swap_rows(t, pr);
      swap_cols(t, pc);

      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        if (A(i, t) == 0) continue;
        BigInt q = A(i, t) / A(t, t);
        if (q != 0) row_axpy(i, t, q);
        if (A(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (A(t, j) == 0) continue;
        BigInt q = A(t, j) / A(t, t);
        if (q != 0) col_axpy(j, t, q);
        if (A(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // divisibility chain: pull an offending row into row t and repeat
      bool divides = true;
      for (std::size_t i = t + 1; i < n && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (A(i, j) % A(t, t) != 0) {
            row_axpy(t, i, BigInt(-1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (A(t, t) < 0) {
      for (std::size_t j = 0; j < n; ++j) {
        A(t, j) = -A(t, j);
        U(t, j) = -U(t, j);
        Uinv(j, t) = -Uinv(j, t);
      }
    }
  }
  return SmithDecomposition{std::move(U), std::move(V), std::move(A), std::move(Uinv)};
}

// ---------------------------------------------------------------------------
// FiniteAbelianGroup

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<BigInt> factors) : factors_(std::move(factors)) {
  for (const auto& f : factors_)
    if (f <= 0) throw ValidationError("FiniteAbelianGroup: invariant factors must be positive");
}

FiniteAbelianGroup FiniteAbelianGroup::from_matrix(const IntMatrix& K) {
  SmithDecomposition snf = smith_normal_form(K);
  FiniteAbelianGroup G(snf.invariant_factors());
  G.smith_ = std::move(snf);
  return G;
}

BigInt FiniteAbelianGroup::order() const {
  BigInt o = 1;
  for (const auto& f : factors_) o *= f;
  return o;
}

GroupElement FiniteAbelianGroup::zero() const { return GroupElement{std::vector<BigInt>(rank())}; }

GroupElement FiniteAbelianGroup::element(std::span<const BigInt> residues) const {
  if (residues.size() != rank()) throw ValidationError("GroupElement: wrong number of residues");
  GroupElement e;
  e.residues.resize(rank());
  for (std::size_t i = 0; i < rank(); ++i) e.residues[i] = mod_floor(residues[i], factors_[i]);
  return e;
}

GroupElement FiniteAbelianGroup::element(std::initializer_list<long long> residues) const {
  std::vector<BigInt> r(residues.begin(), residues.end());
  return element(std::span<const BigInt>(r));
}

GroupElement FiniteAbelianGroup::add(const GroupElement& a, const GroupElement& b) const {
  GroupElement e;
  e.residues.resize(rank());
  for (std::size_t i = 0; i < rank(); ++i) e.residues[i] = mod_floor(a.residues[i] + b.residues[i], factors_[i]);
  return e;
}

GroupElement FiniteAbelianGroup::sub(const GroupElement& a, const GroupElement& b) const {
  GroupElement e;
  e.residues.resize(rank());
  for (std::size_t i = 0; i < rank(); ++i) e.residues[i] = mod_floor(a.residues[i] - b.residues[i], factors_[i]);
  return e;
}

GroupElement FiniteAbelianGroup::neg(const GroupElement& a) const { return sub(zero(), a); }

GroupElement FiniteAbelianGroup::mul(const GroupElement& a, const BigInt& k) const {
  GroupElement e;
  e.residues.resize(rank());
  for (std::size_t i = 0; i < rank(); ++i) e.residues[i] = mod_floor(a.residues[i] * k, factors_[i]);
  return e;
}

bool FiniteAbelianGroup::contains(const GroupElement& a) const {
  if (a.residues.size() != rank()) return false;
  for (std::size_t i = 0; i < rank(); ++i)
    if (a.residues[i] < 0 || a.residues[i] >= factors_[i]) return false;
  return true;
}

std::size_t FiniteAbelianGroup::index_of(const GroupElement& a) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < rank(); ++i) {
    idx = idx * factors_[i].convert_to<std::size_t>() + a.residues[i].convert_to<std::size_t>();
  }
  return idx;
}

GroupElement FiniteAbelianGroup::element_at(std::size_t index) const {
  GroupElement e;
  e.residues.resize(rank());
  for (std::size_t i = rank(); i-- > 0;) {
    const auto f = factors_[i].convert_to<std::size_t>();
    e.residues[i] = index % f;
    index /= f;
  }
  return e;
}

std::vector<GroupElement> FiniteAbelianGroup::elements() const {
  const auto n = order().convert_to<std::size_t>();
  std::vector<GroupElement> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(element_at(i));
  return out;
}

GroupElement FiniteAbelianGroup::from_raw(std::span<const BigInt> raw) const {
  if (!smith_) return element(raw);
  return element(std::span<const BigInt>(smith_->U * raw));
}

std::vector<BigInt> FiniteAbelianGroup::to_raw(const GroupElement& a) const {
  if (!smith_) return a.residues;
  return smith_->U_inv * std::span<const BigInt>(a.residues);
}

FiniteAbelianGroup FiniteAbelianGroup::scaled(const BigInt& k) const {
  std::vector<BigInt> f = factors_;
  for (auto& v : f) v *= k;
  FiniteAbelianGroup G(std::move(f));
  if (smith_) {
    // U (kK) V = kD with the same unimodular pair
    SmithDecomposition s = *smith_;
    s.D = s.D.scaled(k);
    G.smith_ = std::move(s);
  }
  return G;
}

std::string FiniteAbelianGroup::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < rank(); ++i) os << (i ? " + " : "") << "Z/" << factors_[i];
  return os.str();
}

FiniteAbelianGroup quotient_group(const IntMatrix& K) { return FiniteAbelianGroup::from_matrix(K); }

// ---------------------------------------------------------------------------
// LevelStructure

LevelStructure LevelStructure::scalar(long long m, std::size_t g) {
  if (m < 1) throw ValidationError("LevelStructure: scalar level must be >= 1");
  if (g < 1) throw ValidationError("LevelStructure: dimension must be >= 1");
  IntMatrix K(g);
  for (std::size_t i = 0; i < g; ++i) K(i, i) = m;
  return LevelStructure(Kind::Scalar, std::move(K));
}

LevelStructure LevelStructure::diagonal(std::vector<long long> levels) {
  if (levels.empty()) throw ValidationError("LevelStructure: empty level vector");
  IntMatrix K(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1) throw ValidationError("LevelStructure: level entries must be >= 1");
    K(i, i) = levels[i];
  }
  return LevelStructure(Kind::Diagonal, std::move(K));
}

LevelStructure LevelStructure::matrix(IntMatrix K) {
  if (K.size() == 0) throw ValidationError("LevelStructure: empty K-matrix");
  if (!K.is_positive_definite())
    throw ValidationError("LevelStructure: K must be symmetric positive definite");
  return LevelStructure(Kind::Matrix, std::move(K));
}

std::vector<BigInt> LevelStructure::diagonal_levels() const {
  if (kind_ == Kind::Matrix) return smith_normal_form(K_).invariant_factors();
  std::vector<BigInt> out(K_.size());
  for (std::size_t i = 0; i < K_.size(); ++i) out[i] = K_(i, i);
  return out;
}

BigInt LevelStructure::scalar_level() const {
  if (kind_ != Kind::Scalar) throw ValidationError("LevelStructure: not a scalar level");
  return K_(0, 0);
}

FiniteAbelianGroup LevelStructure::base_group() const {
  if (kind_ == Kind::Matrix) return FiniteAbelianGroup::from_matrix(K_);
  return FiniteAbelianGroup(diagonal_levels());
}

LevelStructure LevelStructure::power(long long N) const {
  if (N < 1) throw ValidationError("LevelStructure: tensor power must be >= 1");
  return LevelStructure(kind_, K_.scaled(N));
}

std::string LevelStructure::str() const {
  switch (kind_) {
    case Kind::Scalar:
      return "m=" + K_(0, 0).str();
    case Kind::Diagonal: {
      std::string s = "diag(";
      for (std::size_t i = 0; i < K_.size(); ++i) s += (i ? "," : "") + K_(i, i).str();
      return s + ")";
    }
    case Kind::Matrix:
      return "K=" + K_.str();
  }
  return {};
}

// ---------------------------------------------------------------------------
// fibers

GroupElement embed_times(const FiniteAbelianGroup& target, const GroupElement& d, const BigInt& factor) {
  std::vector<BigInt> r(d.residues.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = d.residues[i] * factor;
  return target.element(std::span<const BigInt>(r));
}

std::vector<std::vector<GroupElement>> fiber_solve(const FiniteAbelianGroup& G, long long N,
                                                   const GroupElement& sum_target,
                                                   std::span<const GroupElement> diff_targets) {
  if (N < 1) throw ValidationError("fiber_solve: N must be >= 1");
  if (diff_targets.size() + 1 != static_cast<std::size_t>(N))
    throw ValidationError("fiber_solve: expected N-1 difference targets");
  const std::size_t g = G.rank();
  const BigInt bigN = N;
  for (const auto& f : G.factors())
    if (f % bigN != 0) throw ValidationError("fiber_solve: group factors must be divisible by N");

  // b_j = b_1 - D_j, so N b_1 = S + sum_j D_j
  GroupElement rhs = sum_target;
  for (const auto& D : diff_targets) rhs = G.add(rhs, D);

  std::vector<BigInt> base(g);
  std::vector<BigInt> step(g);
  for (std::size_t i = 0; i < g; ++i) {
    if (rhs.residues[i] % bigN != 0) return {};
    base[i] = rhs.residues[i] / bigN;
    step[i] = G.factors()[i] / bigN;
  }

  std::vector<std::vector<GroupElement>> out;
  std::vector<long long> t(g, 0);
  for (;;) {
    std::vector<BigInt> b1(g);
    for (std::size_t i = 0; i < g; ++i) b1[i] = base[i] + step[i] * t[i];
    std::vector<GroupElement> tuple;
    tuple.reserve(static_cast<std::size_t>(N));
    tuple.push_back(G.element(std::span<const BigInt>(b1)));
    for (const auto& D : diff_targets) tuple.push_back(G.sub(tuple.front(), D));
    out.push_back(std::move(tuple));

    std::size_t k = 0;
    while (k < g && ++t[k] == N) t[k++] = 0;
    if (k == g) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<GroupElement>> fiber_enumerate(std::span<const GroupElement> d, long long N,
                                                       const LevelStructure& level) {
  if (N < 1 || d.size() != static_cast<std::size_t>(N))
    throw ValidationError("fiber_enumerate: need exactly N characteristic indices");
  const FiniteAbelianGroup base = level.base_group();
  const FiniteAbelianGroup GN = base.scaled(N);
  for (const auto& e : d)
    if (!base.contains(e)) throw ValidationError("fiber_enumerate: index outside B(L)");
  const BigInt bigN = N;
  GroupElement sum = embed_times(GN, d[0], bigN);
  std::vector<GroupElement> diffs;
  for (std::size_t j = 1; j < d.size(); ++j) diffs.push_back(embed_times(GN, d[j], bigN));
  return fiber_solve(GN, N, sum, diffs);
}

// ---------------------------------------------------------------------------
// torsion points

TorsionPoint::TorsionPoint(std::vector<Rational> u, std::vector<Rational> v) : u_(std::move(u)), v_(std::move(v)) {
  if (u_.size() != v_.size()) throw ValidationError("TorsionPoint: u and v must have equal length");
  for (auto& q : u_) q = frac_part(q);
  for (auto& q : v_) q = frac_part(q);
}

TorsionPoint TorsionPoint::zero(std::size_t g) {
  return TorsionPoint(std::vector<Rational>(g), std::vector<Rational>(g));
}

bool TorsionPoint::is_torsion_of(const BigInt& M) const {
  for (const auto& q : u_)
    if (boost::multiprecision::denominator(Rational(q * M)) != 1) return false;
  for (const auto& q : v_)
    if (boost::multiprecision::denominator(Rational(q * M)) != 1) return false;
  return true;
}

BigInt TorsionPoint::order() const {
  BigInt o = 1;
  for (const auto& q : u_) o = lcm_big(o, boost::multiprecision::denominator(q));
  for (const auto& q : v_) o = lcm_big(o, boost::multiprecision::denominator(q));
  return o;
}

TorsionPoint TorsionPoint::operator+(const TorsionPoint& rhs) const {
  std::vector<Rational> u(u_.size()), v(v_.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = u_[i] + rhs.u_[i];
    v[i] = v_[i] + rhs.v_[i];
  }
  return TorsionPoint(std::move(u), std::move(v));
}

TorsionPoint TorsionPoint::operator-() const {
  std::vector<Rational> u(u_.size()), v(v_.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = -u_[i];
    v[i] = -v_[i];
  }
  return TorsionPoint(std::move(u), std::move(v));
}

TorsionPoint TorsionPoint::operator-(const TorsionPoint& rhs) const { return *this + (-rhs); }

TorsionPoint TorsionPoint::times(const BigInt& k) const {
  std::vector<Rational> u(u_.size()), v(v_.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = u_[i] * k;
    v[i] = v_[i] * k;
  }
  return TorsionPoint(std::move(u), std::move(v));
}

std::string TorsionPoint::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < u_.size(); ++i) s += (i ? "," : "") + to_string(u_[i]);
  s += ";";
  for (std::size_t i = 0; i < v_.size(); ++i) s += (i ? "," : "") + to_string(v_[i]);
  return s + ")";
}

std::vector<TorsionPoint> torsion_subgroup(const BigInt& M, std::size_t g) {
  if (M < 1) throw ValidationError("torsion_subgroup: M must be >= 1");
  const auto m = M.convert_to<std::size_t>();
  std::size_t total = 1;
  for (std::size_t i = 0; i < 2 * g; ++i) total *= m;
  std::vector<TorsionPoint> out;
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<Rational> u(g), v(g);
    std::size_t rest = idx;
    for (std::size_t i = 0; i < g; ++i) {
      u[i] = Rational(BigInt(rest % m), M);
      rest /= m;
      v[i] = Rational(BigInt(rest % m), M);
      rest /= m;
    }
    out.emplace_back(std::move(u), std::move(v));
  }
  return out;
}

bool krn_membership(std::span<const TorsionPoint> p, long long N, long long m) {
  if (p.empty() || static_cast<long long>(p.size()) != N) return false;
  const BigInt Nm = BigInt(N) * m;
  TorsionPoint sum = TorsionPoint::zero(p.front().dimension());
  for (const auto& x : p) {
    if (!x.is_torsion_of(Nm)) return false;
    sum = sum + x;
  }
  return sum.is_torsion_of(BigInt(m));
}

std::vector<TorsionPoint> apply_isogeny(std::span<const TorsionPoint> p) {
  if (p.empty()) return {};
  std::vector<TorsionPoint> y;
  y.reserve(p.size());
  TorsionPoint sum = TorsionPoint::zero(p.front().dimension());
  for (const auto& x : p) sum = sum + x;
  y.push_back(sum);
  for (std::size_t j = 1; j < p.size(); ++j) y.push_back(p[0] - p[j]);
  return y;
}

bool krn_contains(std::span<const TorsionPoint> y, long long N, long long m) {
  if (y.empty() || static_cast<long long>(y.size()) != N) return false;
  const std::size_t g = y.front().dimension();
  // N x_1 = y_1 + y_2 + ... + y_N; any N-th root differs from another by X_N
  TorsionPoint s = TorsionPoint::zero(g);
  for (const auto& t : y) s = s + t;
  std::vector<Rational> u(g), v(g);
  for (std::size_t i = 0; i < g; ++i) {
    u[i] = s.u()[i] / N;
    v[i] = s.v()[i] / N;
  }
  TorsionPoint x1(std::move(u), std::move(v));
  std::vector<TorsionPoint> p{x1};
  for (std::size_t j = 1; j < y.size(); ++j) p.push_back(x1 - y[j]);
  return krn_membership(p, N, m);
}

BigInt factorial(long long n) {
  BigInt f = 1;
  for (long long i = 2; i <= n; ++i) f *= i;
  return f;
}

BigInt ipow(const BigInt& base, long long exp) {
  if (exp < 0) throw ValidationError("ipow: negative exponent");
  BigInt r = 1;
  BigInt b = base;
  while (exp > 0) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

BigInt krn_order(long long N, long long m, long long g) {
  if (N < 2 || m < 1 || g < 1) throw ValidationError("krn_order: need N >= 2, m >= 1, g >= 1");
  return ipow(BigInt(N), 2 * (N - 2) * g) * ipow(BigInt(m), 2 * N * g);
}

BigInt krn_count_brute_force(long long N, long long m, long long g) {
  if (N < 2 || m < 1 || g < 1) throw ValidationError("krn_count_brute_force: need N >= 2, m >= 1, g >= 1");
  const BigInt Nm = BigInt(N) * m;
  const std::vector<TorsionPoint> pts = torsion_subgroup(Nm, static_cast<std::size_t>(g));
  const BigInt tuples = ipow(BigInt(pts.size()), N);
  if (tuples > 10'000'000) throw ValidationError("krn_count_brute_force: instance too large (" + tuples.str() + " tuples)");
  std::set<std::vector<TorsionPoint>> images;
  std::vector<std::size_t> idx(static_cast<std::size_t>(N), 0);
  std::vector<TorsionPoint> p(static_cast<std::size_t>(N));
  while (true) {
    for (std::size_t i = 0; i < idx.size(); ++i) p[i] = pts[idx[i]];
    if (krn_membership(p, N, m)) images.insert(apply_isogeny(p));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == pts.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return BigInt(images.size());
}

BigInt deg_rn(long long N, long long m, long long g) {
  if (N < 2 || m < 1 || g < 1) throw ValidationError("deg_rn: need N >= 2, m >= 1, g >= 1");
  return factorial(N * g) * ipow(BigInt(N), (N - 2) * g) * ipow(BigInt(m), N * g);
}

}  // namespace thetalab::lattice
