#include "thetalab/spaces.hpp"

#include <algorithm>
#include <numeric>

#include "thetalab/errors.hpp"
#include "thetalab/theta.hpp"

namespace thetalab::spaces {

namespace {

std::vector<Tuple> all_tuples(const lattice::FiniteAbelianGroup& G, std::size_t len) {
  const auto elems = G.elements();
  std::vector<Tuple> out;
  if (len == 0) return {Tuple{}};
  std::vector<std::size_t> idx(len, 0);
  for (;;) {
    Tuple t;
    for (auto i : idx) t.push_back(elems[i]);
    out.push_back(std::move(t));
    std::size_t k = len;
    for (;;) {
      if (k == 0) return out;
      --k;
      if (++idx[k] < elems.size()) break;
      idx[k] = 0;
    }
  }
}

bool coprime(long long N, const lattice::LevelStructure& level) {
  if (level.kind() == lattice::LevelStructure::Kind::Matrix) return false;
  for (const auto& n : level.diagonal_levels())
    if (boost::multiprecision::gcd(n, BigInt(N)) != 1) return false;
  return true;
}

std::vector<Tuple> fiber_with_shift(const Tuple& d, const Tuple* h, long long N, const lattice::LevelStructure& level) {
  std::vector<Tuple> fiber = lattice::fiber_enumerate(d, N, level);
  if (!h) return fiber;
  if (!coprime(N, level)) throw UnsupportedInstance("image_vector: h-type generators need gcd(level, N) = 1");
  if (static_cast<long long>(h->size()) != N - 2) throw ValidationError("image_vector: h needs N-2 entries");
  const auto levels = level.diagonal_levels();
  const auto GN = level.base_group().scaled(N);
  const std::size_t g = levels.size();
  std::vector<std::vector<BigInt>> H(static_cast<std::size_t>(N), std::vector<BigInt>(g));
  for (std::size_t j = 0; j < h->size(); ++j)
    for (std::size_t k = 0; k < g; ++k) {
      const BigInt v = levels[k] * mod_floor((*h)[j].residues.at(k), BigInt(N));
      H[j + 1][k] = v;
      H.back()[k] -= v;
    }
  for (auto& b : fiber)
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = GN.add(b[j], GN.element(std::span<const BigInt>(H[j])));
  return fiber;
}

linalg::RationalVector indicator(const std::vector<Tuple>& fiber, const DeltaBasis& basis) {
  linalg::RationalVector v(basis.size());
  for (const auto& b : fiber) v[basis.index_of(b)] = 1;
  return v;
}

std::vector<std::size_t> permutation_sign_table(std::size_t N, std::vector<std::vector<std::size_t>>& perms) {
  std::vector<std::size_t> p(N);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::size_t> odd;
  do {
    std::size_t inv = 0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j)
        if (p[i] > p[j]) ++inv;
    perms.push_back(p);
    odd.push_back(inv % 2);
  } while (std::next_permutation(p.begin(), p.end()));
  return odd;
}

linalg::RationalMatrix alternating_basis(const DeltaBasis& basis) {
  const auto& G = basis.power_group();
  const std::size_t n = G.order().convert_to<std::size_t>();
  const std::size_t N = static_cast<std::size_t>(basis.N());
  linalg::RationalMatrix out;
  if (N > n) return out;
  std::vector<std::vector<std::size_t>> perms;
  const auto odd = permutation_sign_table(N, perms);
  std::vector<std::size_t> comb(N);
  std::iota(comb.begin(), comb.end(), 0);
  for (;;) {
    linalg::RationalVector v(basis.size());
    for (std::size_t s = 0; s < perms.size(); ++s) {
      Tuple t;
      for (std::size_t i = 0; i < N; ++i) t.push_back(G.element_at(comb[perms[s][i]]));
      v[basis.index_of(t)] = odd[s] ? -1 : 1;
    }
    out.push_back(std::move(v));
    std::size_t i = N;
    while (i > 0 && comb[i - 1] == n - N + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < N; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

linalg::RationalMatrix image_generators(const DeltaBasis& basis, bool& d_type_only) {
  const long long N = basis.N();
  const auto& level = basis.level();
  d_type_only = !coprime(N, level);
  linalg::RationalMatrix rows;
  const auto ds = all_tuples(basis.base_group(), static_cast<std::size_t>(N));
  if (d_type_only) {
    for (const auto& d : ds) rows.push_back(indicator(fiber_with_shift(d, nullptr, N, level), basis));
    return rows;
  }
  std::vector<BigInt> nf(basis.base_group().rank(), BigInt(N));
  const lattice::FiniteAbelianGroup ZN(nf);
  const auto hs = all_tuples(ZN, static_cast<std::size_t>(N - 2));
  for (const auto& d : ds)
    for (const auto& h : hs) rows.push_back(indicator(fiber_with_shift(d, &h, N, level), basis));
  return rows;
}

}  // namespace

DeltaBasis::DeltaBasis(long long N, lattice::LevelStructure level)
    : N_(N), level_(std::move(level)), base_(level_.base_group()), power_(base_.scaled(N < 1 ? 1 : N)) {
  if (N < 2) throw ValidationError("DeltaBasis: N must be >= 2");
  const std::size_t n = power_.order().convert_to<std::size_t>();
  size_ = 1;
  for (long long i = 0; i < N; ++i) size_ *= n;
}

std::size_t DeltaBasis::index_of(const Tuple& b) const {
  if (static_cast<long long>(b.size()) != N_) throw ValidationError("DeltaBasis: tuple needs N entries");
  const std::size_t n = power_.order().convert_to<std::size_t>();
  std::size_t idx = 0;
  for (const auto& e : b) idx = idx * n + power_.index_of(power_.element(std::span<const BigInt>(e.residues)));
  return idx;
}

Tuple DeltaBasis::tuple_at(std::size_t index) const {
  const std::size_t n = power_.order().convert_to<std::size_t>();
  Tuple t(static_cast<std::size_t>(N_));
  for (std::size_t i = t.size(); i-- > 0;) {
    t[i] = power_.element_at(index % n);
    index /= n;
  }
  return t;
}

linalg::RationalVector image_vector(const Tuple& d, long long N, const lattice::LevelStructure& level) {
  const DeltaBasis basis(N, level);
  return indicator(fiber_with_shift(d, nullptr, N, level), basis);
}

linalg::RationalVector image_vector(const Tuple& d, const Tuple& h, long long N, const lattice::LevelStructure& level) {
  const DeltaBasis basis(N, level);
  return indicator(fiber_with_shift(d, &h, N, level), basis);
}

ImageReport image_dimension(long long N, const lattice::LevelStructure& level) {
  const DeltaBasis basis(N, level);
  ImageReport rep;
  const auto rows = image_generators(basis, rep.d_type_only);
  rep.generators = rows.size();
  rep.dimension = linalg::rank(rows);
  const long long g = static_cast<long long>(level.dimension());
  rep.formula = lattice::ipow(BigInt(N), (N - 2) * g) * lattice::ipow(basis.base_group().order(), N);
  return rep;
}

ParitySplit parity_split(const lattice::LevelStructure& level) {
  const auto G = level.base_group();
  const std::size_t n = G.order().convert_to<std::size_t>();
  linalg::RationalMatrix iota(n, linalg::RationalVector(n));
  for (std::size_t c = 0; c < n; ++c) iota[G.index_of(G.neg(G.element_at(c)))][c] = 1;
  ParitySplit out;
  out.projector_plus.assign(n, linalg::RationalVector(n));
  out.projector_minus.assign(n, linalg::RationalVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Rational id = (i == j) ? 1 : 0;
      out.projector_plus[i][j] = (id + iota[i][j]) / 2;
      out.projector_minus[i][j] = (id - iota[i][j]) / 2;
    }
  out.plus = linalg::rank(out.projector_plus);
  out.minus = linalg::rank(out.projector_minus);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t m = G.index_of(G.neg(G.element_at(c)));
    if (m <= c) continue;
    linalg::RationalVector v(n);
    v[c] = 1;
    v[m] = -1;
    out.basis_minus.push_back(std::move(v));
  }
  return out;
}

bool is_alternating(const linalg::RationalVector& v, const DeltaBasis& basis) {
  if (v.size() != basis.size()) return false;
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const Tuple t = basis.tuple_at(idx);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      Tuple s = t;
      std::swap(s[k], s[k + 1]);
      if (v[basis.index_of(s)] != -v[idx]) return false;
    }
  }
  return true;
}

SpaceReport e_space_dims(long long N, const lattice::LevelStructure& level) {
  const DeltaBasis basis(N, level);
  SpaceReport rep;
  rep.N = N;
  const auto gens = image_generators(basis, rep.image.d_type_only);
  rep.image.generators = gens.size();
  rep.image.dimension = linalg::rank(gens);
  const long long g = static_cast<long long>(level.dimension());
  rep.image.formula = lattice::ipow(BigInt(N), (N - 2) * g) * lattice::ipow(basis.base_group().order(), N);

  rep.e_basis = linalg::intersect_row_spaces(gens, alternating_basis(basis), basis.size());
  rep.e_dim = rep.e_basis.size();
  for (const auto& v : rep.e_basis) rep.e_alternating = rep.e_alternating && is_alternating(v, basis);

  const ParitySplit par = parity_split(level);
  rep.v_plus = par.plus;
  rep.v_minus = par.minus;

  // phi^*(delta_{d_1} (x) v_2 (x) ... (x) v_N), v_j = delta_{c_j} - delta_{-c_j}
  const auto& G = basis.base_group();
  std::vector<lattice::GroupElement> reps;
  for (const auto& v : par.basis_minus) {
    const auto it = std::find(v.begin(), v.end(), Rational(1));
    reps.push_back(G.element_at(static_cast<std::size_t>(it - v.begin())));
  }
  linalg::RationalMatrix e0;
  if (!reps.empty()) {
    const std::size_t slots = static_cast<std::size_t>(N - 1);
    std::vector<std::size_t> pick(slots, 0);
    for (const auto& d1 : G.elements()) {
      std::fill(pick.begin(), pick.end(), 0);
      for (;;) {
        linalg::RationalVector v(basis.size());
        for (std::size_t mask = 0; mask < (std::size_t{1} << slots); ++mask) {
          Tuple d{d1};
          int sign = 1;
          for (std::size_t j = 0; j < slots; ++j) {
            const bool neg = (mask >> j) & 1;
            d.push_back(neg ? G.neg(reps[pick[j]]) : reps[pick[j]]);
            if (neg) sign = -sign;
          }
          const auto ind = indicator(fiber_with_shift(d, nullptr, N, level), basis);
          for (std::size_t i = 0; i < v.size(); ++i)
            if (ind[i] != 0) v[i] += sign * ind[i];
        }
        e0.push_back(std::move(v));
        std::size_t k = slots;
        bool done = true;
        while (k > 0) {
          --k;
          if (++pick[k] < reps.size()) {
            done = false;
            break;
          }
          pick[k] = 0;
        }
        if (done) break;
      }
    }
  }
  rep.e0_basis = linalg::row_basis(e0);
  rep.e0_dim = rep.e0_basis.size();
  for (const auto& v : rep.e0_basis) rep.e0_alternating = rep.e0_alternating && is_alternating(v, basis);
  linalg::RationalMatrix both = rep.e_basis;
  both.insert(both.end(), rep.e0_basis.begin(), rep.e0_basis.end());
  rep.e0_in_e = linalg::rank(both) == rep.e_dim;
  return rep;
}

Complex evaluate_delta_vector(const linalg::RationalVector& v, const DeltaBasis& basis, const SiegelMatrix& omega,
                              const std::vector<ComplexVector>& x, double epsilon) {
  if (v.size() != basis.size()) throw ValidationError("evaluate_delta_vector: vector has wrong length");
  if (static_cast<long long>(x.size()) != basis.N()) throw ValidationError("evaluate_delta_vector: need N points");
  const LevelBasis sections(basis.level().power(basis.N()), omega);
  Complex s = 0.0;
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    if (v[idx] == 0) continue;
    const Tuple b = basis.tuple_at(idx);
    Complex t = v[idx].convert_to<double>();
    for (std::size_t i = 0; i < b.size(); ++i) t *= sections(b[i], x[i], epsilon);
    s += t;
  }
  return s;
}

}  // namespace thetalab::spaces
