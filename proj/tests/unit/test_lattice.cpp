#include <gtest/gtest.h>

#include <random>
#include <set>

#include "thetalab/errors.hpp"
#include "thetalab/lattice.hpp"

using namespace thetalab;
using namespace thetalab::lattice;

namespace {

std::vector<BigInt> big(std::initializer_list<long long> v) { return {v.begin(), v.end()}; }

TorsionPoint tp(Rational u, Rational v) { return TorsionPoint({u}, {v}); }

void expect_valid_snf(const IntMatrix& K) {
  const SmithDecomposition s = smith_normal_form(K);
  EXPECT_EQ(s.U * K * s.V, s.D);
  EXPECT_EQ(s.U * s.U_inv, IntMatrix::identity(K.size()));
  EXPECT_EQ(abs(s.U.determinant()), 1);
  EXPECT_EQ(abs(s.V.determinant()), 1);
  EXPECT_TRUE(s.D.is_diagonal());
  const auto f = s.invariant_factors();
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_GT(f[i], 0);
    if (i + 1 < f.size()) {
      EXPECT_EQ(f[i + 1] % f[i], 0) << K.str();
    }
  }
  BigInt prod = 1;
  for (const auto& x : f) prod *= x;
  EXPECT_EQ(prod, abs(K.determinant()));
}

}  // namespace

TEST(IntMatrix, DeterminantAndDefiniteness) {
  const IntMatrix K{{3, 2}, {2, 3}};
  EXPECT_EQ(K.determinant(), 5);
  EXPECT_TRUE(K.is_symmetric());
  EXPECT_TRUE(K.is_positive_definite());
  EXPECT_FALSE((IntMatrix{{1, 2}, {2, 1}}).is_positive_definite());
  EXPECT_EQ((IntMatrix{{2, 0, 1}, {1, 3, 2}, {1, 1, 2}}).determinant(), 6);
}

TEST(Smith, TwoLayerKMatrix) {
  const IntMatrix K{{3, 2}, {2, 3}};
  const auto s = smith_normal_form(K);
  EXPECT_EQ(s.invariant_factors(), big({1, 5}));
  expect_valid_snf(K);
}

TEST(Smith, DiagonalNotInNormalForm) {
  EXPECT_EQ(smith_normal_form(IntMatrix{{6, 0}, {0, 10}}).invariant_factors(), big({2, 30}));
  EXPECT_EQ(smith_normal_form(IntMatrix{{-4}}).invariant_factors(), big({4}));
}

TEST(Smith, RandomRoundTrips) {
  std::mt19937_64 rng(20261016);
  std::uniform_int_distribution<int> dim(1, 4), entry(-9, 9);
  int done = 0;
  while (done < 100) {
    const auto n = static_cast<std::size_t>(dim(rng));
    IntMatrix K(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) K(i, j) = entry(rng);
    if (K.determinant() == 0) continue;
    expect_valid_snf(K);
    ++done;
  }
}

TEST(Smith, SingularAndEmpty) {
  EXPECT_THROW(smith_normal_form(IntMatrix{{1, 2}, {2, 4}}), DegenerateLattice);
  EXPECT_THROW(smith_normal_form(IntMatrix()), ValidationError);
}

TEST(Smith, Deterministic) {
  const IntMatrix K{{4, 6, 2}, {6, 9, 3}, {2, 3, 7}};
  if (K.determinant() != 0) {
    const auto a = smith_normal_form(K);
    const auto b = smith_normal_form(K);
    EXPECT_EQ(a.U, b.U);
    EXPECT_EQ(a.V, b.V);
  }
}

TEST(QuotientGroup, OrdersAndFactors) {
  const auto G = quotient_group(IntMatrix{{3, 2}, {2, 3}});
  EXPECT_EQ(G.factors(), big({1, 5}));
  EXPECT_EQ(G.order(), 5);
  const auto H = quotient_group(IntMatrix{{6, 0}, {0, 10}});
  EXPECT_EQ(H.factors(), big({2, 30}));
}

TEST(QuotientGroup, CosetCountMatchesOrder) {
  // every raw point of the box [0,6) x [0,10) is a distinct coset of diag(6,10)
  const IntMatrix K{{6, 0}, {0, 10}};
  const auto G = quotient_group(K);
  std::set<GroupElement> seen;
  BigInt max_order = 0;
  for (long long x = 0; x < 6; ++x)
    for (long long y = 0; y < 10; ++y) {
      const auto e = G.from_raw(big({x, y}));
      seen.insert(e);
      BigInt k = 1;
      while (G.mul(e, k) != G.zero()) ++k;
      max_order = std::max(max_order, k);
    }
  EXPECT_EQ(seen.size(), 60u);
  EXPECT_EQ(max_order, 30);
}

TEST(QuotientGroup, RawRoundTrip) {
  const auto G = quotient_group(IntMatrix{{4, 1}, {1, 3}});
  for (const auto& e : G.elements()) EXPECT_EQ(G.from_raw(G.to_raw(e)), e);
  for (std::size_t i = 0; i < G.order(); ++i) EXPECT_EQ(G.index_of(G.element_at(i)), i);
}

TEST(QuotientGroup, Arithmetic) {
  const FiniteAbelianGroup G(big({2, 6}));
  const auto a = G.element({1, 5});
  const auto b = G.element({1, 4});
  EXPECT_EQ(G.add(a, b), G.element({0, 3}));
  EXPECT_EQ(G.sub(a, a), G.zero());
  EXPECT_EQ(G.add(a, G.neg(a)), G.zero());
  EXPECT_EQ(G.mul(a, 3), G.element({1, 3}));
}

TEST(Fiber, PairLevelOne) {
  const auto level = LevelStructure::scalar(1, 1);
  const auto G = level.base_group();
  const std::vector<GroupElement> d{G.zero(), G.zero()};
  const auto fiber = fiber_enumerate(d, 2, level);
  const auto P = level.power(2).base_group();
  std::set<std::vector<GroupElement>> got(fiber.begin(), fiber.end());
  std::set<std::vector<GroupElement>> want{{P.element({0}), P.element({0})}, {P.element({1}), P.element({1})}};
  EXPECT_EQ(got, want);
}

TEST(Fiber, TripleLevelOne) {
  const auto level = LevelStructure::scalar(1, 1);
  const auto G = level.base_group();
  const std::vector<GroupElement> d(3, G.zero());
  const auto fiber = fiber_enumerate(d, 3, level);
  ASSERT_EQ(fiber.size(), 3u);
  for (const auto& b : fiber) {
    EXPECT_EQ(b[0], b[1]);
    EXPECT_EQ(b[1], b[2]);
  }
}

TEST(Fiber, SizeIsNToTheG) {
  for (auto [N, m, g] : {std::tuple{2LL, 3LL, 1}, {3, 2, 1}, {2, 1, 2}, {2, 2, 2}}) {
    const auto level = LevelStructure::scalar(m, static_cast<std::size_t>(g));
    const auto G = level.base_group();
    std::vector<GroupElement> d(static_cast<std::size_t>(N), G.element_at(G.order().convert_to<std::size_t>() - 1));
    EXPECT_EQ(fiber_enumerate(d, N, level).size(), ipow(BigInt(N), g).convert_to<std::size_t>());
  }
}

TEST(Torsion, MembershipExamples) {
  const Rational h(1, 2);
  std::vector<TorsionPoint> both{tp(h, 0), tp(h, 0)};
  EXPECT_TRUE(krn_membership(both, 2, 1));
  std::vector<TorsionPoint> one{tp(h, 0), tp(0, 0)};
  EXPECT_FALSE(krn_membership(one, 2, 1));
}

TEST(Torsion, PointOrders) {
  EXPECT_EQ(tp(Rational(1, 6), Rational(1, 4)).order(), 12);
  EXPECT_EQ(tp(Rational(5, 4), 0).u()[0], Rational(1, 4));
  EXPECT_EQ(torsion_subgroup(3, 1).size(), 9u);
  EXPECT_EQ(torsion_subgroup(2, 2).size(), 16u);
}

TEST(KernelOrder, Formula) {
  EXPECT_EQ(krn_order(2, 1, 1), 1);
  EXPECT_EQ(krn_order(3, 1, 1), 9);
  EXPECT_EQ(krn_order(2, 2, 1), 16);
  EXPECT_THROW(krn_order(1, 1, 1), ValidationError);
}

TEST(KernelOrder, BruteForceAgrees) {
  EXPECT_EQ(krn_count_brute_force(2, 1, 1), 1);
  EXPECT_EQ(krn_count_brute_force(2, 2, 1), 16);
  EXPECT_EQ(krn_count_brute_force(3, 1, 1), 9);
}

TEST(KernelOrder, TargetSideTest) {
  // every image of a kernel tuple is recognized from the target side
  const auto pts = torsion_subgroup(2, 1);
  int hits = 0;
  for (const auto& a : pts)
    for (const auto& b : pts) {
      std::vector<TorsionPoint> p{a, b};
      if (!krn_membership(p, 2, 1)) continue;
      EXPECT_TRUE(krn_contains(apply_isogeny(p), 2, 1));
      ++hits;
    }
  EXPECT_GT(hits, 0);
}

TEST(Degree, Formula) {
  EXPECT_EQ(deg_rn(2, 1, 1), 2);
  EXPECT_EQ(deg_rn(2, 1, 2), 24);
  EXPECT_EQ(deg_rn(3, 2, 1), 144);
  EXPECT_EQ(factorial(5), 120);
  EXPECT_EQ(ipow(BigInt(3), 4), 81);
}

TEST(LevelStructure, Kinds) {
  const auto s = LevelStructure::scalar(3, 2);
  EXPECT_EQ(s.base_group().order(), 9);
  EXPECT_EQ(s.power(2).scalar_level(), 6);
  const auto d = LevelStructure::diagonal({2, 5});
  EXPECT_EQ(d.base_group().order(), 10);
  EXPECT_THROW(d.scalar_level(), ValidationError);
  const auto k = LevelStructure::matrix(IntMatrix{{3, 2}, {2, 3}});
  EXPECT_EQ(k.diagonal_levels(), big({1, 5}));
  EXPECT_THROW(LevelStructure::matrix(IntMatrix{{1, 2}, {2, 1}}), ValidationError);
}
