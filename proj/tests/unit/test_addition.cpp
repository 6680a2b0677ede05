#include <gtest/gtest.h>

#include "thetalab/addition.hpp"
#include "thetalab/errors.hpp"

using namespace thetalab;
using namespace thetalab::addition;

namespace {

const Complex I(0.0, 1.0);

AdditionInstance make(long long N, long long m, std::size_t g, SiegelMatrix W, std::uint64_t seed,
                      std::size_t samples = 20) {
  AdditionInstance inst;
  inst.N = N;
  inst.level = lattice::LevelStructure::scalar(m, g);
  inst.omega = W;
  inst.d = Tuple(static_cast<std::size_t>(N), inst.level.base_group().zero());
  inst.samples = sample_points(N, W, samples, seed);
  return inst;
}

Complex th1(double a, Complex z, Complex tau) { return theta({{{a}, {0.0}}, {z}, SiegelMatrix::scalar(tau, 1), 1e-15}); }

double rel(Complex x, Complex y) { return std::abs(x - y) / std::max(std::abs(x), std::abs(y)); }

}  // namespace

TEST(Addition, PairSidesAgainstDirectOracle) {
  const Complex tau = I;
  const auto inst = make(2, 1, 1, SiegelMatrix::scalar(tau, 1), 3, 5);
  for (const auto& x : inst.samples) {
    const Complex x1 = x[0][0], x2 = x[1][0];
    const Complex want_l = th1(0, x1 + x2, tau) * th1(0, x1 - x2, tau);
    const Complex want_r = th1(0, 2.0 * x1, 2.0 * tau) * th1(0, 2.0 * x2, 2.0 * tau) +
                           th1(0.5, 2.0 * x1, 2.0 * tau) * th1(0.5, 2.0 * x2, 2.0 * tau);
    EXPECT_LT(rel(lhs_d(inst, x), want_l), 1e-12);
    EXPECT_LT(rel(rhs_d(inst, x), want_r), 1e-12);
  }
}

TEST(Addition, ClassicalPairIdentity) {
  const auto rep = verify(make(2, 1, 1, SiegelMatrix::scalar(I, 1), 7));
  EXPECT_LT(rep.deviation, 1e-8);
  EXPECT_LT(std::abs(rep.lambda - 1.0), 1e-8);
  EXPECT_EQ(rep.rhs_terms, 2u);
  EXPECT_EQ(rep.samples, 20u);
}

TEST(Addition, PairIdentityHigherLevelAllD) {
  const auto sweep = verify_all_d(make(2, 2, 1, SiegelMatrix::scalar(I, 1), 11));
  EXPECT_EQ(sweep.d.size(), 4u);
  EXPECT_LT(sweep.max_deviation, 1e-8);
  EXPECT_LT(sweep.lambda_spread, 1e-8);
}

TEST(Addition, PairIdentityGenusTwo) {
  EXPECT_LT(verify(make(2, 1, 2, SiegelMatrix::diagonal({I, 2.0 * I}), 5)).deviation, 1e-8);
  EXPECT_LT(verify(make(2, 1, 2, SiegelMatrix::random(2, 9), 5)).deviation, 1e-8);
}

TEST(Addition, TripleFiberSize) {
  const auto inst = make(3, 1, 1, SiegelMatrix::scalar(I, 1), 1);
  AdditionEvaluator ev(3, inst.level, inst.omega);
  EXPECT_EQ(ev.fiber(inst.d).size(), 3u);
  const auto lvl = lattice::LevelStructure::scalar(2, 1);
  AdditionEvaluator ev2(3, lvl, inst.omega);
  const Tuple d(3, lvl.base_group().element({1}));
  const Tuple h{lattice::GroupElement{{BigInt(2)}}};
  EXPECT_EQ(ev2.fiber(d, h).size(), 3u);
}

TEST(Addition, TripleLhsInSpanOfFiberSums) {
  const auto rep = verify_span(make(3, 1, 1, SiegelMatrix::scalar(I, 1), 13));
  EXPECT_EQ(rep.columns, 3u);
  EXPECT_LT(rep.deviation, 1e-8);
}

TEST(Addition, HTypeFormsAgree) {
  for (long long m : {1LL, 2LL}) {
    const auto lvl = lattice::LevelStructure::scalar(m, 1);
    const auto W = SiegelMatrix::scalar(Complex(0.1, 1.1), 1);
    AdditionEvaluator ev(3, lvl, W);
    const auto pts = sample_points(3, W, 4, 21);
    const Tuple d(3, lvl.base_group().element_at(lvl.base_group().order().convert_to<std::size_t>() - 1));
    for (long long hv : {1LL, 2LL}) {
      const Tuple h{lattice::GroupElement{{BigInt(hv)}}};
      for (const auto& x : pts) {
        const Complex direct = ev.rhs_h(d, h, x);
        EXPECT_LT(rel(direct, ev.rhs_h_shifted(d, h, x)), 1e-10);
        EXPECT_LT(rel(direct, ev.rhs_h_translated(d, h, x)), 1e-10);
      }
    }
  }
}

TEST(Addition, ZeroHDegeneratesBitwise) {
  const auto lvl = lattice::LevelStructure::scalar(2, 1);
  const auto W = SiegelMatrix::scalar(I, 1);
  AdditionEvaluator ev(3, lvl, W);
  const Tuple h{lattice::GroupElement{{BigInt(0)}}};
  for (const auto& d : all_d(3, lvl)) {
    EXPECT_EQ(ev.fiber(d, h), ev.fiber(d));
    for (const auto& x : sample_points(3, W, 2, 4)) {
      EXPECT_EQ(ev.rhs_h(d, h, x), ev.rhs_d(d, x));
      EXPECT_EQ(ev.lhs_h(d, h, x), ev.lhs_d(d, x));
    }
  }
}

TEST(Addition, Validation) {
  auto inst = make(2, 1, 1, SiegelMatrix::scalar(I, 1), 1, 4);
  EXPECT_THROW(verify(inst), ValidationError);
  inst = make(3, 3, 1, SiegelMatrix::scalar(I, 1), 1);
  inst.h = Tuple{lattice::GroupElement{{BigInt(1)}}};
  EXPECT_THROW(verify(inst), UnsupportedInstance);
  EXPECT_THROW(require_coprime(2, lattice::LevelStructure::scalar(4, 1)), UnsupportedInstance);
  inst = make(2, 1, 1, SiegelMatrix::scalar(I, 1), 1);
  inst.d.pop_back();
  EXPECT_THROW(verify(inst), ValidationError);
}

TEST(Addition, SamplesAreSeeded) {
  const auto W = SiegelMatrix::scalar(I, 2);
  const auto a = sample_points(3, W, 5, 42);
  EXPECT_EQ(a, sample_points(3, W, 5, 42));
  EXPECT_NE(a, sample_points(3, W, 5, 43));
}

TEST(Addition, AllDEnumeration) {
  EXPECT_EQ(all_d(2, lattice::LevelStructure::scalar(3, 1)).size(), 9u);
  EXPECT_EQ(all_d(3, lattice::LevelStructure::scalar(1, 2)).size(), 1u);
}
