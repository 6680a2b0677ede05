#include <gtest/gtest.h>

#include <cmath>

#include "thetalab/errors.hpp"
#include "thetalab/fqhe.hpp"

using namespace thetalab;
using namespace thetalab::fqhe;

namespace {

const Complex I(0.0, 1.0);

Rational q(long long n, long long d) { return Rational(BigInt(n), BigInt(d)); }

std::vector<ComplexVector> points(std::size_t N, std::size_t g, double shift) {
  std::vector<ComplexVector> x(N, ComplexVector(g));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t a = 0; a < g; ++a)
      x[i][a] = Complex(0.11 * double(i + 1) - 0.07 * double(a) + shift, 0.05 + 0.09 * double(i) + 0.03 * double(a));
  return x;
}

}  // namespace

TEST(Fqhe, FillingFactor) {
  EXPECT_EQ(filling_factor(1, 1), q(1, 3));
  EXPECT_EQ(filling_factor(2, 1), q(2, 5));
  EXPECT_EQ(filling_factor(3, 2), q(3, 13));
  EXPECT_EQ(filling_factor(2, 3, 4), filling_factor(2, 3, 1));
  EXPECT_THROW(filling_factor(0, 1), ValidationError);
}

TEST(Fqhe, FieldQuantization) {
  EXPECT_NEAR(field_quantization(1.0, I, 1, 1, 2), 12.0 * kPi, 1e-12);
  EXPECT_NEAR(field_quantization(2.0, I, 1, 1, 2), 3.0 * kPi, 1e-12);
  EXPECT_THROW(field_quantization(-1.0, I, 1, 1, 2), ValidationError);
}

TEST(Fqhe, KMatrices) {
  for (long long g = 1; g <= 4; ++g)
    for (long long p = 1; p <= 3; ++p)
      for (long long N = 1; N <= 4; ++N) EXPECT_EQ(KMatrixSpec(g, p, N).K1().determinant(), N * (2 * g * p + 1));
  EXPECT_EQ(KMatrixSpec(2, 1).K().determinant(), 5);
  EXPECT_EQ(KMatrixSpec(3, 2).kd_levels(), (RealVector{13, 1, 1}));
}

TEST(Fqhe, InvariantFactorsAndEigenvalues) {
  for (long long g = 1; g <= 5; ++g)
    for (long long p = 1; p <= 3; ++p) {
      std::vector<BigInt> want(static_cast<std::size_t>(g), BigInt(1));
      want.back() = 2 * g * p + 1;
      EXPECT_EQ(k_invariant_factors(g, p), want);
      const RealVector ev = k_eigenvalues(g, p);
      EXPECT_NEAR(ev[0], double(2 * g * p + 1), 1e-10);
      for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_NEAR(ev[i], 1.0, 1e-10);
    }
}

TEST(Fqhe, Slopes) {
  const Slopes s = slopes_scalar(1, 3);
  EXPECT_EQ(s.mu, q(-1, 3));
  EXPECT_EQ(s.mu_r, q(-1, 3));
  EXPECT_EQ(slopes_scalar(3, 2).mu, q(-6, 2));
  EXPECT_EQ(slopes_scalar(3, 2).rank, 8);
  EXPECT_EQ(slopes_kmatrix(2, 1).mu_r, q(-2, 5));
  for (long long g = 1; g <= 4; ++g)
    for (long long p = 1; p <= 3; ++p) {
      const HallReport h = hall_exact(g, p);
      EXPECT_EQ(h.sigma_exact, filling_factor(g, p));
      EXPECT_EQ(-slopes_kmatrix(g, p).mu_r, h.sigma_exact);
    }
}

TEST(Fqhe, IndexTable) {
  auto spec = WaveFunctionSpec::make(4, 1, 2, I);
  spec.labels = {1, 2, 4, 3};
  const auto t = index_table(spec);
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(t[0].d, 2);  // (1,2): d_2
  EXPECT_EQ(t[2].d, 3);  // (1,4): d_4
  EXPECT_EQ(t[3].d, -2); // (2,3): d_2 - d_3
  EXPECT_EQ(t[5].d, 1);  // (3,4): d_3 - d_4
}

TEST(Fqhe, WaveFunctionVanishesAtCoincidence) {
  const auto spec = WaveFunctionSpec::make(2, 1, 1, I);
  const std::vector<ComplexVector> x{{Complex(0.2, 0.3)}, {Complex(0.2, 0.3)}};
  EXPECT_LT(std::abs(hr_wavefunction(spec, x)), 1e-14);
}

TEST(Fqhe, RelativeFactorAntisymmetric) {
  for (long long g : {1LL, 2LL}) {
    const auto spec = WaveFunctionSpec::make(2, g, 1, Complex(0.1, 1.2));
    auto x = points(2, static_cast<std::size_t>(g), 0.0);
    const Complex a = relative_factor(spec, x);
    std::swap(x[0], x[1]);
    EXPECT_LT(std::abs(relative_factor(spec, x) + a), 1e-8 * std::abs(a));
  }
}

TEST(Fqhe, QuasiPeriodicCocycle) {
  for (long long g : {1LL, 2LL}) {
    auto spec = WaveFunctionSpec::make(2, g, 1, I);
    spec.omega = g == 1 ? SiegelMatrix::scalar(Complex(0.2, 1.1), 1)
                        : SiegelMatrix::diagonal({Complex(0.2, 1.1), Complex(-0.1, 0.9)});
    spec.d1 = 1;
    spec.phi1.assign(static_cast<std::size_t>(g), 0.3);
    spec.phi2.assign(static_cast<std::size_t>(g), 0.6);
    for (FluxCoupling c : {FluxCoupling::Scaled, FluxCoupling::Literal}) {
      spec.coupling = c;
      const auto x = points(2, static_cast<std::size_t>(g), 0.0);
      const Complex psi = hr_wavefunction(spec, x);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t a = 0; a < static_cast<std::size_t>(g); ++a)
          for (bool im : {false, true}) {
            auto y = x;
            y[i][a] += im ? spec.omega(a, a) : Complex(1.0);
            const Complex want = hr_cocycle(spec, x, i, a, im) * psi;
            EXPECT_LT(std::abs(hr_wavefunction(spec, y) - want), 1e-8 * std::abs(psi));
          }
    }
  }
}

TEST(Fqhe, FluxPeriodicity) {
  auto spec = WaveFunctionSpec::make(2, 1, 1, I);
  spec.phi1 = {0.2};
  spec.phi2 = {0.4};
  auto shifted = spec;
  shifted.phi1 = {1.2};
  Complex ratio0;
  for (int k = 0; k < 3; ++k) {
    const auto x = points(2, 1, 0.1 * k);
    const Complex r = hr_wavefunction(shifted, x) / hr_wavefunction(spec, x);
    if (k == 0) ratio0 = r;
    EXPECT_NEAR(std::abs(r), 1.0, 1e-10);
    EXPECT_LT(std::abs(r - ratio0), 1e-10);
  }
}

TEST(Fqhe, Validation) {
  auto spec = WaveFunctionSpec::make(2, 2, 1, I);
  spec.omega = SiegelMatrix(2, {I, 0.1, 0.1, I});
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = WaveFunctionSpec::make(2, 1, 1, I);
  spec.d1 = 3;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.d1 = 0;
  spec.labels = {1};
  EXPECT_THROW(spec.validate(), ValidationError);
  EXPECT_THROW(hr_factorization_solve(2, 1, I, 3, 1, FactorizationBasis::Literal), ValidationError);
}

TEST(Fqhe, FactorizationCorrectedBasisSolves) {
  for (long long p : {1LL, 2LL}) {
    const auto r = hr_factorization_solve(2, p, I, 40, 17, FactorizationBasis::Corrected);
    EXPECT_EQ(r.coefficients.size(), static_cast<std::size_t>(2 * p + 1));
    EXPECT_LT(r.residual, 1e-8);
    EXPECT_LT(r.stability, 1e-7);
  }
}

TEST(Fqhe, FactorizationLiteralBasisShape) {
  const auto r = hr_factorization_solve(2, 1, I, 40, 17, FactorizationBasis::Literal);
  EXPECT_EQ(r.coefficients.size(), 2u);
  EXPECT_EQ(r.coefficients_doubled.size(), 2u);
  EXPECT_TRUE(std::isfinite(r.residual));
  EXPECT_EQ(r.attempts, 1);
}

TEST(Kubo, ScaledCouplingGivesFillingFactor) {
  KuboConfig c;
  c.Q = 16;
  c.F = 4;
  c.check_convergence = false;
  const auto r = kubo_conductivity(c);
  EXPECT_LT(std::abs(r.sigma_numeric - 1.0 / 3.0) * 3.0, 0.02);
  EXPECT_LT(r.curvature_spread, 0.05);
  EXPECT_EQ(r.sigma_exact, q(1, 3));
  ASSERT_EQ(r.index_table.size(), 1u);
  EXPECT_EQ(r.index_table[0].d, 1);
}

TEST(Kubo, LiteralCouplingGivesUnitChernNumber) {
  KuboConfig c;
  c.Q = 16;
  c.F = 4;
  c.check_convergence = false;
  c.coupling = FluxCoupling::Literal;
  EXPECT_NEAR(kubo_conductivity(c).sigma_numeric, 1.0, 0.02);
}

TEST(Kubo, FluxOriginShiftInvariance) {
  KuboConfig c;
  c.Q = 16;
  c.F = 4;
  c.check_convergence = false;
  const double a = kubo_conductivity(c).sigma_numeric;
  c.flux_origin1 = 0.5;
  c.flux_origin2 = 0.5;
  EXPECT_NEAR(kubo_conductivity(c).sigma_numeric, a, 1e-3);
}

TEST(Kubo, Validation) {
  KuboConfig c;
  c.Q = 16;
  c.F = 4;
  c.labels = {1, 3};  // d_12 = 3 = 0 mod 3
  EXPECT_THROW(kubo_conductivity(c), ValidationError);
  c.labels.clear();
  c.N = 3;  // default labels make d_23 = 0
  EXPECT_THROW(kubo_conductivity(c), ValidationError);
  c.N = 4;
  EXPECT_THROW(kubo_conductivity(c), ValidationError);
  c.N = 2;
  c.Q = 8;
  EXPECT_THROW(kubo_conductivity(c), ValidationError);
  c.Q = 16;
  c.F = 2;
  EXPECT_THROW(kubo_conductivity(c), ValidationError);
}

TEST(Kubo, ExactFieldIndependentOfN) {
  for (long long g = 1; g <= 4; ++g)
    for (long long p = 1; p <= 3; ++p) EXPECT_EQ(filling_factor(g, p, 2), filling_factor(g, p, 3));
}
