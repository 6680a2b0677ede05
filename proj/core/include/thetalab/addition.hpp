#pragma once

// Both sides of the addition formulas attached to the isogeny
//   phi_N(x_1..x_N) = (x_1 + ... + x_N, x_1 - x_2, ..., x_1 - x_N)
// and certification that they agree up to one global constant lambda.

#include <cstdint>
#include <optional>
#include <vector>

#include "thetalab/lattice.hpp"
#include "thetalab/siegel.hpp"
#include "thetalab/theta.hpp"

namespace thetalab::addition {

/// One sample: N points of C^g.
using SamplePoint = std::vector<ComplexVector>;
using Tuple = std::vector<lattice::GroupElement>;

struct AdditionInstance {
  long long N = 2;
  lattice::LevelStructure level = lattice::LevelStructure::scalar(1, 1);
  SiegelMatrix omega = SiegelMatrix::scalar({0.0, 1.0}, 1);
  Tuple d;                 ///< d_1..d_N in B(L)
  std::optional<Tuple> h;  ///< h_2..h_{N-1} in (Z/N)^g; present for h-type and general forms
  std::vector<SamplePoint> samples;
  double epsilon = 1e-15;  ///< per-factor error relative to the natural scale
  Precision precision = Precision::Double;
};

struct ProportionalityReport {
  Complex lambda;
  double deviation = 0.0;
  std::vector<Complex> lhs;
  std::vector<Complex> rhs;
  std::size_t samples = 0;
  std::size_t rhs_terms = 0;
};

struct LambdaSweep {
  std::vector<Tuple> d;
  std::vector<Complex> lambda;
  std::vector<double> deviation;
  double max_deviation = 0.0;
  double lambda_spread = 0.0;  ///< max_d |lambda_d - lambda_0| / |lambda_0|
};

/// Least-squares fit of the LHS in the span of every fiber sum sharing the
/// d-type sum and first-difference constraints.
struct SpanReport {
  std::size_t columns = 0;
  std::vector<Complex> coefficients;
  double deviation = 0.0;
};

/// Caches the basis sections of L and of L^{tensor N}.
class AdditionEvaluator {
 public:
  AdditionEvaluator(long long N, lattice::LevelStructure level, SiegelMatrix omega, double epsilon = 1e-15,
                    Precision precision = Precision::Double);

  long long N() const noexcept { return N_; }
  const LevelBasis& base() const noexcept { return base_; }
  const LevelBasis& power() const noexcept { return power_; }

  /// b with b_1 + ... + b_N = N d_1, b_1 - b_j = N d_j (- H_j for the general form).
  std::vector<Tuple> fiber(const Tuple& d, const std::optional<Tuple>& h = std::nullopt) const;
  /// H = n (0, h_2, ..., h_{N-1}, -(h_2 + ... + h_{N-1})) as raw integer vectors.
  std::vector<std::vector<BigInt>> h_shift(const Tuple& h) const;

  Complex lhs_d(const Tuple& d, const SamplePoint& x) const;
  Complex rhs_d(const Tuple& d, const SamplePoint& x) const;
  /// Heisenberg translate of lhs_d by H.
  Complex lhs_h(const Tuple& d, const Tuple& h, const SamplePoint& x) const;
  /// Direct sum over the constrained fiber.
  Complex rhs_h(const Tuple& d, const Tuple& h, const SamplePoint& x) const;
  /// Sum over the kernel fiber with indices shifted, theta[b_1](x_1) theta[b_2 + H_2](x_2) ...
  Complex rhs_h_shifted(const Tuple& d, const Tuple& h, const SamplePoint& x) const;
  /// Translate of rhs_d by H through the section cocycle.
  Complex rhs_h_translated(const Tuple& d, const Tuple& h, const SamplePoint& x) const;

  Complex fiber_sum(const std::vector<Tuple>& fiber, const SamplePoint& x) const;
  /// log of the product of natural scales of the RHS factors.
  double log_rhs_scale(const SamplePoint& x) const;

 private:
  Complex translated(const Tuple& h, const SamplePoint& x, bool lhs, const Tuple& d) const;
  void check_point(const SamplePoint& x) const;

  long long N_;
  LevelBasis base_;
  LevelBasis power_;
  double epsilon_;
  Precision precision_;
};

/// Gcd check for h-type instances: every level entry coprime to N.
void require_coprime(long long N, const lattice::LevelStructure& level);

Complex lhs_d(const AdditionInstance& inst, const SamplePoint& x);
Complex rhs_d(const AdditionInstance& inst, const SamplePoint& x);
Complex lhs_h(const AdditionInstance& inst, const SamplePoint& x);
Complex rhs_h(const AdditionInstance& inst, const SamplePoint& x);

/// lambda = sum conj(R) L / sum |R|^2, deviation = max |L - lambda R| / max(|L|, |R|, floor).
ProportionalityReport verify(const AdditionInstance& inst);
/// verify() for every d in B(L)^N with the instance's samples and h.
LambdaSweep verify_all_d(const AdditionInstance& inst);
SpanReport verify_span(const AdditionInstance& inst);

/// x_i = u + Omega v with u, v uniform in [0, 1)^g, fixed seed.
std::vector<SamplePoint> sample_points(long long N, const SiegelMatrix& omega, std::size_t count,
                                       std::uint64_t seed);

/// Every tuple of B(L)^N in mixed-radix order.
std::vector<Tuple> all_d(long long N, const lattice::LevelStructure& level);

}  // namespace thetalab::addition
