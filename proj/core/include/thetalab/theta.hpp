#pragma once

// Riemann theta functions with characteristics,
//   Theta[a;b](z|Omega) = sum_n exp(pi i (n+a)^T Omega (n+a) + 2 pi i (n+a)^T (z+b)),
// truncated to an ellipsoid whose Gaussian tail is certified below the
// requested error.

#include <cstddef>
#include <vector>

#include "thetalab/lattice.hpp"
#include "thetalab/numeric.hpp"
#include "thetalab/siegel.hpp"

namespace thetalab {

struct ThetaCharacteristic {
  RealVector a;
  RealVector b;

  static ThetaCharacteristic zero(std::size_t g);
  static ThetaCharacteristic from_rational(const std::vector<Rational>& a, const std::vector<Rational>& b);
  std::size_t size() const noexcept { return a.size(); }
  ThetaCharacteristic negated_a() const;
  ThetaCharacteristic negated() const;
};

enum class ErrorMode {
  Absolute,        ///< |error| <= epsilon
  RelativeToScale  ///< |error| <= epsilon * natural_scale(z, Omega)
};

struct EvalRequest {
  ThetaCharacteristic characteristic;
  ComplexVector z;
  SiegelMatrix omega;
  double epsilon = 1e-14;
  Precision precision = Precision::Double;
  ErrorMode error_mode = ErrorMode::Absolute;
  double radius_cap = 60.0;
};

enum class GradientKind { Z, A, B };

/// Value and all three gradients from one pass over the lattice.
struct ThetaJet {
  Complex value;
  ComplexVector dz;
  ComplexVector da;
  ComplexVector db;
};

/// Ellipsoid ||T(n + a - c)|| <= radius, c = -Im(Omega)^{-1} Im(z).
struct TruncationPlan {
  double radius = 0.0;
  RealVector centre;
  double log_scale = 0.0;  ///< pi y^T Y^{-1} y
  double log_tail = 0.0;   ///< log of the certified bound on the dropped terms
  std::size_t points = 0;
};

Complex theta(const EvalRequest& req);
ComplexVector theta_grad(const EvalRequest& req, GradientKind which);
ThetaJet theta_jet(const EvalRequest& req);

/// (Theta[a;b](z) - Theta[-a;b](z)) / 2.
Complex theta_odd(const ThetaCharacteristic& ch, const ComplexVector& z, const SiegelMatrix& omega,
                  double epsilon = 1e-14, Precision precision = Precision::Double);

/// Many independent evaluations, run through parallel_for.
std::vector<Complex> theta_batch(const std::vector<EvalRequest>& reqs);

TruncationPlan plan_truncation(const EvalRequest& req, bool with_gradient = false);

/// log of exp(pi y^T Y^{-1} y), the size of the largest term.
double log_natural_scale(const ComplexVector& z, const SiegelMatrix& omega);

/// Bound on sum_{||u|| > R} exp(-||u||^2) over a translated lattice whose
/// shortest vector is at least rho: (g/2)(2/rho)^g Gamma(g/2, (R - rho/2)^2).
/// Returned as a natural logarithm.
double log_tail_bound(std::size_t g, double rho, double R);

/// Basis section of the level structure, Theta[K^{-1} c; 0](K z | K Omega).
/// For scalar m this is Theta[c/m; 0](m z | m Omega).
class LevelBasis {
 public:
  LevelBasis(lattice::LevelStructure level, SiegelMatrix omega);

  const lattice::LevelStructure& level() const noexcept { return level_; }
  const lattice::FiniteAbelianGroup& group() const noexcept { return group_; }
  const SiegelMatrix& omega() const noexcept { return omega_; }
  const SiegelMatrix& scaled_omega() const noexcept { return k_omega_; }

  ThetaCharacteristic characteristic(const lattice::GroupElement& c) const;
  ComplexVector scaled_argument(const ComplexVector& z) const;

  Complex operator()(const lattice::GroupElement& c, const ComplexVector& z, double epsilon = 1e-14,
                     Precision precision = Precision::Double) const;

 private:
  lattice::LevelStructure level_;
  lattice::FiniteAbelianGroup group_;
  SiegelMatrix omega_;
  SiegelMatrix k_omega_;
  std::vector<std::vector<Rational>> k_inverse_;
};

Complex level_basis_theta(const lattice::GroupElement& c, const lattice::LevelStructure& level,
                          const ComplexVector& z, const SiegelMatrix& omega, double epsilon = 1e-14);

}  // namespace thetalab
