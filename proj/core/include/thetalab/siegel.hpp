#pragma once

#include <cstdint>
#include <vector>

#include "thetalab/numeric.hpp"

namespace thetalab {

/// Period matrix Omega in the Siegel upper half-space, with the Cholesky
/// factor of pi * Im(Omega) cached at construction.
class SiegelMatrix {
 public:
  SiegelMatrix() = default;

  /// Row-major g x g entries. Throws ValidationError unless Omega is symmetric
  /// within 1e-12 and Im(Omega) is positive definite.
  SiegelMatrix(std::size_t g, std::vector<Complex> entries);

  static SiegelMatrix scalar(Complex tau, std::size_t g);
  static SiegelMatrix diagonal(const std::vector<Complex>& taus);
  /// Re entries uniform in [-1/2, 1/2), Im = A A^T + g I with A uniform in [-1/2, 1/2).
  static SiegelMatrix random(std::size_t g, std::uint64_t seed);

  std::size_t dimension() const noexcept { return g_; }
  Complex operator()(std::size_t i, std::size_t j) const { return omega_[i * g_ + j]; }
  const std::vector<Complex>& entries() const noexcept { return omega_; }

  /// Upper-triangular T with T^T T = pi * Im(Omega).
  double cholesky(std::size_t i, std::size_t j) const { return chol_[i * g_ + j]; }
  /// Im(Omega)^{-1}.
  double imag_inverse(std::size_t i, std::size_t j) const { return yinv_[i * g_ + j]; }
  /// Smallest eigenvalue of pi * Im(Omega).
  double lambda_min() const noexcept { return lambda_min_; }
  /// Largest absolute row sum of Omega, used to bound |Omega w|.
  double norm_bound() const noexcept { return norm_bound_; }

  bool is_diagonal() const;

  /// k * Omega for a positive integer or real scale.
  SiegelMatrix scaled(double k) const;
  /// diag(k) * Omega; requires the product to stay symmetric.
  SiegelMatrix left_scaled(const std::vector<double>& k) const;

  ComplexVector apply(const ComplexVector& v) const;

 private:
  std::size_t g_ = 0;
  std::vector<Complex> omega_;
  std::vector<double> chol_;
  std::vector<double> yinv_;
  double lambda_min_ = 0.0;
  double norm_bound_ = 0.0;
};

}  // namespace thetalab
