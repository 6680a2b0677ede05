#pragma once

// Multi-layer Haldane-Rezayi states on the torus: K-matrices, filling
// factor, bundle slopes, the wavefunction with solenoid fluxes, the
// relative-motion factorization identity and a Kubo-Thouless quadrature.

#include <cstdint>
#include <vector>

#include "thetalab/lattice.hpp"
#include "thetalab/siegel.hpp"
#include "thetalab/theta.hpp"

namespace thetalab::fqhe {

/// K = (2p+1) on the diagonal, 2p off it; K_1 = K with its first row times N;
/// K_D = diag(2gp+1, 1, ..., 1).
struct KMatrixSpec {
  long long g = 1;
  long long p = 1;
  long long N = 1;

  KMatrixSpec() = default;
  KMatrixSpec(long long g, long long p, long long N = 1);

  lattice::IntMatrix K() const;
  lattice::IntMatrix K1() const;
  lattice::IntMatrix KD() const;
  long long r() const noexcept { return 2 * g * p + 1; }
  /// Diagonal of K_D as doubles.
  RealVector kd_levels() const;
};

/// g / (2gp+1), cross-checked against g N / det K_1.
Rational filling_factor(long long g, long long p, long long N = 1);

/// eB / (hbar c) = 2 pi |det K_1| / (Im tau L1^2).
double field_quantization(double L1, Complex tau, long long g, long long p, long long N);

struct Slopes {
  BigInt rank;
  Rational degree;
  Rational mu;
  Rational mu_r;
};

/// W_1(L_m): rank m^g, degree -m^{g-1} g!, mu = -g!/m, mu_r = -1/m.
Slopes slopes_scalar(long long g, long long m);
/// W_1(L_K): rank (det K)^g, mu = -g g!/det K, mu_r = -g/det K.
Slopes slopes_kmatrix(long long g, long long p);

std::vector<BigInt> k_invariant_factors(long long g, long long p);
/// Real eigenvalues of K, descending.
RealVector k_eigenvalues(long long g, long long p);

/// How the solenoid flux enters the centre-of-mass characteristic.
enum class FluxCoupling {
  Scaled,  ///< Theta[d_1 K_D^{-1} e_1 + phi_1; K_D^{-1} phi_2]
  Literal  ///< Theta[d_1 K_D^{-1} e_1 + phi_1; phi_2]
};

struct WaveFunctionSpec {
  long long N = 2;
  KMatrixSpec k;
  SiegelMatrix omega = SiegelMatrix::scalar({0.0, 1.0}, 1);
  long long d1 = 0;
  RealVector phi1;
  RealVector phi2;
  std::vector<long long> labels;  ///< d_1^- .. d_N^-; all 1 when empty
  FluxCoupling coupling = FluxCoupling::Scaled;
  double epsilon = 1e-14;

  static WaveFunctionSpec make(long long N, long long g, long long p, Complex tau);
  void validate() const;
};

struct IndexEntry {
  std::size_t i = 0;  ///< 1-based particle labels, i < j
  std::size_t j = 0;
  long long d = 0;
};

/// d_{1j} = d_j^-, d_{ij} = d_i^- - d_j^- for 2 <= i < j.
std::vector<IndexEntry> index_table(const WaveFunctionSpec& spec);

ThetaCharacteristic cm_characteristic(const WaveFunctionSpec& spec);

/// F_CM(K_D X | K_D Omega) with X = x_1 + ... + x_N.
Complex centre_of_mass(const WaveFunctionSpec& spec, const ComplexVector& X);
/// prod_{i<j} Theta_-[d_ij K_D^{-1} e_1; 0](K_D x_ij | K_D Omega).
Complex relative_factor(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x);
/// prod_i prod_a exp(-pi N k_a (Im x_i^a)^2 / Im Omega_aa).
double gaussian_factor(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x);

Complex hr_wavefunction(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x);

/// psi(x with x_i -> x_i + period) / psi(x). The period is e_a when
/// imaginary is false, Omega e_a otherwise.
Complex hr_cocycle(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x, std::size_t particle,
                   std::size_t layer, bool imaginary);

enum class FactorizationBasis {
  Literal,   ///< Theta_-[d K_D^{-1} e_1; 0](K_D x | K_D tau), d = 1..gp
  Corrected  ///< layer-1 odd part of Theta[((j+1/2)/r, 1/2..); (1/2..)](K_D x | K_D tau), j = 0..gp
};

struct FactorizationResult {
  FactorizationBasis basis = FactorizationBasis::Literal;
  std::vector<Complex> coefficients;
  double residual = 0.0;
  std::vector<Complex> coefficients_doubled;
  double residual_doubled = 0.0;
  double stability = 0.0;  ///< max |c - c'| / max |c| under sample doubling
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  int attempts = 0;
};

/// Least squares for sum_d c[d] basis_d(x) = Theta[1/2;1/2]^{2gp+1}(x^1|tau) prod_{a>=2} Theta[1/2;1/2](x^a|tau).
FactorizationResult hr_factorization_solve(long long g, long long p, Complex tau, std::size_t sample_count,
                                           std::uint64_t seed, FactorizationBasis basis = FactorizationBasis::Literal);

struct KuboConfig {
  long long p = 1;
  long long N = 2;
  Complex tau{0.0, 1.0};
  std::size_t Q = 32;
  std::size_t F = 8;
  FluxCoupling coupling = FluxCoupling::Scaled;
  std::vector<long long> labels;
  double flux_origin1 = 0.0;  ///< grid offset in units of 1/F
  double flux_origin2 = 0.0;
  double convergence_tolerance = 0.01;
  bool check_convergence = true;
};

struct HallReport {
  long long g = 1;
  long long p = 1;
  Rational filling;
  Rational mu;
  Rational mu_r;
  Rational sigma_exact;

  bool numeric = false;
  long long N = 0;
  std::size_t Q = 0;
  std::size_t F = 0;
  double sigma_numeric = 0.0;
  double sigma_half_q = 0.0;
  double convergence_delta = 0.0;
  bool converged = true;
  double curvature_min = 0.0;
  double curvature_max = 0.0;
  double curvature_mean = 0.0;
  double curvature_spread = 0.0;  ///< (max - min) / |mean| of the d_1-summed curvature
  std::vector<double> curvature;  ///< d_1-summed curvature per flux point, row-major in (phi_1, phi_2)
  std::vector<IndexEntry> index_table;
};

HallReport hall_exact(long long g, long long p);

/// g = 1 only. Berry curvature of the normalized states psi^{d_1}[phi] on an
/// F x F flux grid with a Q-point midpoint rule per real coordinate.
HallReport kubo_conductivity(const KuboConfig& config);

}  // namespace thetalab::fqhe
