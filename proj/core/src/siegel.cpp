#include "thetalab/siegel.hpp"

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "thetalab/errors.hpp"

namespace thetalab {

SiegelMatrix::SiegelMatrix(std::size_t g, std::vector<Complex> entries) : g_(g), omega_(std::move(entries)) {
  if (g_ == 0) throw ValidationError("SiegelMatrix: dimension must be >= 1");
  if (omega_.size() != g_ * g_) throw ValidationError("SiegelMatrix: expected g*g entries");
  for (const auto& w : omega_)
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw ValidationError("SiegelMatrix: non-finite entry");
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = i + 1; j < g_; ++j)
      if (std::abs((*this)(i, j) - (*this)(j, i)) > 1e-12)
        throw ValidationError("SiegelMatrix: Omega must be symmetric");

  Eigen::MatrixXd Y(g_, g_);
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = 0; j < g_; ++j) Y(i, j) = 0.5 * ((*this)(i, j).imag() + (*this)(j, i).imag());

  Eigen::LLT<Eigen::MatrixXd> llt(kPi * Y);
  if (llt.info() != Eigen::Success) throw ValidationError("SiegelMatrix: Im(Omega) is not positive definite");
  Eigen::MatrixXd T = llt.matrixU();
  for (std::size_t i = 0; i < g_; ++i)
    if (!(T(i, i) > 0.0)) throw ValidationError("SiegelMatrix: Im(Omega) is not positive definite");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kPi * Y, Eigen::EigenvaluesOnly);
  lambda_min_ = es.eigenvalues().minCoeff();
  if (!(lambda_min_ > 0.0)) throw ValidationError("SiegelMatrix: Im(Omega) is not positive definite");

  Eigen::MatrixXd Yinv = Y.inverse();
  chol_.resize(g_ * g_);
  yinv_.resize(g_ * g_);
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = 0; j < g_; ++j) {
      chol_[i * g_ + j] = T(i, j);
      yinv_[i * g_ + j] = Yinv(i, j);
    }
  for (std::size_t i = 0; i < g_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < g_; ++j) row += std::abs((*this)(i, j));
    norm_bound_ = std::max(norm_bound_, row);
  }
}

SiegelMatrix SiegelMatrix::scalar(Complex tau, std::size_t g) {
  std::vector<Complex> e(g * g);
  for (std::size_t i = 0; i < g; ++i) e[i * g + i] = tau;
  return SiegelMatrix(g, std::move(e));
}

SiegelMatrix SiegelMatrix::diagonal(const std::vector<Complex>& taus) {
  const std::size_t g = taus.size();
  std::vector<Complex> e(g * g);
  for (std::size_t i = 0; i < g; ++i) e[i * g + i] = taus[i];
  return SiegelMatrix(g, std::move(e));
}

SiegelMatrix SiegelMatrix::random(std::size_t g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  std::vector<double> X(g * g), A(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i; j < g; ++j) X[i * g + j] = X[j * g + i] = U(rng);
  for (auto& a : A) a = U(rng);
  std::vector<Complex> e(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      double y = (i == j) ? static_cast<double>(g) : 0.0;
      for (std::size_t k = 0; k < g; ++k) y += A[i * g + k] * A[j * g + k];
      e[i * g + j] = Complex(X[i * g + j], y);
    }
  // exact symmetry
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < i; ++j) e[i * g + j] = e[j * g + i];
  return SiegelMatrix(g, std::move(e));
}

bool SiegelMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = 0; j < g_; ++j)
      if (i != j && (*this)(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

SiegelMatrix SiegelMatrix::scaled(double k) const {
  std::vector<Complex> e = omega_;
  for (auto& w : e) w *= k;
  return SiegelMatrix(g_, std::move(e));
}

SiegelMatrix SiegelMatrix::left_scaled(const std::vector<double>& k) const {
  if (k.size() != g_) throw ValidationError("SiegelMatrix: scale vector has wrong length");
  std::vector<Complex> e = omega_;
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = 0; j < g_; ++j) e[i * g_ + j] *= k[i];
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = i + 1; j < g_; ++j)
      if (e[i * g_ + j] != e[j * g_ + i])
        throw ValidationError("SiegelMatrix: K * Omega is not symmetric; non-diagonal K needs commuting Omega");
  return SiegelMatrix(g_, std::move(e));
}

ComplexVector SiegelMatrix::apply(const ComplexVector& v) const {
  if (v.size() != g_) throw ValidationError("SiegelMatrix: vector has wrong length");
  ComplexVector out(g_);
  for (std::size_t i = 0; i < g_; ++i)
    for (std::size_t j = 0; j < g_; ++j) out[i] += (*this)(i, j) * v[j];
  return out;
}

}  // namespace thetalab
