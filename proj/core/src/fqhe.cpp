#include "thetalab/fqhe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "thetalab/errors.hpp"

namespace thetalab::fqhe {

namespace {

void check_gp(long long g, long long p) {
  if (g < 1) throw ValidationError("fqhe: g must be >= 1");
  if (p < 1) throw ValidationError("fqhe: p must be >= 1");
}

SiegelMatrix kd_omega(const WaveFunctionSpec& spec) { return spec.omega.left_scaled(spec.k.kd_levels()); }

ComplexVector kd_apply(const RealVector& k, const ComplexVector& x) {
  ComplexVector out(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = k[a] * x[a];
  return out;
}

}  // namespace

KMatrixSpec::KMatrixSpec(long long g_, long long p_, long long N_) : g(g_), p(p_), N(N_) {
  check_gp(g, p);
  if (N < 1) throw ValidationError("fqhe: N must be >= 1");
}

lattice::IntMatrix KMatrixSpec::K() const {
  const auto n = static_cast<std::size_t>(g);
  lattice::IntMatrix K(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) K(i, j) = (i == j) ? 2 * p + 1 : 2 * p;
  return K;
}

lattice::IntMatrix KMatrixSpec::K1() const {
  lattice::IntMatrix M = K();
  for (std::size_t j = 0; j < M.size(); ++j) M(0, j) *= N;
  return M;
}

lattice::IntMatrix KMatrixSpec::KD() const {
  lattice::IntMatrix D = lattice::IntMatrix::identity(static_cast<std::size_t>(g));
  D(0, 0) = r();
  return D;
}

RealVector KMatrixSpec::kd_levels() const {
  RealVector k(static_cast<std::size_t>(g), 1.0);
  k[0] = static_cast<double>(r());
  return k;
}

Rational filling_factor(long long g, long long p, long long N) {
  const KMatrixSpec spec(g, p, N);
  const Rational f(BigInt(g), BigInt(2 * g * p + 1));
  const Rational check(BigInt(g) * N, spec.K1().determinant());
  if (f != check) throw NumericalFailure("filling_factor: g/(2gp+1) disagrees with gN/det K_1");
  return f;
}

double field_quantization(double L1, Complex tau, long long g, long long p, long long N) {
  if (!(L1 > 0.0)) throw ValidationError("field_quantization: L1 must be positive");
  if (!(tau.imag() > 0.0)) throw ValidationError("field_quantization: Im tau must be positive");
  const KMatrixSpec spec(g, p, N);
  const double det = abs(spec.K1().determinant()).convert_to<double>();
  return 2.0 * kPi * det / (tau.imag() * L1 * L1);
}

Slopes slopes_scalar(long long g, long long m) {
  if (g < 1 || m < 1) throw ValidationError("slopes: need g >= 1 and m >= 1");
  Slopes s;
  s.rank = lattice::ipow(BigInt(m), g);
  s.degree = Rational(-lattice::ipow(BigInt(m), g - 1) * lattice::factorial(g));
  s.mu = s.degree / Rational(s.rank);
  s.mu_r = s.mu / Rational(lattice::factorial(g));
  return s;
}

Slopes slopes_kmatrix(long long g, long long p) {
  const KMatrixSpec spec(g, p);
  const BigInt det = spec.K().determinant();
  Slopes s;
  s.rank = lattice::ipow(det, g);
  s.degree = Rational(-BigInt(g) * lattice::ipow(det, g - 1) * lattice::factorial(g));
  s.mu = s.degree / Rational(s.rank);
  s.mu_r = s.mu / Rational(lattice::factorial(g));
  return s;
}

std::vector<BigInt> k_invariant_factors(long long g, long long p) {
  return lattice::smith_normal_form(KMatrixSpec(g, p).K()).invariant_factors();
}

RealVector k_eigenvalues(long long g, long long p) {
  const lattice::IntMatrix K = KMatrixSpec(g, p).K();
  const auto n = static_cast<Eigen::Index>(K.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      M(i, j) = K(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).convert_to<double>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  RealVector ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

WaveFunctionSpec WaveFunctionSpec::make(long long N, long long g, long long p, Complex tau) {
  WaveFunctionSpec s;
  s.N = N;
  s.k = KMatrixSpec(g, p, N);
  s.omega = SiegelMatrix::scalar(tau, static_cast<std::size_t>(g));
  s.phi1.assign(static_cast<std::size_t>(g), 0.0);
  s.phi2.assign(static_cast<std::size_t>(g), 0.0);
  return s;
}

void WaveFunctionSpec::validate() const {
  if (N < 2) throw ValidationError("wavefunction: N must be >= 2");
  const auto g = static_cast<std::size_t>(k.g);
  if (omega.dimension() != g) throw ValidationError("wavefunction: Omega dimension differs from g");
  if (g > 1 && !omega.is_diagonal()) throw ValidationError("wavefunction: Omega must be diagonal in the K_D basis");
  if (d1 < 0 || d1 >= k.r()) throw ValidationError("wavefunction: d_1 must lie in [0, 2gp+1)");
  if (phi1.size() != g || phi2.size() != g) throw ValidationError("wavefunction: flux vectors need g components");
  if (!labels.empty() && static_cast<long long>(labels.size()) != N)
    throw ValidationError("wavefunction: labels need N entries");
  if (!(epsilon > 0.0)) throw ValidationError("wavefunction: epsilon must be positive");
}

std::vector<IndexEntry> index_table(const WaveFunctionSpec& spec) {
  std::vector<long long> lab = spec.labels;
  if (lab.empty()) lab.assign(static_cast<std::size_t>(spec.N), 1);
  std::vector<IndexEntry> out;
  for (std::size_t i = 1; i <= lab.size(); ++i)
    for (std::size_t j = i + 1; j <= lab.size(); ++j) {
      const long long d = (i == 1) ? lab[j - 1] : lab[i - 1] - lab[j - 1];
      out.push_back({i, j, d});
    }
  return out;
}

ThetaCharacteristic cm_characteristic(const WaveFunctionSpec& spec) {
  spec.validate();
  const RealVector k = spec.k.kd_levels();
  ThetaCharacteristic ch = ThetaCharacteristic::zero(k.size());
  for (std::size_t a = 0; a < k.size(); ++a) {
    ch.a[a] = spec.phi1[a];
    ch.b[a] = spec.coupling == FluxCoupling::Scaled ? spec.phi2[a] / k[a] : spec.phi2[a];
  }
  ch.a[0] += static_cast<double>(spec.d1) / k[0];
  return ch;
}

Complex centre_of_mass(const WaveFunctionSpec& spec, const ComplexVector& X) {
  spec.validate();
  EvalRequest req{cm_characteristic(spec), kd_apply(spec.k.kd_levels(), X), kd_omega(spec), spec.epsilon,
                  Precision::Double, ErrorMode::RelativeToScale};
  return theta(req);
}

Complex relative_factor(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x) {
  spec.validate();
  const RealVector k = spec.k.kd_levels();
  const SiegelMatrix W = kd_omega(spec);
  Complex f = 1.0;
  for (const auto& e : index_table(spec)) {
    ComplexVector xij(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) xij[a] = k[a] * (x[e.i - 1][a] - x[e.j - 1][a]);
    ThetaCharacteristic ch = ThetaCharacteristic::zero(k.size());
    ch.a[0] = static_cast<double>(e.d) / k[0];
    f *= theta_odd(ch, xij, W, spec.epsilon);
  }
  return f;
}

double gaussian_factor(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x) {
  const RealVector k = spec.k.kd_levels();
  double s = 0.0;
  for (const auto& xi : x)
    for (std::size_t a = 0; a < k.size(); ++a) {
      const double y = xi[a].imag();
      s += kPi * static_cast<double>(spec.N) * k[a] * y * y / spec.omega(a, a).imag();
    }
  return std::exp(-s);
}

Complex hr_wavefunction(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x) {
  spec.validate();
  if (static_cast<long long>(x.size()) != spec.N) throw ValidationError("wavefunction: need N particle coordinates");
  for (const auto& xi : x)
    if (xi.size() != static_cast<std::size_t>(spec.k.g)) throw ValidationError("wavefunction: coordinate needs g entries");
  ComplexVector X(static_cast<std::size_t>(spec.k.g));
  for (const auto& xi : x)
    for (std::size_t a = 0; a < X.size(); ++a) X[a] += xi[a];
  return centre_of_mass(spec, X) * relative_factor(spec, x) * gaussian_factor(spec, x);
}

Complex hr_cocycle(const WaveFunctionSpec& spec, const std::vector<ComplexVector>& x, std::size_t particle,
                   std::size_t layer, bool imaginary) {
  spec.validate();
  if (particle >= x.size() || layer >= static_cast<std::size_t>(spec.k.g))
    throw ValidationError("hr_cocycle: particle or layer out of range");
  const double ka = spec.k.kd_levels()[layer];
  const ThetaCharacteristic ch = cm_characteristic(spec);
  const Complex I(0.0, 1.0);
  if (!imaginary) return std::exp(2.0 * kPi * I * ka * ch.a[layer]);
  const double Nd = static_cast<double>(spec.N);
  const Complex tau = spec.omega(layer, layer);
  const Complex xa = x[particle][layer];
  const Complex holo = std::exp(-kPi * I * Nd * ka * tau - 2.0 * kPi * I * (Nd * ka * xa + ch.b[layer]));
  const double gauss = std::exp(-kPi * Nd * ka * (2.0 * xa.imag() + tau.imag()));
  return holo * gauss;
}

namespace {

std::vector<ComplexVector> factorization_points(std::size_t g, Complex tau, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  std::vector<ComplexVector> pts(count, ComplexVector(g));
  for (auto& x : pts)
    for (auto& c : x) {
      const double u = U(rng);
      const double v = U(rng);
      c = u + tau * v;
    }
  return pts;
}

struct Design {
  Eigen::MatrixXcd A;
  Eigen::VectorXcd y;
};

Design factorization_design(long long g, long long p, Complex tau, const std::vector<ComplexVector>& pts,
                            FactorizationBasis basis) {
  const KMatrixSpec spec(g, p);
  const auto gs = static_cast<std::size_t>(g);
  const long long r = spec.r();
  const RealVector k = spec.kd_levels();
  const SiegelMatrix W = SiegelMatrix::scalar(tau, gs);
  const SiegelMatrix KW = W.left_scaled(k);
  const SiegelMatrix W1 = SiegelMatrix::scalar(tau, 1);
  const long long cols = basis == FactorizationBasis::Literal ? g * p : g * p + 1;
  const double eps = 1e-15;

  Design D{Eigen::MatrixXcd(static_cast<Eigen::Index>(pts.size()), cols),
           Eigen::VectorXcd(static_cast<Eigen::Index>(pts.size()))};
  const ThetaCharacteristic half{{0.5}, {0.5}};
  for (std::size_t s = 0; s < pts.size(); ++s) {
    const ComplexVector& x = pts[s];
    Complex rhs = std::pow(theta({half, {x[0]}, W1, eps, Precision::Double, ErrorMode::RelativeToScale}),
                           static_cast<int>(r));
    for (std::size_t a = 1; a < gs; ++a)
      rhs *= theta({half, {x[a]}, W1, eps, Precision::Double, ErrorMode::RelativeToScale});
    D.y(static_cast<Eigen::Index>(s)) = rhs;

    const ComplexVector z = kd_apply(k, x);
    for (long long c = 0; c < cols; ++c) {
      Complex v;
      if (basis == FactorizationBasis::Literal) {
        ThetaCharacteristic ch = ThetaCharacteristic::zero(gs);
        ch.a[0] = static_cast<double>(c + 1) / static_cast<double>(r);
        v = theta_odd(ch, z, KW, eps);
      } else {
        ThetaCharacteristic ch{RealVector(gs, 0.5), RealVector(gs, 0.5)};
        ch.a[0] = (static_cast<double>(c) + 0.5) / static_cast<double>(r);
        ComplexVector zr = z;
        zr[0] = -zr[0];
        const Complex f = theta({ch, z, KW, eps, Precision::Double, ErrorMode::RelativeToScale});
        const Complex fr = theta({ch, zr, KW, eps, Precision::Double, ErrorMode::RelativeToScale});
        v = 0.5 * (f - fr);
      }
      D.A(static_cast<Eigen::Index>(s), c) = v;
    }
  }
  return D;
}

struct Solve {
  std::vector<Complex> c;
  double residual = 0.0;
  bool full_rank = false;
};

Solve least_squares(const Design& D) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(D.A);
  qr.setThreshold(1e-12);
  Solve s;
  s.full_rank = qr.rank() == D.A.cols();
  const Eigen::VectorXcd c = qr.solve(D.y);
  s.c.assign(c.data(), c.data() + c.size());
  s.residual = (D.A * c - D.y).norm() / D.y.norm();
  return s;
}

}  // namespace

FactorizationResult hr_factorization_solve(long long g, long long p, Complex tau, std::size_t sample_count,
                                           std::uint64_t seed, FactorizationBasis basis) {
  check_gp(g, p);
  if (!(tau.imag() > 0.0)) throw ValidationError("hr_factorization_solve: Im tau must be positive");
  if (sample_count < static_cast<std::size_t>(4 * g * p))
    throw ValidationError("hr_factorization_solve: sample_count must be >= 4gp");
  const auto gs = static_cast<std::size_t>(g);
  FactorizationResult out;
  out.basis = basis;
  out.samples = sample_count;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    const Solve a = least_squares(factorization_design(g, p, tau, factorization_points(gs, tau, sample_count, s), basis));
    const Solve b = least_squares(
        factorization_design(g, p, tau, factorization_points(gs, tau, 2 * sample_count, s ^ 0x9e3779b97f4a7c15ULL), basis));
    out.attempts = attempt + 1;
    if (!a.full_rank || !b.full_rank) continue;
    out.seed = s;
    out.coefficients = a.c;
    out.residual = a.residual;
    out.coefficients_doubled = b.c;
    out.residual_doubled = b.residual;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.c.size(); ++i) {
      num = std::max(num, std::abs(a.c[i] - b.c[i]));
      den = std::max(den, std::abs(a.c[i]));
    }
    out.stability = den > 0.0 ? num / den : num;
    return out;
  }
  throw NumericalFailure("hr_factorization_solve: sample matrix rank deficient after 3 seeds");
}

HallReport hall_exact(long long g, long long p) {
  HallReport rep;
  rep.g = g;
  rep.p = p;
  rep.filling = filling_factor(g, p);
  const Slopes s = slopes_kmatrix(g, p);
  rep.mu = s.mu;
  rep.mu_r = s.mu_r;
  rep.sigma_exact = s.mu_r < 0 ? Rational(-s.mu_r) : s.mu_r;
  return rep;
}

namespace {

// sigma_H at one quadrature resolution; fills the d_1-summed curvature per flux point.
double kubo_at(const KuboConfig& cfg, std::size_t Q, std::vector<double>& curvature) {
  const long long r = 2 * cfg.p + 1;
  const auto N = static_cast<std::size_t>(cfg.N);
  const double rd = static_cast<double>(r);
  const Complex tau = cfg.tau;
  const double Qd = static_cast<double>(Q);

  WaveFunctionSpec spec = WaveFunctionSpec::make(cfg.N, 1, cfg.p, tau);
  spec.labels = cfg.labels;
  spec.coupling = cfg.coupling;
  const auto table = index_table(spec);
  for (const auto& e : table)
    if (mod_floor(static_cast<std::int64_t>(e.d), static_cast<std::int64_t>(r)) == 0)
      throw ValidationError("kubo: index table has d_" + std::to_string(e.i) + std::to_string(e.j) +
                            " = 0 mod 2p+1, so the relative factor vanishes identically");

  // |Theta_-[d/r;0](r x | r tau)|^2 on the difference grid
  const std::size_t side = 2 * Q - 1;
  const SiegelMatrix rW = SiegelMatrix::scalar(rd * tau, 1);
  std::map<long long, std::vector<double>> odd_tables;
  for (const auto& e : table) {
    if (odd_tables.count(e.d)) continue;
    std::vector<double> t(side * side);
    ThetaCharacteristic ch{{static_cast<double>(e.d) / rd}, {0.0}};
    for (std::size_t iu = 0; iu < side; ++iu)
      for (std::size_t iv = 0; iv < side; ++iv) {
        const double du = (static_cast<double>(iu) - (Qd - 1.0)) / Qd;
        const double dv = (static_cast<double>(iv) - (Qd - 1.0)) / Qd;
        const Complex z = rd * (du + tau * dv);
        t[iu * side + iv] = std::norm(theta_odd(ch, {z}, rW, 1e-15));
      }
    odd_tables.emplace(e.d, std::move(t));
  }
  std::vector<const std::vector<double>*> pair_table(N * N, nullptr);
  for (const auto& e : table) pair_table[(e.i - 1) * N + (e.j - 1)] = &odd_tables.at(e.d);

  std::vector<double> weight(Q);
  for (std::size_t k = 0; k < Q; ++k) {
    const double v = (static_cast<double>(k) + 0.5) / Qd;
    const double y = v * tau.imag();
    weight[k] = std::exp(-2.0 * kPi * static_cast<double>(N) * rd * y * y / tau.imag());
  }

  // X-marginal of |F_r|^2 * Gaussian weight
  const std::size_t xs = N * (Q - 1) + 1;
  std::vector<double> marginal(xs * xs, 0.0);
  std::vector<std::size_t> ku(N), kv(N);
  auto place = [&](auto&& self, std::size_t p, double acc, std::size_t su, std::size_t sv) -> void {
    if (p == N) {
      marginal[su * xs + sv] += acc;
      return;
    }
    for (std::size_t a = 0; a < Q; ++a)
      for (std::size_t b = 0; b < Q; ++b) {
        double v = acc * weight[b];
        for (std::size_t q = 0; q < p; ++q) {
          // pair (q, p): x_q - x_p
          const std::size_t iu = ku[q] + (Q - 1) - a;
          const std::size_t iv = kv[q] + (Q - 1) - b;
          v *= (*pair_table[q * N + p])[iu * side + iv];
        }
        if (v == 0.0) continue;
        ku[p] = a;
        kv[p] = b;
        self(self, p + 1, v, su + a, sv + b);
      }
  };
  place(place, 0, 1.0, 0, 0);

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < marginal.size(); ++i)
    if (marginal[i] > 0.0) support.push_back(i);
  if (support.empty()) throw NumericalFailure("kubo: the relative factor vanishes on the whole quadrature grid");

  const double half_n = 0.5 * static_cast<double>(N);
  const double b_scale = cfg.coupling == FluxCoupling::Scaled ? 1.0 / rd : 1.0;
  const SiegelMatrix cmW = rW;
  const std::size_t F = cfg.F;
  curvature.assign(F * F, 0.0);
  for (std::size_t i = 0; i < F; ++i)
    for (std::size_t j = 0; j < F; ++j) {
      const double phi1 = (static_cast<double>(i) + cfg.flux_origin1) / static_cast<double>(F);
      const double phi2 = (static_cast<double>(j) + cfg.flux_origin2) / static_cast<double>(F);
      double total = 0.0;
      for (long long d1 = 1; d1 <= r; ++d1) {
        ThetaCharacteristic ch{{static_cast<double>(d1) / rd + phi1}, {phi2 * b_scale}};
        double norm = 0.0;
        Complex A1 = 0.0, A2 = 0.0, B12 = 0.0;
        for (std::size_t idx : support) {
          const double su = static_cast<double>(idx / xs);
          const double sv = static_cast<double>(idx % xs);
          const Complex X = (su + half_n) / Qd + tau * ((sv + half_n) / Qd);
          const ThetaJet jet =
              theta_jet({ch, {rd * X}, cmW, 1e-13, Precision::Double, ErrorMode::RelativeToScale});
          const Complex f = jet.value;
          const Complex f1 = jet.da[0];
          const Complex f2 = jet.db[0] * b_scale;
          const double m = marginal[idx];
          norm += m * std::norm(f);
          A1 += m * std::conj(f) * f1;
          A2 += m * std::conj(f) * f2;
          B12 += m * std::conj(f1) * f2;
        }
        total += -2.0 * std::imag(B12 / norm - std::conj(A1) * A2 / (norm * norm));
      }
      curvature[i * F + j] = total;
    }
  double mean = 0.0;
  for (double c : curvature) mean += c;
  mean /= static_cast<double>(curvature.size());
  return mean / (2.0 * kPi) / rd;
}

}  // namespace

HallReport kubo_conductivity(const KuboConfig& cfg) {
  if (cfg.p < 1) throw ValidationError("kubo: p must be >= 1");
  if (cfg.N != 2 && cfg.N != 3) throw ValidationError("kubo: N must be 2 or 3");
  if (cfg.Q < 16) throw ValidationError("kubo: Q must be >= 16");
  if (cfg.F < 4) throw ValidationError("kubo: F must be >= 4");
  if (!(cfg.tau.imag() > 0.0)) throw ValidationError("kubo: Im tau must be positive");
  if (!cfg.labels.empty() && static_cast<long long>(cfg.labels.size()) != cfg.N)
    throw ValidationError("kubo: labels need N entries");

  HallReport rep = hall_exact(1, cfg.p);
  rep.numeric = true;
  rep.N = cfg.N;
  rep.Q = cfg.Q;
  rep.F = cfg.F;
  WaveFunctionSpec spec = WaveFunctionSpec::make(cfg.N, 1, cfg.p, cfg.tau);
  spec.labels = cfg.labels;
  rep.index_table = index_table(spec);

  rep.sigma_numeric = kubo_at(cfg, cfg.Q, rep.curvature);
  rep.curvature_min = *std::min_element(rep.curvature.begin(), rep.curvature.end());
  rep.curvature_max = *std::max_element(rep.curvature.begin(), rep.curvature.end());
  double mean = 0.0;
  for (double c : rep.curvature) mean += c;
  rep.curvature_mean = mean / static_cast<double>(rep.curvature.size());
  rep.curvature_spread = (rep.curvature_max - rep.curvature_min) / std::abs(rep.curvature_mean);

  if (cfg.check_convergence) {
    std::vector<double> coarse;
    rep.sigma_half_q = kubo_at(cfg, std::max<std::size_t>(cfg.Q / 2, 2), coarse);
    rep.convergence_delta = std::abs(rep.sigma_numeric - rep.sigma_half_q) / std::abs(rep.sigma_numeric);
    rep.converged = rep.convergence_delta <= cfg.convergence_tolerance;
  }
  return rep;
}

}  // namespace thetalab::fqhe
