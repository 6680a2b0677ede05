#include "thetalab/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "thetalab/errors.hpp"
#include "thetalab/parallel.hpp"

namespace thetalab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double x, double y) {
  if (x == -kInf) return y;
  if (y == -kInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

// log Gamma(s, x), falling back to x^{s-1} e^{-x} / (1 - (s-1)/x) once the
// function value underflows.
double log_upper_gamma(double s, double x) {
  const double v = boost::math::tgamma(s, x);
  if (v > 1e-280) return std::log(v);
  double log_factor = 0.0;
  if (s > 1.0) log_factor = -std::log1p(-(s - 1.0) / x);
  return (s - 1.0) * std::log(x) - x + log_factor;
}

void validate(const EvalRequest& req) {
  const std::size_t g = req.omega.dimension();
  if (g == 0) throw ValidationError("theta: empty period matrix");
  if (req.z.size() != g) throw ValidationError("theta: z has wrong length");
  if (req.characteristic.a.size() != g || req.characteristic.b.size() != g)
    throw ValidationError("theta: characteristic has wrong length");
  if (!(req.epsilon > 0.0) || !std::isfinite(req.epsilon)) throw ValidationError("theta: epsilon must be positive");
  if (!(req.radius_cap > 0.0)) throw ValidationError("theta: radius cap must be positive");
  for (const auto& v : req.z)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ValidationError("theta: non-finite z");
  for (std::size_t i = 0; i < g; ++i)
    if (!std::isfinite(req.characteristic.a[i]) || !std::isfinite(req.characteristic.b[i]))
      throw ValidationError("theta: non-finite characteristic");
}

// Tail factor alpha + beta ||u|| bounding the polynomial prefactor of the
// differentiated series.
struct Prefactor {
  double alpha = 1.0;
  double beta = 0.0;
};

double vec_norm(const RealVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Prefactor gradient_prefactor(const EvalRequest& req, const RealVector& centre) {
  const SiegelMatrix& W = req.omega;
  const double inv_rho = 1.0 / std::sqrt(W.lambda_min());
  double zb = 0.0;
  for (std::size_t i = 0; i < req.z.size(); ++i) zb += std::norm(req.z[i] + req.characteristic.b[i]);
  zb = std::sqrt(zb);
  const double c = vec_norm(centre);
  Prefactor p;
  p.alpha = std::max({1.0, 2.0 * kPi * c, 2.0 * kPi * (W.norm_bound() * c + zb)});
  p.beta = 2.0 * kPi * std::max(1.0, W.norm_bound()) * inv_rho;
  return p;
}

double log_poly_tail(std::size_t g, double rho, double R, const Prefactor& p) {
  double out = std::log(p.alpha) + log_tail_bound(g, rho, R);
  if (p.beta > 0.0) {
    // ||u|| e^{-||u||^2} <= e^{-||u||^2 / 2} / sqrt(e): the same bound on the lattice scaled by 1/sqrt(2)
    const double s = std::sqrt(0.5);
    out = log_add(out, std::log(p.beta) - 0.5 + log_tail_bound(g, rho * s, R * s));
  }
  return out;
}

TruncationPlan make_plan(const EvalRequest& req, const Prefactor& pref) {
  validate(req);
  const SiegelMatrix& W = req.omega;
  const std::size_t g = W.dimension();
  TruncationPlan plan;
  plan.centre.assign(g, 0.0);
  RealVector y(g);
  for (std::size_t i = 0; i < g; ++i) y[i] = req.z[i].imag();
  double quad = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g; ++j) s += W.imag_inverse(i, j) * y[j];
    plan.centre[i] = -s;
    quad += y[i] * s;
  }
  plan.log_scale = kPi * quad;

  const Prefactor& p = pref;
  const double log_target = std::log(req.epsilon) - (req.error_mode == ErrorMode::Absolute ? plan.log_scale : 0.0);

  const double rho = std::sqrt(W.lambda_min());
  const double gd = static_cast<double>(g);
  double lo = 0.5 * (std::sqrt(2.0 * gd) + rho) + 1e-9;
  auto f = [&](double R) { return log_poly_tail(g, rho, R, p); };
  if (lo > req.radius_cap) lo = req.radius_cap;
  if (f(lo) <= log_target) {
    plan.radius = lo;
    plan.log_tail = f(lo);
    return plan;
  }
  if (f(req.radius_cap) > log_target)
    throw PrecisionUnreachable("theta: requested epsilon needs a truncation radius beyond the cap " +
                               std::to_string(req.radius_cap));
  double hi = req.radius_cap;
  for (int it = 0; it < 40 && hi - lo > 1e-3; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= log_target)
      hi = mid;
    else
      lo = mid;
  }
  plan.radius = hi;
  plan.log_tail = f(hi);
  return plan;
}

// Calls visit(n, u2) for every integer n with ||T(n + a - c)||^2 = u2 <= R^2.
template <class Visit>
std::size_t enumerate_ellipsoid(const SiegelMatrix& W, const RealVector& a, const RealVector& c, double R,
                                Visit&& visit) {
  const std::size_t g = W.dimension();
  std::vector<long long> n(g, 0);
  RealVector v(g, 0.0);
  std::size_t count = 0;
  const double R2 = R * R;

  auto rec = [&](auto&& self, std::size_t level, double acc) -> void {
    const std::size_t i = level - 1;
    double s = 0.0;
    for (std::size_t j = i + 1; j < g; ++j) s += W.cholesky(i, j) * v[j];
    const double rem = R2 - acc;
    if (rem < 0.0) return;
    const double r = std::sqrt(rem);
    const double tii = W.cholesky(i, i);
    const double vlo = (-s - r) / tii;
    const double vhi = (-s + r) / tii;
    const double shift = c[i] - a[i];
    const long long nlo = static_cast<long long>(std::ceil(vlo + shift));
    const long long nhi = static_cast<long long>(std::floor(vhi + shift));
    for (long long k = nlo; k <= nhi; ++k) {
      n[i] = k;
      v[i] = static_cast<double>(k) + a[i] - c[i];
      const double t = tii * v[i] + s;
      const double next = acc + t * t;
      if (next > R2) continue;
      if (i == 0) {
        ++count;
        visit(n, next);
      } else {
        self(self, i, next);
      }
    }
  };
  rec(rec, g, 0.0);
  return count;
}

template <class R>
struct Accum {
  R re = 0, im = 0;
  void add(const R& x, const R& y) {
    re += x;
    im += y;
  }
};

// Sums the series relative to the natural scale; returns value and, if
// requested, gradients. Scale applied at the end.
template <class R>
ThetaJet sum_series(const EvalRequest& req, const TruncationPlan& plan, bool gradients) {
  using std::cos;
  using std::exp;
  using std::sin;
  using boost::multiprecision::cos;
  using boost::multiprecision::exp;
  using boost::multiprecision::sin;

  const SiegelMatrix& W = req.omega;
  const std::size_t g = W.dimension();
  const RealVector& a = req.characteristic.a;
  const RealVector& b = req.characteristic.b;
  const R pi = R(kPi) + R(1.2246467991473532e-16);

  std::vector<R> X(g * g), Y(g * g), xr(g), yi(g), bb(g);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      X[i * g + j] = R(W(i, j).real());
      Y[i * g + j] = R(W(i, j).imag());
    }
    xr[i] = R(req.z[i].real());
    yi[i] = R(req.z[i].imag());
    bb[i] = R(b[i]);
  }

  Accum<R> val;
  std::vector<Accum<R>> dw(gradients ? g : 0), dA(gradients ? g : 0);
  std::vector<R> w(g), Xw(g), Yw(g);

  enumerate_ellipsoid(W, a, plan.centre, plan.radius, [&](const std::vector<long long>& n, double u2) {
    for (std::size_t i = 0; i < g; ++i) w[i] = R(n[i]) + R(a[i]);
    for (std::size_t i = 0; i < g; ++i) {
      R sx = 0, sy = 0;
      for (std::size_t j = 0; j < g; ++j) {
        sx += X[i * g + j] * w[j];
        sy += Y[i * g + j] * w[j];
      }
      Xw[i] = sx;
      Yw[i] = sy;
    }
    R phase = 0;
    for (std::size_t i = 0; i < g; ++i) phase += w[i] * (Xw[i] + 2 * (xr[i] + bb[i]));
    phase *= pi;
    R mag;
    if constexpr (std::is_same_v<R, double>) {
      mag = std::exp(-u2);
    } else {
      // -pi w^T Y w - 2 pi w^T y - log_scale, evaluated in extended precision
      R q = 0;
      for (std::size_t i = 0; i < g; ++i) q += w[i] * (Yw[i] + 2 * yi[i]);
      mag = exp(-pi * q - R(plan.log_scale));
    }
    const R tr = mag * cos(phase);
    const R ti = mag * sin(phase);
    val.add(tr, ti);
    if (gradients) {
      for (std::size_t k = 0; k < g; ++k) {
        // 2 pi i w_k * term
        const R f = 2 * pi * w[k];
        dw[k].add(-f * ti, f * tr);
        // 2 pi i (Omega w + z + b)_k * term
        const R fr = 2 * pi * (Xw[k] + xr[k] + bb[k]);
        const R fi = 2 * pi * (Yw[k] + yi[k]);
        // (i fr - fi) * (tr + i ti)
        dA[k].add(-fr * ti - fi * tr, fr * tr - fi * ti);
      }
    }
  });

  const double scale = std::exp(plan.log_scale);
  auto out = [&](const Accum<R>& acc) {
    Complex c(static_cast<double>(acc.re), static_cast<double>(acc.im));
    c *= scale;
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericalFailure("theta: value overflows double precision");
    return c;
  };
  ThetaJet jet;
  jet.value = out(val);
  if (gradients) {
    jet.dz.resize(g);
    jet.da.resize(g);
    for (std::size_t k = 0; k < g; ++k) {
      jet.dz[k] = out(dw[k]);
      jet.da[k] = out(dA[k]);
    }
    jet.db = jet.dz;
  }
  return jet;
}

ThetaJet evaluate(const EvalRequest& req, bool gradients) {
  Prefactor pref;
  TruncationPlan plan;
  if (gradients) {
    validate(req);
    // centre first, then the gradient-aware plan
    TruncationPlan base = make_plan(req, Prefactor{});
    plan = make_plan(req, gradient_prefactor(req, base.centre));
  } else {
    plan = make_plan(req, pref);
  }
  if (req.precision == Precision::Extended) return sum_series<ExtendedReal>(req, plan, gradients);
  return sum_series<double>(req, plan, gradients);
}

std::vector<std::vector<Rational>> rational_inverse(const lattice::IntMatrix& K) {
  const std::size_t n = K.size();
  std::vector<std::vector<Rational>> A(n, std::vector<Rational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i][j] = Rational(K(i, j));
    A[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && A[p][col] == 0) ++p;
    if (p == n) throw DegenerateLattice("LevelBasis: singular K");
    std::swap(A[p], A[col]);
    const Rational piv = A[col][col];
    for (auto& e : A[col]) e /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const Rational f = A[r][col];
      for (std::size_t j = 0; j < 2 * n; ++j) A[r][j] -= f * A[col][j];
    }
  }
  std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = A[i][n + j];
  return inv;
}

}  // namespace

ThetaCharacteristic ThetaCharacteristic::zero(std::size_t g) { return {RealVector(g, 0.0), RealVector(g, 0.0)}; }

ThetaCharacteristic ThetaCharacteristic::from_rational(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw ValidationError("ThetaCharacteristic: a and b must have equal length");
  ThetaCharacteristic ch;
  for (const auto& q : a) ch.a.push_back(q.convert_to<double>());
  for (const auto& q : b) ch.b.push_back(q.convert_to<double>());
  return ch;
}

ThetaCharacteristic ThetaCharacteristic::negated_a() const {
  ThetaCharacteristic ch = *this;
  for (auto& v : ch.a) v = -v;
  return ch;
}

ThetaCharacteristic ThetaCharacteristic::negated() const {
  ThetaCharacteristic ch = negated_a();
  for (auto& v : ch.b) v = -v;
  return ch;
}

double log_tail_bound(std::size_t g, double rho, double R) {
  if (g == 0 || !(rho > 0.0)) throw ValidationError("log_tail_bound: need g >= 1 and rho > 0");
  if (R <= 0.5 * rho) return kInf;
  const double gd = static_cast<double>(g);
  const double x = (R - 0.5 * rho) * (R - 0.5 * rho);
  return std::log(0.5 * gd) + gd * std::log(2.0 / rho) + log_upper_gamma(0.5 * gd, x);
}

double log_natural_scale(const ComplexVector& z, const SiegelMatrix& omega) {
  const std::size_t g = omega.dimension();
  if (z.size() != g) throw ValidationError("log_natural_scale: z has wrong length");
  double quad = 0.0;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) quad += z[i].imag() * omega.imag_inverse(i, j) * z[j].imag();
  return kPi * quad;
}

TruncationPlan plan_truncation(const EvalRequest& req, bool with_gradient) {
  TruncationPlan plan = make_plan(req, Prefactor{});
  if (with_gradient) plan = make_plan(req, gradient_prefactor(req, plan.centre));
  plan.points = enumerate_ellipsoid(req.omega, req.characteristic.a, plan.centre, plan.radius,
                                    [](const std::vector<long long>&, double) {});
  return plan;
}

Complex theta(const EvalRequest& req) { return evaluate(req, false).value; }

ThetaJet theta_jet(const EvalRequest& req) { return evaluate(req, true); }

ComplexVector theta_grad(const EvalRequest& req, GradientKind which) {
  ThetaJet jet = evaluate(req, true);
  switch (which) {
    case GradientKind::Z:
      return jet.dz;
    case GradientKind::A:
      return jet.da;
    case GradientKind::B:
      return jet.db;
  }
  return {};
}

Complex theta_odd(const ThetaCharacteristic& ch, const ComplexVector& z, const SiegelMatrix& omega, double epsilon,
                  Precision precision) {
  EvalRequest req{ch, z, omega, epsilon, precision};
  const Complex plus = theta(req);
  req.characteristic = ch.negated_a();
  return 0.5 * (plus - theta(req));
}

std::vector<Complex> theta_batch(const std::vector<EvalRequest>& reqs) {
  std::vector<Complex> out(reqs.size());
  parallel_for(reqs.size(), [&](std::size_t i) { out[i] = theta(reqs[i]); });
  return out;
}

LevelBasis::LevelBasis(lattice::LevelStructure level, SiegelMatrix omega)
    : level_(std::move(level)), group_(level_.base_group()), omega_(std::move(omega)) {
  const std::size_t g = omega_.dimension();
  if (level_.dimension() != g) throw ValidationError("LevelBasis: level and period matrix dimensions differ");
  const lattice::IntMatrix& K = level_.matrix();
  std::vector<Complex> ko(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j)
      for (std::size_t k = 0; k < g; ++k) ko[i * g + j] += K(i, k).convert_to<double>() * omega_(k, j);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = i + 1; j < g; ++j)
      if (std::abs(ko[i * g + j] - ko[j * g + i]) > 1e-12)
        throw ValidationError("LevelBasis: K * Omega is not symmetric; this level needs a commuting period matrix");
  k_omega_ = SiegelMatrix(g, std::move(ko));
  k_inverse_ = rational_inverse(K);
}

ThetaCharacteristic LevelBasis::characteristic(const lattice::GroupElement& c) const {
  const std::size_t g = omega_.dimension();
  if (c.residues.size() != group_.rank()) throw ValidationError("LevelBasis: index has wrong rank");
  const lattice::GroupElement reduced = group_.element(std::span<const BigInt>(c.residues));
  const std::vector<BigInt> raw = group_.to_raw(reduced);
  std::vector<Rational> a(g), b(g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) a[i] += k_inverse_[i][j] * raw[j];
  return ThetaCharacteristic::from_rational(a, b);
}

ComplexVector LevelBasis::scaled_argument(const ComplexVector& z) const {
  const std::size_t g = omega_.dimension();
  if (z.size() != g) throw ValidationError("LevelBasis: z has wrong length");
  const lattice::IntMatrix& K = level_.matrix();
  ComplexVector out(g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) out[i] += K(i, j).convert_to<double>() * z[j];
  return out;
}

Complex LevelBasis::operator()(const lattice::GroupElement& c, const ComplexVector& z, double epsilon,
                               Precision precision) const {
  EvalRequest req{characteristic(c), scaled_argument(z), k_omega_, epsilon, precision, ErrorMode::RelativeToScale};
  return theta(req);
}

Complex level_basis_theta(const lattice::GroupElement& c, const lattice::LevelStructure& level,
                          const ComplexVector& z, const SiegelMatrix& omega, double epsilon) {
  return LevelBasis(level, omega)(c, z, epsilon);
}

}  // namespace thetalab
