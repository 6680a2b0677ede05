#include "thetalab/addition.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "thetalab/errors.hpp"
#include "thetalab/parallel.hpp"

namespace thetalab::addition {

namespace {

ComplexVector sum_points(const SamplePoint& x) {
  ComplexVector s(x.front().size());
  for (const auto& p : x)
    for (std::size_t k = 0; k < s.size(); ++k) s[k] += p[k];
  return s;
}

ComplexVector diff(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

AdditionEvaluator make_evaluator(const AdditionInstance& inst) {
  return AdditionEvaluator(inst.N, inst.level, inst.omega, inst.epsilon, inst.precision);
}

}  // namespace

void require_coprime(long long N, const lattice::LevelStructure& level) {
  if (level.kind() == lattice::LevelStructure::Kind::Matrix)
    throw UnsupportedInstance("h-type addition formulas need a scalar or diagonal level");
  for (const auto& n : level.diagonal_levels()) {
    if (boost::multiprecision::gcd(n, BigInt(N)) != 1)
      throw UnsupportedInstance("h-type addition formulas need gcd(level, N) = 1; got level " + n.str() +
                                " and N = " + std::to_string(N));
  }
}

AdditionEvaluator::AdditionEvaluator(long long N, lattice::LevelStructure level, SiegelMatrix omega, double epsilon,
                                     Precision precision)
    : N_(N),
      base_(level, omega),
      power_(level.power(N < 1 ? 1 : N), omega),
      epsilon_(epsilon),
      precision_(precision) {
  if (N < 2) throw ValidationError("addition: N must be >= 2");
  if (!(epsilon > 0.0)) throw ValidationError("addition: epsilon must be positive");
}

void AdditionEvaluator::check_point(const SamplePoint& x) const {
  if (static_cast<long long>(x.size()) != N_) throw ValidationError("addition: sample point needs N coordinates");
  for (const auto& p : x)
    if (p.size() != base_.omega().dimension()) throw ValidationError("addition: sample coordinate has wrong length");
}

std::vector<std::vector<BigInt>> AdditionEvaluator::h_shift(const Tuple& h) const {
  require_coprime(N_, base_.level());
  if (static_cast<long long>(h.size()) != N_ - 2) throw ValidationError("addition: h needs N-2 entries");
  const auto levels = base_.level().diagonal_levels();
  const std::size_t g = levels.size();
  std::vector<std::vector<BigInt>> H(static_cast<std::size_t>(N_), std::vector<BigInt>(g));
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j].residues.size() != g) throw ValidationError("addition: h entry has wrong rank");
    for (std::size_t k = 0; k < g; ++k) {
      const BigInt v = levels[k] * mod_floor(h[j].residues[k], BigInt(N_));
      H[j + 1][k] = v;
      H.back()[k] -= v;
    }
  }
  return H;
}

std::vector<Tuple> AdditionEvaluator::fiber(const Tuple& d, const std::optional<Tuple>& h) const {
  if (static_cast<long long>(d.size()) != N_) throw ValidationError("addition: d needs N entries");
  Tuple reduced;
  for (const auto& e : d) reduced.push_back(base_.group().element(std::span<const BigInt>(e.residues)));
  std::vector<Tuple> out = lattice::fiber_enumerate(reduced, N_, base_.level());
  if (h) {
    const auto H = h_shift(*h);
    const auto& G = power_.group();
    for (auto& b : out)
      for (std::size_t j = 0; j < b.size(); ++j) b[j] = G.add(b[j], G.element(std::span<const BigInt>(H[j])));
  }
  return out;
}

Complex AdditionEvaluator::lhs_d(const Tuple& d, const SamplePoint& x) const {
  check_point(x);
  if (static_cast<long long>(d.size()) != N_) throw ValidationError("addition: d needs N entries");
  const auto& G = base_.group();
  Complex v = base_(d[0], sum_points(x), epsilon_, precision_);
  for (std::size_t j = 1; j < x.size(); ++j) v *= base_(d[j], diff(x[0], x[j]), epsilon_, precision_);
  for (std::size_t i = 2; i < x.size(); ++i)
    for (std::size_t j = 1; j < i; ++j) v *= base_(G.sub(d[i], d[j]), diff(x[i], x[j]), epsilon_, precision_);
  return v;
}

Complex AdditionEvaluator::fiber_sum(const std::vector<Tuple>& fiber, const SamplePoint& x) const {
  check_point(x);
  Complex s = 0.0;
  for (const auto& b : fiber) {
    Complex t = 1.0;
    for (std::size_t i = 0; i < b.size(); ++i) t *= power_(b[i], x[i], epsilon_, precision_);
    s += t;
  }
  return s;
}

Complex AdditionEvaluator::rhs_d(const Tuple& d, const SamplePoint& x) const { return fiber_sum(fiber(d), x); }

Complex AdditionEvaluator::rhs_h(const Tuple& d, const Tuple& h, const SamplePoint& x) const {
  return fiber_sum(fiber(d, h), x);
}

Complex AdditionEvaluator::rhs_h_shifted(const Tuple& d, const Tuple& h, const SamplePoint& x) const {
  check_point(x);
  const auto H = h_shift(h);
  const auto& G = power_.group();
  Complex s = 0.0;
  for (const auto& b : fiber(d)) {
    Complex t = 1.0;
    for (std::size_t i = 0; i < b.size(); ++i)
      t *= power_(G.add(b[i], G.element(std::span<const BigInt>(H[i]))), x[i], epsilon_, precision_);
    s += t;
  }
  return s;
}

// theta_{b+H}(x) = e(s^T K'Omega s / 2 + H^T x) theta_b(x + Omega s), s = K'^{-1} H
Complex AdditionEvaluator::translated(const Tuple& h, const SamplePoint& x, bool lhs, const Tuple& d) const {
  check_point(x);
  const auto H = h_shift(h);
  const auto levels = power_.level().diagonal_levels();
  const SiegelMatrix& W = base_.omega();
  const SiegelMatrix& KW = power_.scaled_omega();
  const std::size_t g = W.dimension();
  SamplePoint shifted = x;
  Complex log_pref = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ComplexVector s(g);
    for (std::size_t k = 0; k < g; ++k) s[k] = Rational(H[i][k], levels[k]).convert_to<double>();
    const ComplexVector Ws = W.apply(s);
    const ComplexVector KWs = KW.apply(s);
    for (std::size_t k = 0; k < g; ++k) {
      shifted[i][k] += Ws[k];
      log_pref += 0.5 * s[k] * KWs[k] + H[i][k].convert_to<double>() * x[i][k];
    }
  }
  const Complex pref = std::exp(Complex(0.0, 2.0 * kPi) * log_pref);
  return pref * (lhs ? lhs_d(d, shifted) : rhs_d(d, shifted));
}

Complex AdditionEvaluator::lhs_h(const Tuple& d, const Tuple& h, const SamplePoint& x) const {
  return translated(h, x, true, d);
}

Complex AdditionEvaluator::rhs_h_translated(const Tuple& d, const Tuple& h, const SamplePoint& x) const {
  return translated(h, x, false, d);
}

double AdditionEvaluator::log_rhs_scale(const SamplePoint& x) const {
  check_point(x);
  double s = 0.0;
  for (const auto& p : x) s += log_natural_scale(power_.scaled_argument(p), power_.scaled_omega());
  return s;
}

Complex lhs_d(const AdditionInstance& inst, const SamplePoint& x) { return make_evaluator(inst).lhs_d(inst.d, x); }
Complex rhs_d(const AdditionInstance& inst, const SamplePoint& x) { return make_evaluator(inst).rhs_d(inst.d, x); }

Complex lhs_h(const AdditionInstance& inst, const SamplePoint& x) {
  require_coprime(inst.N, inst.level);
  if (!inst.h) throw ValidationError("addition: instance has no h");
  return make_evaluator(inst).lhs_h(inst.d, *inst.h, x);
}

Complex rhs_h(const AdditionInstance& inst, const SamplePoint& x) {
  require_coprime(inst.N, inst.level);
  if (!inst.h) throw ValidationError("addition: instance has no h");
  return make_evaluator(inst).rhs_h(inst.d, *inst.h, x);
}

namespace {

ProportionalityReport verify_with(const AdditionEvaluator& ev, const AdditionInstance& inst, const Tuple& d) {
  if (inst.samples.size() < 5) throw ValidationError("verify: need at least 5 sample points");
  if (inst.h) require_coprime(inst.N, inst.level);
  const std::size_t n = inst.samples.size();
  ProportionalityReport rep;
  rep.samples = n;
  rep.lhs.resize(n);
  rep.rhs.resize(n);
  std::vector<double> log_scale(n);
  parallel_for(n, [&](std::size_t s) {
    const SamplePoint& x = inst.samples[s];
    if (inst.h) {
      rep.lhs[s] = ev.lhs_h(d, *inst.h, x);
      rep.rhs[s] = ev.rhs_h(d, *inst.h, x);
    } else {
      rep.lhs[s] = ev.lhs_d(d, x);
      rep.rhs[s] = ev.rhs_d(d, x);
    }
    log_scale[s] = ev.log_rhs_scale(x);
  });
  rep.rhs_terms = ev.fiber(d, inst.h).size();

  bool usable = false;
  for (std::size_t s = 0; s < n; ++s)
    if (std::abs(rep.rhs[s]) > 1e-6 * std::exp(log_scale[s])) usable = true;
  if (!usable)
    throw DegenerateSampling("verify: every sample has a numerically zero right-hand side; resample with another seed");

  Complex num = 0.0;
  double den = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    num += std::conj(rep.rhs[s]) * rep.lhs[s];
    den += std::norm(rep.rhs[s]);
  }
  rep.lambda = num / den;
  for (std::size_t s = 0; s < n; ++s) {
    const double floor = 1e-300 * std::exp(log_scale[s]);
    const double denom = std::max({std::abs(rep.lhs[s]), std::abs(rep.rhs[s]), floor});
    rep.deviation = std::max(rep.deviation, std::abs(rep.lhs[s] - rep.lambda * rep.rhs[s]) / denom);
  }
  return rep;
}

}  // namespace

ProportionalityReport verify(const AdditionInstance& inst) {
  const AdditionEvaluator ev = make_evaluator(inst);
  return verify_with(ev, inst, inst.d);
}

LambdaSweep verify_all_d(const AdditionInstance& inst) {
  const AdditionEvaluator ev = make_evaluator(inst);
  LambdaSweep sweep;
  sweep.d = all_d(inst.N, inst.level);
  for (const auto& d : sweep.d) {
    const ProportionalityReport rep = verify_with(ev, inst, d);
    sweep.lambda.push_back(rep.lambda);
    sweep.deviation.push_back(rep.deviation);
    sweep.max_deviation = std::max(sweep.max_deviation, rep.deviation);
  }
  const Complex ref = sweep.lambda.front();
  for (const auto& l : sweep.lambda) sweep.lambda_spread = std::max(sweep.lambda_spread, std::abs(l - ref) / std::abs(ref));
  return sweep;
}

SpanReport verify_span(const AdditionInstance& inst) {
  const AdditionEvaluator ev = make_evaluator(inst);
  const auto& G = ev.power().group();
  const std::size_t gsize = G.order().convert_to<std::size_t>();
  const std::size_t free_slots = static_cast<std::size_t>(inst.N - 2);
  std::size_t columns = 1;
  for (std::size_t i = 0; i < free_slots; ++i) columns *= gsize;
  const std::size_t n = inst.samples.size();
  if (n < columns + 1) throw ValidationError("verify_span: need more samples than fiber-sum columns");

  const std::vector<Tuple> base = ev.fiber(inst.d);
  std::vector<std::vector<Tuple>> fibers(columns);
  for (std::size_t c = 0; c < columns; ++c) {
    Tuple shift(static_cast<std::size_t>(inst.N), G.zero());
    std::size_t rest = c;
    for (std::size_t j = 1; j + 1 < shift.size(); ++j) {
      shift[j] = G.element_at(rest % gsize);
      rest /= gsize;
      shift.back() = G.sub(shift.back(), shift[j]);
    }
    for (auto b : base) {
      for (std::size_t j = 0; j < b.size(); ++j) b[j] = G.add(b[j], shift[j]);
      fibers[c].push_back(std::move(b));
    }
  }

  Eigen::MatrixXcd A(n, columns);
  Eigen::VectorXcd L(n);
  std::vector<double> log_scale(n);
  parallel_for(n, [&](std::size_t s) {
    const SamplePoint& x = inst.samples[s];
    L(s) = ev.lhs_d(inst.d, x);
    for (std::size_t c = 0; c < columns; ++c) A(s, c) = ev.fiber_sum(fibers[c], x);
    log_scale[s] = ev.log_rhs_scale(x);
  });
  // rows in units of each sample's natural scale so no sample dominates the fit
  Eigen::MatrixXcd As = A;
  Eigen::VectorXcd Ls = L;
  for (std::size_t s = 0; s < n; ++s) {
    const double w = std::exp(-log_scale[s]);
    As.row(static_cast<Eigen::Index>(s)) *= w;
    Ls(static_cast<Eigen::Index>(s)) *= w;
  }
  const Eigen::VectorXcd coef = As.colPivHouseholderQr().solve(Ls);
  const Eigen::VectorXcd fit = A * coef;
  SpanReport rep;
  rep.columns = columns;
  rep.coefficients.assign(coef.data(), coef.data() + coef.size());
  for (std::size_t s = 0; s < n; ++s) {
    const double denom = std::max(std::abs(L(s)), 1e-300 * std::exp(log_scale[s]));
    rep.deviation = std::max(rep.deviation, std::abs(L(s) - fit(s)) / denom);
  }
  return rep;
}

std::vector<SamplePoint> sample_points(long long N, const SiegelMatrix& omega, std::size_t count, std::uint64_t seed) {
  if (N < 1) throw ValidationError("sample_points: N must be >= 1");
  const std::size_t g = omega.dimension();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<SamplePoint> out(count);
  for (auto& pt : out) {
    pt.resize(static_cast<std::size_t>(N));
    for (auto& x : pt) {
      ComplexVector u(g), v(g);
      for (std::size_t k = 0; k < g; ++k) {
        u[k] = U(rng);
        v[k] = U(rng);
      }
      const ComplexVector Wv = omega.apply(v);
      x.resize(g);
      for (std::size_t k = 0; k < g; ++k) x[k] = u[k] + Wv[k];
    }
  }
  return out;
}

std::vector<Tuple> all_d(long long N, const lattice::LevelStructure& level) {
  const auto G = level.base_group();
  const auto elems = G.elements();
  const std::size_t n = elems.size();
  std::vector<Tuple> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(N), 0);
  for (;;) {
    Tuple t;
    for (auto i : idx) t.push_back(elems[i]);
    out.push_back(std::move(t));
    std::size_t k = idx.size();
    while (k > 0) {
      --k;
      if (++idx[k] < n) break;
      idx[k] = 0;
      if (k == 0) return out;
    }
  }
}

}  // namespace thetalab::addition
