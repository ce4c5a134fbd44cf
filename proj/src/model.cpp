#include "qarch/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qarch::model {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double gaussian_abs_moment(double p) {
  // E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) -
                  0.5 * std::log(M_PI));
}

// E(E-1)^k for E ~ Exp(1): the derangement numbers.
double exp_centered_moment(int k) {
  if (k == 0) return 1.0;
  if (k == 1) return 0.0;
  double prev2 = 1.0, prev1 = 0.0;  // !0, !1
  double cur = 0.0;
  for (int j = 2; j <= k; ++j) {
    cur = (j - 1) * (prev1 + prev2);
    prev2 = prev1;
    prev1 = cur;
  }
  return cur;
}

// E|E-1|^p = e^{-1} (Gamma(p+1) + sum_{k>=0} 1/(k! (p+k+1)))
double exp_centered_abs_moment(double p) {
  double s = 0.0, kfac = 1.0;
  for (int k = 0; k < 40; ++k) {
    if (k > 0) kfac *= k;
    s += 1.0 / (kfac * (p + k + 1.0));
  }
  return std::exp(-1.0) * (std::tgamma(p + 1.0) + s);
}

double student_t_abs_moment(double p, double nu) {
  if (p >= nu) return kInf;
  // standardized: X = T sqrt((nu-2)/nu)
  return std::exp(0.5 * p * std::log(nu - 2.0) + std::lgamma(0.5 * (p + 1.0)) +
                  std::lgamma(0.5 * (nu - p)) - 0.5 * std::log(M_PI) -
                  std::lgamma(0.5 * nu));
}

double sample_gaussian(rng::Draw& d) {
  // Marsaglia polar method, spare discarded
  for (;;) {
    const double u = 2.0 * d.next() - 1.0;
    const double v = 2.0 * d.next() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

// Marsaglia-Tsang, valid for alpha >= 1 (here alpha = nu/2 > 2).
double sample_gamma(rng::Draw& d, double alpha) {
  const double dd = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * dd);
  for (;;) {
    const double x = sample_gaussian(d);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = d.next();
    if (u < 1.0 - 0.0331 * x * x * x * x) return dd * v;
    if (std::log(u) < 0.5 * x * x + dd * (1.0 - v + std::log(v))) return dd * v;
  }
}

}  // namespace

VolatilityMap VolatilityMap::quadratic(double c1, double c2) {
  // c1 = c2 = 0 is the degenerate constant-zero map (trivial process)
  if (c1 < 0.0 || c2 < 0.0)
    throw std::invalid_argument("VolatilityMap: quadratic needs c1 >= 0 and c2 >= 0");
  return VolatilityMap(QKind::Quadratic, c1, c2);
}

double VolatilityMap::operator()(double x) const {
  switch (kind_) {
    case QKind::Linear: return x;
    case QKind::Abs: return std::abs(x);
    case QKind::Quadratic: return std::sqrt(c1_ * c1_ + c2_ * c2_ * x * x);
  }
  return x;
}

InnovationSpec InnovationSpec::student_t(double nu) {
  if (!(nu > 4.0)) throw std::invalid_argument("InnovationSpec: Student t needs nu > 4");
  return {InnovationFamily::StudentT, nu};
}

double InnovationSpec::abs_moment(double p) const {
  if (!(p > 0.0)) throw std::invalid_argument("abs_moment: p must be > 0");
  switch (family) {
    case InnovationFamily::Rademacher: return 1.0;
    case InnovationFamily::Gaussian: return gaussian_abs_moment(p);
    case InnovationFamily::CenteredExponential: return exp_centered_abs_moment(p);
    case InnovationFamily::StudentT: return student_t_abs_moment(p, nu);
    case InnovationFamily::Uniform: return std::pow(std::sqrt(3.0), p) / (p + 1.0);
  }
  return kInf;
}

double InnovationSpec::moment(int k) const {
  if (k < 0) throw std::invalid_argument("moment: k must be >= 0");
  if (k == 0) return 1.0;
  switch (family) {
    case InnovationFamily::Rademacher: return (k % 2 == 0) ? 1.0 : 0.0;
    case InnovationFamily::Gaussian: {
      if (k % 2 != 0) return 0.0;
      double m = 1.0;  // (k-1)!!
      for (int j = k - 1; j > 1; j -= 2) m *= j;
      return m;
    }
    case InnovationFamily::CenteredExponential: return exp_centered_moment(k);
    case InnovationFamily::StudentT:
      if (k % 2 != 0) return (k < nu) ? 0.0 : kInf;
      return student_t_abs_moment(static_cast<double>(k), nu);
    case InnovationFamily::Uniform:
      if (k % 2 != 0) return 0.0;
      return std::pow(3.0, k / 2.0) / (k + 1.0);
  }
  return kInf;
}

double InnovationSpec::draw(const rng::Stream& s, std::int64_t time) const {
  rng::Draw d(s, time);
  switch (family) {
    case InnovationFamily::Rademacher: return d.next() < 0.5 ? -1.0 : 1.0;
    case InnovationFamily::Gaussian: return sample_gaussian(d);
    case InnovationFamily::CenteredExponential: return -std::log1p(-d.next()) - 1.0;
    case InnovationFamily::StudentT: {
      const double z = sample_gaussian(d);
      const double chi2 = 2.0 * sample_gamma(d, 0.5 * nu);
      return z * std::sqrt((nu - 2.0) / chi2);
    }
    case InnovationFamily::Uniform: return (d.next() - 0.5) * std::sqrt(12.0);
  }
  return 0.0;
}

double rosenthal_constant(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("rosenthal_constant: p must be > 0");
  if (p <= 1.0 || p == 2.0) return 1.0;
  if (p < 2.0) return 2.0;
  const double root = std::pow(2.0, 1.5 + 1.0 / p) * std::pow(0.25 * p + 1.0, 1.0 / p) *
                      (1.0 + p / std::log(0.5 * p));
  return std::pow(root, p);
}

ContractionReport contraction_margin(const ModelSpec& spec, double p) {
  const auto b = coeffs::materialize(spec.coefficients);
  ContractionReport rep;
  rep.cutoff = b.size();
  rep.b2 = 0.0;
  for (double v : b) rep.b2 += v * v;
  rep.sufficient_only = p > 2.0;
  const double kp = rosenthal_constant(p);
  const double mu = spec.innovations.abs_moment(p);
  const double bp = coeffs::bp_norm(b, p);
  rep.margin = kp * mu * std::pow(spec.q.lipschitz(), p) * bp;
  rep.sharp = (spec.q.kind() == QKind::Quadratic) && (p == 2.0);
  if (rep.sharp) {
    // quadratic map at p = 2: c2^2 B_2 < 1 is necessary and sufficient
    const double crit = spec.q.c2() * spec.q.c2() * rep.b2;
    rep.verdict = crit < 1.0 ? Verdict::ExistsUnique : Verdict::NotExists;
  } else {
    rep.verdict = rep.margin < 1.0 ? Verdict::ExistsUnique : Verdict::Inconclusive;
  }
  return rep;
}

MomentBound moment_bound(const ModelSpec& spec, double p) {
  const auto rep = contraction_margin(spec, p);
  MomentBound mb;
  mb.denominator = 1.0 - rep.margin;
  mb.finite = mb.denominator > 0.0;
  mb.near_critical = mb.finite && mb.denominator < 1e-2;
  return mb;
}

SecondMoments stationary_m2(const ModelSpec& spec) {
  if (spec.q.kind() != QKind::Quadratic)
    throw std::invalid_argument("stationary_m2: closed form exists only for quadratic Q");
  const auto b = coeffs::materialize(spec.coefficients);
  double b2 = 0.0;
  for (double v : b) b2 += v * v;
  const double c1 = spec.q.c1(), c2 = spec.q.c2();
  if (c1 == 0.0 && c2 == 0.0) return {0.0, 0.0};  // trivial process
  const double crit = c2 * c2 * b2;
  if (crit >= 1.0)
    throw std::invalid_argument("stationary_m2: c2^2 B_2 = " + std::to_string(crit) +
                                " >= 1, no stationary L2 solution");
  SecondMoments sm;
  sm.ex2 = b2 * (c1 * c1 + c2 * c2 * spec.a * spec.a) / (1.0 - crit);
  sm.m2 = c1 * c1 + c2 * c2 * (spec.a * spec.a + sm.ex2);
  return sm;
}

double cov_x_closed(std::span<const double> b, double m2, std::size_t t) {
  double s = 0.0;
  for (std::size_t i = t; i < b.size(); ++i) s += b[i] * b[i - t];
  return m2 * s;
}

double cov_x_closed(const ModelSpec& spec, std::size_t t) {
  const auto b = coeffs::materialize(spec.coefficients);
  return cov_x_closed(b, stationary_m2(spec).m2, t);
}

double beta_function(double x, double y) {
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

LongMemoryConstants longmem_constants(const ModelSpec& spec) {
  if (spec.coefficients.kind != coeffs::CoeffKind::PowerLaw)
    throw std::invalid_argument("longmem_constants: requires power-law coefficients");
  const double d = spec.coefficients.d;
  const double beta = spec.coefficients.beta;
  const auto sm = stationary_m2(spec);  // rejects non-quadratic Q
  const auto b = coeffs::materialize(spec.coefficients);
  double b2 = 0.0;
  for (double v : b) b2 += v * v;
  if (b2 >= 1.0) throw std::invalid_argument("longmem_constants: B^2 >= 1");
  LongMemoryConstants lc;
  lc.beta_fn = beta_function(d, 1.0 - 2.0 * d);
  lc.m2 = sm.m2;
  lc.lambda1_sq = beta * beta * lc.beta_fn * sm.m2;
  lc.lambda2_sq = lc.lambda1_sq / (d * (1.0 + 2.0 * d));
  const double f = 2.0 * spec.a * beta / (1.0 - b2);
  lc.kappa1_sq = f * f * lc.beta_fn * sm.m2;
  lc.kappa2_sq = lc.kappa1_sq / (d * (1.0 + 2.0 * d));
  return lc;
}

}  // namespace qarch::model
