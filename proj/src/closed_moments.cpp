#include "qarch/closed_moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qarch::closed_moments {

namespace {

// Recursions are better conditioned near b^2 ~ 1; closed forms avoid O(t)
// work at large lags.  Both paths agree and are cross-checked in tests.
constexpr std::size_t kRecursionCap = 64;

void validate(const Arch1Params& p, bool fourth) {
  if (p.c < 0.0) throw std::invalid_argument("arch1: c must be >= 0");
  if (!(p.b * p.b < 1.0)) throw std::invalid_argument("arch1: b^2 must be < 1");
  if (p.mu3 != 0.0)
    throw std::invalid_argument("arch1: moment formulas require mu3 = 0");
  if (fourth && !(p.mu4 * std::pow(p.b, 4) < 1.0))
    throw std::invalid_argument("arch1: mu4 b^4 >= 1, fourth moments are infinite");
}

}  // namespace

Arch1Moments arch1_moments(const Arch1Params& p, std::size_t t) {
  validate(p, true);
  const double b2 = p.b * p.b;
  const double ac = p.a * p.a + p.c * p.c;
  Arch1Moments m;
  m.m2 = ac / (1.0 - b2);
  // m3(0) = 0, m3(t) = b^{2(t-1)} m3(1), m3(1) = 2ab m2
  m.m3 = (t == 0) ? 0.0 : 2.0 * p.a * p.b * m.m2 * std::pow(b2, static_cast<double>(t - 1));
  const double m40 =
      p.mu4 * (ac * ac + (4.0 * p.a * p.a * b2 + 2.0 * ac * b2) * m.m2) / (1.0 - p.mu4 * b2 * b2);
  if (t == 0) {
    m.m4 = m40;
  } else if (t <= kRecursionCap) {
    double v = m40;
    for (std::size_t s = 1; s <= t; ++s) v = ac * m.m2 + b2 * v;
    m.m4 = v;
  } else {
    const double bt = std::pow(b2, static_cast<double>(t));
    m.m4 = m.m2 * ac * (1.0 - bt) / (1.0 - b2) + bt * m40;
  }
  // rho(t) via the geometric display; m4(t) - m2^2 cancels badly at large t
  m.rho4 = (m40 - m.m2 * m.m2) * std::pow(b2, static_cast<double>(t));
  return m;
}

double arch1_leverage(const Arch1Params& p, std::size_t j) {
  validate(p, false);
  if (j < 1) throw std::invalid_argument("arch1_leverage: j must be >= 1");
  const double m2 = (p.a * p.a + p.c * p.c) / (1.0 - p.b * p.b);
  return 2.0 * m2 * p.a * std::pow(p.b, static_cast<double>(2 * j - 1));
}

RcAr1Params RcAr1Params::gaussian_pair(double kappa, double b, double rho) {
  if (!(rho >= -1.0 && rho <= 1.0))
    throw std::invalid_argument("rcar1: rho must lie in [-1, 1]");
  RcAr1Params p;
  p.kappa = kappa;
  p.b = b;
  p.rho = rho;
  p.nu30 = p.nu21 = p.nu12 = p.nu03 = 0.0;
  p.nu40 = p.nu04 = 3.0;
  p.nu31 = p.nu13 = 3.0 * rho;
  p.nu22 = 1.0 + 2.0 * rho * rho;
  return p;
}

RcAr1Params RcAr1Params::from_mixing(double kappa, double b, double rho,
                                     const model::InnovationSpec& eta,
                                     const model::InnovationSpec& xi) {
  if (!(rho >= -1.0 && rho <= 1.0))
    throw std::invalid_argument("rcar1: rho must lie in [-1, 1]");
  const double s = std::sqrt(1.0 - rho * rho);
  // nu_{i,j} = sum_m C(i,m) rho^m s^{i-m} E[eta^{m+j}] E[xi^{i-m}]
  auto nu = [&](int i, int j) {
    double total = 0.0;
    double binom = 1.0;
    for (int m = 0; m <= i; ++m) {
      if (m > 0) binom = binom * (i - m + 1) / m;
      total += binom * std::pow(rho, m) * std::pow(s, i - m) * eta.moment(m + j) *
               xi.moment(i - m);
    }
    return total;
  };
  RcAr1Params p;
  p.kappa = kappa;
  p.b = b;
  p.rho = rho;
  p.nu30 = nu(3, 0);
  p.nu21 = nu(2, 1);
  p.nu12 = nu(1, 2);
  p.nu03 = eta.moment(3);
  p.nu40 = nu(4, 0);
  p.nu31 = nu(3, 1);
  p.nu22 = nu(2, 2);
  p.nu13 = nu(1, 3);
  p.nu04 = eta.moment(4);
  return p;
}

RcAr1Moments rcar1_moments(const RcAr1Params& p, std::size_t t) {
  if (!(p.b * p.b < 1.0)) throw std::invalid_argument("rcar1: b^2 must be < 1");
  const double b = p.b, b2 = b * b, k = p.kappa;
  if (p.nu03 * b * b2 == 1.0)
    throw std::invalid_argument("rcar1: nu03 b^3 = 1, third moments undefined");
  if (!(p.nu04 * b2 * b2 < 1.0))
    throw std::invalid_argument("rcar1: nu04 b^4 >= 1, fourth moments are infinite");
  RcAr1Moments m;
  m.m2 = k * k / (1.0 - b2);
  const double m30 = (k * k * k * p.nu30 + 3.0 * k * b2 * p.nu12 * m.m2) / (1.0 - p.nu03 * b * b2);
  const double m31 = 2.0 * k * p.rho * b * m.m2 + b2 * m30;
  m.m3 = (t == 0) ? m30 : m31 * std::pow(b2, static_cast<double>(t - 1));
  const double m40 = (std::pow(k, 4) * p.nu40 + 6.0 * k * k * b2 * p.nu22 * m.m2 +
                      4.0 * k * b * b2 * p.nu13 * m30) /
                     (1.0 - p.nu04 * b2 * b2);
  if (t == 0) {
    m.m4 = m40;
  } else if (t <= kRecursionCap) {
    double v = m40;
    for (std::size_t s = 1; s <= t; ++s)
      v = (s == 1) ? k * k * m.m2 + 2.0 * k * p.rho * b * m30 + b2 * v : k * k * m.m2 + b2 * v;
    m.m4 = v;
  } else {
    const double bt = std::pow(b2, static_cast<double>(t));
    const double tail = (b == 0.0) ? 0.0 : bt * (m40 + 2.0 * k * p.rho * m30 / b);
    m.m4 = m.m2 * k * k * (1.0 - bt) / (1.0 - b2) + tail;
  }
  const double rho41 = 2.0 * p.rho * k * b * m30 + b2 * (m40 - m.m2 * m.m2);
  m.rho4 = (t == 0) ? m40 - m.m2 * m.m2 : rho41 * std::pow(b2, static_cast<double>(t - 1));
  return m;
}

MatchedParams match_params(double a, double b, double c) {
  (void)b;  // passes through unchanged between the two models
  if (a == 0.0 && c == 0.0)
    throw std::invalid_argument("match_params: a = c = 0 leaves kappa = 0 degenerate");
  MatchedParams mp;
  mp.kappa = std::sqrt(a * a + c * c);
  mp.rho = a / mp.kappa;
  return mp;
}

}  // namespace qarch::closed_moments
