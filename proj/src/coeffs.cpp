#include "qarch/coeffs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qarch::coeffs {

namespace {

void require_d(double d) {
  if (!(d > 0.0 && d < 0.5))
    throw std::invalid_argument("coeffs: d must lie in (0, 1/2), got " + std::to_string(d));
}

void require_cutoff(std::size_t J) {
  if (J < 1) throw std::invalid_argument("coeffs: cutoff J must be >= 1");
}

}  // namespace

CoefficientSpec CoefficientSpec::explicit_list(std::vector<double> values, std::size_t cutoff) {
  require_cutoff(cutoff);
  CoefficientSpec s;
  s.kind = CoeffKind::Explicit;
  s.values = std::move(values);
  s.cutoff = cutoff;
  return s;
}

CoefficientSpec CoefficientSpec::power_law(double beta, double d, std::size_t cutoff) {
  require_cutoff(cutoff);
  if (!(beta > 0.0)) throw std::invalid_argument("coeffs: power-law beta must be > 0");
  require_d(d);
  CoefficientSpec s;
  s.kind = CoeffKind::PowerLaw;
  s.beta = beta;
  s.d = d;
  s.cutoff = cutoff;
  return s;
}

CoefficientSpec CoefficientSpec::frac_integrated(double b, double d, std::size_t cutoff) {
  require_cutoff(cutoff);
  require_d(d);
  CoefficientSpec s;
  s.kind = CoeffKind::FracIntegrated;
  s.b = b;
  s.d = d;
  s.cutoff = cutoff;
  return s;
}

std::vector<double> materialize(const CoefficientSpec& spec, std::size_t J) {
  require_cutoff(J);
  std::vector<double> out(J, 0.0);
  switch (spec.kind) {
    case CoeffKind::Explicit: {
      const std::size_t m = std::min(J, spec.values.size());
      for (std::size_t i = 0; i < m; ++i) out[i] = spec.values[i];
      break;
    }
    case CoeffKind::PowerLaw: {
      require_d(spec.d);
      for (std::size_t i = 0; i < J; ++i)
        out[i] = spec.beta * std::pow(static_cast<double>(i + 1), spec.d - 1.0);
      break;
    }
    case CoeffKind::FracIntegrated: {
      require_d(spec.d);
      // log-gamma keeps Gamma(d+j)/Gamma(j+1) finite for large j
      const double lg_d = std::lgamma(spec.d);
      for (std::size_t i = 0; i < J; ++i) {
        const double j = static_cast<double>(i + 1);
        out[i] = spec.b * std::exp(std::lgamma(spec.d + j) - lg_d - std::lgamma(j + 1.0));
      }
      break;
    }
  }
  return out;
}

std::vector<double> materialize(const CoefficientSpec& spec) { return materialize(spec, spec.cutoff); }

double bp_norm(std::span<const double> b, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("bp_norm: p must be > 0");
  if (p >= 2.0) {
    double s2 = 0.0;
    for (double v : b) s2 += v * v;
    return std::pow(s2, p / 2.0);
  }
  double s = 0.0;
  for (double v : b) s += std::pow(std::abs(v), p);
  return s;
}

double tail_sum(std::span<const double> b, double p, std::size_t n) {
  if (!(p > 0.0)) throw std::invalid_argument("tail_sum: p must be > 0");
  if (n < 1) throw std::invalid_argument("tail_sum: n must be >= 1");
  double s = 0.0;
  for (std::size_t i = n - 1; i < b.size(); ++i) s += std::pow(std::abs(b[i]), p);
  return s;
}

RenewalSequence phi_weights(std::span<const double> b, std::size_t J) {
  std::vector<double> b2(b.size());
  double total = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    b2[i] = b[i] * b[i];
    total += b2[i];
  }
  if (total >= 1.0)
    throw std::invalid_argument("phi_weights: sum b_j^2 = " + std::to_string(total) +
                                " >= 1, power series is not summable");
  RenewalSequence seq{RenewalKind::Phi, std::vector<double>(J + 1, 0.0)};
  seq.values[0] = 1.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const std::size_t m = std::min(j, b2.size());
    double s = 0.0;
    for (std::size_t i = 1; i <= m; ++i) s += b2[i - 1] * seq.values[j - i];
    seq.values[j] = s;
  }
  return seq;
}

RenewalSequence chain_sum(std::span<const double> alpha, std::size_t K) {
  if (K < 1) throw std::invalid_argument("chain_sum: K must be >= 1");
  for (double a : alpha)
    if (a < 0.0) throw std::invalid_argument("chain_sum: alpha entries must be non-negative");
  RenewalSequence seq{RenewalKind::Chain, std::vector<double>(K, 0.0)};
  auto at = [&](std::size_t j) { return j <= alpha.size() ? alpha[j - 1] : 0.0; };
  for (std::size_t k = 1; k <= K; ++k) {
    double s = at(k);
    const std::size_t m = std::min(k - 1, alpha.size());
    for (std::size_t i = 1; i <= m; ++i) s += alpha[i - 1] * seq.values[k - i - 1];
    seq.values[k - 1] = s;
  }
  return seq;
}

}  // namespace qarch::coeffs
