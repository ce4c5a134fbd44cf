#pragma once

#include <cstddef>
#include <span>

#include "qarch/coeffs.hpp"
#include "qarch/rng.hpp"

namespace qarch::model {

enum class QKind { Linear, Quadratic, Abs };

// Volatility map sigma_t = Q(a + X_t) with Lipschitz constant and envelope
// constants (c1, c2) such that Q^2(x) <= c1^2 + c2^2 x^2.
class VolatilityMap {
 public:
  static VolatilityMap linear() { return VolatilityMap(QKind::Linear, 0.0, 1.0); }
  static VolatilityMap abs() { return VolatilityMap(QKind::Abs, 0.0, 1.0); }
  static VolatilityMap quadratic(double c1, double c2);

  double operator()(double x) const;
  double lipschitz() const { return c2_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  QKind kind() const { return kind_; }

 private:
  VolatilityMap(QKind k, double c1, double c2) : kind_(k), c1_(c1), c2_(c2) {}
  QKind kind_;
  double c1_, c2_;
};

enum class InnovationFamily { Rademacher, Gaussian, CenteredExponential, StudentT, Uniform };

// Standardized i.i.d. driver: E zeta = 0, E zeta^2 = 1 for every family.
// Carries both the sampler and the exact moment oracle.
struct InnovationSpec {
  InnovationFamily family = InnovationFamily::Gaussian;
  double nu = 0.0;  // StudentT degrees of freedom, > 4

  static InnovationSpec rademacher() { return {InnovationFamily::Rademacher, 0.0}; }
  static InnovationSpec gaussian() { return {InnovationFamily::Gaussian, 0.0}; }
  static InnovationSpec centered_exponential() { return {InnovationFamily::CenteredExponential, 0.0}; }
  static InnovationSpec student_t(double nu);
  static InnovationSpec uniform() { return {InnovationFamily::Uniform, 0.0}; }

  // |mu|_p = E|zeta|^p; +inf where the moment does not exist.
  double abs_moment(double p) const;
  // mu_k = E zeta^k for integer k >= 0; +inf where it does not exist.
  double moment(int k) const;
  // One variate at integer time index; consumes the (time)-addressed draw
  // sequence of the stream, so draws are independent across times.
  double draw(const rng::Stream& s, std::int64_t time) const;
};

struct ModelSpec {
  double a = 0.0;                      // intercept inside Q
  VolatilityMap q = VolatilityMap::linear();
  coeffs::CoefficientSpec coefficients;
  InnovationSpec innovations;
};

// Rosenthal constant K_p of the martingale moment inequality: 1 for
// 0 < p <= 1 and p = 2, the von Bahr-Esseen value 2 for 1 < p < 2, and the
// Osekowski bound (2^{3/2+1/p} (p/4+1)^{1/p} (1 + p/log(p/2)))^p for p > 2.
double rosenthal_constant(double p);

enum class Verdict { ExistsUnique, NotExists, Inconclusive };

struct ContractionReport {
  double margin = 0.0;        // K_p |mu|_p Lip_Q^p B_p
  Verdict verdict = Verdict::Inconclusive;
  bool sharp = false;           // quadratic Q at p = 2: criterion c2^2 B_2 < 1 is iff
  bool sufficient_only = false; // p > 2 uses an upper bound on K_p
  double b2 = 0.0;              // sum b_j^2 over the materialized range
  std::size_t cutoff = 0;       // truncation J used for B_p
};

ContractionReport contraction_margin(const ModelSpec& spec, double p);

struct MomentBound {
  bool finite = false;
  double denominator = 0.0;  // 1 - K_p |mu|_p Lip_Q^p B_p
  bool near_critical = false;
};

MomentBound moment_bound(const ModelSpec& spec, double p);

struct SecondMoments {
  double ex2 = 0.0;  // E X_t^2
  double m2 = 0.0;   // E r_t^2
};

// Closed-form second moments for quadratic Q:
//   E X^2 = B_2 (c1^2 + c2^2 a^2) / (1 - c2^2 B_2),  m2 = c1^2 + c2^2 (a^2 + E X^2).
SecondMoments stationary_m2(const ModelSpec& spec);

// E[X_t X_0] = m2 * sum_{s>=1} b_{t+s} b_s over the materialized range.
double cov_x_closed(std::span<const double> b, double m2, std::size_t t);
double cov_x_closed(const ModelSpec& spec, std::size_t t);  // m2 from stationary_m2

struct LongMemoryConstants {
  double lambda1_sq = 0.0;  // Cov(X_0, X_t) ~ lambda1^2 t^{2d-1}
  double lambda2_sq = 0.0;  // partial-sum fBm variance scale for X
  double kappa1_sq = 0.0;   // Cov(r_0^2, r_t^2) ~ kappa1^2 t^{2d-1}
  double kappa2_sq = 0.0;   // partial-sum fBm variance scale for r^2
  double beta_fn = 0.0;     // B(d, 1-2d)
  double m2 = 0.0;
};

LongMemoryConstants longmem_constants(const ModelSpec& spec);

// B(x, y) via log-gamma.
double beta_function(double x, double y);

}  // namespace qarch::model
