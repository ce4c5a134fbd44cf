#include "qarch/leverage.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qarch::lev {

namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// One application of the affine fixed-point map T(h).
void apply_map(double a, double m2, const std::vector<double>& b, const std::vector<double>& h,
               std::vector<double>& out) {
  const std::size_t J = h.size();
  for (std::size_t j = 1; j <= J; ++j) {
    double s = 2.0 * a * b[j - 1] * m2;
    for (std::size_t i = 1; i < j; ++i) s += b[i - 1] * b[i - 1] * h[j - i - 1];
    double cross = 0.0;
    for (std::size_t i = 1; i + j <= J; ++i) cross += b[i + j - 1] * h[i - 1];
    s += 2.0 * b[j - 1] * cross;
    out[j - 1] = s;
  }
}

}  // namespace

LeverageSolution solve_leverage(const model::ModelSpec& spec, std::size_t J, double tol,
                                std::size_t max_iterations) {
  if (J < 1) throw std::invalid_argument("solve_leverage: J must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_leverage: tol must be > 0");
  if (spec.q.kind() != model::QKind::Quadratic || spec.q.c2() != 1.0)
    throw std::invalid_argument(
        "solve_leverage: the leverage equation holds for quadratic Q with c2 = 1");
  if (spec.innovations.moment(3) != 0.0)
    throw std::invalid_argument("solve_leverage: derivation requires mu3 = 0 innovations");
  auto b = coeffs::materialize(spec.coefficients, J);
  double b2 = 0.0;
  for (double v : b) b2 += v * v;
  if (!(b2 < 1.0 / 3.0))
    throw std::invalid_argument("solve_leverage: B^2 = " + std::to_string(b2) +
                                " >= 1/3, fixed-point map is not a contraction");
  const double m2 = model::stationary_m2(spec).m2;

  LeverageSolution sol;
  sol.m2 = m2;
  sol.h.assign(J, 0.0);
  std::vector<double> next(J, 0.0), diff(J, 0.0);
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    apply_map(spec.a, m2, b, sol.h, next);
    for (std::size_t j = 0; j < J; ++j) diff[j] = next[j] - sol.h[j];
    sol.h.swap(next);
    sol.iterations = it;
    if (l2_norm(diff) < tol) break;
    if (it == max_iterations)
      throw std::runtime_error("solve_leverage: tolerance not reached in " +
                               std::to_string(max_iterations) + " iterations");
  }
  apply_map(spec.a, m2, b, sol.h, next);
  for (std::size_t j = 0; j < J; ++j) diff[j] = next[j] - sol.h[j];
  sol.residual = l2_norm(diff);
  sol.norm = l2_norm(sol.h);
  return sol;
}

std::size_t suggest_truncation(const model::ModelSpec& spec, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("suggest_truncation: tol must be > 0");
  const auto b = coeffs::materialize(spec.coefficients);
  const double tol2 = tol * tol;
  double tail = 0.0;  // sum of b_j^2 beyond the candidate J, scanned from the end
  for (std::size_t J = b.size(); J > 1; --J) {
    tail += b[J - 1] * b[J - 1];
    if (!(tail < tol2)) return J;
  }
  return 1;
}

SignVerdict sign_criterion(const model::ModelSpec& spec, std::size_t k) {
  if (k < 1) throw std::invalid_argument("sign_criterion: k must be >= 1");
  const auto b = coeffs::materialize(spec.coefficients);
  double b2 = 0.0;
  for (double v : b) b2 += v * v;
  if (!(b2 < 0.2)) return SignVerdict::Inapplicable;
  if (spec.innovations.moment(3) != 0.0) return SignVerdict::Inapplicable;
  const double a = spec.a;
  const std::size_t kk = std::min(k, b.size());
  if (a * b[0] < 0.0) {
    for (std::size_t j = 2; j <= kk; ++j)
      if (a * b[j - 1] > 0.0) return SignVerdict::Inapplicable;
    return SignVerdict::Leverage;
  }
  if (a * b[0] > 0.0) {
    for (std::size_t j = 2; j <= kk; ++j)
      if (a * b[j - 1] < 0.0) return SignVerdict::Inapplicable;
    return SignVerdict::AntiLeverage;
  }
  return SignVerdict::Inapplicable;
}

void write_csv(const LeverageSolution& sol, std::uint64_t spec_hash, std::ostream& os) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(spec_hash));
  os << "# spec_hash=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", sol.residual);
  os << " residual=" << buf << " iterations=" << sol.iterations << "\n";
  os << "j,h\n";
  for (std::size_t j = 0; j < sol.h.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", sol.h[j]);
    os << (j + 1) << ',' << buf << '\n';
  }
}

}  // namespace qarch::lev
