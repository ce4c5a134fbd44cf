#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <sstream>

#include "qarch/closed_moments.hpp"
#include "qarch/estimators.hpp"
#include "qarch/leverage.hpp"
#include "qarch/simulate.hpp"

using namespace qarch;
using coeffs::CoefficientSpec;
using model::InnovationSpec;
using model::ModelSpec;
using model::VolatilityMap;

namespace {

ModelSpec quad_spec(double a, std::vector<double> b, double c) {
  ModelSpec s;
  s.a = a;
  s.q = VolatilityMap::quadratic(c, 1.0);
  const std::size_t J = std::max<std::size_t>(b.size(), 1);
  s.coefficients = CoefficientSpec::explicit_list(std::move(b), J);
  s.innovations = InnovationSpec::gaussian();
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("leverage");

TEST_CASE("solver reproduces the ARCH(1) closed form 2 m2 a b^{2j-1}") {
  auto spec = quad_spec(0.5, {-0.4}, 1.0);
  const auto sol = lev::solve_leverage(spec, 24, 1e-14);
  closed_moments::Arch1Params p{0.5, -0.4, 1.0, 0.0, 3.0};
  for (std::size_t j = 1; j <= 20; ++j)
    CHECK(std::abs(sol.h[j - 1] - closed_moments::arch1_leverage(p, j)) < 1e-10);
  CHECK(sol.h[0] == doctest::Approx(-0.59523809523809523).epsilon(1e-10));
  CHECK(sol.h[1] == doctest::Approx(-0.095238095238095238).epsilon(1e-10));
  CHECK(sol.residual <= 1e-13);
}

TEST_CASE("a = 0 gives the zero fixed point") {
  auto spec = quad_spec(0.0, {0.3, -0.1}, 1.0);
  const auto sol = lev::solve_leverage(spec, 16, 1e-13);
  for (double h : sol.h) CHECK(h == 0.0);
  CHECK(sol.norm == 0.0);
}

TEST_CASE("norm bound ||h|| <= 2|a| m2 B / (1 - 3B^2)") {
  const std::vector<std::vector<double>> bs{{-0.4}, {0.3, -0.2}, {-0.25, 0.1, -0.05}};
  for (const auto& b : bs) {
    for (double a : {-0.7, 0.5, 1.3}) {
      auto spec = quad_spec(a, b, 1.0);
      double b2 = 0.0;
      for (double v : b) b2 += v * v;
      REQUIRE(b2 < 1.0 / 3.0);
      const auto sol = lev::solve_leverage(spec, 64, 1e-13);
      const double bound =
          2.0 * std::abs(a) * sol.m2 * std::sqrt(b2) / (1.0 - 3.0 * b2);
      CHECK(sol.norm <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("residual property: plugging h back in reproduces h_j within tol") {
  auto spec = quad_spec(0.8, {0.25, -0.15, 0.1}, 1.2);
  const double tol = 1e-12;
  const auto sol = lev::solve_leverage(spec, 48, tol);
  CHECK(sol.residual <= tol * (1.0 + sol.norm));
}

TEST_CASE("truncation consistency: doubling J barely moves the head") {
  // geometric decay
  std::vector<double> b(64);
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = 0.4 * std::pow(0.55, static_cast<double>(j));
  auto spec = quad_spec(0.6, b, 1.0);
  const double tol = 1e-12;
  const auto s32 = lev::solve_leverage(spec, 32, tol);
  const auto s64 = lev::solve_leverage(spec, 64, tol);
  for (std::size_t j = 0; j < 16; ++j) CHECK(std::abs(s64.h[j] - s32.h[j]) < tol * 10.0);
}

TEST_CASE("solver preconditions") {
  // B^2 >= 1/3 rejected
  auto big = quad_spec(0.5, {0.6}, 1.0);  // B^2 = 0.36 > 1/3
  CHECK_THROWS_AS(lev::solve_leverage(big, 8, 1e-10), std::invalid_argument);
  // skewed innovations rejected (mu3 != 0)
  auto skew = quad_spec(0.5, {-0.4}, 1.0);
  skew.innovations = InnovationSpec::centered_exponential();
  CHECK_THROWS_AS(lev::solve_leverage(skew, 8, 1e-10), std::invalid_argument);
  // non-quadratic Q rejected
  ModelSpec lin;
  lin.a = 0.5;
  lin.q = VolatilityMap::linear();
  lin.coefficients = CoefficientSpec::explicit_list({-0.4}, 1);
  lin.innovations = InnovationSpec::gaussian();
  CHECK_THROWS_AS(lev::solve_leverage(lin, 8, 1e-10), std::invalid_argument);
  // c2 != 1 rejected (equation derived for sigma^2 = c^2 + (a + X)^2)
  ModelSpec c2;
  c2.a = 0.5;
  c2.q = VolatilityMap::quadratic(1.0, 2.0);
  c2.coefficients = CoefficientSpec::explicit_list({-0.2}, 1);
  c2.innovations = InnovationSpec::gaussian();
  CHECK_THROWS_AS(lev::solve_leverage(c2, 8, 1e-10), std::invalid_argument);
}

TEST_CASE("solver agrees with the Monte Carlo leverage estimate") {
  auto spec = quad_spec(0.5, {-0.4}, 1.0);
  const auto sol = lev::solve_leverage(spec, 16, 1e-13);
  sim::PathConfig pc;
  pc.n = 400000;
  pc.burn_in = 100;
  pc.window = 1;
  pc.seed = 71;
  const auto path = sim::simulate_path(spec, pc);
  for (std::size_t j = 1; j <= 3; ++j) {
    const auto ms = est::leverage_hat_se(path, j);
    CHECK(std::abs(ms.value - sol.h[j - 1]) < 3.0 * ms.se);
  }
}

TEST_CASE("sign criterion verdicts") {
  // B^2 = 0.16 < 1/5, a b1 < 0: leverage of every order
  auto neg = quad_spec(0.5, {-0.4}, 1.0);
  CHECK(lev::sign_criterion(neg, 1) == lev::SignVerdict::Leverage);
  CHECK(lev::sign_criterion(neg, 1000) == lev::SignVerdict::Leverage);
  // mirrored condition: anti-leverage
  auto pos = quad_spec(0.5, {0.4}, 1.0);
  CHECK(lev::sign_criterion(pos, 3) == lev::SignVerdict::AntiLeverage);
  // B^2 = 0.25 >= 1/5: inapplicable even though the solver may still run
  auto mid = quad_spec(0.5, {0.5}, 1.0);
  CHECK(lev::sign_criterion(mid, 2) == lev::SignVerdict::Inapplicable);
  CHECK_NOTHROW(lev::solve_leverage(mid, 8, 1e-10));  // 0.25 < 1/3
  // mixed signs beyond j = 1 break the hypothesis
  auto mixed = quad_spec(0.5, {-0.3, 0.2}, 1.0);
  CHECK(lev::sign_criterion(mixed, 2) == lev::SignVerdict::Inapplicable);
  CHECK(lev::sign_criterion(mixed, 1) == lev::SignVerdict::Leverage);
  // a = 0 gives no sign information
  auto zero = quad_spec(0.0, {-0.3}, 1.0);
  CHECK(lev::sign_criterion(zero, 1) == lev::SignVerdict::Inapplicable);
  // skewed innovations: inapplicable
  auto skew = quad_spec(0.5, {-0.4}, 1.0);
  skew.innovations = InnovationSpec::centered_exponential();
  CHECK(lev::sign_criterion(skew, 1) == lev::SignVerdict::Inapplicable);
}

TEST_CASE("criterion-consistent solver signs") {
  auto neg = quad_spec(0.5, {-0.35, -0.1}, 1.0);
  REQUIRE(lev::sign_criterion(neg, 2) == lev::SignVerdict::Leverage);
  const auto sol = lev::solve_leverage(neg, 32, 1e-13);
  CHECK(sol.h[0] < 0.0);
  CHECK(sol.h[1] < 0.0);
}

TEST_CASE("suggest_truncation follows the tail-sum rule") {
  std::vector<double> b(64);
  for (std::size_t j = 0; j < b.size(); ++j) b[j] = 0.4 * std::pow(0.5, static_cast<double>(j));
  auto spec = quad_spec(0.5, b, 1.0);
  const double tol = 1e-4;
  const std::size_t J = lev::suggest_truncation(spec, tol);
  const auto bm = coeffs::materialize(spec.coefficients);
  CHECK(coeffs::tail_sum(bm, 2.0, J + 1) < tol * tol);
  if (J > 1) CHECK(coeffs::tail_sum(bm, 2.0, J) >= tol * tol);
  // very loose tolerance truncates to a single coefficient
  CHECK(lev::suggest_truncation(spec, 10.0) == 1);
}

TEST_CASE("csv export carries hash and residual") {
  auto spec = quad_spec(0.5, {-0.4}, 1.0);
  const auto sol = lev::solve_leverage(spec, 4, 1e-12);
  std::stringstream ss;
  lev::write_csv(sol, 0xabcdef1234567890ull, ss);
  const std::string text = ss.str();
  CHECK(text.find("spec_hash=abcdef1234567890") != std::string::npos);
  CHECK(text.find("residual=") != std::string::npos);
  CHECK(text.find("j,h") != std::string::npos);
}

TEST_SUITE_END();
