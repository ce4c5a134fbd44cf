#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "qarch/model.hpp"

namespace qarch::lev {

struct LeverageSolution {
  std::vector<double> h;       // h_1..h_J
  double residual = 0.0;       // l2 norm of the fixed-point defect
  std::size_t iterations = 0;
  double norm = 0.0;           // l2 norm of h
  double m2 = 0.0;
};

// Picard iteration on h_j = 2 a b_j m_2 + sum_{0<i<j} b_i^2 h_{j-i}
//                         + 2 b_j sum_{i>0} b_{i+j} h_i, truncated at J.
// Requires quadratic Q with c2 = 1, mu3 = 0 innovations and B^2 < 1/3
// (contraction factor of the map is at most 3 B^2).
LeverageSolution solve_leverage(const model::ModelSpec& spec, std::size_t J, double tol,
                                std::size_t max_iterations = 10000);

// Smallest truncation index with tail_sum(b, 2, J+1) < tol^2, capped at the
// materialization cutoff.
std::size_t suggest_truncation(const model::ModelSpec& spec, double tol);

enum class SignVerdict { Leverage, AntiLeverage, Inapplicable };

// Sign criterion: with B^2 < 1/5 and mu3 = 0,
//   a b_1 < 0 and a b_j <= 0 for j = 2..k  ->  leverage l(k),
//   a b_1 > 0 and a b_j >= 0 for j = 2..k  ->  anti-leverage.
// k larger than the materialized length means "all lags" (k = infinity).
SignVerdict sign_criterion(const model::ModelSpec& spec, std::size_t k);

// CSV rows (j, h_j); header carries the spec hash and the residual.
void write_csv(const LeverageSolution& sol, std::uint64_t spec_hash, std::ostream& os);

}  // namespace qarch::lev
