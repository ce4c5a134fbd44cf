#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qarch::coeffs {

enum class CoeffKind { Explicit, PowerLaw, FracIntegrated };

// Generator for the lag weights b_1, b_2, ...  All infinite sums downstream
// are truncated at the materialization cutoff J, which every consumer records
// so the truncation is auditable.
struct CoefficientSpec {
  CoeffKind kind = CoeffKind::Explicit;
  std::vector<double> values;  // Explicit only
  double beta = 0.0;           // PowerLaw scale, > 0
  double d = 0.0;              // memory parameter, in (0, 1/2)
  double b = 0.0;              // FracIntegrated scale
  std::size_t cutoff = 1;      // J

  static CoefficientSpec explicit_list(std::vector<double> values, std::size_t cutoff);
  static CoefficientSpec power_law(double beta, double d, std::size_t cutoff);
  static CoefficientSpec frac_integrated(double b, double d, std::size_t cutoff);
};

// First J coefficients of the sequence; b_j = values[j-1].
//   Explicit:        passthrough, zero-padded past the list.
//   PowerLaw:        b_j = beta * j^(d-1).
//   FracIntegrated:  b * Gamma(d+j) / (Gamma(d) Gamma(j+1)), j >= 1
//                    (the j = 0 weight of (1-L)^{-d} is excluded).
std::vector<double> materialize(const CoefficientSpec& spec, std::size_t J);
std::vector<double> materialize(const CoefficientSpec& spec);  // J = spec.cutoff

// B_p = sum |b_j|^p for 0 < p < 2, (sum b_j^2)^{p/2} for p >= 2.
double bp_norm(std::span<const double> b, double p);

// chi_p(n) = sum_{j>=n} |b_j|^p over the materialized range, 1-based n.
double tail_sum(std::span<const double> b, double p, std::size_t n);

enum class RenewalKind { Phi, Chain };

// Phi: values[j] = phi_j, j >= 0, with phi_0 = 1.
// Chain: values[k-1] = A_k, k >= 1.
struct RenewalSequence {
  RenewalKind kind;
  std::vector<double> values;
};

// Power-series inversion weights of (1 - sum_j b_j^2 z^j)^{-1}:
// phi_0 = 1, phi_j = sum_{i=1..j} b_i^2 phi_{j-i}.  Requires sum b_j^2 < 1.
RenewalSequence phi_weights(std::span<const double> b, std::size_t J);

// Renewal recursion A_k = alpha_k + sum_{0<i<k} alpha_i A_{k-i}, equal to the
// sum over all chains 0 < i_1 < ... < i_p < k of products of alpha gaps.
// alpha[k-1] = alpha_k >= 0; entries past the given range count as zero.
RenewalSequence chain_sum(std::span<const double> alpha, std::size_t K);

}  // namespace qarch::coeffs
