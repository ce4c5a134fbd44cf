#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "qarch/simulate.hpp"

namespace qarch::est {

// Order-independent summation for replicate aggregation.
double pairwise_sum(std::span<const double> v);
double mean(std::span<const double> v);

struct MeanSe {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> v);
// Serial-correlation-robust standard error by batch means.
MeanSe batch_mean_se(std::span<const double> series, std::size_t n_blocks);

// Biased autocovariance (1/n) sum (y_t - ybar)(y_{t+k} - ybar); the 1/n
// normalization keeps the estimate positive semidefinite.
double autocov_at(std::span<const double> series, std::size_t lag);
std::map<std::size_t, double> autocov(std::span<const double> series,
                                      const std::vector<std::size_t>& lags);

// Leverage estimate h^_j = (1/(n-j)) sum_t r_t^2 r_{t-j}; no centering term
// since E r = 0 by the martingale property.
double leverage_hat(const sim::Path& path, std::size_t j);
MeanSe leverage_hat_se(const sim::Path& path, std::size_t j, std::size_t n_blocks = 200);

enum class Target { R, X };

// delta^_p(k) = (mean over replicates of |y_k - y'_k|^p)^{1/p} from
// SingleSwap couples.  Fewer than kMinReplicates is flagged by callers.
inline constexpr std::size_t kMinReplicates = 100;
double delta_hat(std::span<const sim::CoupledPaths> couples, std::size_t k, double p,
                 Target target);

// Per-lag coupling norms ||y_j - y*_j||_p from PastSwap couples, and the
// coupling upper bound tau^_p(n) = sup_{j >= n} of them.  This estimates the
// bound (not tau_p itself).
std::vector<double> coupling_norms(std::span<const sim::CoupledPaths> couples, double p,
                                   Target target);
double tau_hat(std::span<const sim::CoupledPaths> couples, std::size_t n_lag, double p,
               Target target);

// OLS fit of log y on log x; needs >= 3 points and y > 0.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double x_min = 0.0, x_max = 0.0;
  std::size_t n_points = 0;
};

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

enum class PsvTarget { X, R2 };

struct PartialSumConfig {
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  std::size_t window = 0;
  std::size_t replicates = 0;
  unsigned threads = 0;
  bool fast_conv = true;
  std::size_t block = 0;
};

struct PartialSumResult {
  std::vector<std::size_t> lengths;
  std::vector<double> variance;  // Var(S_n) across replicates
  SlopeFit fit;                  // log Var vs log n
  double hurst = 0.0;            // slope / 2, to compare with d + 1/2
};

PartialSumResult partial_sum_variance(const model::ModelSpec& spec,
                                      std::vector<std::size_t> lengths,
                                      const PartialSumConfig& cfg, PsvTarget target);

// Several targets from one shared set of simulated paths.
std::vector<PartialSumResult> partial_sum_variance_targets(
    const model::ModelSpec& spec, std::vector<std::size_t> lengths, const PartialSumConfig& cfg,
    const std::vector<PsvTarget>& targets);

// Right-continuous empirical CDF evaluated on a query grid.
std::vector<double> ecdf(std::span<const double> series, std::span<const double> grid);

struct SignTestResult {
  double upper_mean = 0.0, upper_se = 0.0;
  std::size_t upper_count = 0;
  double lower_mean = 0.0, lower_se = 0.0;
  std::size_t lower_count = 0;
  bool flagged = false;  // fewer than 30 exceedances on a side
};

// Sample means of r_t^3 on the events {r_{t-1} > K} and {r_{t-1} < -K}.
SignTestResult conditional_sign_test(std::span<const double> r, double K);

double quantile(std::span<const double> series, double q);

}  // namespace qarch::est
