#include "qarch/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qarch/parallel.hpp"

namespace qarch::est {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

MeanSe mean_se(std::span<const double> v) {
  MeanSe out;
  out.n = v.size();
  if (v.empty()) throw std::invalid_argument("mean_se: empty input");
  out.value = mean(v);
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.value) * (x - out.value);
  out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return out;
}

MeanSe batch_mean_se(std::span<const double> series, std::size_t n_blocks) {
  if (series.empty()) throw std::invalid_argument("batch_mean_se: empty input");
  n_blocks = std::min(n_blocks, series.size());
  if (n_blocks < 2) return mean_se(series);
  const std::size_t len = series.size() / n_blocks;
  std::vector<double> block_means(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b)
    block_means[b] = mean(series.subspan(b * len, len));
  auto ms = mean_se(block_means);
  ms.n = series.size();
  return ms;
}

double autocov_at(std::span<const double> series, std::size_t lag) {
  const std::size_t n = series.size();
  if (lag >= n) throw std::invalid_argument("autocov: lag must be < series length");
  const double m = mean(series);
  double s = 0.0;
  for (std::size_t t = 0; t + lag < n; ++t) s += (series[t] - m) * (series[t + lag] - m);
  return s / static_cast<double>(n);
}

std::map<std::size_t, double> autocov(std::span<const double> series,
                                      const std::vector<std::size_t>& lags) {
  const std::size_t n = series.size();
  std::map<std::size_t, double> out;
  if (n == 0) throw std::invalid_argument("autocov: empty series");
  const double m = mean(series);
  for (std::size_t lag : lags) {
    if (lag >= n) throw std::invalid_argument("autocov: lag must be < series length");
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (series[t] - m) * (series[t + lag] - m);
    out[lag] = s / static_cast<double>(n);
  }
  return out;
}

double leverage_hat(const sim::Path& path, std::size_t j) {
  const auto& r = path.r;
  if (j < 1 || j >= r.size()) throw std::invalid_argument("leverage_hat: need 1 <= j < n");
  double s = 0.0;
  for (std::size_t t = j; t < r.size(); ++t) s += r[t] * r[t] * r[t - j];
  return s / static_cast<double>(r.size() - j);
}

MeanSe leverage_hat_se(const sim::Path& path, std::size_t j, std::size_t n_blocks) {
  const auto& r = path.r;
  if (j < 1 || j >= r.size()) throw std::invalid_argument("leverage_hat: need 1 <= j < n");
  std::vector<double> prod(r.size() - j);
  for (std::size_t t = j; t < r.size(); ++t) prod[t - j] = r[t] * r[t] * r[t - j];
  return batch_mean_se(prod, n_blocks);
}

namespace {

double target_value(const sim::Path& p, std::size_t k, Target target) {
  return target == Target::R ? p.r[k] : p.x[k];
}

}  // namespace

double delta_hat(std::span<const sim::CoupledPaths> couples, std::size_t k, double p,
                 Target target) {
  if (couples.empty()) throw std::invalid_argument("delta_hat: no replicates");
  if (!(p >= 1.0)) throw std::invalid_argument("delta_hat: p must be >= 1");
  std::vector<double> vals(couples.size());
  for (std::size_t i = 0; i < couples.size(); ++i) {
    const auto& c = couples[i];
    if (k >= c.primary.r.size()) throw std::invalid_argument("delta_hat: k beyond path length");
    const double d = std::abs(target_value(c.primary, k, target) -
                              target_value(c.shadow, k, target));
    vals[i] = std::pow(d, p);
  }
  return std::pow(mean(vals), 1.0 / p);
}

std::vector<double> coupling_norms(std::span<const sim::CoupledPaths> couples, double p,
                                   Target target) {
  if (couples.empty()) throw std::invalid_argument("coupling_norms: no replicates");
  if (!(p >= 1.0)) throw std::invalid_argument("coupling_norms: p must be >= 1");
  const std::size_t n = couples[0].primary.r.size();
  std::vector<double> acc(n, 0.0);
  for (const auto& c : couples) {
    if (c.primary.r.size() != n)
      throw std::invalid_argument("coupling_norms: unequal path lengths");
    for (std::size_t j = 0; j < n; ++j) {
      const double d =
          std::abs(target_value(c.primary, j, target) - target_value(c.shadow, j, target));
      acc[j] += std::pow(d, p);
    }
  }
  const double inv = 1.0 / static_cast<double>(couples.size());
  for (double& v : acc) v = std::pow(v * inv, 1.0 / p);
  return acc;
}

double tau_hat(std::span<const sim::CoupledPaths> couples, std::size_t n_lag, double p,
               Target target) {
  const auto norms = coupling_norms(couples, p, target);
  if (n_lag >= norms.size()) throw std::invalid_argument("tau_hat: n_lag beyond path length");
  double sup = 0.0;
  for (std::size_t j = n_lag; j < norms.size(); ++j) sup = std::max(sup, norms[j]);
  return sup;
}

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("fit_loglog: need at least 3 points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_loglog: inputs must be strictly positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = mean(lx), my = mean(ly);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: degenerate abscissae");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - fit.intercept - fit.slope * lx[i];
    ss_res += e * e;
  }
  fit.slope_se = (n > 2) ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;
  fit.x_min = *std::min_element(x.begin(), x.end());
  fit.x_max = *std::max_element(x.begin(), x.end());
  fit.n_points = n;
  return fit;
}

std::vector<PartialSumResult> partial_sum_variance_targets(
    const model::ModelSpec& spec, std::vector<std::size_t> lengths, const PartialSumConfig& cfg,
    const std::vector<PsvTarget>& targets) {
  if (lengths.size() < 3)
    throw std::invalid_argument("partial_sum_variance: need at least 3 lengths");
  if (targets.empty()) throw std::invalid_argument("partial_sum_variance: no targets");
  std::sort(lengths.begin(), lengths.end());
  if (lengths.front() == 0) throw std::invalid_argument("partial_sum_variance: zero length");
  if (cfg.replicates < 2) throw std::invalid_argument("partial_sum_variance: need >= 2 replicates");
  const std::size_t n_max = lengths.back();
  const std::size_t R = cfg.replicates;
  const std::size_t L = lengths.size();
  const std::size_t T = targets.size();
  // sums[(replicate * T + target) * L + l] = S_{lengths[l]}
  std::vector<double> sums(R * T * L, 0.0);
  par::parallel_for(R, cfg.threads, [&](std::size_t rep) {
    sim::PathConfig pc;
    pc.n = n_max;
    pc.burn_in = cfg.burn_in;
    pc.window = cfg.window;
    pc.seed = cfg.seed;
    pc.replicate = static_cast<std::uint32_t>(rep);
    pc.fast_conv = cfg.fast_conv;
    pc.block = cfg.block;
    const auto path = sim::simulate_path(spec, pc);
    for (std::size_t ti = 0; ti < T; ++ti) {
      double s = 0.0;
      std::size_t li = 0;
      for (std::size_t t = 0; t < n_max && li < L; ++t) {
        s += (targets[ti] == PsvTarget::X) ? path.x[t] : path.r[t] * path.r[t];
        while (li < L && t + 1 == lengths[li]) {
          sums[(rep * T + ti) * L + li] = s;
          ++li;
        }
      }
    }
  });
  std::vector<PartialSumResult> out(T);
  std::vector<double> col(R), xs(L);
  for (std::size_t l = 0; l < L; ++l) xs[l] = static_cast<double>(lengths[l]);
  for (std::size_t ti = 0; ti < T; ++ti) {
    auto& res = out[ti];
    res.lengths = lengths;
    res.variance.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t rep = 0; rep < R; ++rep) col[rep] = sums[(rep * T + ti) * L + l];
      const double m = mean(col);
      double ss = 0.0;
      for (double v : col) ss += (v - m) * (v - m);
      res.variance[l] = ss / static_cast<double>(R - 1);
    }
    res.fit = fit_loglog(xs, res.variance);
    res.hurst = res.fit.slope / 2.0;
  }
  return out;
}

PartialSumResult partial_sum_variance(const model::ModelSpec& spec,
                                      std::vector<std::size_t> lengths,
                                      const PartialSumConfig& cfg, PsvTarget target) {
  return partial_sum_variance_targets(spec, std::move(lengths), cfg, {target})[0];
}

std::vector<double> ecdf(std::span<const double> series, std::span<const double> grid) {
  if (series.empty()) throw std::invalid_argument("ecdf: empty series");
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out(grid.size());
  const double inv = 1.0 / static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), grid[i]);
    out[i] = static_cast<double>(it - sorted.begin()) * inv;
  }
  return out;
}

SignTestResult conditional_sign_test(std::span<const double> r, double K) {
  if (!(K > 0.0)) throw std::invalid_argument("conditional_sign_test: K must be > 0");
  if (r.size() < 2) throw std::invalid_argument("conditional_sign_test: series too short");
  std::vector<double> upper, lower;
  for (std::size_t t = 1; t < r.size(); ++t) {
    const double cube = r[t] * r[t] * r[t];
    if (r[t - 1] > K)
      upper.push_back(cube);
    else if (r[t - 1] < -K)
      lower.push_back(cube);
  }
  SignTestResult res;
  res.upper_count = upper.size();
  res.lower_count = lower.size();
  res.flagged = upper.size() < 30 || lower.size() < 30;
  if (!upper.empty()) {
    const auto ms = mean_se(upper);
    res.upper_mean = ms.value;
    res.upper_se = ms.se;
  }
  if (!lower.empty()) {
    const auto ms = mean_se(lower);
    res.lower_mean = ms.value;
    res.lower_se = ms.se;
  }
  return res;
}

double quantile(std::span<const double> series, double q) {
  if (series.empty()) throw std::invalid_argument("quantile: empty series");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must be in [0, 1]");
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace qarch::est
