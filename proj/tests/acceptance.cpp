// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qarch/closed_moments.hpp"
#include "qarch/coeffs.hpp"
#include "qarch/config.hpp"
#include "qarch/estimators.hpp"
#include "qarch/leverage.hpp"
#include "qarch/model.hpp"
#include "qarch/parallel.hpp"
#include "qarch/simulate.hpp"
#include "qarch/tasks.hpp"

using namespace qarch;
using coeffs::CoefficientSpec;
using model::InnovationSpec;
using model::ModelSpec;
using model::VolatilityMap;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %2d: %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", num, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

ModelSpec quadratic_explicit(double a, std::vector<double> b, double c1,
                             InnovationSpec inn = InnovationSpec::gaussian()) {
  ModelSpec s;
  s.a = a;
  s.q = VolatilityMap::quadratic(c1, 1.0);
  const std::size_t J = std::max<std::size_t>(b.size(), 1);
  s.coefficients = CoefficientSpec::explicit_list(std::move(b), J);
  s.innovations = inn;
  return s;
}

// --- 1. sharp existence boundary -------------------------------------------
void criterion_1() {
  Timer t;
  bool pass = true;
  std::string detail;
  const double b2s[] = {0.5, 0.99, 1.0, 1.01};
  const bool expect_exists[] = {true, true, false, false};
  for (int i = 0; i < 4; ++i) {
    auto spec = quadratic_explicit(0.5, {std::sqrt(b2s[i])}, 1.0);
    const auto rep = model::contraction_margin(spec, 2.0);
    const bool exists = rep.verdict == model::Verdict::ExistsUnique;
    if (!rep.sharp || exists != expect_exists[i]) pass = false;
    detail += fmt("B2=%.2f:%s ", b2s[i], exists ? "exists" : "not");
  }
  report(1, "sharp existence boundary", pass, detail, t.seconds());
}

// --- 2. ARCH(1) moment agreement --------------------------------------------
void criterion_2() {
  Timer t;
  auto spec = quadratic_explicit(0.5, {0.3}, 1.0);
  sim::PathConfig pc;
  pc.n = 1000000;
  pc.burn_in = 1000;
  pc.window = 1;
  pc.seed = 101;
  const auto path = sim::simulate_path(spec, pc);
  closed_moments::Arch1Params ap{0.5, 0.3, 1.0, 0.0, 3.0};

  std::vector<double> r2(path.r.size());
  for (std::size_t i = 0; i < path.r.size(); ++i) r2[i] = path.r[i] * path.r[i];

  bool pass = true;
  std::string detail;
  auto check = [&](const std::string& q, double closed, est::MeanSe ms) {
    const double z = (ms.value - closed) / ms.se;
    if (std::abs(z) > 3.0) pass = false;
    detail += fmt("%s z=%+.2f ", q.c_str(), z);
  };
  check("m2", closed_moments::arch1_moments(ap, 0).m2, est::batch_mean_se(r2, 200));
  {
    std::vector<double> prod(path.r.size() - 1);
    for (std::size_t i = 1; i < path.r.size(); ++i)
      prod[i - 1] = path.r[i] * path.r[i] * path.r[i - 1];
    check("m3(1)", closed_moments::arch1_moments(ap, 1).m3, est::batch_mean_se(prod, 200));
  }
  {
    std::vector<double> r4(r2.size());
    for (std::size_t i = 0; i < r2.size(); ++i) r4[i] = r2[i] * r2[i];
    check("m4(0)", closed_moments::arch1_moments(ap, 0).m4, est::batch_mean_se(r4, 200));
  }
  const double m = est::mean(r2);
  for (std::size_t k = 1; k <= 5; ++k) {
    std::vector<double> prod(r2.size() - k);
    for (std::size_t i = 0; i + k < r2.size(); ++i) prod[i] = (r2[i] - m) * (r2[i + k] - m);
    check(fmt("rho4(%zu)", k), closed_moments::arch1_moments(ap, k).rho4,
          est::batch_mean_se(prod, 200));
  }
  report(2, "ARCH(1) moment agreement", pass, detail, t.seconds());
}

// --- 3. leverage triple agreement -------------------------------------------
void criterion_3() {
  Timer t;
  auto spec = quadratic_explicit(0.5, {-0.4}, 1.0);
  closed_moments::Arch1Params ap{0.5, -0.4, 1.0, 0.0, 3.0};
  bool pass = true;
  std::string detail;

  const auto sol = lev::solve_leverage(spec, 32, 1e-14);
  double max_dev = 0.0;
  for (std::size_t j = 1; j <= 20; ++j)
    max_dev = std::max(max_dev, std::abs(sol.h[j - 1] - closed_moments::arch1_leverage(ap, j)));
  if (max_dev >= 1e-10) pass = false;
  detail += fmt("solver-dev=%.1e ", max_dev);

  sim::PathConfig pc;
  pc.n = 1000000;
  pc.burn_in = 1000;
  pc.window = 1;
  pc.seed = 103;
  const auto path = sim::simulate_path(spec, pc);
  double worst_z = 0.0;
  for (std::size_t j = 1; j <= 5; ++j) {
    const auto ms = est::leverage_hat_se(path, j);
    const double z = (ms.value - closed_moments::arch1_leverage(ap, j)) / ms.se;
    worst_z = std::max(worst_z, std::abs(z));
  }
  if (worst_z > 3.0) pass = false;
  detail += fmt("mc-worst-z=%.2f ", worst_z);

  const auto verdict = lev::sign_criterion(spec, 1u << 20);
  if (verdict != lev::SignVerdict::Leverage) pass = false;
  detail += fmt("criterion=%s", verdict == lev::SignVerdict::Leverage ? "leverage" : "other");
  report(3, "leverage triple agreement", pass, detail, t.seconds());
}

// --- 4. chain-sum oracle equivalence ----------------------------------------
double chain_brute_force(std::span<const double> alpha, std::size_t k) {
  auto at = [&](std::size_t j) { return j <= alpha.size() ? alpha[j - 1] : 0.0; };
  double total = 0.0;
  const std::size_t masks = std::size_t{1} << (k - 1);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    double prod = 1.0;
    std::size_t prev = 0;
    for (std::size_t i = 1; i < k; ++i)
      if (mask & (std::size_t{1} << (i - 1))) {
        prod *= at(i - prev);
        prev = i;
      }
    prod *= at(k - prev);
    total += prod;
  }
  return total;
}

void criterion_4() {
  Timer t;
  bool pass = true;
  std::string detail;
  std::vector<std::pair<std::string, std::vector<double>>> families;
  {
    std::vector<double> geo(14);
    for (std::size_t j = 0; j < geo.size(); ++j) geo[j] = 0.5 * std::pow(0.4, static_cast<double>(j));
    families.emplace_back("geometric", geo);
    std::vector<double> pl(14);
    for (std::size_t j = 0; j < pl.size(); ++j)
      pl[j] = 0.5 / (static_cast<double>(j + 1) * static_cast<double>(j + 1));
    families.emplace_back("powerlaw", pl);
    families.emplace_back("sparse", std::vector<double>{0.3, 0.0, 0.0, 0.2, 0.0, 0.1});
  }
  for (const auto& [name, alpha] : families) {
    const auto seq = coeffs::chain_sum(alpha, 12);
    double dev = 0.0;
    for (std::size_t k = 1; k <= 12; ++k)
      dev = std::max(dev, std::abs(seq.values[k - 1] - chain_brute_force(alpha, k)));
    if (dev >= 1e-12) pass = false;
    detail += fmt("%s-dev=%.1e ", name.c_str(), dev);
  }
  {
    const std::size_t K = 10000;
    std::vector<double> alpha(K);
    for (std::size_t j = 0; j < K; ++j)
      alpha[j] = 0.5 / (static_cast<double>(j + 1) * static_cast<double>(j + 1));
    const auto seq = coeffs::chain_sum(alpha, K);
    double sup = 0.0;
    for (std::size_t k = 1; k <= K; ++k)
      sup = std::max(sup, seq.values[k - 1] * static_cast<double>(k) * static_cast<double>(k));
    if (!(sup < 100.0)) pass = false;  // finite; observed ~31.5
    detail += fmt("sup(A_k k^2)=%.1f", sup);
  }
  report(4, "chain-sum oracle equivalence", pass, detail, t.seconds());
}

// --- 5. phi-weight identity --------------------------------------------------
void criterion_5() {
  Timer t;
  bool pass = true;
  std::string detail;
  {
    std::vector<double> b(1000);
    for (std::size_t j = 0; j < b.size(); ++j) b[j] = 0.4 * std::pow(0.6, static_cast<double>(j));
    const double b2 = coeffs::bp_norm(b, 2.0);
    const auto seq = coeffs::phi_weights(b, 1000);
    double sum = 0.0;
    for (double v : seq.values) sum += v;
    const double gap = std::abs(sum - 1.0 / (1.0 - b2));
    if (!(gap < 1e-6)) pass = false;
    detail += fmt("|sum-1/(1-B2)|=%.1e ", gap);
  }
  {
    auto b = coeffs::materialize(CoefficientSpec::power_law(0.4, 0.25, 10000));
    const auto seq = coeffs::phi_weights(b, 10000);
    double sup = 0.0;
    for (std::size_t j = 1; j <= 10000; ++j)
      sup = std::max(sup, seq.values[j] * std::pow(static_cast<double>(j), 1.5));
    if (!(sup < 5.0)) pass = false;  // renewal limit ~ 0.47
    detail += fmt("sup(phi_t t^1.5)=%.2f", sup);
  }
  report(5, "phi-weight identity", pass, detail, t.seconds());
}

// --- 6. long-memory exponents ------------------------------------------------
void criterion_6() {
  Timer t;
  bool pass = true;
  std::string detail;
  const double d = 0.25;

  {  // (i) autocovariance of r^2, lags 10..200, n = 2^20, 8 replicates
    ModelSpec spec;
    spec.a = 1.0;
    spec.q = VolatilityMap::quadratic(1.0, 1.0);
    spec.coefficients = CoefficientSpec::power_law(0.4, d, 1 << 14);
    spec.innovations = InnovationSpec::gaussian();
    const std::size_t R = 8, lag_min = 10, lag_max = 200;
    const std::size_t n_lags = lag_max - lag_min + 1;
    std::vector<double> acc(R * n_lags);
    par::parallel_for(R, 0, [&](std::size_t rep) {
      sim::PathConfig pc;
      pc.n = 1 << 20;
      pc.burn_in = 1 << 15;
      pc.window = 1 << 14;
      pc.seed = 106;
      pc.replicate = static_cast<std::uint32_t>(rep);
      pc.fast_conv = true;
      const auto path = sim::simulate_path(spec, pc);
      std::vector<double> r2(path.r.size());
      for (std::size_t i = 0; i < path.r.size(); ++i) r2[i] = path.r[i] * path.r[i];
      const double m = est::mean(r2);
      for (std::size_t L = 0; L < n_lags; ++L) {
        const std::size_t lag = lag_min + L;
        double s = 0.0;
        for (std::size_t i = 0; i + lag < r2.size(); ++i) s += (r2[i] - m) * (r2[i + lag] - m);
        acc[rep * n_lags + L] = s / static_cast<double>(r2.size());
      }
    });
    std::vector<double> lags(n_lags), cov(n_lags);
    for (std::size_t L = 0; L < n_lags; ++L) {
      double s = 0.0;
      for (std::size_t rep = 0; rep < R; ++rep) s += acc[rep * n_lags + L];
      lags[L] = static_cast<double>(lag_min + L);
      cov[L] = s / static_cast<double>(R);
    }
    const auto fit = est::fit_loglog(lags, cov);
    const bool ok = std::abs(fit.slope - (-0.5)) <= 0.15;
    if (!ok) pass = false;
    detail += fmt("autocov-slope=%.3f(tgt-0.50+-0.15)%s ", fit.slope,
                  ok ? "" : "[squared-process autocov is pre-asymptotic at lags<=200 for these"
                           " parameters; X-covariances match theory]");
  }

  {  // (ii) partial-sum variance slopes for X and r^2
    ModelSpec spec;
    spec.a = 1.0;
    spec.q = VolatilityMap::quadratic(1.0, 1.0);
    spec.coefficients = CoefficientSpec::power_law(0.4, d, 1 << 16);
    spec.innovations = InnovationSpec::gaussian();
    est::PartialSumConfig pc;
    pc.seed = 1061;
    pc.burn_in = 1 << 16;
    pc.window = 1 << 16;
    pc.replicates = 200;
    pc.threads = 0;
    pc.fast_conv = true;
    std::vector<std::size_t> lengths;
    for (std::size_t n = 1 << 10; n <= (1 << 17); n <<= 1) lengths.push_back(n);
    const auto res = est::partial_sum_variance_targets(spec, lengths, pc,
                                                       {est::PsvTarget::X, est::PsvTarget::R2});
    if (!(std::abs(res[0].fit.slope - 1.5) <= 0.15)) pass = false;
    detail += fmt("psvX-slope=%.3f(tgt1.50+-0.15) ", res[0].fit.slope);
    if (!(std::abs(res[1].fit.slope - 1.5) <= 0.2)) pass = false;
    detail += fmt("psvR2-slope=%.3f(tgt1.50+-0.20)", res[1].fit.slope);
  }
  report(6, "long-memory exponents", pass, detail, t.seconds());
}

// --- 7. weak-dependence decay -------------------------------------------------
void criterion_7() {
  Timer t;
  bool pass = true;
  std::string detail;
  const double gamma = 1.5;
  ModelSpec spec;
  spec.a = 1.0;
  spec.q = VolatilityMap::quadratic(1.0, 1.0);
  {
    std::vector<double> b(512);
    for (std::size_t j = 0; j < b.size(); ++j)
      b[j] = 0.5 * std::pow(static_cast<double>(j + 1), -gamma);
    spec.coefficients = CoefficientSpec::explicit_list(std::move(b), 512);
  }
  spec.innovations = InnovationSpec::gaussian();
  // margin < 1: B2 = 0.25 zeta(3) ~ 0.30
  const std::size_t R = 800;

  {  // delta: single swap, slope of log delta_2(k) on [8, 128]
    std::vector<sim::CoupledPaths> couples(R);
    par::parallel_for(R, 0, [&](std::size_t rep) {
      sim::PathConfig pc;
      pc.n = 129;
      pc.burn_in = 512;
      pc.window = 512;
      pc.seed = 107;
      pc.replicate = static_cast<std::uint32_t>(rep);
      couples[rep] = sim::simulate_coupled(spec, pc, sim::CouplingKind::SingleSwap);
    });
    std::vector<double> ks, ds;
    for (double k = 8.0; k <= 128.0; k *= std::sqrt(2.0)) {
      const auto kk = static_cast<std::size_t>(std::llround(k));
      ks.push_back(static_cast<double>(kk));
      ds.push_back(est::delta_hat(couples, kk, 2.0, est::Target::X));
    }
    const auto fit = est::fit_loglog(ks, ds);
    if (!(std::abs(fit.slope - (-gamma)) <= 0.3)) pass = false;
    detail += fmt("delta-slope=%.3f(tgt-1.50+-0.30) ", fit.slope);
  }

  {  // tau: past swap, slope must be <= -gamma + 1 + 0.3
    std::vector<sim::CoupledPaths> couples(R);
    par::parallel_for(R, 0, [&](std::size_t rep) {
      sim::PathConfig pc;
      pc.n = 257;
      pc.burn_in = 512;
      pc.window = 512;
      pc.seed = 108;
      pc.replicate = static_cast<std::uint32_t>(rep);
      couples[rep] = sim::simulate_coupled(spec, pc, sim::CouplingKind::PastSwap);
    });
    std::vector<double> ns, ts;
    for (double n = 8.0; n <= 128.0; n *= std::sqrt(2.0)) {
      const auto nn = static_cast<std::size_t>(std::llround(n));
      ns.push_back(static_cast<double>(nn));
      ts.push_back(est::tau_hat(couples, nn, 2.0, est::Target::X));
    }
    const auto fit = est::fit_loglog(ns, ts);
    if (!(fit.slope <= -gamma + 1.0 + 0.3)) pass = false;
    detail += fmt("tau-slope=%.3f(need<=-0.20)", fit.slope);
  }
  report(7, "weak-dependence decay", pass, detail, t.seconds());
}

// --- 8. martingale / second-moment identities ---------------------------------
void criterion_8() {
  Timer t;
  bool pass = true;
  std::string detail;
  auto spec = quadratic_explicit(0.5, {0.3, -0.2, 0.1}, 1.0);
  sim::PathConfig pc;
  pc.n = 1000000;
  pc.burn_in = 1000;
  pc.window = 3;
  pc.seed = 109;
  const auto path = sim::simulate_path(spec, pc);
  const double var = est::autocov_at(path.r, 0);
  double worst = 0.0;
  for (std::size_t k = 1; k <= 20; ++k) {
    const double rho = est::autocov_at(path.r, k) / var;
    worst = std::max(worst, std::abs(rho));
  }
  const double band = 3.0 / std::sqrt(static_cast<double>(pc.n));
  if (!(worst < band)) pass = false;
  detail += fmt("max|acf(1..20)|=%.2e(band %.2e) ", worst, band);

  std::vector<double> x2(path.x.size());
  for (std::size_t i = 0; i < path.x.size(); ++i) x2[i] = path.x[i] * path.x[i];
  const auto ms = est::batch_mean_se(x2, 200);
  const double target = model::cov_x_closed(spec, 0);  // m2 B2
  const double z = (ms.value - target) / ms.se;
  if (!(std::abs(z) <= 3.0)) pass = false;
  detail += fmt("EX2 z=%+.2f", z);
  report(8, "martingale/second-moment", pass, detail, t.seconds());
}

// --- 9. distribution-difference sign test -------------------------------------
void criterion_9() {
  Timer t;
  bool pass = true;
  std::string detail;
  const double a = 0.5, b = 0.5, c = 1.0;
  const std::size_t n = 10000000;

  auto spec = quadratic_explicit(a, {b}, c, InnovationSpec::centered_exponential());
  sim::PathConfig pc;
  pc.n = n;
  pc.burn_in = 1000;
  pc.window = 1;
  pc.seed = 110;
  const auto path = sim::simulate_path(spec, pc);
  std::vector<double> abs_r(path.r.size());
  for (std::size_t i = 0; i < path.r.size(); ++i) abs_r[i] = std::abs(path.r[i]);
  const double K = est::quantile(abs_r, 0.99);
  const auto res = est::conditional_sign_test(path.r, K);
  const double zu = res.upper_mean / res.upper_se;
  const double zl = res.lower_mean / res.lower_se;
  if (!(zu > 2.0 && zl > 2.0) || res.flagged) pass = false;
  detail += fmt("arch:up-z=%+.1f lo-z=%+.1f ", zu, zl);

  const auto mp = closed_moments::match_params(a, b, c);
  sim::RcAr1SimSpec twin;
  twin.kappa = mp.kappa;
  twin.b = b;
  twin.rho = mp.rho;
  twin.eta = InnovationSpec::centered_exponential();  // positively skewed eta
  twin.xi = InnovationSpec::gaussian();
  const auto rt = sim::simulate_rcar1(twin, pc);
  std::vector<double> abs_rt(rt.size());
  for (std::size_t i = 0; i < rt.size(); ++i) abs_rt[i] = std::abs(rt[i]);
  const double Kt = est::quantile(abs_rt, 0.99);
  const auto rest = est::conditional_sign_test(rt, Kt);
  const double zut = rest.upper_mean / rest.upper_se;
  const double zlt = rest.lower_mean / rest.lower_se;
  if (!(zut > 2.0 && zlt < -2.0) || rest.flagged) pass = false;
  detail += fmt("rcar:up-z=%+.1f lo-z=%+.1f", zut, zlt);
  report(9, "distribution-difference sign test", pass, detail, t.seconds());
}

// --- 10. determinism -----------------------------------------------------------
void criterion_10() {
  Timer t;
  bool pass = true;
  std::string detail;
  const char* config = R"json({
    "model": {
      "a": 1.0,
      "q": {"variant": "quadratic", "c1": 1.0, "c2": 1.0},
      "coeffs": {"variant": "power_law", "beta": 0.4, "d": 0.25, "cutoff": 256},
      "innovations": {"family": "gaussian"}
    },
    "run": {"n": 2048, "burn_in": 256, "window": 256, "seed": 42, "replicates": 100,
            "fast_conv": true},
    "tasks": [
      {"type": "check", "p_values": [1.5, 2.0, 4.0]},
      {"type": "simulate", "format": "both"},
      {"type": "couple", "kind": "single_swap", "p": 2.0, "target": "x",
       "k_values": [1, 2, 4, 8, 16, 32]}
    ]
  })json";
  namespace fs = std::filesystem;
  auto cfg = cli::parse_config(config);
  const fs::path base = fs::temp_directory_path() / "qarch_acceptance_det";
  fs::remove_all(base);
  std::ostringstream log;
  cfg.run.threads = 1;
  const int rc1 = cli::run_experiment(cfg, (base / "a").string(), log);
  const int rc2 = cli::run_experiment(cfg, (base / "b").string(), log);
  cfg.run.threads = 4;
  const int rc3 = cli::run_experiment(cfg, (base / "c").string(), log);
  if (rc1 != 0 || rc2 != 0 || rc3 != 0) pass = false;
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;  // timestamps live only here
    ++files;
    auto slurp = [](const fs::path& p) {
      std::ifstream f(p, std::ios::binary);
      std::ostringstream ss;
      ss << f.rdbuf();
      return ss.str();
    };
    const std::string ref = slurp(entry.path());
    if (ref != slurp(base / "b" / name) || ref != slurp(base / "c" / name)) {
      pass = false;
      detail += fmt("mismatch:%s ", name.string().c_str());
    }
  }
  if (files == 0) pass = false;
  fs::remove_all(base);
  detail += fmt("%zu files byte-identical across reruns and threads 1/4", files);
  report(10, "determinism", pass, detail, t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  // optional single-criterion selection for development: acceptance [N]
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  using Fn = void (*)();
  const Fn criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                         criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  for (int i = 0; i < 10; ++i) {
    if (only > 0 && only != i + 1) continue;
    criteria[i]();
  }
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
