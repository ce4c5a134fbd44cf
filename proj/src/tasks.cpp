#include "qarch/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qarch/estimators.hpp"
#include "qarch/io.hpp"
#include "qarch/leverage.hpp"
#include "qarch/parallel.hpp"
#include "qarch/simulate.hpp"
#include "qarch/version.hpp"

namespace qarch::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::optional<closed_moments::Arch1Params> arch1_shape(const model::ModelSpec& spec) {
  if (spec.q.kind() != model::QKind::Quadratic || spec.q.c2() != 1.0) return std::nullopt;
  if (spec.coefficients.kind != coeffs::CoeffKind::Explicit) return std::nullopt;
  const auto& v = spec.coefficients.values;
  if (v.empty()) return std::nullopt;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] != 0.0) return std::nullopt;
  closed_moments::Arch1Params p;
  p.a = spec.a;
  p.b = v[0];
  p.c = spec.q.c1();
  p.mu3 = spec.innovations.moment(3);
  p.mu4 = spec.innovations.moment(4);
  return p;
}

namespace {

sim::PathConfig path_config(const ExperimentConfig& cfg, std::uint32_t replicate) {
  sim::PathConfig pc;
  pc.n = cfg.run.n;
  pc.burn_in = cfg.run.burn_in;
  pc.window = cfg.run.window;
  pc.seed = cfg.run.seed;
  pc.replicate = replicate;
  pc.fast_conv = cfg.run.fast_conv;
  pc.block = cfg.run.block;
  return pc;
}

const char* verdict_name(model::Verdict v) {
  switch (v) {
    case model::Verdict::ExistsUnique: return "exists-unique";
    case model::Verdict::NotExists: return "does-not-exist";
    case model::Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct TaskContext {
  const ExperimentConfig& cfg;
  fs::path out_dir;
  std::string hash;
  std::ostream& log;
  json manifest_outputs = json::array();

  std::ofstream open_csv(const std::string& stem, std::string& name_out) {
    name_out = stem + "-" + hash + ".csv";
    std::ofstream f(out_dir / name_out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + name_out);
    return f;
  }

  void record(const std::string& file, const TaskConfig& task, const json& summary) {
    json e;
    e["file"] = file;
    e["task"] = task_name(task.type);
    e["seed"] = cfg.run.seed;
    e["n"] = cfg.run.n;
    e["replicates"] = cfg.run.replicates;
    if (!summary.is_null()) e["summary"] = summary;
    manifest_outputs.push_back(e);
    // optional JSON summary next to the CSV
    if (!summary.is_null()) {
      const std::string jname = file.substr(0, file.size() - 4) + ".json";
      std::ofstream jf(out_dir / jname, std::ios::binary);
      jf << summary.dump(2) << "\n";
    }
  }
};

std::string stem_for(TaskContext& ctx, const TaskConfig& task, std::size_t index_of_type) {
  std::string stem = task_name(task.type);
  if (index_of_type > 0) stem += "-" + std::to_string(index_of_type + 1);
  (void)ctx;
  return stem;
}

void run_check(TaskContext& ctx, const TaskConfig& task, std::size_t idx) {
  std::string file;
  auto f = ctx.open_csv(stem_for(ctx, task, idx), file);
  f << "p,margin,verdict,sharp,sufficient_only,b2,cutoff,denominator,near_critical\n";
  json summary = json::array();
  for (double p : task.p_values) {
    const auto rep = model::contraction_margin(ctx.cfg.model, p);
    const auto mb = model::moment_bound(ctx.cfg.model, p);
    f << io::fmt(p) << ',' << io::fmt(rep.margin) << ',' << verdict_name(rep.verdict) << ','
      << (rep.sharp ? 1 : 0) << ',' << (rep.sufficient_only ? 1 : 0) << ',' << io::fmt(rep.b2)
      << ',' << rep.cutoff << ',' << io::fmt(mb.denominator) << ',' << (mb.near_critical ? 1 : 0)
      << '\n';
    summary.push_back({{"p", p},
                       {"margin", rep.margin},
                       {"verdict", verdict_name(rep.verdict)},
                       {"sharp", rep.sharp},
                       {"sufficient_only", rep.sufficient_only}});
    ctx.log << "check p=" << p << ": margin " << rep.margin << ", " << verdict_name(rep.verdict)
            << (rep.sufficient_only ? " (sufficient-only bound)" : "") << "\n";
  }
  ctx.record(file, task, summary);
}

void run_simulate(TaskContext& ctx, const TaskConfig& task, std::size_t idx) {
  for (auto w : sim::check_config(ctx.cfg.model, path_config(ctx.cfg, 0)))
    ctx.log << "warning: " << w << "\n";
  const std::string stem = stem_for(ctx, task, idx);
  json summary = json::array();
  for (std::size_t rep = 0; rep < ctx.cfg.run.replicates; ++rep) {
    const auto path = sim::simulate_path(ctx.cfg.model, path_config(ctx.cfg, static_cast<std::uint32_t>(rep)));
    std::string base = stem;
    if (ctx.cfg.run.replicates > 1) base += "-r" + std::to_string(rep);
    if (task.format == "csv" || task.format == "both") {
      std::string file;
      auto f = ctx.open_csv(base, file);
      sim::write_csv(path, f);
      summary.push_back({{"file", file}, {"replicate", rep}});
      ctx.manifest_outputs.push_back({{"file", file}, {"task", "simulate"}, {"seed", ctx.cfg.run.seed},
                                      {"replicate", rep}});
    }
    if (task.format == "binary" || task.format == "both") {
      const std::string file = base + "-" + ctx.hash + ".bin";
      std::ofstream f(ctx.out_dir / file, std::ios::binary);
      if (!f) throw std::runtime_error("cannot open output file " + file);
      sim::write_binary(path, f);
      summary.push_back({{"file", file}, {"replicate", rep}});
      ctx.manifest_outputs.push_back({{"file", file}, {"task", "simulate"}, {"seed", ctx.cfg.run.seed},
                                      {"replicate", rep}});
    }
  }
  ctx.log << "simulate: wrote " << summary.size() << " file(s)\n";
}

// z-scored closed-form vs Monte Carlo row
void compare_row(std::ostream& f, json& summary, const std::string& quantity, double closed,
                 const est::MeanSe& mc) {
  const double z = (mc.se > 0.0) ? (mc.value - closed) / mc.se : 0.0;
  f << quantity << ',' << io::fmt(closed) << ',' << io::fmt(mc.value) << ',' << io::fmt(mc.se)
    << ',' << io::fmt(z) << '\n';
  summary.push_back({{"quantity", quantity}, {"closed", closed}, {"mc", mc.value},
                     {"stderr", mc.se}, {"z", z}});
}

est::MeanSe autocov_mean_se(std::span<const double> series, std::size_t lag,
                            std::size_t blocks = 200) {
  const double m = est::mean(series);
  std::vector<double> prod(series.size() - lag);
  for (std::size_t t = 0; t + lag < series.size(); ++t)
    prod[t] = (series[t] - m) * (series[t + lag] - m);
  return est::batch_mean_se(prod, blocks);
}

void run_moments(TaskContext& ctx, const TaskConfig& task, std::size_t idx) {
  const auto shape = arch1_shape(ctx.cfg.model);
  if (!shape)
    throw std::runtime_error(
        "moments: closed forms need the asymmetric ARCH(1) shape "
        "(quadratic Q with c2 = 1, one explicit lag)");
  std::string file;
  auto f = ctx.open_csv(stem_for(ctx, task, idx), file);
  json summary;
  if (!task.compare) {
    f << "t,m2,m3,m4,rho4\n";
    for (std::size_t t = 0; t <= task.t_max; ++t) {
      const auto m = closed_moments::arch1_moments(*shape, t);
      f << t << ',' << io::fmt(m.m2) << ',' << io::fmt(m.m3) << ',' << io::fmt(m.m4) << ','
        << io::fmt(m.rho4) << '\n';
    }
    summary = {{"m2", closed_moments::arch1_moments(*shape, 0).m2}};
  } else {
    const auto path = sim::simulate_path(ctx.cfg.model, path_config(ctx.cfg, 0));
    std::vector<double> r2(path.r.size());
    for (std::size_t t = 0; t < path.r.size(); ++t) r2[t] = path.r[t] * path.r[t];
    f << "quantity,closed,mc,stderr,z\n";
    summary = json::array();
    compare_row(f, summary, "m2", closed_moments::arch1_moments(*shape, 0).m2,
                est::batch_mean_se(r2, 200));
    {
      std::vector<double> prod(path.r.size() - 1);
      for (std::size_t t = 1; t < path.r.size(); ++t)
        prod[t - 1] = path.r[t] * path.r[t] * path.r[t - 1];
      compare_row(f, summary, "m3(1)", closed_moments::arch1_moments(*shape, 1).m3,
                  est::batch_mean_se(prod, 200));
    }
    {
      std::vector<double> r4(path.r.size());
      for (std::size_t t = 0; t < path.r.size(); ++t) r4[t] = r2[t] * r2[t];
      compare_row(f, summary, "m4(0)", closed_moments::arch1_moments(*shape, 0).m4,
                  est::batch_mean_se(r4, 200));
    }
    for (std::size_t k = 1; k <= std::min<std::size_t>(task.t_max, 5); ++k)
      compare_row(f, summary, "rho4(" + std::to_string(k) + ")",
                  closed_moments::arch1_moments(*shape, k).rho4, autocov_mean_se(r2, k));
    bool any_large = false;
    for (const auto& row : summary)
      if (std::abs(row.at("z").get<double>()) > 4.0) any_large = true;
    summary = json{{"rows", summary}, {"any_z_above_4", any_large}};
    ctx.log << "moments compare: " << summary.at("rows").size() << " rows"
            << (any_large ? " [FLAG: |z| > 4 present]" : "") << "\n";
  }
  ctx.record(file, task, summary);
}

void run_leverage(TaskContext& ctx, const TaskConfig& task, std::size_t idx) {
  const std::size_t J =
      task.solver_J > 0 ? task.solver_J : lev::suggest_truncation(ctx.cfg.model, task.tol);
  const auto sol = lev::solve_leverage(ctx.cfg.model, J, task.tol);
  std::string file;
  auto f = ctx.open_csv(stem_for(ctx, task, idx), file);
  json summary;
  if (!task.compare) {
    lev::write_csv(sol, spec_hash(ctx.cfg), f);
    summary = {{"residual", sol.residual}, {"iterations", sol.iterations}, {"norm", sol.norm}};
  } else {
    const auto path = sim::simulate_path(ctx.cfg.model, path_config(ctx.cfg, 0));
    f << "quantity,closed,mc,stderr,z\n";
    summary = json::array();
    for (std::size_t j = 1; j <= std::min(task.j_max, sol.h.size()); ++j)
      compare_row(f, summary, "h(" + std::to_string(j) + ")", sol.h[j - 1],
                  est::leverage_hat_se(path, j));
    bool any_large = false;
    for (const auto& row : summary)
      if (std::abs(row.at("z").get<double>()) > 4.0) any_large = true;
    summary = json{{"rows", summary}, {"any_z_above_4", any_large}};
  }
  ctx.record(file, task, summary);
}

void run_longmem(TaskContext& ctx, const TaskConfig& task, std::size_t idx) {
  const auto lc = model::longmem_constants(ctx.cfg.model);
  const double d = ctx.cfg.model.coefficients.d;
  // conservative proxy for the fourth-moment assumption behind the squared-
  // process asymptotics; the p = 4 margin uses an upper bound on K_4, so a
  // value >= 1 is only a warning, not a refutation
  const auto p4 = model::contraction_margin(ctx.cfg.model, 4.0);
  if (p4.margin >= 1.0)
    ctx.log << "warning: p=4 contraction margin " << p4.margin
            << " >= 1 (sufficient-only bound); fourth-moment existence unverified\n";
  const std::size_t lag_max = task.lag_max > 0 ? task.lag_max : ctx.cfg.run.n / 20;
  if (task.lag_min < 1 || lag_max <= task.lag_min)
    throw std::runtime_error("longmem: need 1 <= lag_min < lag_max");

  // replicate-averaged autocovariance of r^2 on [lag_min, lag_max]
  const std::size_t R = std::max<std::size_t>(ctx.cfg.run.replicates, 1);
  const std::size_t n_lags = lag_max - task.lag_min + 1;
  std::vector<double> acc(R * n_lags, 0.0);
  par::parallel_for(R, ctx.cfg.run.threads, [&](std::size_t rep) {
    const auto path = sim::simulate_path(ctx.cfg.model, path_config(ctx.cfg, static_cast<std::uint32_t>(rep)));
    std::vector<double> r2(path.r.size());
    for (std::size_t t = 0; t < path.r.size(); ++t) r2[t] = path.r[t] * path.r[t];
    const double m = est::mean(r2);
    for (std::size_t L = 0; L < n_lags; ++L) {
      const std::size_t lag = task.lag_min + L;
      double s = 0.0;
      for (std::size_t t = 0; t + lag < r2.size(); ++t) s += (r2[t] - m) * (r2[t + lag] - m);
      acc[rep * n_lags + L] = s / static_cast<double>(r2.size());
    }
  });
  std::vector<double> lags(n_lags), cov(n_lags);
  std::vector<double> col(R);
  for (std::size_t L = 0; L < n_lags; ++L) {
    for (std::size_t rep = 0; rep < R; ++rep) col[rep] = acc[rep * n_lags + L];
    lags[L] = static_cast<double>(task.lag_min + L);
    cov[L] = est::mean(col);
  }
  const auto cov_fit = est::fit_loglog(lags, cov);

  std::string file;
  auto f = ctx.open_csv(stem_for(ctx, task, idx), file);
  f << "# targets: autocov slope 2d-1 = " << io::fmt(2.0 * d - 1.0)
    << ", partial-sum slope 2d+1 = " << io::fmt(2.0 * d + 1.0) << "\n";
  f << "# kappa1_sq = " << io::fmt(lc.kappa1_sq)
    << (ctx.cfg.model.a == 0.0 ? " (a = 0: squared-process slope target undefined)" : "") << "\n";
  f << "# autocov estimator: biased (1/n), positive semidefinite\n";
  f << "estimator,params,value,stderr,n,seed\n";
  for (std::size_t L = 0; L < n_lags; ++L) {
    for (std::size_t rep = 0; rep < R; ++rep) col[rep] = acc[rep * n_lags + L];
    const auto ms = est::mean_se(col);
    f << "autocov_r2,lag=" << (task.lag_min + L) << ',' << io::fmt(cov[L]) << ','
      << io::fmt(ms.se) << ',' << ctx.cfg.run.n << ',' << ctx.cfg.run.seed << '\n';
  }

  json summary;
  summary["constants"] = {{"lambda1_sq", lc.lambda1_sq}, {"lambda2_sq", lc.lambda2_sq},
                          {"kappa1_sq", lc.kappa1_sq},   {"kappa2_sq", lc.kappa2_sq},
                          {"beta_fn", lc.beta_fn},       {"m2", lc.m2}};
  summary["targets"] = {{"autocov_slope", 2.0 * d - 1.0}, {"partial_sum_slope", 2.0 * d + 1.0}};
  summary["fourth_moment_proxy"] = {{"p4_margin", p4.margin},
                                    {"sufficient_only", true},
                                    {"satisfied", p4.margin < 1.0}};
  summary["autocov_fit"] = {{"slope", cov_fit.slope}, {"slope_se", cov_fit.slope_se},
                            {"lag_min", task.lag_min}, {"lag_max", lag_max}, {"replicates", R}};
  if (ctx.cfg.model.a == 0.0)
    summary["autocov_fit"]["note"] = "a = 0: kappa1 = 0, squared-process slope target undefined";

  std::vector<std::size_t> lengths = task.lengths;
  if (lengths.empty())
    for (std::size_t n = 1024; n <= std::min<std::size_t>(131072, ctx.cfg.run.n); n <<= 1)
      lengths.push_back(n);
  est::PartialSumConfig pcfg;
  pcfg.seed = ctx.cfg.run.seed + 1;  // independent replicate set
  pcfg.burn_in = ctx.cfg.run.burn_in;
  pcfg.window = ctx.cfg.run.window;
  pcfg.replicates = task.psv_replicates;
  pcfg.threads = ctx.cfg.run.threads;
  pcfg.fast_conv = ctx.cfg.run.fast_conv;
  pcfg.block = ctx.cfg.run.block;
  std::vector<est::PsvTarget> targets;
  std::vector<std::string> target_names;
  if (task.psv_target == "x" || task.psv_target == "both") {
    targets.push_back(est::PsvTarget::X);
    target_names.push_back("x");
  }
  if (task.psv_target == "r2" || task.psv_target == "both") {
    targets.push_back(est::PsvTarget::R2);
    target_names.push_back("r2");
  }
  const auto results = est::partial_sum_variance_targets(ctx.cfg.model, lengths, pcfg, targets);
  for (std::size_t ti = 0; ti < results.size(); ++ti) {
    const auto& res = results[ti];
    const auto& tgt = target_names[ti];
    for (std::size_t l = 0; l < res.lengths.size(); ++l) {
      // normal-theory spread of a variance estimate over R replicates
      const double se =
          res.variance[l] * std::sqrt(2.0 / static_cast<double>(pcfg.replicates - 1));
      f << "psv_" << tgt << ",len=" << res.lengths[l] << ',' << io::fmt(res.variance[l]) << ','
        << io::fmt(se) << ',' << pcfg.replicates << ',' << pcfg.seed << '\n';
    }
    summary["psv_" + tgt] = {{"slope", res.fit.slope},
                             {"slope_se", res.fit.slope_se},
                             {"hurst", res.hurst},
                             {"replicates", pcfg.replicates}};
    ctx.log << "longmem psv[" << tgt << "]: slope " << res.fit.slope << " (target "
            << 2.0 * d + 1.0 << ")\n";
  }
  ctx.log << "longmem autocov slope " << cov_fit.slope << " (target " << 2.0 * d - 1.0 << ")\n";
  ctx.record(file, task, summary);
}

void run_couple(TaskContext& ctx, const TaskConfig& task, std::size_t idx) {
  const std::size_t R = ctx.cfg.run.replicates;
  if (R < est::kMinReplicates)
    ctx.log << "warning: couple task with " << R << " replicates (< " << est::kMinReplicates
            << "), estimates will be noisy\n";
  const auto kind = task.kind == "single_swap" ? sim::CouplingKind::SingleSwap
                                               : sim::CouplingKind::PastSwap;
  const auto target = task.target == "r" ? est::Target::R : est::Target::X;
  std::vector<sim::CoupledPaths> couples(R);
  par::parallel_for(R, ctx.cfg.run.threads, [&](std::size_t rep) {
    couples[rep] = sim::simulate_coupled(ctx.cfg.model, path_config(ctx.cfg, static_cast<std::uint32_t>(rep)), kind);
  });
  std::vector<std::size_t> ks = task.k_values;
  if (ks.empty()) {
    for (double k = 8.0; k <= std::min<double>(128.0, static_cast<double>(ctx.cfg.run.n - 1));
         k *= std::sqrt(2.0))
      ks.push_back(static_cast<std::size_t>(std::llround(k)));
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  }
  std::string file;
  auto f = ctx.open_csv(stem_for(ctx, task, idx), file);
  f << "estimator,params,value,stderr,n,seed\n";
  std::vector<double> xs, ys;
  const char* metric = kind == sim::CouplingKind::SingleSwap ? "delta" : "tau";
  std::vector<double> pows(R);
  for (std::size_t k : ks) {
    double v, se = 0.0;
    if (kind == sim::CouplingKind::SingleSwap) {
      v = est::delta_hat(couples, k, task.p, target);
      // delta-method SE of (mean |y_k - y_k'|^p)^{1/p}
      for (std::size_t rep = 0; rep < R; ++rep) {
        const auto& c = couples[rep];
        const double dv = std::abs((task.target == "r" ? c.primary.r[k] : c.primary.x[k]) -
                                   (task.target == "r" ? c.shadow.r[k] : c.shadow.x[k]));
        pows[rep] = std::pow(dv, task.p);
      }
      const auto ms = est::mean_se(pows);
      if (ms.value > 0.0)
        se = std::pow(ms.value, 1.0 / task.p - 1.0) * ms.se / task.p;
    } else {
      v = est::tau_hat(couples, k, task.p, target);  // sup statistic: no simple stderr
    }
    f << metric << ",k=" << k << ";p=" << io::fmt(task.p) << ',' << io::fmt(v) << ','
      << io::fmt(se) << ',' << R << ',' << ctx.cfg.run.seed << '\n';
    if (v > 0.0) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(v);
    }
  }
  json summary;
  summary["metric"] = metric;
  summary["p"] = task.p;
  summary["target"] = task.target;
  summary["replicates"] = R;
  if (xs.size() >= 3) {
    const auto fit = est::fit_loglog(xs, ys);
    summary["fit"] = {{"slope", fit.slope}, {"slope_se", fit.slope_se}};
    ctx.log << "couple " << metric << " slope " << fit.slope << "\n";
  }
  ctx.record(file, task, summary);
}

void run_signtest(TaskContext& ctx, const TaskConfig& task, std::size_t idx) {
  const auto path = sim::simulate_path(ctx.cfg.model, path_config(ctx.cfg, 0));
  std::vector<double> abs_r(path.r.size());
  for (std::size_t t = 0; t < path.r.size(); ++t) abs_r[t] = std::abs(path.r[t]);
  const double K = est::quantile(abs_r, task.quantile);
  const auto res = est::conditional_sign_test(path.r, K);

  std::string file;
  auto f = ctx.open_csv(stem_for(ctx, task, idx), file);
  f << "estimator,params,value,stderr,n,seed\n";
  auto emit = [&](const char* proc, const char* side, double K_, double m, double se,
                  std::size_t cnt) {
    f << "cond_third_moment,process=" << proc << ";side=" << side << ";K=" << io::fmt(K_) << ','
      << io::fmt(m) << ',' << io::fmt(se) << ',' << cnt << ',' << ctx.cfg.run.seed << '\n';
  };
  emit("arch1", "upper", K, res.upper_mean, res.upper_se, res.upper_count);
  emit("arch1", "lower", K, res.lower_mean, res.lower_se, res.lower_count);
  json summary;
  summary["arch1"] = {{"K", K},
                      {"upper", {{"mean", res.upper_mean}, {"se", res.upper_se}, {"count", res.upper_count}}},
                      {"lower", {{"mean", res.lower_mean}, {"se", res.lower_se}, {"count", res.lower_count}}},
                      {"flagged", res.flagged}};
  if (res.flagged) ctx.log << "warning: signtest has a side with fewer than 30 exceedances\n";

  if (task.twin) {
    const auto shape = arch1_shape(ctx.cfg.model);
    if (!shape)
      throw std::runtime_error("signtest: twin comparison needs the ARCH(1) shape");
    const auto mp = closed_moments::match_params(shape->a, shape->b, shape->c);
    sim::RcAr1SimSpec twin;
    twin.kappa = mp.kappa;
    twin.b = shape->b;
    twin.rho = mp.rho;
    twin.eta = task.eta;
    twin.xi = task.xi;
    const auto rt = sim::simulate_rcar1(twin, path_config(ctx.cfg, 0));
    std::vector<double> abs_rt(rt.size());
    for (std::size_t t = 0; t < rt.size(); ++t) abs_rt[t] = std::abs(rt[t]);
    const double Kt = est::quantile(abs_rt, task.quantile);
    const auto rest = est::conditional_sign_test(rt, Kt);
    emit("rcar1", "upper", Kt, rest.upper_mean, rest.upper_se, rest.upper_count);
    emit("rcar1", "lower", Kt, rest.lower_mean, rest.lower_se, rest.lower_count);
    summary["rcar1"] = {{"K", Kt},
                        {"kappa", mp.kappa},
                        {"rho", mp.rho},
                        {"upper", {{"mean", rest.upper_mean}, {"se", rest.upper_se}, {"count", rest.upper_count}}},
                        {"lower", {{"mean", rest.lower_mean}, {"se", rest.lower_se}, {"count", rest.lower_count}}},
                        {"flagged", rest.flagged}};
  }
  ctx.record(file, task, summary);
}

json innovations_echo(const model::InnovationSpec& inn) {
  switch (inn.family) {
    case model::InnovationFamily::Rademacher: return {{"family", "rademacher"}};
    case model::InnovationFamily::Gaussian: return {{"family", "gaussian"}};
    case model::InnovationFamily::CenteredExponential: return {{"family", "exponential"}};
    case model::InnovationFamily::StudentT: return {{"family", "student_t"}, {"nu", inn.nu}};
    case model::InnovationFamily::Uniform: return {{"family", "uniform"}};
  }
  return {};
}

// Full task echo so the manifest alone can reproduce the run.
json task_echo(const TaskConfig& t) {
  json j{{"type", task_name(t.type)}};
  switch (t.type) {
    case TaskType::Check: j["p_values"] = t.p_values; break;
    case TaskType::Simulate: j["format"] = t.format; break;
    case TaskType::Moments:
      j["t_max"] = t.t_max;
      j["compare"] = t.compare;
      break;
    case TaskType::Leverage:
      j["J"] = t.solver_J;
      j["tol"] = t.tol;
      j["j_max"] = t.j_max;
      j["compare"] = t.compare;
      break;
    case TaskType::LongMem:
      j["lag_min"] = t.lag_min;
      j["lag_max"] = t.lag_max;
      j["lengths"] = t.lengths;
      j["psv_replicates"] = t.psv_replicates;
      j["psv_target"] = t.psv_target;
      break;
    case TaskType::Couple:
      j["kind"] = t.kind;
      j["p"] = t.p;
      j["target"] = t.target;
      j["k_values"] = t.k_values;
      break;
    case TaskType::SignTest:
      j["quantile"] = t.quantile;
      j["twin"] = t.twin;
      j["eta"] = innovations_echo(t.eta);
      j["xi"] = innovations_echo(t.xi);
      break;
  }
  return j;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log,
                   const std::vector<TaskType>& only, bool force_compare) {
  TaskContext ctx{cfg, fs::path(out_dir), spec_hash_hex(cfg), log};
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << out_dir << "\n";
    return 2;
  }
  std::size_t counts[8] = {};
  bool ran_any = false;
  try {
    for (const auto& task : cfg.tasks) {
      if (!only.empty() &&
          std::find(only.begin(), only.end(), task.type) == only.end())
        continue;
      TaskConfig t = task;
      if (force_compare && (t.type == TaskType::Moments || t.type == TaskType::Leverage))
        t.compare = true;
      const std::size_t idx = counts[static_cast<int>(t.type)]++;
      switch (t.type) {
        case TaskType::Check: run_check(ctx, t, idx); break;
        case TaskType::Simulate: run_simulate(ctx, t, idx); break;
        case TaskType::Moments: run_moments(ctx, t, idx); break;
        case TaskType::Leverage: run_leverage(ctx, t, idx); break;
        case TaskType::LongMem: run_longmem(ctx, t, idx); break;
        case TaskType::Couple: run_couple(ctx, t, idx); break;
        case TaskType::SignTest: run_signtest(ctx, t, idx); break;
      }
      ran_any = true;
    }
  } catch (const std::exception& e) {
    log << "task failure: " << e.what() << "\n";
    return 2;
  }
  if (!only.empty() && !ran_any) {
    log << "error: config has no task of the requested type(s)\n";
    return 2;
  }
  json manifest;
  manifest["version"] = kVersion;
  manifest["spec_hash"] = ctx.hash;
  manifest["config"] = json::parse(canonical_spec(cfg));
  manifest["config"]["tasks"] = json::array();
  for (const auto& task : cfg.tasks) manifest["config"]["tasks"].push_back(task_echo(task));
  manifest["config"]["threads"] = cfg.run.threads;
  manifest["outputs"] = ctx.manifest_outputs;
  const auto now = std::chrono::system_clock::now();
  manifest["created_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  std::ofstream mf(ctx.out_dir / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
  return 0;
}

}  // namespace qarch::cli
