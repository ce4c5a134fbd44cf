#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qarch/config.hpp"
#include "qarch/tasks.hpp"
#include "qarch/version.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("config", opts.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", opts.out_dir, "output directory (default: config out_dir)");
  auto* seed = cmd->add_option("--seed", "seed override");
  seed->each([&opts](const std::string& s) { opts.seed = std::stoull(s); });
  auto* threads = cmd->add_option("--threads", "worker threads (default: QARCH_THREADS or hardware)");
  threads->each([&opts](const std::string& s) { opts.threads = static_cast<unsigned>(std::stoul(s)); });
}

int execute(const CommonOpts& opts, const std::vector<qarch::cli::TaskType>& only,
            bool force_compare) {
  qarch::cli::ExperimentConfig cfg;
  try {
    cfg = qarch::cli::load_config(opts.config_path);
  } catch (const qarch::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (opts.seed) cfg.run.seed = *opts.seed;
  if (opts.threads) cfg.run.threads = *opts.threads;
  const std::string out = opts.out_dir.empty() ? cfg.out_dir : opts.out_dir;
  return qarch::cli::run_experiment(cfg, out, std::cerr, only, force_compare);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qarch: nonlinear long-memory conditionally heteroscedastic model toolkit"};
  app.set_version_flag("--version", qarch::kVersion);
  app.require_subcommand(1);

  CommonOpts check_o, run_o, compare_o, longmem_o;
  auto* check = app.add_subcommand("check", "existence criteria and contraction margins");
  add_common(check, check_o);
  auto* run = app.add_subcommand("run", "execute every task in the config");
  add_common(run, run_o);
  auto* compare = app.add_subcommand("compare", "closed-form vs Monte Carlo tables with z-scores");
  add_common(compare, compare_o);
  auto* longmem = app.add_subcommand("longmem", "long-memory scaling report");
  add_common(longmem, longmem_o);

  CLI11_PARSE(app, argc, argv);

  using qarch::cli::TaskType;
  if (check->parsed()) return execute(check_o, {TaskType::Check}, false);
  if (run->parsed()) return execute(run_o, {}, false);
  if (compare->parsed())
    return execute(compare_o, {TaskType::Moments, TaskType::Leverage}, true);
  if (longmem->parsed()) return execute(longmem_o, {TaskType::LongMem}, false);
  return 1;
}
