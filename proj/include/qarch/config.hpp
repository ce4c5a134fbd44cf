#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qarch/model.hpp"

namespace qarch::cli {

// Validation failure; the message names the offending key and constraint.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunConfig {
  std::size_t n = 10000;
  std::size_t burn_in = 1000;
  std::size_t window = 0;  // 0 = materialization cutoff
  std::uint64_t seed = 1;
  std::size_t replicates = 1;
  unsigned threads = 0;  // 0 = QARCH_THREADS env or hardware
  bool fast_conv = false;
  std::size_t block = 0;
};

enum class TaskType { Check, Simulate, Moments, Leverage, LongMem, Couple, SignTest };

const char* task_name(TaskType t);

struct TaskConfig {
  TaskType type = TaskType::Check;
  // check
  std::vector<double> p_values{2.0};
  // simulate
  std::string format = "csv";  // csv | binary | both
  // moments / leverage
  std::size_t t_max = 10;
  bool compare = false;
  std::size_t solver_J = 0;  // 0 = auto from the tail-sum rule
  double tol = 1e-12;
  std::size_t j_max = 5;
  // longmem
  std::size_t lag_min = 10;
  std::size_t lag_max = 0;  // 0 = n / 20
  std::vector<std::size_t> lengths;
  std::size_t psv_replicates = 200;
  std::string psv_target = "x";  // x | r2 | both
  // couple
  std::string kind = "single_swap";  // single_swap | past_swap
  double p = 2.0;
  std::string target = "x";  // x | r
  std::vector<std::size_t> k_values;
  // signtest
  double quantile = 0.99;
  bool twin = false;
  model::InnovationSpec eta = model::InnovationSpec::gaussian();
  model::InnovationSpec xi = model::InnovationSpec::gaussian();
};

struct ExperimentConfig {
  model::ModelSpec model;
  RunConfig run;
  std::vector<TaskConfig> tasks;
  std::string out_dir = "out";
};

// Strict parser: unknown keys are hard errors, domain constraints are checked
// before any task starts.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization of (model, run); its FNV-1a hash names output files.
std::string canonical_spec(const ExperimentConfig& cfg);
std::uint64_t spec_hash(const ExperimentConfig& cfg);
std::string spec_hash_hex(const ExperimentConfig& cfg);

}  // namespace qarch::cli
