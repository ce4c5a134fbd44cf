#include "qarch/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace qarch::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

const json& need(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing required key \"" + key + "\"");
  return *it;
}

double get_num(const json& obj, const std::string& where, const char* key) {
  const json& v = need(obj, where, key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double get_num_or(const json& obj, const std::string& where, const char* key, double dflt) {
  if (!obj.contains(key)) return dflt;
  return get_num(obj, where, key);
}

std::size_t get_uint(const json& obj, const std::string& where, const char* key) {
  const json& v = need(obj, where, key);
  if (!v.is_number_unsigned())
    throw ConfigError(where + "." + key + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

std::size_t get_uint_or(const json& obj, const std::string& where, const char* key,
                        std::size_t dflt) {
  if (!obj.contains(key)) return dflt;
  return get_uint(obj, where, key);
}

bool get_bool_or(const json& obj, const std::string& where, const char* key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& where, const char* key) {
  const json& v = need(obj, where, key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string get_str_or(const json& obj, const std::string& where, const char* key,
                       const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  return get_str(obj, where, key);
}

model::InnovationSpec parse_innovations(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  check_keys(obj, where, {"family", "nu"});
  const std::string fam = get_str(obj, where, "family");
  try {
    if (fam == "rademacher") return model::InnovationSpec::rademacher();
    if (fam == "gaussian") return model::InnovationSpec::gaussian();
    if (fam == "exponential") return model::InnovationSpec::centered_exponential();
    if (fam == "uniform") return model::InnovationSpec::uniform();
    if (fam == "student_t") return model::InnovationSpec::student_t(get_num(obj, where, "nu"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ".family: unknown family \"" + fam +
                    "\" (rademacher|gaussian|exponential|student_t|uniform)");
}

coeffs::CoefficientSpec parse_coeffs(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::string variant = get_str(obj, where, "variant");
  try {
    if (variant == "explicit") {
      check_keys(obj, where, {"variant", "values", "cutoff"});
      const json& vals = need(obj, where, "values");
      if (!vals.is_array()) throw ConfigError(where + ".values: expected an array");
      std::vector<double> v;
      for (const auto& e : vals) {
        if (!e.is_number()) throw ConfigError(where + ".values: expected numbers");
        v.push_back(e.get<double>());
      }
      const std::size_t cutoff = get_uint_or(obj, where, "cutoff", std::max<std::size_t>(v.size(), 1));
      return coeffs::CoefficientSpec::explicit_list(std::move(v), cutoff);
    }
    if (variant == "power_law") {
      check_keys(obj, where, {"variant", "beta", "d", "cutoff"});
      return coeffs::CoefficientSpec::power_law(get_num(obj, where, "beta"),
                                                get_num(obj, where, "d"),
                                                get_uint(obj, where, "cutoff"));
    }
    if (variant == "frac_integrated") {
      check_keys(obj, where, {"variant", "b", "d", "cutoff"});
      return coeffs::CoefficientSpec::frac_integrated(get_num(obj, where, "b"),
                                                      get_num(obj, where, "d"),
                                                      get_uint(obj, where, "cutoff"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ".variant: unknown variant \"" + variant +
                    "\" (explicit|power_law|frac_integrated)");
}

model::VolatilityMap parse_q(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::string variant = get_str(obj, where, "variant");
  try {
    if (variant == "linear") {
      check_keys(obj, where, {"variant"});
      return model::VolatilityMap::linear();
    }
    if (variant == "abs") {
      check_keys(obj, where, {"variant"});
      return model::VolatilityMap::abs();
    }
    if (variant == "quadratic") {
      check_keys(obj, where, {"variant", "c1", "c2"});
      return model::VolatilityMap::quadratic(get_num(obj, where, "c1"),
                                             get_num_or(obj, where, "c2", 1.0));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ".variant: unknown variant \"" + variant +
                    "\" (linear|quadratic|abs)");
}

std::vector<std::size_t> parse_uints(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<std::size_t> out;
  for (const auto& e : arr) {
    if (!e.is_number_unsigned()) throw ConfigError(where + ": expected non-negative integers");
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

TaskConfig parse_task(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  TaskConfig t;
  const std::string type = get_str(obj, where, "type");
  if (type == "check") {
    check_keys(obj, where, {"type", "p_values"});
    t.type = TaskType::Check;
    if (obj.contains("p_values")) {
      const json& arr = obj.at("p_values");
      if (!arr.is_array()) throw ConfigError(where + ".p_values: expected an array");
      t.p_values.clear();
      for (const auto& e : arr) {
        if (!e.is_number() || !(e.get<double>() > 0.0))
          throw ConfigError(where + ".p_values: expected numbers > 0");
        t.p_values.push_back(e.get<double>());
      }
      if (t.p_values.empty()) throw ConfigError(where + ".p_values: must not be empty");
    }
  } else if (type == "simulate") {
    check_keys(obj, where, {"type", "format"});
    t.type = TaskType::Simulate;
    t.format = get_str_or(obj, where, "format", "csv");
    if (t.format != "csv" && t.format != "binary" && t.format != "both")
      throw ConfigError(where + ".format: expected csv|binary|both");
  } else if (type == "moments") {
    check_keys(obj, where, {"type", "t_max", "compare"});
    t.type = TaskType::Moments;
    t.t_max = get_uint_or(obj, where, "t_max", 10);
    t.compare = get_bool_or(obj, where, "compare", false);
  } else if (type == "leverage") {
    check_keys(obj, where, {"type", "J", "tol", "j_max", "compare"});
    t.type = TaskType::Leverage;
    t.solver_J = get_uint_or(obj, where, "J", 0);  // 0 = tail_sum(b,2,J) < tol^2 rule
    t.tol = get_num_or(obj, where, "tol", 1e-12);
    if (!(t.tol > 0.0)) throw ConfigError(where + ".tol: must be > 0");
    t.j_max = get_uint_or(obj, where, "j_max", 5);
    t.compare = get_bool_or(obj, where, "compare", false);
  } else if (type == "longmem") {
    check_keys(obj, where,
               {"type", "lag_min", "lag_max", "lengths", "psv_replicates", "psv_target"});
    t.type = TaskType::LongMem;
    t.lag_min = get_uint_or(obj, where, "lag_min", 10);
    t.lag_max = get_uint_or(obj, where, "lag_max", 0);
    if (obj.contains("lengths")) t.lengths = parse_uints(obj.at("lengths"), where + ".lengths");
    t.psv_replicates = get_uint_or(obj, where, "psv_replicates", 200);
    t.psv_target = get_str_or(obj, where, "psv_target", "x");
    if (t.psv_target != "x" && t.psv_target != "r2" && t.psv_target != "both")
      throw ConfigError(where + ".psv_target: expected x|r2|both");
  } else if (type == "couple") {
    check_keys(obj, where, {"type", "kind", "p", "target", "k_values"});
    t.type = TaskType::Couple;
    t.kind = get_str_or(obj, where, "kind", "single_swap");
    if (t.kind != "single_swap" && t.kind != "past_swap")
      throw ConfigError(where + ".kind: expected single_swap|past_swap");
    t.p = get_num_or(obj, where, "p", 2.0);
    if (!(t.p >= 1.0)) throw ConfigError(where + ".p: must be >= 1");
    t.target = get_str_or(obj, where, "target", "x");
    if (t.target != "x" && t.target != "r")
      throw ConfigError(where + ".target: expected x|r");
    if (obj.contains("k_values")) t.k_values = parse_uints(obj.at("k_values"), where + ".k_values");
  } else if (type == "signtest") {
    check_keys(obj, where, {"type", "quantile", "twin", "eta", "xi"});
    t.type = TaskType::SignTest;
    t.quantile = get_num_or(obj, where, "quantile", 0.99);
    if (!(t.quantile > 0.0 && t.quantile < 1.0))
      throw ConfigError(where + ".quantile: must lie in (0, 1)");
    t.twin = get_bool_or(obj, where, "twin", false);
    if (obj.contains("eta")) t.eta = parse_innovations(obj.at("eta"), where + ".eta");
    if (obj.contains("xi")) t.xi = parse_innovations(obj.at("xi"), where + ".xi");
  } else {
    throw ConfigError(where + ".type: unknown task type \"" + type +
                      "\" (check|simulate|moments|leverage|longmem|couple|signtest)");
  }
  return t;
}

}  // namespace

const char* task_name(TaskType t) {
  switch (t) {
    case TaskType::Check: return "check";
    case TaskType::Simulate: return "simulate";
    case TaskType::Moments: return "moments";
    case TaskType::Leverage: return "leverage";
    case TaskType::LongMem: return "longmem";
    case TaskType::Couple: return "couple";
    case TaskType::SignTest: return "signtest";
  }
  return "unknown";
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "config", {"model", "run", "tasks", "out_dir"});

  ExperimentConfig cfg;
  const json& m = need(root, "config", "model");
  if (!m.is_object()) throw ConfigError("model: expected an object");
  check_keys(m, "model", {"a", "q", "coeffs", "innovations"});
  cfg.model.a = get_num(m, "model", "a");
  cfg.model.q = parse_q(need(m, "model", "q"), "model.q");
  cfg.model.coefficients = parse_coeffs(need(m, "model", "coeffs"), "model.coeffs");
  cfg.model.innovations = parse_innovations(need(m, "model", "innovations"), "model.innovations");

  const json& r = need(root, "config", "run");
  if (!r.is_object()) throw ConfigError("run: expected an object");
  check_keys(r, "run", {"n", "burn_in", "window", "seed", "replicates", "threads", "fast_conv",
                        "block"});
  cfg.run.n = get_uint(r, "run", "n");
  if (cfg.run.n < 1) throw ConfigError("run.n: must be >= 1");
  cfg.run.burn_in = get_uint_or(r, "run", "burn_in", 1000);
  cfg.run.window = get_uint_or(r, "run", "window", 0);
  if (cfg.run.window == 0) cfg.run.window = cfg.model.coefficients.cutoff;
  if (cfg.run.window > cfg.model.coefficients.cutoff)
    throw ConfigError("run.window: exceeds the coefficient cutoff " +
                      std::to_string(cfg.model.coefficients.cutoff));
  cfg.run.seed = get_uint_or(r, "run", "seed", 1);
  cfg.run.replicates = get_uint_or(r, "run", "replicates", 1);
  if (cfg.run.replicates < 1) throw ConfigError("run.replicates: must be >= 1");
  cfg.run.threads = static_cast<unsigned>(get_uint_or(r, "run", "threads", 0));
  cfg.run.fast_conv = get_bool_or(r, "run", "fast_conv", false);
  cfg.run.block = get_uint_or(r, "run", "block", 0);

  const json& tasks = need(root, "config", "tasks");
  if (!tasks.is_array()) throw ConfigError("tasks: expected an array");
  for (std::size_t i = 0; i < tasks.size(); ++i)
    cfg.tasks.push_back(parse_task(tasks[i], "tasks[" + std::to_string(i) + "]"));

  cfg.out_dir = get_str_or(root, "config", "out_dir", "out");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_spec(const ExperimentConfig& cfg) {
  json j;
  j["a"] = cfg.model.a;
  switch (cfg.model.q.kind()) {
    case model::QKind::Linear: j["q"] = {{"variant", "linear"}}; break;
    case model::QKind::Abs: j["q"] = {{"variant", "abs"}}; break;
    case model::QKind::Quadratic:
      j["q"] = {{"variant", "quadratic"}, {"c1", cfg.model.q.c1()}, {"c2", cfg.model.q.c2()}};
      break;
  }
  const auto& co = cfg.model.coefficients;
  switch (co.kind) {
    case coeffs::CoeffKind::Explicit:
      j["coeffs"] = {{"variant", "explicit"}, {"values", co.values}, {"cutoff", co.cutoff}};
      break;
    case coeffs::CoeffKind::PowerLaw:
      j["coeffs"] = {{"variant", "power_law"}, {"beta", co.beta}, {"d", co.d}, {"cutoff", co.cutoff}};
      break;
    case coeffs::CoeffKind::FracIntegrated:
      j["coeffs"] = {{"variant", "frac_integrated"}, {"b", co.b}, {"d", co.d}, {"cutoff", co.cutoff}};
      break;
  }
  switch (cfg.model.innovations.family) {
    case model::InnovationFamily::Rademacher: j["innovations"] = {{"family", "rademacher"}}; break;
    case model::InnovationFamily::Gaussian: j["innovations"] = {{"family", "gaussian"}}; break;
    case model::InnovationFamily::CenteredExponential:
      j["innovations"] = {{"family", "exponential"}};
      break;
    case model::InnovationFamily::StudentT:
      j["innovations"] = {{"family", "student_t"}, {"nu", cfg.model.innovations.nu}};
      break;
    case model::InnovationFamily::Uniform: j["innovations"] = {{"family", "uniform"}}; break;
  }
  j["run"] = {{"n", cfg.run.n},         {"burn_in", cfg.run.burn_in},
              {"window", cfg.run.window}, {"seed", cfg.run.seed},
              {"replicates", cfg.run.replicates}, {"fast_conv", cfg.run.fast_conv},
              {"block", cfg.run.block}};
  return j.dump();
}

std::uint64_t spec_hash(const ExperimentConfig& cfg) {
  const std::string s = canonical_spec(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string spec_hash_hex(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(spec_hash(cfg)));
  return buf;
}

}  // namespace qarch::cli
