#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qarch/model.hpp"

namespace qarch::sim {

// Truncated recursion with zero initial condition: the run starts at time
// -burn_in with r_s = 0 for s <= -burn_in, the first n retained entries
// correspond to times 0..n-1.  Identical (seed, replicate, spec, config)
// reproduce bit-identical paths.
struct PathConfig {
  std::size_t n = 0;
  std::size_t burn_in = 0;
  std::size_t window = 0;  // W, coefficient truncation; must be <= materialized J
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;
  bool fast_conv = false;   // blocked FFT cross-contributions, equal to direct within 1e-10
  std::size_t block = 0;    // blocked path chunk length, 0 = auto
};

struct Path {
  std::vector<double> r;      // r_t = zeta_t sigma_t
  std::vector<double> x;      // X_t = sum_{j<=min(W,t+burn_in)} b_j r_{t-j}
  std::vector<double> sigma;  // sigma_t = Q(a + X_t)
  PathConfig config;
};

enum class CouplingKind { SingleSwap, PastSwap };

// SingleSwap: shadow shares every innovation except time 0 (redrawn).
// PastSwap: shadow redraws every time < 0 and shares all times >= 0.
struct CoupledPaths {
  Path primary;
  Path shadow;
  CouplingKind kind = CouplingKind::SingleSwap;
};

// Non-fatal diagnostics: burn-in below window, non-admissible spec.
std::vector<std::string> check_config(const model::ModelSpec& spec, const PathConfig& cfg);

Path simulate_path(const model::ModelSpec& spec, const PathConfig& cfg);

// Same recursion driven by a pinned innovation array of length burn_in + n;
// innovations[i] is the draw at time i - burn_in.
Path simulate_path_with(const model::ModelSpec& spec, const PathConfig& cfg,
                        std::span<const double> innovations);

CoupledPaths simulate_coupled(const model::ModelSpec& spec, const PathConfig& cfg,
                              CouplingKind kind);

// Volterra-series partial sum for the LARCH case (linear Q): orders 1..K of
// the expansion of X at retained time t, chains windowed at W.  Converges to
// the recursive X_t as K and W grow; exact once K >= t + burn_in.
double volterra_larch(const model::ModelSpec& spec, std::size_t t, std::size_t K,
                      std::size_t W, std::span<const double> innovations,
                      std::size_t burn_in);

// Random-coefficient AR(1) twin r~_t = kappa eps_t + b eta_t r~_{t-1} with
// eps = rho eta + sqrt(1-rho^2) xi built by linear mixing.
struct RcAr1SimSpec {
  double kappa = 0.0;
  double b = 0.0;
  double rho = 0.0;
  model::InnovationSpec eta;
  model::InnovationSpec xi;
};

std::vector<double> simulate_rcar1(const RcAr1SimSpec& spec, const PathConfig& cfg);

// Columnar text and binary serializations; both round-trip bit-exactly.
void write_csv(const Path& p, std::ostream& os);
Path read_csv(std::istream& is);
void write_binary(const Path& p, std::ostream& os);
Path read_binary(std::istream& is);

}  // namespace qarch::sim
