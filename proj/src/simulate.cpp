#include "qarch/simulate.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "qarch/fft.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary path format assumes a little-endian host");

namespace qarch::sim {

namespace {

constexpr std::uint32_t kSubstreamMain = 0;
constexpr std::uint32_t kSubstreamRedraw = 1;
constexpr std::uint32_t kSubstreamEta = 2;
constexpr std::uint32_t kSubstreamXi = 3;

std::size_t auto_block(std::size_t W) {
  // balance the O(L^2/2) in-block work against two length-~2W transforms
  const double n0 = static_cast<double>(fft::next_pow2(2 * W));
  const double target = std::sqrt(20.0 * n0 * std::log2(n0));
  std::size_t L = 64;
  while (L < static_cast<std::size_t>(target) && L < W) L <<= 1;
  return std::min(L, W);
}

void run_direct(double a, const model::VolatilityMap& q, std::span<const double> b,
                std::span<const double> z, std::vector<double>& r, std::vector<double>& x) {
  const std::size_t total = z.size();
  const std::size_t W = b.size();
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t wlen = std::min(W, i);
    double s = 0.0;
    for (std::size_t j = 1; j <= wlen; ++j) s += b[j - 1] * r[i - j];
    x[i] = s;
    const double sig = q(a + s);
    r[i] = z[i] * sig;
  }
}

// Blocked variant: contributions of r values before the current chunk come
// from one FFT convolution per chunk, the within-chunk recursion stays
// sequential.  Same sums in a different order; agreement with run_direct is
// pinned at 1e-10 by tests.
void run_blocked(double a, const model::VolatilityMap& q, std::span<const double> b,
                 std::span<const double> z, std::vector<double>& r, std::vector<double>& x,
                 std::size_t L) {
  const std::size_t total = z.size();
  const std::size_t W = b.size();
  if (L == 0) L = auto_block(W);
  L = std::min(L, W);
  if (L < 2) {
    run_direct(a, q, b, z, r, x);
    return;
  }
  const std::size_t N = fft::next_pow2(W + L);
  std::vector<std::complex<double>> fb(N), fs(N);
  for (std::size_t i = 0; i < W; ++i) fb[i] = b[i];
  fft::transform(fb, false);
  std::vector<double> cross(L, 0.0);
  for (std::size_t T = 0; T < total; T += L) {
    const std::size_t bl = std::min(L, total - T);
    if (T == 0) {
      std::fill(cross.begin(), cross.begin() + bl, 0.0);
    } else {
      // history segment S[m] = r[T-W+m], zero-padded before the start
      std::fill(fs.begin(), fs.end(), std::complex<double>(0.0, 0.0));
      const std::size_t m0 = (T >= W) ? 0 : W - T;
      for (std::size_t m = m0; m < W; ++m) fs[m] = r[T - W + m];
      fft::transform(fs, false);
      for (std::size_t i = 0; i < N; ++i) fs[i] *= fb[i];
      fft::transform(fs, true);
      for (std::size_t u = 0; u < bl; ++u) cross[u] = fs[W - 1 + u].real();
    }
    for (std::size_t u = 0; u < bl; ++u) {
      const std::size_t i = T + u;
      double s = cross[u];
      for (std::size_t j = 1; j <= u; ++j) s += b[j - 1] * r[i - j];
      x[i] = s;
      const double sig = q(a + s);
      r[i] = z[i] * sig;
    }
  }
}

Path run(const model::ModelSpec& spec, const PathConfig& cfg, std::span<const double> z) {
  const auto b_full = coeffs::materialize(spec.coefficients);
  if (cfg.window == 0 || cfg.window > b_full.size())
    throw std::invalid_argument("simulate: window must be in [1, materialized J]");
  if (cfg.n == 0) throw std::invalid_argument("simulate: n must be >= 1");
  std::span<const double> b(b_full.data(), cfg.window);
  const std::size_t total = cfg.burn_in + cfg.n;
  if (z.size() != total)
    throw std::invalid_argument("simulate: innovation array must have length burn_in + n");
  std::vector<double> r(total), x(total);
  if (cfg.fast_conv)
    run_blocked(spec.a, spec.q, b, z, r, x, cfg.block);
  else
    run_direct(spec.a, spec.q, b, z, r, x);
  Path p;
  p.config = cfg;
  p.r.assign(r.begin() + cfg.burn_in, r.end());
  p.x.assign(x.begin() + cfg.burn_in, x.end());
  p.sigma.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) p.sigma[i] = spec.q(spec.a + p.x[i]);
  return p;
}

std::vector<double> draw_innovations(const model::ModelSpec& spec, const PathConfig& cfg) {
  rng::Stream stream(cfg.seed, cfg.replicate, kSubstreamMain);
  const std::size_t total = cfg.burn_in + cfg.n;
  std::vector<double> z(total);
  const auto burn = static_cast<std::int64_t>(cfg.burn_in);
  for (std::size_t i = 0; i < total; ++i)
    z[i] = spec.innovations.draw(stream, static_cast<std::int64_t>(i) - burn);
  return z;
}

}  // namespace

std::vector<std::string> check_config(const model::ModelSpec& spec, const PathConfig& cfg) {
  std::vector<std::string> warnings;
  if (cfg.burn_in < cfg.window)
    warnings.push_back("burn_in " + std::to_string(cfg.burn_in) + " below window " +
                       std::to_string(cfg.window) + "; early retained values see a short history");
  const auto rep = model::contraction_margin(spec, 2.0);
  if (rep.verdict == model::Verdict::NotExists)
    warnings.push_back("no stationary L2 solution (sharp criterion); path may diverge");
  else if (rep.verdict == model::Verdict::Inconclusive)
    warnings.push_back("L2 contraction margin " + std::to_string(rep.margin) +
                       " >= 1; stationarity not guaranteed");
  return warnings;
}

Path simulate_path(const model::ModelSpec& spec, const PathConfig& cfg) {
  return run(spec, cfg, draw_innovations(spec, cfg));
}

Path simulate_path_with(const model::ModelSpec& spec, const PathConfig& cfg,
                        std::span<const double> innovations) {
  return run(spec, cfg, innovations);
}

CoupledPaths simulate_coupled(const model::ModelSpec& spec, const PathConfig& cfg,
                              CouplingKind kind) {
  auto z = draw_innovations(spec, cfg);
  std::vector<double> z_shadow(z);
  rng::Stream redraw(cfg.seed, cfg.replicate, kSubstreamRedraw);
  if (kind == CouplingKind::SingleSwap) {
    z_shadow[cfg.burn_in] = spec.innovations.draw(redraw, 0);
  } else {
    const auto burn = static_cast<std::int64_t>(cfg.burn_in);
    for (std::size_t i = 0; i < cfg.burn_in; ++i)
      z_shadow[i] = spec.innovations.draw(redraw, static_cast<std::int64_t>(i) - burn);
  }
  CoupledPaths cp;
  cp.kind = kind;
  cp.primary = run(spec, cfg, z);
  cp.shadow = run(spec, cfg, z_shadow);
  return cp;
}

double volterra_larch(const model::ModelSpec& spec, std::size_t t, std::size_t K,
                      std::size_t W, std::span<const double> innovations,
                      std::size_t burn_in) {
  if (spec.q.kind() != model::QKind::Linear)
    throw std::invalid_argument("volterra_larch: the Volterra series is specific to linear Q");
  if (K < 1) throw std::invalid_argument("volterra_larch: K must be >= 1");
  const auto b_full = coeffs::materialize(spec.coefficients);
  if (W == 0 || W > b_full.size())
    throw std::invalid_argument("volterra_larch: W must be in [1, materialized J]");
  const std::size_t idx = burn_in + t;
  if (idx >= innovations.size())
    throw std::invalid_argument("volterra_larch: t outside the innovation range");
  // Picard iteration from X = 0 accumulates exactly the Volterra orders 1..K.
  const std::size_t total = idx + 1;
  std::vector<double> prev(total, 0.0), cur(total, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < total; ++i) {
      const std::size_t wlen = std::min(W, i);
      double s = 0.0;
      for (std::size_t j = 1; j <= wlen; ++j)
        s += b_full[j - 1] * innovations[i - j] * (spec.a + prev[i - j]);
      cur[i] = s;
    }
    std::swap(prev, cur);
  }
  return prev[idx];
}

std::vector<double> simulate_rcar1(const RcAr1SimSpec& spec, const PathConfig& cfg) {
  if (!(spec.rho >= -1.0 && spec.rho <= 1.0))
    throw std::invalid_argument("simulate_rcar1: rho must lie in [-1, 1]");
  if (cfg.n == 0) throw std::invalid_argument("simulate_rcar1: n must be >= 1");
  rng::Stream eta_stream(cfg.seed, cfg.replicate, kSubstreamEta);
  rng::Stream xi_stream(cfg.seed, cfg.replicate, kSubstreamXi);
  const double s = std::sqrt(1.0 - spec.rho * spec.rho);
  const std::size_t total = cfg.burn_in + cfg.n;
  const auto burn = static_cast<std::int64_t>(cfg.burn_in);
  std::vector<double> out(cfg.n);
  double prev = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const std::int64_t time = static_cast<std::int64_t>(i) - burn;
    const double eta = spec.eta.draw(eta_stream, time);
    const double xi = spec.xi.draw(xi_stream, time);
    const double eps = spec.rho * eta + s * xi;
    prev = spec.kappa * eps + spec.b * eta * prev;
    if (i >= cfg.burn_in) out[i - cfg.burn_in] = prev;
  }
  return out;
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_csv(const Path& p, std::ostream& os) {
  os << "# qarch path v1\n";
  os << "# n=" << p.config.n << " burn_in=" << p.config.burn_in
     << " window=" << p.config.window << " seed=" << p.config.seed
     << " replicate=" << p.config.replicate << " fast_conv=" << (p.config.fast_conv ? 1 : 0)
     << " block=" << p.config.block << "\n";
  os << "t,r,x,sigma\n";
  for (std::size_t t = 0; t < p.r.size(); ++t) {
    os << t << ',';
    put(os, p.r[t]);
    os << ',';
    put(os, p.x[t]);
    os << ',';
    put(os, p.sigma[t]);
    os << '\n';
  }
}

Path read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "# qarch path v1")
    throw std::runtime_error("read_csv: bad magic line");
  Path p;
  if (!std::getline(is, line)) throw std::runtime_error("read_csv: missing config line");
  {
    unsigned long long n = 0, burn = 0, window = 0, seed = 0, block = 0;
    unsigned replicate = 0;
    int fast = 0;
    if (std::sscanf(line.c_str(),
                    "# n=%llu burn_in=%llu window=%llu seed=%llu replicate=%u fast_conv=%d block=%llu",
                    &n, &burn, &window, &seed, &replicate, &fast, &block) != 7)
      throw std::runtime_error("read_csv: bad config line");
    p.config.n = n;
    p.config.burn_in = burn;
    p.config.window = window;
    p.config.seed = seed;
    p.config.replicate = replicate;
    p.config.fast_conv = fast != 0;
    p.config.block = block;
  }
  if (!std::getline(is, line) || line != "t,r,x,sigma")
    throw std::runtime_error("read_csv: missing header row");
  p.r.reserve(p.config.n);
  p.x.reserve(p.config.n);
  p.sigma.reserve(p.config.n);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const char* c = line.c_str();
    char* end = nullptr;
    std::strtoull(c, &end, 10);
    if (*end != ',') throw std::runtime_error("read_csv: malformed row");
    double v[3];
    for (int k = 0; k < 3; ++k) {
      c = end + 1;
      v[k] = std::strtod(c, &end);
      if (k < 2 && *end != ',') throw std::runtime_error("read_csv: malformed row");
    }
    p.r.push_back(v[0]);
    p.x.push_back(v[1]);
    p.sigma.push_back(v[2]);
  }
  if (p.r.size() != p.config.n) throw std::runtime_error("read_csv: row count mismatch");
  return p;
}

namespace {
constexpr char kBinaryMagic[8] = {'Q', 'A', 'P', 'A', 'T', 'H', '0', '1'};
}

void write_binary(const Path& p, std::ostream& os) {
  os.write(kBinaryMagic, sizeof kBinaryMagic);
  const std::uint64_t head[6] = {p.config.n,    p.config.burn_in, p.config.window,
                                 p.config.seed, p.config.block,
                                 (static_cast<std::uint64_t>(p.config.replicate) << 1) |
                                     (p.config.fast_conv ? 1u : 0u)};
  os.write(reinterpret_cast<const char*>(head), sizeof head);
  auto dump = [&](const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  dump(p.r);
  dump(p.x);
  dump(p.sigma);
}

Path read_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kBinaryMagic, sizeof magic) != 0)
    throw std::runtime_error("read_binary: bad magic");
  std::uint64_t head[6];
  is.read(reinterpret_cast<char*>(head), sizeof head);
  if (!is) throw std::runtime_error("read_binary: truncated header");
  Path p;
  p.config.n = head[0];
  p.config.burn_in = head[1];
  p.config.window = head[2];
  p.config.seed = head[3];
  p.config.block = head[4];
  p.config.replicate = static_cast<std::uint32_t>(head[5] >> 1);
  p.config.fast_conv = (head[5] & 1u) != 0;
  auto load = [&](std::vector<double>& v) {
    v.resize(p.config.n);
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!is) throw std::runtime_error("read_binary: truncated data");
  };
  load(p.r);
  load(p.x);
  load(p.sigma);
  return p;
}

}  // namespace qarch::sim
