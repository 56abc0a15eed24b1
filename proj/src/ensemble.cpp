#include "dynrmt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <utility>

#include "dynrmt/error.hpp"
#include "dynrmt/manifest.hpp"
#include "dynrmt/rng.hpp"

namespace dynrmt {

namespace {
constexpr std::uint64_t kResampleStream = 0x59U;  // fresh-digit substream
constexpr std::uint64_t kGaussStream = 0x47U;
}  // namespace

int EnsembleConfig::default_window(int N) {
  const int dyn = static_cast<int>(std::ceil(3.0 * std::log2(double(N))));
  return std::max(53, dyn);
}

void EnsembleConfig::validate() {
  if (N < 2) throw ConfigError("N must be at least 2");
  if (W == 0) W = default_window(N);
  if (W < 1) throw ConfigError("dependence window W must be >= 1");
  if (precision < 53 || precision > 64)
    throw ConfigError("precision must lie in [53, 64] digits");
  if (!spec.mean_zero())
    throw ConfigError(
        "evaluation function must be mean-zero: coefficient c_0 must vanish");
  if (spec.max_frequency() == 0)
    throw ConfigError("evaluation function has no nonzero coefficients");
}

nlohmann::json EnsembleConfig::to_json() const {
  return nlohmann::json{{"N", N},
                        {"spec", spec.to_json()},
                        {"W", W},
                        {"seed", seed},
                        {"resampled", resampled},
                        {"precision", precision},
                        {"stride_inline", stride_inline}};
}

EnsembleConfig EnsembleConfig::from_json(const nlohmann::json& j) {
  EnsembleConfig cfg;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    cfg.N = j.at("N").get<int>();
    cfg.spec = FourierSpec::from_json(j.at("spec"));
    cfg.W = j.value("W", 0);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.resampled = j.value("resampled", false);
    cfg.precision = j.value("precision", 53);
    cfg.stride_inline = j.value("stride_inline", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

std::uint64_t EnsembleConfig::config_hash() const {
  return fnv1a(to_json().dump());
}

std::uint64_t EnsembleConfig::pair_hash() const {
  nlohmann::json j = to_json();
  j.erase("resampled");
  j.erase("W");
  return fnv1a(j.dump());
}

HermitianBlockMatrix::HermitianBlockMatrix(Eigen::MatrixXcd block)
    : block_(std::move(block)) {
  if (block_.rows() != block_.cols() || block_.rows() < 1)
    throw ConfigError("block must be square and nonempty");
}

cplx HermitianBlockMatrix::entry(int a, int b) const {
  const int n = block_dim();
  const bool a_up = a < n, b_up = b < n;
  if (a_up && !b_up) return block_(a, b - n);
  if (!a_up && b_up) return std::conj(block_(b, a - n));
  return {0.0, 0.0};
}

Eigen::MatrixXcd HermitianBlockMatrix::full() const {
  const int n = block_dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  h.block(0, n, n, n) = block_;
  h.block(n, 0, n, n) = block_.adjoint();
  return h;
}

double HermitianBlockMatrix::max_abs_entry() const {
  return block_.cwiseAbs().maxCoeff();
}

double HermitianBlockMatrix::frobenius_sq() const {
  return 2.0 * block_.squaredNorm();
}

namespace {

// Orbit position of block entry (i, j), 1-based.
inline std::int64_t stride_pos(const EnsembleConfig& cfg, int i, int j) {
  if (cfg.stride_inline)
    return static_cast<std::int64_t>(2 * cfg.N - 1) * i + j;
  return static_cast<std::int64_t>(2 * cfg.N) * (i - 1) + j;
}

void warn_if_inadmissible(const EnsembleConfig& cfg) {
  const Admissibility a = is_admissible(cfg.spec);
  if (!a.admissible)
    std::fprintf(stderr,
                 "warning: evaluation function is not admissible (%s); "
                 "building anyway\n",
                 a.reason.c_str());
}

std::int64_t orbit_length(const EnsembleConfig& cfg) {
  return 2 * static_cast<std::int64_t>(cfg.N) * cfg.N + cfg.precision;
}

template <typename ValueAt>
Eigen::MatrixXcd fill_block(const EnsembleConfig& cfg, ExecPolicy policy,
                            ValueAt&& value_at) {
  const int n = cfg.N;
  const double scale = 1.0 / std::sqrt(double(n));
  Eigen::MatrixXcd block(n, n);
  parallel_for(policy, n, [&](std::int64_t row) {
    const int i = static_cast<int>(row) + 1;
    for (int j = 1; j <= n; ++j) {
      const double x = value_at(stride_pos(cfg, i, j));
      block(i - 1, j - 1) = cfg.spec.evaluate(x) * scale;
    }
  });
  return block;
}

}  // namespace

HermitianBlockMatrix build_X(const EnsembleConfig& cfg, ExecPolicy policy) {
  EnsembleConfig c = cfg;
  c.validate();
  warn_if_inadmissible(c);
  const BitOrbit orbit(c.seed, orbit_length(c), policy);
  return HermitianBlockMatrix(fill_block(c, policy, [&](std::int64_t k) {
    return orbit.shift_value(k, c.precision);
  }));
}

HermitianBlockMatrix build_Y(const EnsembleConfig& cfg, ExecPolicy policy) {
  EnsembleConfig c = cfg;
  c.validate();
  warn_if_inadmissible(c);
  BitOrbit orbit(c.seed, orbit_length(c), policy);
  const std::int64_t count = 2 * static_cast<std::int64_t>(c.N) * c.N;
  const ResampledOrbit y(std::move(orbit), c.W, count,
                         derive_key(c.seed, kResampleStream));
  return HermitianBlockMatrix(fill_block(
      c, policy, [&](std::int64_t k) { return y.value(k, c.precision); }));
}

BandedToeplitz::BandedToeplitz(int n, int w, std::vector<cplx> symbol)
    : n_(n), w_(w), symbol_(std::move(symbol)) {
  if (n < 1) throw ConfigError("Toeplitz size must be >= 1");
  if (w < 0 || w >= static_cast<int>(symbol_.size()))
    throw ConfigError("band half-width inconsistent with symbol table");
}

cplx BandedToeplitz::symbol(int j) const {
  const int a = std::abs(j);
  if (a > w_) return {0.0, 0.0};
  return j >= 0 ? symbol_[a] : std::conj(symbol_[a]);
}

cplx BandedToeplitz::entry(int i, int j) const { return symbol(i - j); }

Eigen::MatrixXcd BandedToeplitz::dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - w_); j <= std::min(n_ - 1, i + w_); ++j)
      m(i, j) = symbol(i - j);
  return m;
}

BandedToeplitz build_phiN(const CorrelationData& data, int N, int W) {
  if (W > N) throw ConfigError("band exceeds matrix size");
  std::vector<cplx> sym(W + 1);
  for (int j = 0; j <= W; ++j) sym[j] = data.phi(j);
  return BandedToeplitz(N, W, std::move(sym));
}

BandedToeplitz build_psiN(const CorrelationData& data, int N, int W) {
  if (W > N) throw ConfigError("band exceeds matrix size");
  std::vector<cplx> sym(W + 1);
  for (int j = 0; j <= W; ++j) sym[j] = data.psi(j);
  return BandedToeplitz(N, W, std::move(sym));
}

std::vector<double> circulant_eigs(const CorrelationData& data, int N, int W) {
  if (2 * W >= N)
    throw ConfigError("circulant wrap-around needs 2W < N");
  std::vector<double> eigs(N);
  for (int k = 0; k < N; ++k) {
    double v = data.phi(0).real();
    for (int j = 1; j <= W; ++j) {
      const double a = 2.0 * std::numbers::pi * k * j / N;
      v += 2.0 * (data.phi(j) * cplx(std::cos(a), std::sin(a))).real();
    }
    eigs[k] = v;
  }
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

namespace {

// Banded lower Cholesky of a symmetric banded matrix given through an
// evaluation callback. Tiny negative pivots within tolerance are clamped to
// zero (positive semidefinite covariances are legitimate); anything below
// -tol aborts naming the offending leading minor.
class BandedCholesky {
 public:
  BandedCholesky(int n, int bw, const std::function<double(int, int)>& c)
      : n_(n), bw_(bw), l_(static_cast<std::size_t>(n) * (bw + 1), 0.0) {
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(c(i, i)));
    const double tol = 1e-10 * scale;
    for (int i = 0; i < n; ++i) {
      const int lo = std::max(0, i - bw);
      for (int j = lo; j <= i; ++j) {
        double s = c(i, j);
        for (int k = std::max(lo, j - bw); k < j; ++k)
          s -= at(i, k) * at(j, k);
        if (j < i) {
          const double d = at(j, j);
          if (d == 0.0 && std::abs(s) > tol)
            throw NumericalError(
                "covariance factorization failed: leading minor " +
                std::to_string(i + 1) + " is not positive semidefinite");
          set(i, j, d > 0.0 ? s / d : 0.0);
        } else {
          if (s < -tol)
            throw NumericalError(
                "covariance factorization failed: leading minor " +
                std::to_string(i + 1) + " is not positive semidefinite");
          set(i, i, std::sqrt(std::max(s, 0.0)));
        }
      }
    }
  }

  // w = L g for g of length n; only the banded part of L is stored.
  void apply(const std::vector<double>& g, std::vector<double>& w) const {
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int k = std::max(0, i - bw_); k <= i; ++k) s += at(i, k) * g[k];
      w[i] = s;
    }
  }

 private:
  double at(int i, int k) const {
    return l_[static_cast<std::size_t>(i) * (bw_ + 1) + (k - i + bw_)];
  }
  void set(int i, int k, double v) {
    l_[static_cast<std::size_t>(i) * (bw_ + 1) + (k - i + bw_)] = v;
  }
  int n_, bw_;
  std::vector<double> l_;
};

}  // namespace

HermitianBlockMatrix build_gaussian_comparison(const CorrelationData& data,
                                               int N, int W,
                                               std::uint64_t seed,
                                               ExecPolicy policy) {
  if (N < 1) throw ConfigError("N must be >= 1");
  const int band = std::min(W, N - 1);
  const bool with_psi = data.psi_norm() > 1e-12;

  // Joint covariance of the interleaved real vector (u_1, v_1, ..., u_N, v_N)
  // for one stationary complex row with covariance R(d) = phi_measured(d)
  // and pseudo-covariance P(d) = psi(d), both truncated at the band:
  //   E[u_j u_k] = (Re R + Re P)/2, E[v_j v_k] = (Re R - Re P)/2,
  //   E[u_j v_k] = (Im P - Im R)/2, E[v_j u_k] = (Im P + Im R)/2,
  // with R = R(k - j), P = P(|k - j|).
  auto cov = [&](int a, int b) -> double {
    const int j = a / 2, k = b / 2;
    if (std::abs(j - k) > band) return 0.0;
    const cplx r = data.phi_measured(k - j);
    const cplx p = with_psi ? data.psi(k - j) : cplx(0.0, 0.0);
    const bool ju = (a % 2 == 0), ku = (b % 2 == 0);
    if (ju && ku) return 0.5 * (r.real() + p.real());
    if (!ju && !ku) return 0.5 * (r.real() - p.real());
    if (ju && !ku) return 0.5 * (p.imag() - r.imag());
    return 0.5 * (p.imag() + r.imag());
  };

  const BandedCholesky chol(2 * N, 2 * band + 1, cov);
  const double scale = 1.0 / std::sqrt(double(N));

  Eigen::MatrixXcd block(N, N);
  parallel_for(policy, N, [&](std::int64_t row) {
    const CounterRng rng(derive_key(derive_key(seed, kGaussStream),
                                    static_cast<std::uint64_t>(row)));
    std::vector<double> g(2 * N), w(2 * N);
    for (int k = 0; k < 2 * N; ++k)
      g[k] = rng.normal(static_cast<std::uint64_t>(k));
    chol.apply(g, w);
    for (int j = 0; j < N; ++j)
      block(static_cast<int>(row), j) =
          cplx(w[2 * j], w[2 * j + 1]) * scale;
  });
  return HermitianBlockMatrix(std::move(block));
}

HermitianBlockMatrix ou_interpolate(const HermitianBlockMatrix& H0,
                                    const CorrelationData& data, double t,
                                    std::uint64_t seed, ExecPolicy policy) {
  if (t < 0.0 || std::isnan(t))
    throw ConfigError("flow time must be nonnegative");
  if (t == 0.0) return H0;
  const int n = H0.block_dim();
  const HermitianBlockMatrix g =
      build_gaussian_comparison(data, n, data.j_max(), seed, policy);
  if (std::isinf(t)) return g;
  const double keep = std::exp(-0.5 * t);
  const double mix = std::sqrt(1.0 - std::exp(-t));
  return HermitianBlockMatrix(keep * H0.block() + mix * g.block());
}

void write_matrix(const std::string& path, const HermitianBlockMatrix& H,
                  const nlohmann::json& sidecar) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const char magic[8] = {'D', 'Y', 'N', 'R', 'M', 'T', 'M', 'X'};
  out.write(magic, 8);
  const std::int64_t n = H.block_dim();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(H.block().data()),
            static_cast<std::streamsize>(sizeof(cplx) * n * n));
  if (!out) throw NumericalError("short write to " + path);

  nlohmann::json side = sidecar;
  side["dimension"] = 2 * n;
  side["block_dim"] = n;
  side["format"] = "column-major complex double";
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

HermitianBlockMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::string(magic, 8) != "DYNRMTMX")
    throw ConfigError(path + " is not a matrix export");
  std::int64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (n < 1 || n > (1 << 20)) throw ConfigError("corrupt matrix header");
  Eigen::MatrixXcd block(n, n);
  in.read(reinterpret_cast<char*>(block.data()),
          static_cast<std::streamsize>(sizeof(cplx) * n * n));
  if (!in) throw ConfigError("truncated matrix file " + path);
  return HermitianBlockMatrix(std::move(block));
}

}  // namespace dynrmt
