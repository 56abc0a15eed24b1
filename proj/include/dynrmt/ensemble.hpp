#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>

#include "dynrmt/evalfn.hpp"
#include "dynrmt/orbit.hpp"
#include "dynrmt/parallel.hpp"
#include "json.hpp"

namespace dynrmt {

struct EnsembleConfig {
  int N = 0;                 // matrix half-dimension, >= 2
  FourierSpec spec;          // evaluation function
  int W = 0;                 // dependence window, >= 1 (0 = default_window(N))
  std::uint64_t seed = 0;    // orbit seed
  bool resampled = false;    // build Y instead of X
  int precision = 53;        // digit count used when evaluating orbit points
  bool stride_inline = false;  // alternative row stride (see build_X)

  static int default_window(int N);  // max(53, ceil(3 log2 N))

  /// Throws ConfigError on violated invariants; fills W if left at 0.
  void validate();

  nlohmann::json to_json() const;
  static EnsembleConfig from_json(const nlohmann::json& j);

  std::uint64_t config_hash() const;
  /// Hash over everything except the resampled flag and window; identifies
  /// an (X, Y) comparison pair sharing seed and layout.
  std::uint64_t pair_hash() const;
};

/// 2N x 2N Hermitian matrix [[0, B], [B^dagger, 0]], stored as its N x N
/// off-diagonal block. Hermiticity is a property of the representation, not
/// of floating-point luck. Immutable after construction.
class HermitianBlockMatrix {
 public:
  explicit HermitianBlockMatrix(Eigen::MatrixXcd block);

  int block_dim() const { return static_cast<int>(block_.rows()); }
  int dim() const { return 2 * block_dim(); }
  const Eigen::MatrixXcd& block() const { return block_; }

  /// Entry of the full 2N x 2N matrix, 0-based.
  cplx entry(int a, int b) const;
  Eigen::MatrixXcd full() const;
  double max_abs_entry() const;
  double frobenius_sq() const;  // = sum lambda^2 of the Hermitization

 private:
  Eigen::MatrixXcd block_;
};

/// Dynamically defined matrix: block entry (i,j), 1-based, is
/// f(T^{s(i,j)} x) / sqrt(N) with the row stride
///   s(i,j) = 2N(i-1) + j        (default; row i uses shifts
///                                2N(i-1)+1 .. 2N(i-1)+N, then N steps
///                                are skipped before the next row)
///   s(i,j) = (2N-1) i + j       (stride_inline variant, kept for
///                                comparison; the two layouts disagree
///                                and are not interchangeable).
/// Inadmissible specs get a warning on stderr but still build, so failed
/// admissibility can be explored experimentally.
HermitianBlockMatrix build_X(const EnsembleConfig& cfg,
                             ExecPolicy policy = ExecPolicy::parallel);

/// Same layout with the resampled orbit values y_k in place of T^k x.
/// With W >= precision this equals build_X entrywise (bit-identical).
HermitianBlockMatrix build_Y(const EnsembleConfig& cfg,
                             ExecPolicy policy = ExecPolicy::parallel);

/// Banded Hermitian Toeplitz matrix with symbol phi:
/// entries phi(i-j) for |i-j| <= band half-width w, zero beyond.
class BandedToeplitz {
 public:
  BandedToeplitz(int n, int w, std::vector<cplx> symbol);  // symbol[j], j>=0

  int size() const { return n_; }
  int band() const { return w_; }
  cplx symbol(int j) const;  // phi(j), Hermitian symmetry for j < 0
  cplx entry(int i, int j) const;
  Eigen::MatrixXcd dense() const;

 private:
  int n_, w_;
  std::vector<cplx> symbol_;
};

BandedToeplitz build_phiN(const CorrelationData& data, int N, int W);
BandedToeplitz build_psiN(const CorrelationData& data, int N, int W);

/// Eigenvalues of the circulant wrap-around of build_phiN(data, N, W):
///   e~_k = sum_{|j| <= W} phi(j) e^{2 pi i (k/N) j},  k = 0..N-1,
/// returned sorted ascending. The wrap-around differs from the banded
/// Toeplitz by a rank <= 2W correction, which is what makes interlacing
/// arguments against these explicit values work. Requires 2W < N.
std::vector<double> circulant_eigs(const CorrelationData& data, int N, int W);

/// Gaussian matrix with the same block correlation structure as the
/// dynamical ensemble: rows of the block are independent, each row is a
/// stationary complex Gaussian process with covariance phi_measured and
/// pseudo-covariance psi, both truncated at lag W, scaled by 1/sqrt(N).
/// Realized by a banded Cholesky factorization of the joint (Re, Im)
/// covariance; the factorization failure (if the truncated covariance is
/// not PSD within tolerance) names the offending minor.
HermitianBlockMatrix build_gaussian_comparison(
    const CorrelationData& data, int N, int W, std::uint64_t seed,
    ExecPolicy policy = ExecPolicy::parallel);

/// Endpoint of the Ornstein-Uhlenbeck matrix flow started at H0, exact in
/// law: H(t) = e^{-t/2} H0 + sqrt(1 - e^{-t}) G with G an independent
/// Gaussian comparison matrix. t = +infinity yields G itself. No SDE
/// stepping is involved, so there is no discretization error to track.
/// The comparison band is data.j_max().
HermitianBlockMatrix ou_interpolate(const HermitianBlockMatrix& H0,
                                    const CorrelationData& data, double t,
                                    std::uint64_t seed,
                                    ExecPolicy policy = ExecPolicy::parallel);

/// Binary export: dimension header plus the column-major complex-double
/// block, with a JSON sidecar (path + ".json") carrying dimension, seed and
/// config hash for reproducibility audits.
void write_matrix(const std::string& path, const HermitianBlockMatrix& H,
                  const nlohmann::json& sidecar);
HermitianBlockMatrix read_matrix(const std::string& path);

}  // namespace dynrmt
