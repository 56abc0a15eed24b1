#include "dynrmt/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "dynrmt/error.hpp"
#include "dynrmt/manifest.hpp"

namespace dynrmt {

Spectrum decompose(const HermitianBlockMatrix& H, bool want_vectors) {
  const int n = H.block_dim();
  Spectrum out;
  if (!want_vectors) {
    // Chiral structure: eigenvalues are +-singular values of the block, and
    // the squared singular values are the eigenvalues of B^dagger B. The
    // +-pairing is exact by construction this way.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        H.block().adjoint() * H.block(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("eigensolver failed on block normal matrix");
    out.eigenvalues.resize(2 * n);
    for (int i = 0; i < n; ++i) {
      const double s = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
      out.eigenvalues(n + i) = s;        // ascending sigma
      out.eigenvalues(n - 1 - i) = -s;   // mirrored negative half
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.full());
  if (es.info() != Eigen::Success)
    throw NumericalError("eigensolver failed on Hermitization");
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  return out;
}

Spectrum decompose_dense(const Eigen::MatrixXcd& H, bool want_vectors) {
  if (H.rows() != H.cols()) throw ConfigError("matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      H, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigensolver failed");
  Spectrum out;
  out.eigenvalues = es.eigenvalues();
  if (want_vectors) out.eigenvectors = es.eigenvectors();
  return out;
}

cplx stieltjes(const Spectrum& spec, cplx z) {
  if (z.imag() <= 0.0)
    throw ConfigError("Stieltjes transform needs Im z > 0");
  cplx s(0.0, 0.0);
  for (int i = 0; i < spec.dim(); ++i)
    s += 1.0 / (spec.eigenvalues(i) - z);
  return s / double(spec.dim());
}

ResolventProbe resolvent_probe(const HermitianBlockMatrix& H, cplx z) {
  if (z.imag() <= 0.0) throw ConfigError("resolvent probe needs Im z > 0");
  const int d = H.dim();
  Eigen::MatrixXcd a = H.full();
  a.diagonal().array() -= z;
  const Eigen::MatrixXcd g =
      a.partialPivLu().solve(Eigen::MatrixXcd::Identity(d, d));
  ResolventProbe out;
  out.z = z;
  out.m = g.trace() / double(d);
  out.gamma = g.cwiseAbs().maxCoeff();
  out.diag = g.diagonal();
  return out;
}

double ward_check(const HermitianBlockMatrix& H, cplx z) {
  const double eta = z.imag();
  if (eta <= 0.0) throw ConfigError("Ward check needs Im z > 0");
  const int d = H.dim();
  Eigen::MatrixXcd a = H.full();
  a.diagonal().array() -= z;
  const Eigen::MatrixXcd g =
      a.partialPivLu().solve(Eigen::MatrixXcd::Identity(d, d));
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    const double lhs = g.row(i).squaredNorm();
    const double rhs = g(i, i).imag() / eta;
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst;
}

double deloc_metric(const Spectrum& spec, double e_lo, double e_hi) {
  if (!spec.eigenvectors)
    throw ConfigError("delocalization metric needs eigenvectors");
  const int d = spec.dim();
  double worst = -1.0;
  for (int a = 0; a < d; ++a) {
    const double lambda = spec.eigenvalues(a);
    if (lambda < e_lo || lambda > e_hi) continue;
    const double sup2 = spec.eigenvectors->col(a).cwiseAbs2().maxCoeff();
    worst = std::max(worst, d * sup2);
  }
  if (worst < 0.0)
    throw ConfigError("no eigenvalues inside the requested window");
  return worst;
}

double gfcl_gap(const Spectrum& spec_x, const Spectrum& spec_y,
                std::span<const cplx> zs) {
  if (spec_x.pair_hash == 0 || spec_x.pair_hash != spec_y.pair_hash)
    throw ConfigError(
        "spectra do not form a comparison pair (same seed and layout, "
        "differing only in resampling)");
  double px = 1.0, py = 1.0;
  for (const cplx z : zs) {
    px *= stieltjes(spec_x, z).imag();
    py *= stieltjes(spec_y, z).imag();
  }
  return std::abs(px - py);
}

BandCertificate band_inverse_certificate(const Eigen::MatrixXcd& A, int W) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw ConfigError("matrix must be square");
  if (W < 1) throw ConfigError("band parameter must be >= 1");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(i - j) >= W && A(i, j) != cplx(0.0, 0.0))
        throw ConfigError("matrix is not W-banded as claimed");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  if (smin <= 0.0 || !std::isfinite(smax / smin))
    throw NumericalError("singular matrix has no inverse to certify");

  BandCertificate cert;
  cert.kappa = smax / smin;
  cert.alpha =
      std::pow((cert.kappa - 1.0) / (cert.kappa + 1.0), 2.0 / (2.0 * W + 1.0));
  const Eigen::MatrixXcd inv =
      A.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
  const double base = 2.0 * (2.0 * W + 1.0) * cert.kappa;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int excess = std::max(std::abs(i - j) - W, 0);
      const double bound = base * std::pow(cert.alpha, double(excess));
      const double entry = std::abs(inv(i, j));
      if (bound > 0.0) {
        worst = std::max(worst, entry / bound);
      } else if (entry > 0.0) {
        worst = std::max(worst, 2.0);  // flat violation of a zero bound
      }
    }
  }
  cert.worst_ratio = worst;
  cert.pass = worst <= 1.0;
  return cert;
}

void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "index,eigenvalue\n";
  for (int i = 0; i < spec.dim(); ++i)
    out << i << ',' << format_double(spec.eigenvalues(i)) << '\n';
}

void write_supnorm_csv(const std::string& path, const Spectrum& spec) {
  if (!spec.eigenvectors) throw ConfigError("spectrum carries no vectors");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "index,eigenvalue,supnorm2\n";
  for (int i = 0; i < spec.dim(); ++i) {
    const double sup2 =
        spec.dim() * spec.eigenvectors->col(i).cwiseAbs2().maxCoeff();
    out << i << ',' << format_double(spec.eigenvalues(i)) << ','
        << format_double(sup2) << '\n';
  }
}

}  // namespace dynrmt
