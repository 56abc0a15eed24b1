#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynrmt/ensemble.hpp"

namespace dynrmt {

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // sorted ascending
  std::optional<Eigen::MatrixXcd> eigenvectors;  // columns match eigenvalues
  std::uint64_t source_hash = 0;  // config fingerprint of the origin
  std::uint64_t pair_hash = 0;    // X/Y pairing fingerprint (0 if n/a)

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

/// Eigendecomposition of the Hermitization. Without eigenvectors the chiral
/// block structure is exploited (eigenvalues come in +-sigma pairs from the
/// N x N normal matrix B^dagger B); with eigenvectors a full 2N x 2N
/// Hermitian solve runs so that per-pair residuals stay at solver accuracy.
Spectrum decompose(const HermitianBlockMatrix& H, bool want_vectors);

/// Plain dense Hermitian eigensolve (GUE oracle, diagonal controls, ...).
Spectrum decompose_dense(const Eigen::MatrixXcd& H, bool want_vectors);

/// Stieltjes transform from eigenvalues: (1/dim) sum 1/(lambda - z).
/// Requires Im z > 0; the result has positive imaginary part.
cplx stieltjes(const Spectrum& spec, cplx z);

/// Resolvent diagnostics at one z: normalized trace, sup-norm of G and the
/// diagonal. Costs a dense solve; meant for a handful of z, not for scans.
struct ResolventProbe {
  cplx z;
  cplx m;               // (1/dim) Tr G
  double gamma = 0.0;   // max_ij |G_ij|
  Eigen::VectorXcd diag;
};
ResolventProbe resolvent_probe(const HermitianBlockMatrix& H, cplx z);

/// Exact resolvent row identity sum_l |G_il|^2 = Im[G_ii] / eta, checked for
/// every row; returns the worst relative deviation. The per-half-block sums
/// are averaged diagnostics, not identities, and are not asserted here.
double ward_check(const HermitianBlockMatrix& H, cplx z);

/// max over eigenvalues in [e_lo, e_hi] of dim * max_i |u(i)|^2.
/// 1 = perfectly flat vector, dim = localized on one coordinate; GUE-like
/// vectors give O(log dim). Requires eigenvectors; empty window is an error.
double deloc_metric(const Spectrum& spec, double e_lo, double e_hi);

/// | prod_k Im m_X(z_k) - prod_k Im m_Y(z_k) | for an X/Y comparison pair.
/// Refuses spectra whose pairing fingerprints differ.
double gfcl_gap(const Spectrum& spec_x, const Spectrum& spec_y,
                std::span<const cplx> zs);

struct BandCertificate {
  bool pass = false;
  double worst_ratio = 0.0;  // max |inv entry| / bound over all entries
  double kappa = 0.0;
  double alpha = 0.0;
};

/// Entry decay certificate for the inverse of a banded matrix A with
/// A(i,j) = 0 for |i-j| >= W:
///   |(A^{-1})_{ij}| <= 2(2W+1) kappa(A) alpha^{(|i-j|-W)_+},
/// kappa = ||A|| ||A^{-1}||, alpha = ((kappa-1)/(kappa+1))^{2/(2W+1)}.
/// Checks every entry of the dense inverse. Throws on singular A.
BandCertificate band_inverse_certificate(const Eigen::MatrixXcd& A, int W);

void write_spectrum_csv(const std::string& path, const Spectrum& spec);
/// "index,eigenvalue,supnorm2" with supnorm2 = dim * max_i |u(i)|^2.
void write_supnorm_csv(const std::string& path, const Spectrum& spec);

}  // namespace dynrmt
