#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "dynrmt/ensemble.hpp"
#include "dynrmt/evalfn.hpp"
#include "dynrmt/parallel.hpp"

namespace dynrmt {

/// Nonnegative spectral measure entering the self-consistent equation:
/// either the symbol g sampled on a uniform quadrature grid over [0,1)
/// (uniform weights; periodic midpoint rule, spectrally accurate for the
/// trigonometric symbols used here), or the finite eigenvalue list of a
/// banded Toeplitz matrix (uniform weights 1/N). Total mass 1 either way.
class SpectralMeasure {
 public:
  enum class Kind { symbol_integral, finite_eigenvalues };

  static SpectralMeasure from_symbol(const FourierSpec& spec,
                                     int grid_points = 4096);
  /// Symbol series of the given correlations; `measured` selects the
  /// series built from the actually measured second moments.
  static SpectralMeasure from_correlations(const CorrelationData& data,
                                           bool measured,
                                           int grid_points = 4096);
  static SpectralMeasure from_eigenvalues(std::vector<double> eigs);
  /// Constant symbol g == c (exact closed-form comparisons).
  static SpectralMeasure constant(double c);

  Kind kind() const { return kind_; }
  const std::vector<double>& values() const { return values_; }
  double support_min() const;
  double support_max() const;

 private:
  SpectralMeasure(Kind k, std::vector<double> v);
  Kind kind_;
  std::vector<double> values_;
};

/// Stieltjes transform of the measure, m_rho(w) = int 1/(x - w) drho(x).
/// Requires w off the real axis.
cplx m_measure(const SpectralMeasure& rho, cplx w);

inline constexpr double kSceResidualTol = 1e-12;
inline constexpr int kSceMaxIterations = 10000;

struct SceResult {
  cplx m;
  double residual = 0.0;
  int iterations = 0;
};

/// Solves m = F(m), F(w) = -int 1/(w x + z) drho(x), the scalar
/// self-consistent equation for the limiting Stieltjes transform, by damped
/// fixed-point iteration: m <- (1-beta) m + beta F(m), with beta halved
/// whenever the residual would grow and slowly restored on success. The
/// start value is the semicircle transform for moderate |z| and -1/z far
/// out, unless a warm start is supplied. Accepts only Im m > 0 and residual
/// <= kSceResidualTol; otherwise throws SceConvergenceError carrying the
/// best iterate.
SceResult solve_fixed_point(const SpectralMeasure& rho, cplx z,
                            cplx warm_start = cplx(0.0, 0.0));

/// Closed-form semicircle transform m_sc(z) = (-z + sqrt(z^2 - 4))/2 with
/// the Herglotz branch; reference for the constant-symbol oracle.
cplx semicircle_m(cplx z);

/// Density by Stieltjes inversion at fixed eta_inv:
/// rho(E) = max(0, Im m(E + i eta_inv) / pi). Solves are warm-started by a
/// serial eta-continuation ladder per grid point; points run concurrently.
std::vector<double> density(const SpectralMeasure& rho,
                            std::span<const double> e_grid,
                            double eta_inv = 1e-5,
                            ExecPolicy policy = ExecPolicy::parallel);

/// Per-z diagnostics of a density/scan run, exportable as JSON records.
struct SceSolution {
  std::vector<cplx> z;
  std::vector<cplx> m;
  std::vector<double> residual;
  std::vector<int> iterations;
};
SceSolution solve_grid(const SpectralMeasure& rho, std::span<const cplx> zs,
                       ExecPolicy policy = ExecPolicy::parallel);
void write_sce_json(const std::string& path, const SceSolution& sol);

/// Amplification |T - T0| / |eps| of a perturbed equation T = F(T) + eps,
/// solved from a warm start at the base solution, for each eps. Requires the
/// base point to sit in the bulk (Im m bounded below).
std::vector<double> stability_probe(const SpectralMeasure& rho, cplx z,
                                    std::span<const double> eps_list);

/// |M_N(z) - m_inf(z)| per N: the finite banded-Toeplitz equation solved
/// with the eigenvalues of build_phiN(data, N, default window) against the
/// limiting symbol equation.
std::vector<double> toeplitz_limit_gap(const CorrelationData& data,
                                       std::span<const int> n_list, cplx z);

struct DeterministicBlock {
  Eigen::MatrixXcd block;  // -(Phi^N m + z)^{-1}
  cplx g1_prediction;      // the diagonal prediction for the upper block
};

/// Deterministic approximation to the lower-right Green's-function block of
/// the Hermitization at spectral parameter z, given the solved m.
DeterministicBlock deterministic_block(const CorrelationData& data, int N,
                                       int W, cplx z, cplx m);

}  // namespace dynrmt
