#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace dynrmt {

using cplx = std::complex<double>;

/// Evaluation function given by finitely many Fourier coefficients c_k,
/// f(x) = sum_k c_k e^{2 pi i k x}. Only finite supports are accepted; that
/// keeps every derived quantity (correlations, symbol, admissibility
/// certificate) exactly computable.
class FourierSpec {
 public:
  FourierSpec() = default;
  explicit FourierSpec(std::map<int, cplx> coeffs);

  /// JSON form {"coeffs": [[k, re, im], ...]} used by the CLI config.
  static FourierSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::map<int, cplx>& coeffs() const { return coeffs_; }
  cplx coeff(int k) const;
  int max_frequency() const { return max_frequency_; }  // K = max |k|
  bool mean_zero() const;                               // c_0 == 0
  bool real_valued() const;  // c_{-k} == conj(c_k) for all k

  double one_norm() const;        // sum |c_k|, bounds |f|
  double deriv_sup_norm() const;  // 2 pi sum |k c_k|, bounds |f'|

  cplx evaluate(double x) const;

 private:
  std::map<int, cplx> coeffs_;
  int max_frequency_ = 0;
};

/// The dyadic symbol
///   g_f(x) = sum_{n >= 1 odd} | sum_{k >= 0} c_{n 2^k} e^{2 pi i k x} |^2.
/// Nonnegative by construction; its range bounds the spectrum of the
/// correlation Toeplitz matrices below.
double symbol_g(const FourierSpec& spec, double x);

/// Correlations of f along dyadic shifts, plus the symbol range.
///
/// `phi` follows the positive-frequency sum phi(j) = sum_{k>=1} conj(c_k)
/// c_{k 2^j}; this is the quantity the Toeplitz machinery is built from.
/// `phi_measured` is the actual second moment E[f(x) conj(f(T^j x))], which
/// also picks up negative-frequency mass; the two coincide whenever f has no
/// negative frequencies. `psi` is the pseudo-correlation E[f(x) f(T^j x)].
/// Both measured quantities are exact coefficient sums, and the tests check
/// them against a Monte-Carlo quadrature oracle.
class CorrelationData {
 public:
  CorrelationData(std::vector<cplx> phi, std::vector<cplx> psi,
                  std::vector<cplx> phi_measured, double g_min, double g_max);

  int j_max() const { return static_cast<int>(phi_.size()) - 1; }

  /// phi(j) for any j, filled by Hermitian symmetry phi(-j) = conj(phi(j));
  /// zero beyond j_max().
  cplx phi(int j) const;
  cplx psi(int j) const;           // psi(-j) = psi(j)
  cplx phi_measured(int j) const;  // Hermitian symmetry as for phi

  double g_min() const { return g_min_; }
  double g_max() const { return g_max_; }

  /// sum_{|j| > w} |phi(j)| within the stored window (exactly zero once w
  /// exceeds the spec's dyadic depth).
  double band_tail(int w) const;

  double psi_norm() const;  // l2 norm of psi over the stored window

  /// Fourier series sum_j phi(j) e^{2 pi i j x} (real by symmetry).
  double symbol_value(double x) const;
  /// Same series with phi_measured; this is the variance profile actually
  /// carried by the matrix entries.
  double symbol_measured_value(double x) const;

 private:
  std::vector<cplx> phi_;           // index j = 0..J
  std::vector<cplx> psi_;
  std::vector<cplx> phi_measured_;
  double g_min_, g_max_;
};

CorrelationData correlations(const FourierSpec& spec, int j_max);

struct Admissibility {
  bool admissible = false;
  double g_min = 0.0;      // grid minimum of the symbol when admissible
  double witness_x = 0.0;  // point where the symbol (nearly) vanishes
  std::string reason;      // set when not admissible
};

/// Grid certificate for inf_x g_f(x) > 0. The grid has at least 4K points so
/// a degree-K trigonometric polynomial cannot hide a dip between grid nodes
/// larger than the tolerance for specs with sum|k c_k| <= 1e3.
Admissibility is_admissible(const FourierSpec& spec);

inline constexpr double kAdmissibilityTol = 1e-8;

}  // namespace dynrmt
