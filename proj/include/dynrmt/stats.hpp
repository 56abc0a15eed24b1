#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dynrmt/parallel.hpp"
#include "dynrmt/spectral.hpp"
#include "json.hpp"

namespace dynrmt {

/// Piecewise-linear density on a grid, with the cumulative needed for
/// unfolding. Grids must be strictly increasing.
class DensityCurve {
 public:
  DensityCurve(std::vector<double> e, std::vector<double> rho);

  static DensityCurve semicircle(int points = 2048);  // the GUE reference
  static DensityCurve uniform(double lo, double hi);  // Poisson control

  double value(double x) const;       // 0 outside the grid
  double cumulative(double x) const;  // int_{grid lo}^{x} rho
  double min_on(double lo, double hi) const;
  const std::vector<double>& grid() const { return e_; }
  const std::vector<double>& values() const { return rho_; }

 private:
  std::vector<double> e_, rho_, cum_;
};

inline constexpr double kBulkDensityFloor = 0.05;

/// Eigenvalues of several trials restricted to a bulk window and mapped to
/// unit mean spacing via lambda -> dim * cumulative(lambda). Spacings never
/// cross trial boundaries.
struct UnfoldedSample {
  std::vector<std::vector<double>> energies;  // per trial, sorted
  std::vector<std::vector<double>> unfolded;  // per trial, increasing
  double window_lo = 0.0, window_hi = 0.0;
  int trials = 0;

  std::size_t total_count() const;
  std::vector<double> spacings() const;  // within-trial consecutive diffs
  double mean_spacing() const;
};

/// Requires the window to sit in the bulk: min density on [e_lo, e_hi] must
/// be >= kBulkDensityFloor, otherwise the unfolding map degenerates.
UnfoldedSample unfold(std::span<const Spectrum> spectra, double e_lo,
                      double e_hi, const DensityCurve& rho);

struct GapRatioReport {
  std::vector<double> ratios;  // r~ in [0,1] per interior gap pair
  double mean = 0.0;
};

/// Consecutive-spacing ratios r~ = min(s_a, s_{a+1}) / max(s_a, s_{a+1});
/// unfolding-free universality probe. Requires >= 1000 pooled gaps.
GapRatioReport gap_ratios(const UnfoldedSample& sample);

struct Histogram {
  std::vector<double> edges;    // size bins+1
  std::vector<double> density;  // size bins, integrates to 1
};

/// Normalized histogram of consecutive unfolded spacings on [0, s_max].
/// Requires >= 1000 spacings.
Histogram spacing_histogram(const UnfoldedSample& sample, int bins,
                            double s_max = 4.0);

/// GUE sampler: Hermitian with iid complex Gaussian off-diagonals
/// (E|H_ij|^2 = 1/N) and real Gaussian diagonal (variance 1/N); spectra
/// are the source of every GUE reference statistic in this project.
std::vector<Spectrum> gue_oracle(int N, int trials, std::uint64_t seed,
                                 ExecPolicy policy = ExecPolicy::parallel);

/// Sup distance between the empirical CDF of a sorted sample and a
/// reference CDF. Scale-free under strictly increasing reparametrization.
double ks_distance(std::span<const double> sorted_sample,
                   const std::function<double(double)>& cdf);

/// Step-function CDF of a frozen sorted sample (empirical references).
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> sorted_values);
  double operator()(double x) const;

 private:
  std::vector<double> values_;
};

/// Cumulative of the semicircle law on [-2, 2] (closed form).
double semicircle_cdf(double x);

struct StatReport {
  Histogram spacing;
  double gap_ratio_mean = 0.0;
  std::size_t gap_count = 0;
  double ks_to_reference = 0.0;
  double mean_spacing = 0.0;
  int trials = 0;
  nlohmann::json to_json() const;
};

void write_histogram_csv(const std::string& path, const Histogram& h,
                         std::uint64_t manifest_hash);

}  // namespace dynrmt
