#include "dynrmt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "dynrmt/error.hpp"
#include "dynrmt/manifest.hpp"
#include "dynrmt/rng.hpp"

namespace dynrmt {

DensityCurve::DensityCurve(std::vector<double> e, std::vector<double> rho)
    : e_(std::move(e)), rho_(std::move(rho)) {
  if (e_.size() != rho_.size() || e_.size() < 2)
    throw ConfigError("density curve needs matching grids of size >= 2");
  for (std::size_t i = 1; i < e_.size(); ++i)
    if (e_[i] <= e_[i - 1])
      throw ConfigError("density grid must be strictly increasing");
  cum_.resize(e_.size(), 0.0);
  for (std::size_t i = 1; i < e_.size(); ++i)
    cum_[i] = cum_[i - 1] +
              0.5 * (rho_[i] + rho_[i - 1]) * (e_[i] - e_[i - 1]);
}

DensityCurve DensityCurve::semicircle(int points) {
  std::vector<double> e(points), r(points);
  for (int i = 0; i < points; ++i) {
    e[i] = -2.0 + 4.0 * i / (points - 1);
    r[i] = std::sqrt(std::max(0.0, 4.0 - e[i] * e[i])) /
           (2.0 * std::numbers::pi);
  }
  return DensityCurve(std::move(e), std::move(r));
}

DensityCurve DensityCurve::uniform(double lo, double hi) {
  if (hi <= lo) throw ConfigError("empty support");
  const double v = 1.0 / (hi - lo);
  return DensityCurve({lo, hi}, {v, v});
}

double DensityCurve::value(double x) const {
  if (x <= e_.front() || x >= e_.back()) {
    // exact endpoints still count; beyond the grid the density is 0
    if (x == e_.front()) return rho_.front();
    if (x == e_.back()) return rho_.back();
    return 0.0;
  }
  const auto it = std::upper_bound(e_.begin(), e_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - e_.begin());
  const double t = (x - e_[i - 1]) / (e_[i] - e_[i - 1]);
  return rho_[i - 1] + t * (rho_[i] - rho_[i - 1]);
}

double DensityCurve::cumulative(double x) const {
  if (x <= e_.front()) return 0.0;
  if (x >= e_.back()) return cum_.back();
  const auto it = std::upper_bound(e_.begin(), e_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - e_.begin());
  const double dl = x - e_[i - 1];
  const double rho_x = value(x);
  return cum_[i - 1] + 0.5 * (rho_[i - 1] + rho_x) * dl;
}

double DensityCurve::min_on(double lo, double hi) const {
  double m = std::min(value(lo), value(hi));
  for (std::size_t i = 0; i < e_.size(); ++i)
    if (e_[i] > lo && e_[i] < hi) m = std::min(m, rho_[i]);
  return m;
}

std::size_t UnfoldedSample::total_count() const {
  std::size_t n = 0;
  for (const auto& t : energies) n += t.size();
  return n;
}

std::vector<double> UnfoldedSample::spacings() const {
  std::vector<double> s;
  for (const auto& t : unfolded)
    for (std::size_t i = 1; i < t.size(); ++i) s.push_back(t[i] - t[i - 1]);
  return s;
}

double UnfoldedSample::mean_spacing() const {
  const std::vector<double> s = spacings();
  if (s.empty()) throw ConfigError("no spacings in unfolded sample");
  double total = 0.0;
  for (const double v : s) total += v;
  return total / double(s.size());
}

UnfoldedSample unfold(std::span<const Spectrum> spectra, double e_lo,
                      double e_hi, const DensityCurve& rho) {
  if (spectra.empty()) throw ConfigError("no spectra to unfold");
  if (e_hi <= e_lo) throw ConfigError("empty unfolding window");
  if (rho.min_on(e_lo, e_hi) < kBulkDensityFloor)
    throw ConfigError(
        "unfolding window leaves the bulk: density dips below 0.05");
  UnfoldedSample out;
  out.window_lo = e_lo;
  out.window_hi = e_hi;
  out.trials = static_cast<int>(spectra.size());
  const double base = rho.cumulative(e_lo);
  for (const Spectrum& spec : spectra) {
    std::vector<double> energies, unfolded;
    for (int i = 0; i < spec.dim(); ++i) {
      const double lambda = spec.eigenvalues(i);
      if (lambda < e_lo || lambda > e_hi) continue;
      energies.push_back(lambda);
      unfolded.push_back(spec.dim() * (rho.cumulative(lambda) - base));
    }
    out.energies.push_back(std::move(energies));
    out.unfolded.push_back(std::move(unfolded));
  }
  return out;
}

GapRatioReport gap_ratios(const UnfoldedSample& sample) {
  GapRatioReport out;
  for (const auto& t : sample.unfolded) {
    for (std::size_t i = 2; i < t.size(); ++i) {
      const double s0 = t[i - 1] - t[i - 2];
      const double s1 = t[i] - t[i - 1];
      const double lo = std::min(s0, s1), hi = std::max(s0, s1);
      out.ratios.push_back(hi > 0.0 ? lo / hi : 1.0);
    }
  }
  if (out.ratios.size() < 1000)
    throw ConfigError("gap-ratio statistics need at least 1000 pooled gaps");
  double total = 0.0;
  for (const double r : out.ratios) total += r;
  out.mean = total / double(out.ratios.size());
  return out;
}

Histogram spacing_histogram(const UnfoldedSample& sample, int bins,
                            double s_max) {
  if (bins < 1) throw ConfigError("need at least one bin");
  const std::vector<double> s = sample.spacings();
  if (s.size() < 1000)
    throw ConfigError("spacing histogram needs at least 1000 spacings");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = s_max * i / bins;
  h.density.assign(bins, 0.0);
  std::size_t counted = 0;
  for (const double v : s) {
    if (v < 0.0 || v >= s_max) continue;
    const int b = std::min(bins - 1, static_cast<int>(v / (s_max / bins)));
    h.density[b] += 1.0;
    ++counted;
  }
  // normalize to the retained mass so the histogram integrates to 1
  const double width = s_max / bins;
  if (counted == 0) throw ConfigError("all spacings fell outside [0, s_max)");
  for (double& d : h.density) d /= double(counted) * width;
  return h;
}

std::vector<Spectrum> gue_oracle(int N, int trials, std::uint64_t seed,
                                 ExecPolicy policy) {
  if (N < 32) throw ConfigError("GUE oracle needs N >= 32");
  if (trials < 1) throw ConfigError("GUE oracle needs at least one trial");
  std::vector<Spectrum> out(static_cast<std::size_t>(trials));
  Spectrum* data = out.data();
  parallel_for(policy, trials, [&, data](std::int64_t t) {
    const CounterRng rng(derive_key(seed, static_cast<std::uint64_t>(t)));
    Eigen::MatrixXcd h(N, N);
    std::uint64_t ctr = 0;
    const double off = 1.0 / std::sqrt(double(N));   // E|H_ij|^2 = 1/N
    const double diag = 1.0 / std::sqrt(double(N));  // Var H_ii = 1/N
    for (int i = 0; i < N; ++i) {
      h(i, i) = diag * rng.normal(ctr++);
      for (int j = i + 1; j < N; ++j) {
        const cplx v = off * rng.complex_normal(ctr++);
        h(i, j) = v;
        h(j, i) = std::conj(v);
      }
    }
    data[t] = decompose_dense(h, false);
    data[t].source_hash = derive_key(seed, static_cast<std::uint64_t>(t));
  });
  return out;
}

// The empirical CDF uses the right-continuous (# values <= x)/n convention;
// the reference is evaluated both at each sample point and just below it
// (nextafter), which recovers the classical two-sided statistic for
// continuous references and gives an exact zero when the reference is the
// sample's own step function.
double ks_distance(std::span<const double> sorted_sample,
                   const std::function<double(double)>& cdf) {
  const std::size_t n = sorted_sample.size();
  if (n == 0) throw ConfigError("empty sample has no KS distance");
  double worst = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sorted_sample[j + 1] == sorted_sample[i]) ++j;
    const double x = sorted_sample[i];
    const double femp = double(j + 1) / n;  // mass <= x
    const double fleft = double(i) / n;     // mass < x
    worst = std::max(worst, std::abs(cdf(x) - femp));
    worst = std::max(
        worst, std::abs(cdf(std::nextafter(x, -INFINITY)) - fleft));
    i = j + 1;
  }
  return worst;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> sorted_values)
    : values_(std::move(sorted_values)) {
  if (values_.empty()) throw ConfigError("empty reference sample");
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return double(it - values_.begin()) / double(values_.size());
}

double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
         std::asin(0.5 * x) / std::numbers::pi;
}

nlohmann::json StatReport::to_json() const {
  nlohmann::json h;
  h["bin_edges"] = spacing.edges;
  h["density"] = spacing.density;
  return nlohmann::json{{"spacing_histogram", h},
                        {"gap_ratio_mean", gap_ratio_mean},
                        {"gap_count", gap_count},
                        {"ks_to_reference", ks_to_reference},
                        {"mean_spacing", mean_spacing},
                        {"trials", trials}};
}

void write_histogram_csv(const std::string& path, const Histogram& h,
                         std::uint64_t manifest_hash) {
  CsvWriter csv(path, "bin_lo,bin_hi,density", manifest_hash);
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    const double row[3] = {h.edges[i], h.edges[i + 1], h.density[i]};
    csv.row(row);
  }
}

}  // namespace dynrmt
