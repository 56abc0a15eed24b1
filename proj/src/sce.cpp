#include "dynrmt/sce.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "dynrmt/error.hpp"
#include "dynrmt/manifest.hpp"
#include "dynrmt/spectral.hpp"

namespace dynrmt {

SpectralMeasure::SpectralMeasure(Kind k, std::vector<double> v)
    : kind_(k), values_(std::move(v)) {
  if (values_.empty()) throw ConfigError("spectral measure is empty");
}

SpectralMeasure SpectralMeasure::from_symbol(const FourierSpec& spec,
                                             int grid_points) {
  if (grid_points < 2) throw ConfigError("quadrature grid too small");
  std::vector<double> v(grid_points);
  for (int i = 0; i < grid_points; ++i)
    v[i] = symbol_g(spec, (i + 0.5) / grid_points);
  return SpectralMeasure(Kind::symbol_integral, std::move(v));
}

SpectralMeasure SpectralMeasure::from_correlations(const CorrelationData& data,
                                                   bool measured,
                                                   int grid_points) {
  if (grid_points < 2) throw ConfigError("quadrature grid too small");
  std::vector<double> v(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double x = (i + 0.5) / grid_points;
    v[i] = measured ? data.symbol_measured_value(x) : data.symbol_value(x);
  }
  return SpectralMeasure(Kind::symbol_integral, std::move(v));
}

SpectralMeasure SpectralMeasure::from_eigenvalues(std::vector<double> eigs) {
  std::sort(eigs.begin(), eigs.end());
  return SpectralMeasure(Kind::finite_eigenvalues, std::move(eigs));
}

SpectralMeasure SpectralMeasure::constant(double c) {
  return SpectralMeasure(Kind::symbol_integral, std::vector<double>{c, c});
}

double SpectralMeasure::support_min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double SpectralMeasure::support_max() const {
  return *std::max_element(values_.begin(), values_.end());
}

cplx m_measure(const SpectralMeasure& rho, cplx w) {
  if (w.imag() == 0.0)
    throw ConfigError("Stieltjes transform of a measure needs w off axis");
  cplx s(0.0, 0.0);
  for (const double x : rho.values()) s += 1.0 / (x - w);
  return s / double(rho.values().size());
}

cplx semicircle_m(cplx z) {
  const cplx r = std::sqrt(z * z - 4.0);
  const cplx a = 0.5 * (-z + r);
  return a.imag() > 0.0 ? a : 0.5 * (-z - r);
}

namespace {

// F(w) = -int 1/(w x + z) drho(x); maps the upper half-plane into itself
// because the measure is supported on [0, inf).
cplx sce_map(const SpectralMeasure& rho, cplx z, cplx w) {
  cplx s(0.0, 0.0);
  for (const double x : rho.values()) s += 1.0 / (w * x + z);
  return -s / double(rho.values().size());
}

cplx default_start(cplx z) {
  return std::abs(z) > 10.0 ? -1.0 / z : semicircle_m(z);
}

// Damped iteration m <- (1-beta) m + beta (F(m) + shift); beta halves on a
// residual increase and creeps back up on success. Mild increases are
// accepted (near the spectral edge the residual spirals while converging);
// only gross overshoots and half-plane exits are rejected outright.
SceResult iterate(const SpectralMeasure& rho, cplx z, cplx start,
                  cplx shift) {
  cplx m = start;
  if (m.imag() <= 0.0) m = default_start(z);
  double beta = 1.0;
  cplx fm = sce_map(rho, z, m) + shift;
  double res = std::abs(fm - m);
  int it = 0;
  for (; it < kSceMaxIterations && res > kSceResidualTol; ++it) {
    const cplx cand = (1.0 - beta) * m + beta * fm;
    if (cand.imag() <= 0.0) {
      beta = std::max(0.5 * beta, 1e-8);
      continue;
    }
    const cplx fc = sce_map(rho, z, cand) + shift;
    const double rc = std::abs(fc - cand);
    if (rc > 1.5 * res && beta > 1e-6) {
      beta = std::max(0.5 * beta, 1e-6);
      continue;
    }
    beta = rc > res ? std::max(0.5 * beta, 1e-6) : std::min(1.0, 1.2 * beta);
    m = cand;
    fm = fc;
    res = rc;
  }
  return SceResult{m, res, it};
}

}  // namespace

SceResult solve_fixed_point(const SpectralMeasure& rho, cplx z,
                            cplx warm_start) {
  if (z.imag() <= 0.0)
    throw ConfigError("self-consistent equation needs Im z > 0");
  const cplx start =
      warm_start == cplx(0.0, 0.0) ? default_start(z) : warm_start;
  SceResult r = iterate(rho, z, start, cplx(0.0, 0.0));
  if (r.residual > kSceResidualTol || r.m.imag() <= 0.0)
    throw SceConvergenceError("self-consistent equation did not converge at z=(" +
                                  std::to_string(z.real()) + "," +
                                  std::to_string(z.imag()) + ")",
                              r.m, r.residual);
  return r;
}

std::vector<double> density(const SpectralMeasure& rho,
                            std::span<const double> e_grid, double eta_inv,
                            ExecPolicy policy) {
  if (eta_inv <= 0.0) throw ConfigError("inversion eta must be positive");
  std::vector<double> out(e_grid.size(), 0.0);
  const double* e = e_grid.data();
  double* r = out.data();
  // Each grid point descends its own eta ladder from O(1) down to eta_inv,
  // warm-starting every rung; points are independent, so the scan threads.
  parallel_for(policy, static_cast<std::int64_t>(e_grid.size()),
               [&](std::int64_t i) {
                 cplx m(0.0, 0.0);
                 double eta = 1.0;
                 while (true) {
                   m = solve_fixed_point(rho, cplx(e[i], eta), m).m;
                   if (eta <= eta_inv) break;
                   eta = std::max(eta_inv, 0.25 * eta);
                 }
                 r[i] = std::max(0.0, m.imag() / std::numbers::pi);
               });
  return out;
}

SceSolution solve_grid(const SpectralMeasure& rho, std::span<const cplx> zs,
                       ExecPolicy policy) {
  SceSolution sol;
  const std::size_t n = zs.size();
  sol.z.assign(zs.begin(), zs.end());
  sol.m.resize(n);
  sol.residual.resize(n);
  sol.iterations.resize(n);
  parallel_for(policy, static_cast<std::int64_t>(n), [&](std::int64_t i) {
    cplx warm(0.0, 0.0);
    double eta = std::max(1.0, zs[i].imag());
    // continuation down to the requested eta
    while (eta > zs[i].imag()) {
      warm = solve_fixed_point(rho, cplx(zs[i].real(), eta), warm).m;
      eta = std::max(zs[i].imag(), 0.25 * eta);
    }
    const SceResult r = solve_fixed_point(rho, zs[i], warm);
    sol.m[i] = r.m;
    sol.residual[i] = r.residual;
    sol.iterations[i] = r.iterations;
  });
  return sol;
}

void write_sce_json(const std::string& path, const SceSolution& sol) {
  nlohmann::json records = nlohmann::json::array();
  for (std::size_t i = 0; i < sol.z.size(); ++i) {
    records.push_back({{"z", {sol.z[i].real(), sol.z[i].imag()}},
                       {"m", {sol.m[i].real(), sol.m[i].imag()}},
                       {"residual", sol.residual[i]},
                       {"iterations", sol.iterations[i]}});
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << records.dump(2) << "\n";
}

std::vector<double> stability_probe(const SpectralMeasure& rho, cplx z,
                                    std::span<const double> eps_list) {
  const SceResult base = solve_fixed_point(rho, z);
  std::vector<double> factors;
  factors.reserve(eps_list.size());
  for (const double eps : eps_list) {
    if (eps == 0.0) {
      factors.push_back(0.0);
      continue;
    }
    const SceResult pert = iterate(rho, z, base.m, cplx(eps, 0.0));
    if (pert.residual > kSceResidualTol)
      throw SceConvergenceError("perturbed equation did not converge", pert.m,
                                pert.residual);
    factors.push_back(std::abs(pert.m - base.m) / std::abs(eps));
  }
  return factors;
}

std::vector<double> toeplitz_limit_gap(const CorrelationData& data,
                                       std::span<const int> n_list, cplx z) {
  // limiting equation: symbol series of the correlations
  const SpectralMeasure limit =
      SpectralMeasure::from_correlations(data, /*measured=*/false, 4096);
  const cplx m_inf = solve_fixed_point(limit, z).m;
  std::vector<double> gaps;
  gaps.reserve(n_list.size());
  for (const int n : n_list) {
    const int w = std::min(data.j_max(), n - 1);
    const BandedToeplitz phi_n = build_phiN(data, n, w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(phi_n.dense(),
                                                       Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("Toeplitz eigensolve failed");
    std::vector<double> eigs(es.eigenvalues().data(),
                             es.eigenvalues().data() + n);
    const SpectralMeasure finite =
        SpectralMeasure::from_eigenvalues(std::move(eigs));
    gaps.push_back(std::abs(solve_fixed_point(finite, z).m - m_inf));
  }
  return gaps;
}

DeterministicBlock deterministic_block(const CorrelationData& data, int N,
                                       int W, cplx z, cplx m) {
  if (z.imag() <= 0.0 || m.imag() <= 0.0)
    throw ConfigError("deterministic block needs Im z > 0 and Im m > 0");
  const BandedToeplitz phi_n = build_phiN(data, N, std::min(W, N - 1));
  Eigen::MatrixXcd a = phi_n.dense() * m;
  a.diagonal().array() += z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  // Im parts keep the system away from singular; flag it if hit anyway.
  const Eigen::MatrixXcd inv = lu.solve(Eigen::MatrixXcd::Identity(N, N));
  if (!inv.allFinite())
    throw NumericalError("deterministic block system is singular");
  DeterministicBlock out;
  out.block = -inv;
  out.g1_prediction = m;
  return out;
}

}  // namespace dynrmt
