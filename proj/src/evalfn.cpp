#include "dynrmt/evalfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynrmt/error.hpp"

namespace dynrmt {

namespace {
cplx unit_phase(double turns) {
  const double a = 2.0 * std::numbers::pi * turns;
  return {std::cos(a), std::sin(a)};
}
}  // namespace

FourierSpec::FourierSpec(std::map<int, cplx> coeffs) {
  for (auto& [k, c] : coeffs) {
    if (c != cplx(0.0, 0.0)) coeffs_[k] = c;
  }
  for (auto& [k, c] : coeffs_)
    max_frequency_ = std::max(max_frequency_, std::abs(k));
}

FourierSpec FourierSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
    throw ConfigError("spec must be an object {\"coeffs\": [[k, re, im], ...]}");
  std::map<int, cplx> m;
  for (const auto& row : j["coeffs"]) {
    if (!row.is_array() || row.size() != 3)
      throw ConfigError("each coefficient must be a [k, re, im] triple");
    const int k = row[0].get<int>();
    if (m.count(k)) throw ConfigError("duplicate frequency in spec");
    m[k] = cplx(row[1].get<double>(), row[2].get<double>());
  }
  return FourierSpec(std::move(m));
}

nlohmann::json FourierSpec::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [k, c] : coeffs_)
    rows.push_back({k, c.real(), c.imag()});
  return nlohmann::json{{"coeffs", rows}};
}

cplx FourierSpec::coeff(int k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? cplx(0.0, 0.0) : it->second;
}

bool FourierSpec::mean_zero() const { return coeff(0) == cplx(0.0, 0.0); }

bool FourierSpec::real_valued() const {
  for (const auto& [k, c] : coeffs_) {
    const cplx mirror = coeff(-k);
    if (std::abs(mirror - std::conj(c)) > 1e-15) return false;
  }
  return true;
}

double FourierSpec::one_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) s += std::abs(c);
  return s;
}

double FourierSpec::deriv_sup_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) s += std::abs(k) * std::abs(c);
  return 2.0 * std::numbers::pi * s;
}

cplx FourierSpec::evaluate(double x) const {
  cplx v(0.0, 0.0);
  for (const auto& [k, c] : coeffs_) v += c * unit_phase(k * x);
  return v;
}

double symbol_g(const FourierSpec& spec, double x) {
  const int K = spec.max_frequency();
  double g = 0.0;
  for (int n = 1; n <= K; n += 2) {
    cplx chain(0.0, 0.0);
    bool any = false;
    long long freq = n;
    for (int k = 0; freq <= K; ++k, freq *= 2) {
      const cplx c = spec.coeff(static_cast<int>(freq));
      if (c != cplx(0.0, 0.0)) {
        chain += c * unit_phase(static_cast<double>(k) * x);
        any = true;
      }
    }
    if (any) g += std::norm(chain);
  }
  return g;
}

CorrelationData::CorrelationData(std::vector<cplx> phi, std::vector<cplx> psi,
                                 std::vector<cplx> phi_measured, double g_min,
                                 double g_max)
    : phi_(std::move(phi)),
      psi_(std::move(psi)),
      phi_measured_(std::move(phi_measured)),
      g_min_(g_min),
      g_max_(g_max) {}

cplx CorrelationData::phi(int j) const {
  const int a = std::abs(j);
  if (a >= static_cast<int>(phi_.size())) return {0.0, 0.0};
  return j >= 0 ? phi_[a] : std::conj(phi_[a]);
}

cplx CorrelationData::psi(int j) const {
  const int a = std::abs(j);
  if (a >= static_cast<int>(psi_.size())) return {0.0, 0.0};
  return psi_[a];
}

cplx CorrelationData::phi_measured(int j) const {
  const int a = std::abs(j);
  if (a >= static_cast<int>(phi_measured_.size())) return {0.0, 0.0};
  return j >= 0 ? phi_measured_[a] : std::conj(phi_measured_[a]);
}

double CorrelationData::band_tail(int w) const {
  double s = 0.0;
  for (int j = w + 1; j <= j_max(); ++j) s += 2.0 * std::abs(phi_[j]);
  return s;
}

double CorrelationData::psi_norm() const {
  double s2 = std::norm(psi_[0]);
  for (int j = 1; j <= j_max(); ++j) s2 += 2.0 * std::norm(psi_[j]);
  return std::sqrt(s2);
}

double CorrelationData::symbol_value(double x) const {
  double v = phi_[0].real();
  for (int j = 1; j <= j_max(); ++j)
    v += 2.0 * (phi_[j] * unit_phase(j * x)).real();
  return v;
}

double CorrelationData::symbol_measured_value(double x) const {
  double v = phi_measured_[0].real();
  for (int j = 1; j <= j_max(); ++j)
    v += 2.0 * (phi_measured_[j] * unit_phase(j * x)).real();
  return v;
}

CorrelationData correlations(const FourierSpec& spec, int j_max) {
  if (j_max < 1) throw ConfigError("correlation depth must be >= 1");
  const int K = spec.max_frequency();
  std::vector<cplx> phi(j_max + 1, cplx(0, 0));
  std::vector<cplx> psi(j_max + 1, cplx(0, 0));
  std::vector<cplx> phim(j_max + 1, cplx(0, 0));
  for (int j = 0; j <= j_max; ++j) {
    if (j > 30 || (1LL << j) > K) continue;  // no frequency survives 2^j
    const long long scale = 1LL << j;
    for (const auto& [m, c] : spec.coeffs()) {
      const long long up = static_cast<long long>(m) * scale;
      if (up > K || up < -K) continue;
      const cplx cu = spec.coeff(static_cast<int>(up));
      // positive-frequency correlation sum
      if (m >= 1) phi[j] += std::conj(c) * cu;
      // measured second moments E[f conj(f o T^j)] and E[f (f o T^j)]
      phim[j] += std::conj(c) * cu;
      psi[j] += spec.coeff(static_cast<int>(-up)) * c;
    }
  }
  // symbol range by dense grid scan
  const int grid = std::max(4 * K, 128);
  double gmin = symbol_g(spec, 0.0), gmax = gmin;
  for (int i = 1; i < grid; ++i) {
    const double g = symbol_g(spec, static_cast<double>(i) / grid);
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  return CorrelationData(std::move(phi), std::move(psi), std::move(phim),
                         gmin, gmax);
}

Admissibility is_admissible(const FourierSpec& spec) {
  Admissibility out;
  if (!spec.mean_zero()) {
    out.admissible = false;
    out.reason = "mean-nonzero: c_0 must vanish (E[f] = 0)";
    return out;
  }
  const int K = spec.max_frequency();
  if (K == 0) {
    out.admissible = false;
    out.reason = "empty spec: the symbol vanishes identically";
    return out;
  }
  const int grid = std::max(4 * K, 128);
  double gmin = symbol_g(spec, 0.0);
  double argmin = 0.0;
  for (int i = 1; i < grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    const double g = symbol_g(spec, x);
    if (g < gmin) {
      gmin = g;
      argmin = x;
    }
  }
  if (gmin > kAdmissibilityTol) {
    out.admissible = true;
    out.g_min = gmin;
  } else {
    out.admissible = false;
    out.witness_x = argmin;
    out.reason = "symbol dips to " + std::to_string(gmin) + " near x = " +
                 std::to_string(argmin);
  }
  return out;
}

}  // namespace dynrmt
