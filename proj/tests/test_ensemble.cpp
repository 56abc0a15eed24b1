#include "dynrmt/ensemble.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dynrmt/error.hpp"
#include "dynrmt/manifest.hpp"
#include "dynrmt/rng.hpp"
#include "oracles.hpp"

using namespace dynrmt;
using oracles::cos_spec;
using oracles::exp_spec;
using oracles::mixed_spec;

namespace {
EnsembleConfig make_cfg(int n, const FourierSpec& spec, std::uint64_t seed,
                        int w = 0) {
  EnsembleConfig cfg;
  cfg.N = n;
  cfg.spec = spec;
  cfg.seed = seed;
  cfg.W = w;
  return cfg;
}
}  // namespace

TEST_CASE("config validation") {
  EnsembleConfig cfg = make_cfg(1, exp_spec(), 3);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.N = 8;
  cfg.validate();
  CHECK(cfg.W == 53);  // default window at desk scale
  CHECK(EnsembleConfig::default_window(1 << 20) == 60);

  EnsembleConfig bad = make_cfg(8, FourierSpec({{0, cplx(1, 0)}}), 3);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  EnsembleConfig badp = make_cfg(8, exp_spec(), 3);
  badp.precision = 40;
  CHECK_THROWS_AS(badp.validate(), ConfigError);
}

TEST_CASE("block entries follow the row stride with N skipped steps") {
  EnsembleConfig cfg = make_cfg(4, mixed_spec(), 91);
  cfg.validate();
  const HermitianBlockMatrix h = build_X(cfg);
  const BitOrbit orbit(cfg.seed, 2 * 4 * 4 + cfg.precision);
  const double scale = 1.0 / std::sqrt(4.0);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      // row i covers orbit shifts 2N(i-1)+1 .. 2N(i-1)+N
      const std::int64_t pos = 8 * (i - 1) + j;
      const cplx expect =
          cfg.spec.evaluate(orbit.shift_value(pos, cfg.precision)) * scale;
      CHECK(h.block()(i - 1, j - 1) == expect);
    }
  }
}

TEST_CASE("the inline stride variant uses (2N-1)i + j") {
  EnsembleConfig cfg = make_cfg(4, exp_spec(), 14);
  cfg.stride_inline = true;
  cfg.validate();
  const HermitianBlockMatrix h = build_X(cfg);
  const BitOrbit orbit(cfg.seed, 2 * 4 * 4 + cfg.precision);
  const cplx expect =
      cfg.spec.evaluate(orbit.shift_value(7 * 2 + 3, cfg.precision)) * 0.5;
  CHECK(h.block()(1, 2) == expect);
  // and it genuinely differs from the displayed layout
  cfg.stride_inline = false;
  CHECK(build_X(cfg).block() != h.block());
}

TEST_CASE("zero orbit sends every entry to f(0)/sqrt(N)") {
  // digits all zero -> every shift value is 0, f(0) = sum c_k
  const BitOrbit zero(std::vector<int>(200, 0));
  CHECK(zero.shift_value(13, 53) == 0.0);
  CHECK(std::abs(exp_spec().evaluate(0.0) - cplx(1, 0)) < 1e-15);
}

TEST_CASE("Hermitization is exactly Hermitian with zero diagonal blocks") {
  EnsembleConfig cfg = make_cfg(6, cos_spec(), 5);
  const HermitianBlockMatrix h = build_X(cfg);
  const Eigen::MatrixXcd full = h.full();
  CHECK((full - full.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(full.block(0, 0, 6, 6).cwiseAbs().maxCoeff() == 0.0);
  CHECK(full.block(6, 6, 6, 6).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("entry bound |H_ij| <= |c|_1 / sqrt(N)") {
  for (const FourierSpec& f : {exp_spec(), cos_spec(), mixed_spec()}) {
    EnsembleConfig cfg = make_cfg(16, f, 1001);
    const HermitianBlockMatrix h = build_X(cfg);
    CHECK(h.max_abs_entry() <= f.one_norm() / std::sqrt(16.0) + 1e-15);
  }
}

TEST_CASE("construction is deterministic per config") {
  EnsembleConfig cfg = make_cfg(12, mixed_spec(), 2024);
  CHECK(build_X(cfg).block() == build_X(cfg).block());
  cfg.resampled = true;
  CHECK(build_Y(cfg).block() == build_Y(cfg).block());
}

TEST_CASE("resampling below the precision window is invisible") {
  EnsembleConfig cfg = make_cfg(8, exp_spec(), 7, /*w=*/53);
  cfg.precision = 53;
  CHECK(build_Y(cfg).block() == build_X(cfg).block());
}

TEST_CASE("X and Y differ by at most |f'| 2^-W / sqrt(N)") {
  EnsembleConfig cfg = make_cfg(8, cos_spec(), 99, /*w=*/30);
  const Eigen::MatrixXcd diff = build_X(cfg).block() - build_Y(cfg).block();
  const double bound =
      cos_spec().deriv_sup_norm() * std::ldexp(1.0, -30) / std::sqrt(8.0);
  CHECK(diff.cwiseAbs().maxCoeff() <= bound);
  CHECK(diff.cwiseAbs().maxCoeff() > 0.0);  // and they do differ at W=30
}

TEST_CASE("resampled entries beyond the window are uncorrelated") {
  // entries (1,1) and (1, 1+W+1) sit W+1 > W orbit steps apart
  const int w = 8, n = 12, draws = 10000;
  std::vector<double> a_re, b_re, a_im, b_im;
  for (int s = 0; s < draws; ++s) {
    EnsembleConfig cfg = make_cfg(n, exp_spec(), derive_key(500, s), w);
    cfg.resampled = true;
    const Eigen::MatrixXcd& b = build_Y(cfg, ExecPolicy::serial).block();
    a_re.push_back(b(0, 0).real());
    a_im.push_back(b(0, 0).imag());
    b_re.push_back(b(0, w + 1).real());
    b_im.push_back(b(0, w + 1).imag());
  }
  CHECK(std::abs(oracles::correlation(a_re, b_re)) < 0.03);
  CHECK(std::abs(oracles::correlation(a_im, b_im)) < 0.03);
}

TEST_CASE("banded Toeplitz from the exponential is the identity") {
  const CorrelationData d = correlations(exp_spec(), 10);
  const BandedToeplitz phi = build_phiN(d, 32, 10);
  CHECK((phi.dense() - Eigen::MatrixXcd::Identity(32, 32))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
}

TEST_CASE("cosine Toeplitz is a quarter of the identity") {
  const CorrelationData d = correlations(cos_spec(), 10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      build_phiN(d, 24, 10).dense(), Eigen::EigenvaluesOnly);
  for (int i = 0; i < 24; ++i)
    CHECK(es.eigenvalues()(i) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("Toeplitz spectrum stays inside the symbol window plus tail") {
  const FourierSpec specs[] = {
      mixed_spec(),
      FourierSpec({{1, cplx(1, 0)}, {2, cplx(0.5, 0)}}),
      FourierSpec({{1, cplx(0.9, 0.2)}, {2, cplx(0.25, -0.1)},
                   {4, cplx(0.2, 0)}})};
  for (const FourierSpec& f : specs) {
    const CorrelationData d = correlations(f, 12);
    for (int w : {2, 4, 12}) {
      const double tail = d.band_tail(w);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          build_phiN(d, 48, w).dense(), Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues()(0) >= d.g_min() - tail - 1e-10);
      CHECK(es.eigenvalues()(47) <= d.g_max() + tail + 1e-10);
    }
  }
}

TEST_CASE("circulant eigenvalues of the exponential are all one") {
  const CorrelationData d = correlations(exp_spec(), 8);
  for (double e : circulant_eigs(d, 32, 8))
    CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("circulant wrap-around is a rank <= 2W correction") {
  const CorrelationData d = correlations(oracles::dyadic_spec(), 6);
  const int n = 40, w = 6;
  Eigen::MatrixXcd circ = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int lag = i - j;
      if (lag > n / 2) lag -= n;
      if (lag < -n / 2) lag += n;
      if (std::abs(lag) <= w) circ(i, j) = d.phi(lag);
    }
  const Eigen::MatrixXcd diff = circ - build_phiN(d, n, w).dense();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (svd.singularValues()(i) > 1e-12) ++rank;
  CHECK(rank <= 2 * w);
}

TEST_CASE("sorted circulant values interlace the Toeplitz spectrum") {
  const CorrelationData d = correlations(oracles::dyadic_spec(), 6);
  const int n = 96, w = 6;
  const std::vector<double> circ = circulant_eigs(d, n, w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      build_phiN(d, n, w).dense(), Eigen::EigenvaluesOnly);
  for (int j = 0; j < n; ++j) {
    const double e = es.eigenvalues()(j);
    if (j - 2 * w >= 0) CHECK(circ[j - 2 * w] <= e + 1e-9);
    if (j + 2 * w < n) CHECK(e <= circ[j + 2 * w] + 1e-9);
  }
  // neighboring sorted gaps stay O(W sum|phi| / N); constant frozen from
  // the derivative bound 2 pi sum |j phi(j)| <= 2 pi W sum |phi|
  double sum_phi = std::abs(d.phi(0).real());
  for (int j = 1; j <= w; ++j) sum_phi += 2.0 * std::abs(d.phi(j));
  const double gap_bound = 2.0 * std::numbers::pi * w * sum_phi / n;
  for (std::size_t k = 1; k < circ.size(); ++k)
    CHECK(circ[k] - circ[k - 1] <= gap_bound);
}

TEST_CASE("gaussian comparison of the exponential is a Ginibre block") {
  const CorrelationData d = correlations(exp_spec(), 8);
  const int n = 24, draws = 4000;
  double var = 0.0, pseudo_re = 0.0, neighbor = 0.0, cross_rows = 0.0;
  for (int s = 0; s < draws; ++s) {
    const Eigen::MatrixXcd& b =
        build_gaussian_comparison(d, n, 8, derive_key(12, s),
                                  ExecPolicy::serial)
            .block();
    var += std::norm(b(3, 5));
    pseudo_re += (b(3, 5) * b(3, 5)).real();
    neighbor += (b(3, 5) * std::conj(b(3, 6))).real();
    cross_rows += (b(2, 5) * std::conj(b(7, 5))).real();
  }
  CHECK(n * var / draws == doctest::Approx(1.0).epsilon(0.06));
  CHECK(std::abs(n * pseudo_re / draws) < 0.05);
  CHECK(std::abs(n * neighbor / draws) < 0.05);
  CHECK(std::abs(n * cross_rows / draws) < 0.05);
}

TEST_CASE("gaussian comparison reproduces the lag-one covariance") {
  const FourierSpec f({{1, cplx(1, 0)}, {2, cplx(0.5, 0)}});
  const CorrelationData d = correlations(f, 8);
  REQUIRE(d.phi(1) == cplx(0.5, 0));
  const int n = 16, draws = 10000;
  cplx cov(0, 0);
  for (int s = 0; s < draws; ++s) {
    const Eigen::MatrixXcd& b =
        build_gaussian_comparison(d, n, 8, derive_key(13, s),
                                  ExecPolicy::serial)
            .block();
    cov += b(4, 6) * std::conj(b(4, 7));
  }
  // N Cov(B_ij, conj(B_i,j+1)) = phi(1)
  CHECK(std::abs(double(n) * cov / double(draws) - d.phi(1)) < 0.05);
}

TEST_CASE("non-PSD covariance data names the offending minor") {
  // variance 0 with correlation 1 at lag 1 cannot be a covariance
  const CorrelationData bogus({cplx(0, 0), cplx(1, 0)},
                              {cplx(0, 0), cplx(0, 0)},
                              {cplx(0, 0), cplx(1, 0)}, 0.0, 0.0);
  CHECK_THROWS_WITH_AS(build_gaussian_comparison(bogus, 8, 1, 1),
                       doctest::Contains("minor"), NumericalError);
}

TEST_CASE("flow endpoints: identity at t=0, pure gaussian at t=infinity") {
  const CorrelationData d = correlations(exp_spec(), 8);
  EnsembleConfig cfg = make_cfg(10, exp_spec(), 321);
  const HermitianBlockMatrix h0 = build_X(cfg);
  CHECK(ou_interpolate(h0, d, 0.0, 9).block() == h0.block());
  const HermitianBlockMatrix g =
      build_gaussian_comparison(d, 10, d.j_max(), 9);
  CHECK(ou_interpolate(h0, d, INFINITY, 9).block() == g.block());
  CHECK_THROWS_AS(ou_interpolate(h0, d, -1.0, 9), ConfigError);
}

TEST_CASE("flow preserves the entry variance") {
  const CorrelationData d = correlations(exp_spec(), 8);
  const int n = 12, draws = 10000;
  double var = 0.0;
  for (int s = 0; s < draws; ++s) {
    EnsembleConfig cfg = make_cfg(n, exp_spec(), derive_key(71, s));
    const HermitianBlockMatrix ht =
        ou_interpolate(build_X(cfg, ExecPolicy::serial), d, 0.5,
                       derive_key(72, s), ExecPolicy::serial);
    var += std::norm(ht.block()(2, 9));
  }
  CHECK(n * var / draws == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("matrix export round trip") {
  EnsembleConfig cfg = make_cfg(6, mixed_spec(), 17);
  cfg.validate();
  const HermitianBlockMatrix h = build_X(cfg);
  const std::string path = "/tmp/dynrmt_test_matrix.bin";
  write_matrix(path, h,
               {{"seed", cfg.seed}, {"config_hash", hash_hex(cfg.config_hash())}});
  const HermitianBlockMatrix back = read_matrix(path);
  CHECK(back.block() == h.block());
  std::ifstream sidecar(path + ".json");
  REQUIRE(sidecar.good());
  const nlohmann::json side = nlohmann::json::parse(sidecar);
  CHECK(side["dimension"] == 12);
  CHECK(side["seed"] == 17);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}
