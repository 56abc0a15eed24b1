#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dynrmt {

/// Bad user input: malformed config, inadmissible parameters, bad CLI flags.
/// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure at runtime (non-convergence, singular system,
/// factorization breakdown). The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed-point solver gave up; carries the best iterate found.
struct SceConvergenceError : NumericalError {
  SceConvergenceError(const std::string& msg, std::complex<double> best,
                      double residual)
      : NumericalError(msg), best_iterate(best), best_residual(residual) {}
  std::complex<double> best_iterate;
  double best_residual;
};

}  // namespace dynrmt
