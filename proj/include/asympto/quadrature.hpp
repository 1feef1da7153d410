#pragma once

#include <complex>
#include <functional>
#include <span>

namespace asympto::quad {

using Integrand = std::function<std::complex<double>(double)>;

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

struct Result {
  std::complex<double> value{};
  double error = 0.0;
  bool converged = false;
  int evaluations = 0;
};

// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Subdivides the interval
// with the largest error estimate until the summed estimate meets
// max(abs_tol, rel_tol * |I|).
Result gk15(const Integrand& f, double a, double b, const Options& opts = {});

// Same, started from the given breakpoints (sorted, at least two).
Result gk15(const Integrand& f, std::span<const double> breakpoints, const Options& opts = {});

// Integral over [a, inf) by chaining [a + L(g^k - 1)/(g - 1), ...] intervals
// of geometrically growing length, stopping once three consecutive pieces
// are negligible against the running total.
Result semi_infinite(const Integrand& f, double a, double first_length, double growth = 2.0,
                     const Options& opts = {});

}  // namespace asympto::quad
