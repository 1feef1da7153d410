#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "asympto/seqcore.hpp"

namespace asympto {

using ComplexFn = std::function<std::complex<double>(std::complex<double>)>;

// Coefficientwise a_p * Gamma(1 + alpha p) and a_p / Gamma(1 + alpha p).
// Phases are untouched and formal_alpha_borel(formal_alpha_laplace(f))
// reproduces the log-magnitudes of f exactly.
FormalSeries formal_alpha_laplace(const FormalSeries& f, double alpha);
FormalSeries formal_alpha_borel(const FormalSeries& f, double alpha);

// e_alpha(z) = (1/alpha) z^{1/alpha} exp(-z^{1/alpha}) and log m_alpha(l) = log Gamma(1 + alpha l).
std::complex<double> alpha_kernel(double alpha, std::complex<double> z);
double alpha_log_moment(double alpha, double lambda);

// Mittag-Leffler function E_alpha(w) = sum w^p / Gamma(1 + alpha p).
class MittagLeffler {
 public:
  explicit MittagLeffler(double alpha);

  double alpha() const { return alpha_; }
  // Radius inside which the quad-precision series is used.
  double domain() const { return domain_; }

  // Series evaluation; throws MittagLefflerDomainExceeded beyond domain().
  std::complex<double> series(std::complex<double> w) const;
  // Series inside the domain, large-argument expansion outside.
  std::complex<double> operator()(std::complex<double> w) const;

 private:
  double alpha_;
  double domain_;
  std::vector<__float128> ratio_;  // Gamma(1 + alpha (p-1)) / Gamma(1 + alpha p)
};

double mittag_leffler_domain(double alpha);

struct GrowthCap {
  // |f(u)| <= C exp(k |u|^rho)
  double C = 1.0;
  double k = 0.0;
  double rho = 0.0;
};

struct RamifiedOptions {
  double rel_tol = 1e-12;
  double target = 1e-8;
  int max_halvings = 14;
  int max_intervals = 4000;
};

// (L_{alpha,tau} f)(z) = int_0^{inf(tau)} e_alpha(u/z) f(u) du/u.
std::complex<double> analytic_alpha_laplace(const ComplexFn& f, const GrowthCap& cap, double alpha,
                                            double tau, std::complex<double> z,
                                            const RamifiedOptions& opts = {});

struct BorelPath {
  double tau = 0.0;
  double radius = 0.5;
  double epsilon = std::numbers::pi / 6;
};

// (B_{alpha,tau} f)(u) = (-1/(2 pi i)) int_{delta} E_alpha(u/z) f(z) dz/z over
// ray out, clockwise arc, ray back. `source` is the bounded sector on which
// f is holomorphic. At u = 0 the limit value_at_zero (default: f at a tiny
// point on the bisecting ray) is returned.
std::complex<double> analytic_alpha_borel(const ComplexFn& f, const SectorSpec& source, double alpha,
                                          const BorelPath& path, std::complex<double> u,
                                          const RamifiedOptions& opts = {},
                                          std::optional<std::complex<double>> value_at_zero = {});

struct TransformCheckRow {
  std::size_t p = 0;
  std::complex<double> expected{};
  std::complex<double> extracted{};
  double error = 0.0;
  bool pass = false;
};

struct TransformCheckReport {
  std::string direction;  // "laplace" or "borel"
  double ray_arg = 0.0;
  std::vector<TransformCheckRow> rows;
  bool pass = false;
};

struct TransformCheckOptions {
  double x_max = 0.1;
  double rho = 0.7;
  std::size_t samples = 24;
  // A row passes when |extracted - expected| is within the error estimate
  // (or abs_tol) and the estimate is below
  // rel_tol |expected| + abs_floor max_q |expected_q|.
  double rel_tol = 0.5;
  double abs_tol = 1e-8;
  double abs_floor = 1e-2;
  double sample_rel_error = 1e-13;
};

// Samples L_alpha f on rays inside S_{beta+alpha} (the real axis and the
// ray at half the half-opening), extracts coefficients and compares them
// with formal_alpha_laplace(expansion).
std::vector<TransformCheckReport> transform_expansion_check_laplace(
    const ComplexFn& f, const GrowthCap& cap, const FormalSeries& expansion, double alpha, double beta,
    std::size_t p_max, const TransformCheckOptions& opts = {});

// Samples B_alpha g on the positive axis and compares with
// formal_alpha_borel(expansion).
TransformCheckReport transform_expansion_check_borel(const ComplexFn& g, const SectorSpec& source,
                                                     const FormalSeries& expansion, double alpha,
                                                     const BorelPath& path, std::size_t p_max,
                                                     const TransformCheckOptions& opts = {});

}  // namespace asympto
