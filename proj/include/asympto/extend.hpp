#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "asympto/flatmom.hpp"
#include "asympto/seqcore.hpp"

namespace asympto {

struct TypeFit {
  double h = 1.0;
  double norm = 0.0;
};

struct TypeFitOptions {
  double h_min = 1e-3;
  double h_max = 1e3;
  // Norm cap; defaults to max(1, |a_0|).
  std::optional<double> cap;
};

// Minimal h with sup_p |a_p| / (h^p M_p) <= cap, clamped to [h_min, h_max].
TypeFit fit_type(const FormalSeries& f, const WeightSequence& M, const TypeFitOptions& opts = {});

struct BorelTransform {
  // b_p = a_{p+1} / mu(p) in log-polar form.
  std::vector<double> log_abs;
  std::vector<double> arg;
  std::complex<double> a0{};
  double h = 1.0;
  double norm = 0.0;
  double h1 = 1.0;
  double h2 = 1.0;
  double R = 1.0;
  double R0 = 0.5;

  std::complex<double> coeff(std::size_t p) const;
  std::size_t size() const { return log_abs.size(); }
};

BorelTransform formal_borel(const FormalSeries& f, const TypeFit& type, const MomentSequence& mu,
                            const std::variant<MomentFit, MomentNotEquivalent>& shifted_fit);

struct ExtensionOptions {
  double rel_tol = 1e-11;
  // Relative truncation level for the Horner evaluation of g.
  double series_tol = 1e-14;
  int max_intervals = 4000;
};

// Number of Borel coefficients used when evaluating g on [0, R0].
std::size_t borel_truncation_order(const BorelTransform& B, const ExtensionOptions& opts = {});

std::complex<double> apply_extension(const BorelTransform& B, const FlatFunction& kernel,
                                     std::complex<double> z, const ExtensionOptions& opts = {});

// T(z) - sum_{n<p} a_n z^n with a_n = b_{n-1} mu(n-1), evaluated without
// cancellation as
//   int_0^R0 e(u/z) sum_{k>=p-1} b_k u^k du - int_R0^inf e(u/z) sum_{k<p-1} b_k u^k du.
std::complex<double> extension_remainder(const BorelTransform& B, const FlatFunction& kernel,
                                         std::complex<double> z, std::size_t p,
                                         const ExtensionOptions& opts = {});

struct RemainderGrid {
  double z_min = 1e-3;
  double z_max = 1.0;
  int n_moduli = 13;
  // Arguments as fractions of the half opening of S_gamma.
  std::vector<double> arg_fractions = {0.0, 0.5, -0.5, 0.9, -0.9};
  double gamma = 0.5;
};

struct RemainderRow {
  std::size_t p = 0;
  double sup_scaled = 0.0;  // sup |R_p(z)| / (M_p |z|^p)
  double sup_norm = 0.0;    // at the fitted h'
  double bound = 0.0;       // C
};

struct RemainderReport {
  std::vector<std::complex<double>> grid;
  std::vector<RemainderRow> rows;
  double h = 1.0;
  double h1 = 1.0, h2 = 1.0;
  double R0 = 0.0;
  double c_pred = 0.0;
  double C = 0.0;
  double fitted_h = 0.0;
  double safety = 2.0;
  bool pass = false;
  std::string detail;

  std::string to_csv() const;
};

RemainderReport remainder_report(const BorelTransform& B, const FlatFunction& kernel,
                                 const FlatnessCertificate& cert, const WeightSequence& M,
                                 const RemainderGrid& grid,
                                 std::size_t p_max, const ExtensionOptions& opts = {},
                                 double safety = 2.0);

struct ExtractedCoefficient {
  std::complex<double> value{};
  double error = 0.0;
  bool reliable = false;
};

struct ExtractOptions {
  // Relative accuracy of the samples, used for the noise term.
  double sample_rel_error = 1e-12;
  double abs_floor = 1e-9;
  int max_order = 8;
  bool strict = true;
};

std::vector<double> geometric_ladder(double x_max, double rho, std::size_t count);

std::vector<ExtractedCoefficient> extract_asymptotic_coeffs(
    const std::vector<double>& x, const std::vector<std::complex<double>>& values, std::size_t k_max,
    const ExtractOptions& opts = {});

// Everything needed to run the extension operator for one (M, f, kernel).
struct ExtensionSetup {
  TypeFit type;
  MomentSequence mu;
  MomentFit moment_fit;
  FlatnessCertificate certificate;
  BorelTransform borel;
  double c_pred = 0.0;
};

ExtensionSetup prepare_extension(const FormalSeries& f, const WeightSequence& M,
                                 const FlatFunction& kernel, std::size_t p_max,
                                 const TypeFitOptions& type_opts = {},
                                 const FlatnessGrids& grids = {});

}  // namespace asympto
