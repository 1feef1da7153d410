#include "asympto/extend.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "asympto/error.hpp"
#include "asympto/quadrature.hpp"

namespace asympto {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
using cd = std::complex<double>;

void require_in_sector(const FlatFunction& F, cd z) {
  if (z == cd{} || std::abs(std::arg(z)) >= F.sector().half_angle())
    throw Error(ErrorKind::OutsideSector, "extension argument outside the kernel sector");
}

// sum_{k=from}^{to-1} c_k u^{k-from}
cd horner(const std::vector<cd>& c, std::size_t from, std::size_t to, double u) {
  cd s{};
  for (std::size_t k = to; k-- > from;) s = s * u + c[k];
  return s;
}

std::vector<cd> coefficients(const BorelTransform& B, std::size_t n) {
  std::vector<cd> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = B.coeff(k);
  return c;
}

std::vector<double> breakpoints(double r, double R0) {
  std::vector<double> bp = {0.0};
  for (double u = r / 16; u < R0; u *= 4) bp.push_back(u);
  bp.push_back(R0);
  return bp;
}

quad::Result integrate_scaled(const quad::Integrand& f, std::span<const double> bp,
                              const ExtensionOptions& opts) {
  // Absolute target taken against the integral of |f|, i.e. the peak scale.
  quad::Options coarse{1e-3, 0.0, 400};
  auto mag = quad::gk15([&](double u) { return cd(std::abs(f(u)), 0.0); }, bp, coarse);
  quad::Options o{opts.rel_tol, opts.rel_tol * std::abs(mag.value), opts.max_intervals};
  return quad::gk15(f, bp, o);
}

}  // namespace

TypeFit fit_type(const FormalSeries& f, const WeightSequence& M, const TypeFitOptions& opts) {
  if (f.empty()) throw Error(ErrorKind::EmptySeries, "fit_type: series has no coefficients");
  std::vector<double> r(f.size());
  bool any = false;
  for (std::size_t p = 0; p < f.size(); ++p) {
    r[p] = f.log_abs(p) - M.log_M(p);
    any = any || r[p] > kNegInf;
  }
  if (!any) return {opts.h_min, 0.0};
  const double cap = opts.cap.value_or(std::max(1.0, std::abs(f.coeff(0))));
  const double lcap = std::log(cap);
  double lh = std::log(opts.h_min);
  for (std::size_t p = 1; p < f.size(); ++p)
    if (r[p] > kNegInf) lh = std::max(lh, (r[p] - lcap) / static_cast<double>(p));
  lh = std::min(lh, std::log(opts.h_max));
  double ln = kNegInf;
  for (std::size_t p = 0; p < f.size(); ++p) ln = std::max(ln, r[p] - static_cast<double>(p) * lh);
  return {std::exp(lh), std::exp(ln)};
}

cd BorelTransform::coeff(std::size_t p) const {
  if (log_abs.at(p) == kNegInf) return {};
  return std::polar(std::exp(log_abs[p]), arg[p]);
}

BorelTransform formal_borel(const FormalSeries& f, const TypeFit& type, const MomentSequence& mu,
                            const std::variant<MomentFit, MomentNotEquivalent>& shifted_fit) {
  if (f.empty()) throw Error(ErrorKind::EmptySeries, "formal_borel: series has no coefficients");
  if (std::holds_alternative<MomentNotEquivalent>(shifted_fit))
    throw Error(ErrorKind::NotShiftedEquivalent, "moments are not equivalent to the shifted sequence");
  const auto& fit = std::get<MomentFit>(shifted_fit);
  const std::size_t n = f.size() - 1;
  if (n > mu.size() || (n > 0 && fit.window.hi + 1 < n))
    throw Error(ErrorKind::MomentsMissing, "moments or their fit do not cover p = " + std::to_string(n - 1));
  BorelTransform B;
  B.a0 = f.coeff(0);
  B.h = type.h;
  B.norm = type.norm;
  B.h1 = fit.h1;
  B.h2 = fit.h2;
  B.R = fit.h1 / type.h;
  B.R0 = B.R / 2;
  B.log_abs.resize(n);
  B.arg.resize(n);
  const double lratio = std::log(type.h) - std::log(fit.h1);
  const double lnorm = type.norm > 0 ? std::log(type.norm) : kNegInf;
  for (std::size_t p = 0; p < n; ++p) {
    B.log_abs[p] = f.log_abs(p + 1) - mu.log_mu[p];
    B.arg[p] = f.arg(p + 1);
    const double bound = lnorm + static_cast<double>(p + 1) * lratio;
    if (B.log_abs[p] > bound + 1e-10 * std::max(1.0, std::abs(bound)))
      throw Error(ErrorKind::Inconsistent,
                  "Borel coefficient " + std::to_string(p) + " exceeds norm (h/h1)^{p+1}");
  }
  return B;
}

std::size_t borel_truncation_order(const BorelTransform& B, const ExtensionOptions& opts) {
  if (B.size() == 0 || !(B.norm > 0)) return 0;
  double lscale = kNegInf;
  for (std::size_t k = 0; k < B.size(); ++k)
    lscale = std::max(lscale, B.log_abs[k] + static_cast<double>(k) * std::log(B.R0));
  if (lscale == kNegInf) return 0;
  // Tail beyond N is at most norm (h/h1) 2^{1-N}.
  const double lt = std::log(2 * B.norm * B.h / B.h1) - std::log(opts.series_tol) - lscale;
  const double N = std::ceil(lt / std::log(2.0));
  return std::min(B.size(), static_cast<std::size_t>(std::max(1.0, N)));
}

cd apply_extension(const BorelTransform& B, const FlatFunction& kernel, cd z,
                   const ExtensionOptions& opts) {
  require_in_sector(kernel, z);
  const std::size_t N = borel_truncation_order(B, opts);
  if (N == 0) return B.a0;
  const auto c = coefficients(B, N);
  auto f = [&](double u) { return std::exp(kernel.log_G(z / u)) * horner(c, 0, N, u); };
  const auto bp = breakpoints(std::abs(z), B.R0);
  auto r = integrate_scaled(f, bp, opts);
  if (!r.converged)
    throw Error(ErrorKind::QuadratureNotConverged, "extension integral did not converge");
  return B.a0 + r.value;
}

cd extension_remainder(const BorelTransform& B, const FlatFunction& kernel, cd z, std::size_t p,
                       const ExtensionOptions& opts) {
  if (p == 0) return apply_extension(B, kernel, z, opts);
  require_in_sector(kernel, z);
  // The tail sum uses every stored coefficient: the truncation order of g
  // is calibrated against |g|, not against the much smaller remainder.
  const std::size_t split = p - 1;
  const std::size_t top = B.size();
  const auto c = coefficients(B, top);
  const double r = std::abs(z);

  cd near{};
  if (split < top) {
    auto f = [&](double u) {
      return std::exp(kernel.log_G(z / u)) * std::pow(u, static_cast<double>(split)) * horner(c, split, top, u);
    };
    auto q = integrate_scaled(f, breakpoints(r, B.R0), opts);
    if (!q.converged) throw Error(ErrorKind::QuadratureNotConverged, "remainder integral did not converge");
    near = q.value;
  }
  cd far{};
  const std::size_t deg = std::min(split, B.size());
  if (deg > 0) {
    auto f = [&](double u) { return std::exp(kernel.log_G(z / u)) * horner(c, 0, deg, u); };
    quad::Options coarse{1e-3, 0.0, 400};
    auto mag = quad::semi_infinite([&](double u) { return cd(std::abs(f(u)), 0.0); }, B.R0,
                                   std::max(r, 1e-3), 2.0, coarse);
    quad::Options o{opts.rel_tol, opts.rel_tol * std::abs(mag.value), opts.max_intervals};
    auto q = quad::semi_infinite(f, B.R0, std::max(r, 1e-3), 2.0, o);
    if (!q.converged)
      throw Error(ErrorKind::QuadratureNotConverged, "remainder tail integral did not converge");
    far = q.value;
  }
  return near - far;
}

std::string RemainderReport::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "p,sup_norm,fitted\n";
  for (const auto& row : rows) os << row.p << "," << row.sup_norm << "," << row.bound << "\n";
  return os.str();
}

RemainderReport remainder_report(const BorelTransform& B, const FlatFunction& kernel,
                                 const FlatnessCertificate& cert, const WeightSequence& M,
                                 const RemainderGrid& grid, std::size_t p_max,
                                 const ExtensionOptions& opts, double safety) {
  RemainderReport rep;
  rep.h = B.h;
  rep.h1 = B.h1;
  rep.h2 = B.h2;
  rep.R0 = B.R0;
  rep.safety = safety;
  rep.c_pred = 2 * cert.K4 * B.h2 / (cert.K2 * B.h1);
  rep.C = cert.K3 / cert.K1 * B.norm * safety;

  const double half = grid.gamma * std::acos(-1.0) / 2;
  for (int i = 0; i < grid.n_moduli; ++i) {
    const double lr = std::log(grid.z_min) +
                      (std::log(grid.z_max) - std::log(grid.z_min)) * i / std::max(1, grid.n_moduli - 1);
    for (double fr : grid.arg_fractions) rep.grid.push_back(std::polar(std::exp(lr), fr * half));
  }
  std::vector<double> lsup(p_max + 1, kNegInf);
  for (const auto& z : rep.grid) {
    const double lr = std::log(std::abs(z));
    for (std::size_t p = 0; p <= p_max; ++p) {
      const double a = std::abs(extension_remainder(B, kernel, z, p, opts));
      if (a == 0) continue;
      lsup[p] = std::max(lsup[p], std::log(a) - M.log_M(p) - static_cast<double>(p) * lr);
    }
  }
  const double lC = B.norm > 0 ? std::log(rep.C) : kNegInf;
  double lh = std::log(1e-3);
  for (std::size_t p = 1; p <= p_max; ++p)
    if (lsup[p] > kNegInf) lh = std::max(lh, (lsup[p] - lC) / static_cast<double>(p));
  if (B.norm == 0) lh = std::log(1e-3);
  rep.fitted_h = std::exp(lh);
  for (std::size_t p = 0; p <= p_max; ++p) {
    RemainderRow row;
    row.p = p;
    row.sup_scaled = std::exp(lsup[p]);
    row.sup_norm = std::exp(lsup[p] - static_cast<double>(p) * lh);
    row.bound = rep.C;
    rep.rows.push_back(row);
  }
  const bool s0 = B.norm == 0 || lsup[0] <= lC;
  const bool sh = rep.fitted_h <= safety * rep.c_pred * B.h;
  rep.pass = s0 && sh;
  std::ostringstream os;
  os << "h'=" << rep.fitted_h << " vs safety*c_pred*h=" << safety * rep.c_pred * B.h
     << (s0 ? "" : "; sup |T| exceeds C");
  rep.detail = os.str();
  return rep;
}

std::vector<double> geometric_ladder(double x_max, double rho, std::size_t count) {
  if (!(rho > 0 && rho < 1)) throw Error(ErrorKind::ConfigInvalid, "ladder ratio must lie in (0,1)");
  std::vector<double> x(count);
  for (std::size_t j = 0; j < count; ++j) x[j] = x_max * std::pow(rho, static_cast<double>(j));
  return x;
}

namespace {

// Coefficients of the polynomial through (x_j, y_j), j in [i, i+m], together
// with the row sums sum_j |L_kj| |y_j| of the inverse Vandermonde matrix that
// bound the propagation of sample noise into coefficient k.
struct LocalFit {
  std::vector<cd> coef;
  std::vector<double> amplification;
};

LocalFit interpolate(const std::vector<double>& x, const std::vector<cd>& y, std::size_t i, std::size_t m) {
  const std::size_t n = m + 1;
  const long double s = x[i];  // scale keeps the Vandermonde system well balanced
  std::vector<std::vector<long double>> A(n, std::vector<long double>(2 * n, 0.0L));
  for (std::size_t r = 0; r < n; ++r) {
    long double t = 1.0L, xr = x[i + r] / s;
    for (std::size_t c = 0; c < n; ++c) {
      A[r][c] = t;
      t *= xr;
    }
    A[r][n + r] = 1.0L;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    const long double d = A[c][c];
    for (auto& v : A[c]) v /= d;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = A[r][c];
      if (f == 0.0L) continue;
      for (std::size_t t = 0; t < 2 * n; ++t) A[r][t] -= f * A[c][t];
    }
  }
  LocalFit out{std::vector<cd>(n), std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> acc{};
    long double amp = 0.0L;
    const long double sk = std::pow(s, static_cast<long double>(k));
    for (std::size_t j = 0; j < n; ++j) {
      const long double l = A[k][n + j] / sk;
      acc += l * std::complex<long double>(y[i + j].real(), y[i + j].imag());
      amp += std::fabs(l) * std::abs(y[i + j]);
    }
    out.coef[k] = cd(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    out.amplification[k] = static_cast<double>(amp);
  }
  return out;
}

}  // namespace

std::vector<ExtractedCoefficient> extract_asymptotic_coeffs(const std::vector<double>& x,
                                                            const std::vector<cd>& values,
                                                            std::size_t k_max,
                                                            const ExtractOptions& opts) {
  const std::size_t J = x.size();
  if (J != values.size() || J < k_max + 3)
    throw Error(ErrorKind::ConfigInvalid, "extraction needs matching samples, at least k_max + 3");
  // Every window of consecutive ladder points and every order m yields an
  // interpolant; its k-th coefficient is the deflated, extrapolated value of
  // a_k for that window. Orders m-1 and m on overlapping windows give the
  // truncation estimate; the inverse Vandermonde row gives the noise term.
  const std::size_t order = std::min<std::size_t>(std::max<std::size_t>(opts.max_order, k_max + 1), J - 1);
  std::vector<std::vector<LocalFit>> fits(order + 1);
  for (std::size_t m = 0; m <= order; ++m)
    for (std::size_t i = 0; i + m < J; ++i) fits[m].push_back(interpolate(x, values, i, m));

  std::vector<ExtractedCoefficient> out;
  for (std::size_t k = 0; k <= k_max; ++k) {
    double best_err = std::numeric_limits<double>::infinity();
    cd best{};
    for (std::size_t m = k + 1; m <= order; ++m) {
      for (std::size_t i = 0; i + m < J; ++i) {
        const cd v = fits[m][i].coef[k];
        const double diff = std::max(std::abs(v - fits[m - 1][i].coef[k]), std::abs(v - fits[m - 1][i + 1].coef[k]));
        const double err = diff + opts.sample_rel_error * fits[m][i].amplification[k];
        if (err < best_err) {
          best_err = err;
          best = v;
        }
      }
    }
    ExtractedCoefficient c{best, best_err, false};
    c.reliable = best_err <= 0.1 * std::abs(best) || best_err <= opts.abs_floor;
    if (!c.reliable && opts.strict)
      throw Error(ErrorKind::IllConditioned, "coefficient " + std::to_string(k) + " error estimate " +
                                                 std::to_string(best_err) + " exceeds 10% of its value");
    out.push_back(c);
  }
  return out;
}

ExtensionSetup prepare_extension(const FormalSeries& f, const WeightSequence& M,
                                 const FlatFunction& kernel, std::size_t p_max,
                                 const TypeFitOptions& type_opts, const FlatnessGrids& grids) {
  ExtensionSetup s;
  s.type = fit_type(f, M, type_opts);
  const std::size_t hi = std::max(p_max + 4, f.size() >= 2 ? f.size() - 2 : 0);
  s.mu = moments(kernel, hi);
  auto fit = moment_equiv_fit(s.mu, M, MomentMode::Shifted, {0, hi});
  s.borel = formal_borel(f, s.type, s.mu, fit);
  s.moment_fit = std::get<MomentFit>(fit);
  auto cert = verify_flatness(kernel, M, grids);
  if (auto* fail = std::get_if<FlatnessFailure>(&cert))
    throw Error(ErrorKind::PreconditionFailed, "flatness certificate failed on the " + fail->bound +
                                                   " bound: " + fail->detail);
  s.certificate = std::get<FlatnessCertificate>(cert);
  s.c_pred = 2 * s.certificate.K4 * s.moment_fit.h2 / (s.certificate.K2 * s.moment_fit.h1);
  return s;
}

}  // namespace asympto
