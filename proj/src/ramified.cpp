#include "asympto/ramified.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "asympto/error.hpp"
#include "asympto/extend.hpp"
#include "asympto/quadrature.hpp"

namespace asympto {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

void require_alpha(double alpha, double hi, const char* what) {
  if (!(alpha > 0.0) || !(alpha < hi) || !std::isfinite(alpha))
    throw Error(ErrorKind::ConfigInvalid, std::string(what) + ": alpha out of range");
}

double reduce(double a) { return std::remainder(a, 2 * kPi); }

}  // namespace

// Log-magnitudes are shifted in double-double: the Laplace side keeps the
// exact rounding residue of x + g, the Borel side subtracts g from the pair.
// A series that went through the Laplace side therefore comes back with the
// identical high words.
namespace {

std::pair<double, double> two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

FormalSeries shift_log_abs(const FormalSeries& f, double alpha, double sign) {
  const std::size_t n = f.size();
  std::vector<double> la(n), ar(n), lo(n);
  bool any_lo = false;
  for (std::size_t p = 0; p < n; ++p) {
    const double g = sign * std::lgamma(1.0 + alpha * static_cast<double>(p));
    const double x = f.log_abs(p);
    ar[p] = f.arg(p);
    if (!std::isfinite(x)) {
      la[p] = x;
      continue;
    }
    const auto [s, e] = two_sum(x, g);
    const auto [hi, e2] = two_sum(s, e + f.log_abs_lo(p));
    la[p] = hi;
    lo[p] = e2;
    any_lo = any_lo || e2 != 0.0;
  }
  FormalSeries out = FormalSeries::from_log_polar(std::move(la), std::move(ar));
  if (any_lo) out.set_log_abs_lo(std::move(lo));
  out.declared_h = f.declared_h;
  return out;
}

}  // namespace

FormalSeries formal_alpha_laplace(const FormalSeries& f, double alpha) {
  require_alpha(alpha, std::numeric_limits<double>::infinity(), "formal_alpha_laplace");
  return shift_log_abs(f, alpha, 1.0);
}

FormalSeries formal_alpha_borel(const FormalSeries& f, double alpha) {
  require_alpha(alpha, std::numeric_limits<double>::infinity(), "formal_alpha_borel");
  return shift_log_abs(f, alpha, -1.0);
}

cd alpha_kernel(double alpha, cd z) {
  require_alpha(alpha, 2.0, "alpha_kernel");
  if (z == cd{}) return {};
  const cd lw{std::log(std::abs(z)), std::arg(z)};
  const cd s = std::exp(lw / alpha);
  return std::exp(-std::log(alpha) + lw / alpha - s);
}

double alpha_log_moment(double alpha, double lambda) { return std::lgamma(1.0 + alpha * lambda); }

double mittag_leffler_domain(double alpha) {
  require_alpha(alpha, 2.0, "mittag_leffler_domain");
  // At |w|^{1/alpha} = 36 the series cancellation costs about 16 of the 34
  // quad-precision digits, and the large-argument expansion is accurate to
  // roughly exp(-36) relative.
  return std::pow(36.0, alpha);
}

MittagLeffler::MittagLeffler(double alpha) : alpha_(alpha), domain_(mittag_leffler_domain(alpha)) {
  // Enough terms to pass the peak near p = 36 / alpha and decay by 1e-40.
  const std::size_t n = static_cast<std::size_t>(std::ceil(200.0 / alpha)) + 64;
  ratio_.resize(n + 1);
  ratio_[0] = 1;
  __float128 prev = 0;  // lgamma(1)
  for (std::size_t p = 1; p <= n; ++p) {
    const __float128 cur = lgammaq(1 + static_cast<__float128>(alpha) * static_cast<__float128>(p));
    ratio_[p] = expq(prev - cur);
    prev = cur;
  }
}

cd MittagLeffler::series(cd w) const {
  const double r = std::abs(w);
  if (r > domain_ * (1 + 1e-12))
    throw Error(ErrorKind::MittagLefflerDomainExceeded,
                "Mittag-Leffler argument beyond the series domain");
  const __float128 wr = w.real(), wi = w.imag();
  __float128 tr = 1, ti = 0, sr = 1, si = 0;
  const std::size_t peak = static_cast<std::size_t>(std::pow(r, 1.0 / alpha_) / alpha_) + 2;
  for (std::size_t p = 1; p < ratio_.size(); ++p) {
    const __float128 nr = (tr * wr - ti * wi) * ratio_[p];
    const __float128 ni = (tr * wi + ti * wr) * ratio_[p];
    tr = nr;
    ti = ni;
    sr += tr;
    si += ti;
    if (p > peak) {
      const __float128 t2 = tr * tr + ti * ti;
      const __float128 s2 = sr * sr + si * si;
      if (t2 <= s2 * 1e-72Q || t2 < 1e-300Q * 1e-300Q) break;
    }
  }
  return {static_cast<double>(sr), static_cast<double>(si)};
}

namespace {

// 1 / Gamma(x), zero at the poles.
double rgamma(double x) {
  if (x <= 0 && x == std::floor(x)) return 0.0;
  if (x < 0.5) return std::sin(kPi * x) * std::tgamma(1.0 - x) / kPi;
  return 1.0 / std::tgamma(x);
}

}  // namespace

cd MittagLeffler::operator()(cd w) const {
  if (std::abs(w) <= domain_) return series(w);
  // E(w) = (1/alpha) exp(w^{1/alpha}) - sum_k w^{-k} / Gamma(1 - alpha k)
  // summed over the branches w e^{2 pi i m} with |arg| < alpha pi. Each
  // exponential is negligible by the time it switches off at alpha pi.
  const double lr = std::log(std::abs(w));
  const double th = std::arg(w);
  cd out{};
  for (int m = -1; m <= 1; ++m) {
    const double thm = th + 2 * kPi * m;
    if (std::abs(thm) >= alpha_ * kPi) continue;
    const cd lw{lr, thm};
    out += std::exp(std::exp(lw / alpha_) - std::log(alpha_));
  }
  const cd winv = 1.0 / w;
  cd pw = 1.0;
  cd sum{};
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 80; ++k) {
    pw *= winv;
    const double rg = rgamma(1.0 - alpha_ * k);
    const cd term = pw * rg;
    if (rg == 0.0) continue;  // pole of Gamma(1 - alpha k)
    const double mag = std::abs(term);
    if (mag > last) break;  // the expansion started to diverge
    sum += term;
    last = mag;
    if (mag < 1e-18 * std::abs(sum)) break;
  }
  return out - sum;
}

namespace {

struct LaplaceIntegrand {
  const ComplexFn& f;
  double alpha;
  double tau;
  double log_abs_z;
  double rel;  // tau - arg z, reduced

  // Integrand in t = log |u|; du/u = dt.
  cd operator()(double t) const {
    const cd lw{t - log_abs_z, rel};
    const cd s = std::exp(lw / alpha);
    const cd ker = std::exp(-std::log(alpha) + lw / alpha - s);
    if (ker == cd{}) return {};
    return ker * f(std::polar(std::exp(t), tau));
  }
  double log_kernel_abs(double t) const {
    const double x = (t - log_abs_z) / alpha;
    return -std::log(alpha) + x - std::exp(x) * std::cos(rel / alpha);
  }
};

}  // namespace

cd analytic_alpha_laplace(const ComplexFn& f, const GrowthCap& cap, double alpha, double tau, cd z,
                          const RamifiedOptions& opts) {
  require_alpha(alpha, 2.0, "analytic_alpha_laplace");
  if (z == cd{}) throw Error(ErrorKind::OutsideAperture, "Laplace transform evaluated at 0");
  const double rel = reduce(tau - std::arg(z));
  if (std::abs(rel) >= alpha * kPi / 2)
    throw Error(ErrorKind::OutsideAperture, "|arg z - tau| must stay below alpha pi / 2");
  const double c = std::cos(rel / alpha);
  const double az = std::abs(z);
  if (cap.k > 0 && cap.rho > 0) {
    const double crit = 1.0 / alpha;
    const bool exceeded = cap.rho > crit * (1 + 1e-12) ||
                          (std::abs(cap.rho - crit) <= 1e-12 * crit && cap.k >= c * std::pow(az, -crit));
    if (exceeded)
      throw Error(ErrorKind::GrowthCapExceeded, "growth cap not dominated by the kernel decay");
  }
  LaplaceIntegrand g{f, alpha, tau, std::log(az), rel};

  // Integration range: the kernel rises like exp(t / alpha) on the left and
  // the cap-corrected envelope decays double-exponentially on the right.
  const double t_lo = std::log(az) - 42.0 * alpha;
  auto envelope = [&](double t) {
    double e = g.log_kernel_abs(t);
    if (cap.k > 0) e += cap.k * std::exp(cap.rho * t);
    return e;
  };
  const double step = 0.05 * alpha;
  double peak = -std::numeric_limits<double>::infinity();
  double t_hi = t_lo;
  for (int i = 0; i < 200000; ++i) {
    const double e = envelope(t_hi);
    peak = std::max(peak, e);
    if (t_hi > std::log(az) && e < peak - 45.0) break;
    t_hi += step;
  }

  // Trapezoid in t with halving; the integrand is analytic in a strip so
  // the error falls geometrically in 1/h.
  double h = 0.4 * alpha;
  std::size_t n = static_cast<std::size_t>(std::ceil((t_hi - t_lo) / h));
  h = (t_hi - t_lo) / static_cast<double>(n);
  cd sum{};
  for (std::size_t j = 0; j <= n; ++j) sum += g(t_lo + static_cast<double>(j) * h);
  cd value = sum * h;
  double change = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.max_halvings; ++k) {
    h *= 0.5;
    for (std::size_t j = 0; j < n; ++j) sum += g(t_lo + static_cast<double>(2 * j + 1) * h);
    n *= 2;
    const cd next = sum * h;
    change = std::abs(next - value);
    value = next;
    if (k >= 2 && change <= opts.rel_tol * std::abs(value)) break;
  }
  if (!(change <= opts.target * std::max(std::abs(value), 1e-300)))
    throw Error(ErrorKind::QuadratureNotConverged, "alpha-Laplace trapezoid did not converge");
  return value;
}

cd analytic_alpha_borel(const ComplexFn& f, const SectorSpec& source, double alpha, const BorelPath& path,
                        cd u, const RamifiedOptions& opts, std::optional<cd> value_at_zero) {
  require_alpha(alpha, 2.0, "analytic_alpha_borel");
  source.validate();
  if (!(source.opening > alpha))
    throw Error(ErrorKind::PathOutsideSector, "source sector must be wider than alpha");
  if (!(path.epsilon > 0.0) || !(path.epsilon < kPi))
    throw Error(ErrorKind::ConfigInvalid, "BorelPath epsilon must lie in (0, pi)");
  if (!(path.radius > 0.0)) throw Error(ErrorKind::ConfigInvalid, "BorelPath radius must be positive");
  const double half = alpha * (kPi + path.epsilon) / 2;
  const double th_plus = path.tau + half;
  const double th_minus = path.tau - half;
  const double lim = source.half_angle();
  if (std::abs(th_plus - source.direction) >= lim || std::abs(th_minus - source.direction) >= lim ||
      (source.radius && path.radius >= *source.radius) || 2 * half >= 2 * kPi)
    throw Error(ErrorKind::PathOutsideSector, "Borel path leaves the source sector");

  if (u == cd{}) {
    if (value_at_zero) return *value_at_zero;
    return f(std::polar(path.radius * 1e-12, path.tau));
  }
  // On the rays arg(u/z) sits at distance alpha(pi+eps)/2 from arg u - tau;
  // decay of E_alpha towards the origin needs both to stay beyond alpha pi/2.
  if (std::abs(reduce(std::arg(u) - path.tau)) >= alpha * path.epsilon / 2)
    throw Error(ErrorKind::OutsideAperture, "u outside the directions served by this path");
  const MittagLeffler E(alpha);
  const double au = std::abs(u);
  if (au / path.radius > E.domain())
    throw Error(ErrorKind::MittagLefflerDomainExceeded,
                "|u| / |z0| exceeds the Mittag-Leffler series domain on the arc");

  quad::Options q;
  q.rel_tol = opts.rel_tol;
  q.abs_tol = 1e-16;
  q.max_intervals = opts.max_intervals;

  // Rays: z = radius e^{-s} e^{i theta}, dz/z = -ds. Once |z| < |u| the
  // integrand decays like |z| / |u|.
  const double s_cross = std::log(path.radius / au);
  const double s_end = std::max(s_cross, 0.0) + 42.0;
  std::vector<double> bp{0.0};
  for (double d : {-4.0, -1.0, 0.0, 1.0, 4.0, 10.0}) {
    const double s = s_cross + d;
    if (s > bp.back() + 1e-6 && s < s_end) bp.push_back(s);
  }
  bp.push_back(s_end);
  auto ray = [&](double theta) {
    const cd e = std::polar(1.0, theta);
    return quad::gk15(
        [&](double s) {
          const cd z = path.radius * std::exp(-s) * e;
          return E(u / z) * f(z);
        },
        bp, q);
  };
  const quad::Result out = ray(th_plus);
  const quad::Result back = ray(th_minus);
  // Arc clockwise from th_plus to th_minus: dz/z = i dphi.
  std::vector<double> abp;
  const int pieces = 8;
  for (int j = 0; j <= pieces; ++j) abp.push_back(th_minus + (th_plus - th_minus) * j / pieces);
  const quad::Result arc = quad::gk15(
      [&](double phi) {
        const cd z = std::polar(path.radius, phi);
        return E(u / z) * f(z);
      },
      abp, q);
  if (!out.converged || !back.converged || !arc.converged)
    throw Error(ErrorKind::QuadratureNotConverged, "Borel contour quadrature did not converge");
  const cd total = out.value - back.value - cd{0.0, 1.0} * arc.value;
  return -total / cd{0.0, 2 * kPi};
}

namespace {

TransformCheckReport compare_on_ray(const std::string& direction, double phi,
                                    const std::function<cd(cd)>& evaluate, const FormalSeries& expected,
                                    std::size_t p_max, const TransformCheckOptions& opts) {
  if (expected.size() < p_max + 1)
    throw Error(ErrorKind::PreconditionFailed, "expansion shorter than p_max + 1");
  const std::vector<double> x = geometric_ladder(opts.x_max, opts.rho, opts.samples);
  std::vector<cd> values;
  values.reserve(x.size());
  const cd e = std::polar(1.0, phi);
  for (double xi : x) values.push_back(evaluate(xi * e));
  ExtractOptions eo;
  eo.sample_rel_error = opts.sample_rel_error;
  eo.strict = false;
  const auto ext = extract_asymptotic_coeffs(x, values, p_max, eo);

  TransformCheckReport rep;
  rep.direction = direction;
  rep.ray_arg = phi;
  rep.pass = true;
  double scale = 0.0;
  for (std::size_t p = 0; p <= p_max; ++p) scale = std::max(scale, std::abs(expected.coeff(p)));
  for (std::size_t p = 0; p <= p_max; ++p) {
    TransformCheckRow row;
    row.p = p;
    row.expected = expected.coeff(p);
    // Along the ray the coefficient of x^p is a_p e^{i p phi}.
    const cd rot = std::polar(1.0, -static_cast<double>(p) * phi);
    row.extracted = ext[p].value * rot;
    row.error = ext[p].error;
    const double diff = std::abs(row.extracted - row.expected);
    // Agreement within the extractor's own error bar, and a bar narrow
    // enough to say something about the coefficient.
    row.pass = diff <= std::max(row.error, opts.abs_tol) &&
               row.error <= opts.rel_tol * std::abs(row.expected) + opts.abs_floor * scale;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace

std::vector<TransformCheckReport> transform_expansion_check_laplace(
    const ComplexFn& f, const GrowthCap& cap, const FormalSeries& expansion, double alpha, double beta,
    std::size_t p_max, const TransformCheckOptions& opts) {
  require_alpha(alpha, 2.0, "transform_expansion_check");
  if (!(beta > 0.0)) throw Error(ErrorKind::ConfigInvalid, "beta must be positive");
  const FormalSeries expected = formal_alpha_laplace(expansion, alpha);
  std::vector<TransformCheckReport> out;
  for (double phi : {0.0, (beta + alpha) * kPi / 4}) {
    // Direction of integration inside S_beta, leaving phi inside the aperture.
    const double tau = phi * beta / (alpha + beta);
    auto eval = [&](cd z) { return analytic_alpha_laplace(f, cap, alpha, tau, z); };
    out.push_back(compare_on_ray("laplace", phi, eval, expected, p_max, opts));
  }
  return out;
}

TransformCheckReport transform_expansion_check_borel(const ComplexFn& g, const SectorSpec& source,
                                                     const FormalSeries& expansion, double alpha,
                                                     const BorelPath& path, std::size_t p_max,
                                                     const TransformCheckOptions& opts) {
  require_alpha(alpha, 2.0, "transform_expansion_check");
  const FormalSeries expected = formal_alpha_borel(expansion, alpha);
  auto eval = [&](cd u) { return analytic_alpha_borel(g, source, alpha, path, u); };
  return compare_on_ray("borel", path.tau, eval, expected, p_max, opts);
}

}  // namespace asympto
