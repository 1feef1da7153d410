#include "asympto/seqcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "asympto/error.hpp"
#include "asympto/numeric.hpp"

namespace asympto {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw Error(ErrorKind::ConfigInvalid, msg);
}

double two_pi_reduce(double a) {
  constexpr double pi = std::numbers::pi;
  a = std::remainder(a, 2 * pi);
  if (a <= -pi) a += 2 * pi;
  return a;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Gevrey: return "gevrey";
    case Family::GevreyLog: return "gevreylog";
    case Family::QGevrey: return "qgevrey";
    case Family::PowerSigma: return "powsigma";
    case Family::QPP: return "qpp";
    case Family::Table: return "table";
  }
  return "table";
}

void WeightSequence::finish_from_quotients(double log_M0) {
  log_M_.assign(log_m_.size() + 1, 0.0);
  numeric::CompensatedSum s;
  s.add(log_M0);
  log_M_[0] = log_M0;
  for (std::size_t p = 0; p < log_m_.size(); ++p) {
    s.add(log_m_[p]);
    log_M_[p + 1] = s.value();
  }
}

void WeightSequence::finish_from_values() {
  log_m_.resize(log_M_.size() - 1);
  for (std::size_t p = 0; p + 1 < log_M_.size(); ++p) log_m_[p] = log_M_[p + 1] - log_M_[p];
}

WeightSequence WeightSequence::gevrey(double alpha, std::size_t window) {
  require(alpha > 0, "gevrey: alpha must be positive");
  WeightSequence M;
  M.params_ = {Family::Gevrey, alpha};
  M.label_ = "gevrey(" + std::to_string(alpha) + ")";
  M.log_m_.resize(window + 1);
  M.log_M_.resize(window + 2);
  for (std::size_t p = 0; p <= window; ++p) M.log_m_[p] = alpha * std::log(static_cast<double>(p + 1));
  for (std::size_t p = 0; p <= window + 1; ++p)
    M.log_M_[p] = alpha * std::lgamma(static_cast<double>(p) + 1.0);
  M.log_M_[0] = 0.0;
  return M;
}

WeightSequence WeightSequence::gevrey_log(double alpha, double beta, std::size_t window) {
  require(alpha > 0, "gevreylog: alpha must be positive");
  WeightSequence M;
  M.params_ = {Family::GevreyLog, alpha, beta};
  M.label_ = "gevreylog(" + std::to_string(alpha) + "," + std::to_string(beta) + ")";
  M.log_m_.resize(window + 1);
  const double e = std::numbers::e;
  for (std::size_t p = 0; p <= window; ++p) {
    const double x = static_cast<double>(p);
    M.log_m_[p] = alpha * std::log(x + 1) + beta * std::log(std::log(e + x + 1));
  }
  // Running maximum repairs the finitely many non-monotone head terms.
  double run = M.log_m_[0];
  for (std::size_t p = 1; p <= window; ++p) {
    if (M.log_m_[p] < run) {
      M.log_m_[p] = run;
      ++M.repaired_;
    }
    run = M.log_m_[p];
  }
  M.finish_from_quotients(0.0);
  return M;
}

WeightSequence WeightSequence::q_gevrey(double q, double alpha, std::size_t window) {
  require(q > 1, "qgevrey: q must exceed 1");
  require(alpha > 0, "qgevrey: alpha must be positive");
  WeightSequence M;
  M.params_ = {Family::QGevrey, alpha, 0.0, q};
  M.label_ = "qgevrey(" + std::to_string(q) + "," + std::to_string(alpha) + ")";
  const double lq = std::log(q);
  M.log_m_.resize(window + 1);
  M.log_M_.resize(window + 2);
  for (std::size_t p = 0; p <= window + 1; ++p)
    M.log_M_[p] = std::pow(static_cast<double>(p), alpha) * lq;
  M.log_M_[0] = 0.0;
  for (std::size_t p = 0; p <= window; ++p) {
    const double x = static_cast<double>(p);
    // (p+1)^a - p^a without cancellation: p^a * expm1(a*log1p(1/p)).
    const double d = p == 0 ? 1.0 : std::pow(x, alpha) * std::expm1(alpha * std::log1p(1.0 / x));
    M.log_m_[p] = d * lq;
  }
  return M;
}

WeightSequence WeightSequence::power_sigma(double tau, double sigma, std::size_t window) {
  require(tau > 0, "powsigma: tau must be positive");
  require(sigma > 1, "powsigma: sigma must exceed 1");
  WeightSequence M;
  M.params_ = {Family::PowerSigma, 0.0, 0.0, 0.0, tau, sigma};
  M.label_ = "powsigma(" + std::to_string(tau) + "," + std::to_string(sigma) + ")";
  M.log_M_.resize(window + 2);
  for (std::size_t p = 0; p <= window + 1; ++p) {
    const double x = static_cast<double>(p);
    M.log_M_[p] = p == 0 ? 0.0 : tau * std::pow(x, sigma) * std::log(x);
  }
  M.finish_from_values();
  return M;
}

WeightSequence WeightSequence::qpp(double q, std::size_t window) {
  require(q > 1, "qpp: q must exceed 1");
  WeightSequence M;
  M.params_ = {Family::QPP, 0.0, 0.0, q};
  M.label_ = "qpp(" + std::to_string(q) + ")";
  const double lq = std::log(q);
  M.log_M_.resize(window + 2);
  for (std::size_t p = 0; p <= window + 1; ++p) {
    const double x = static_cast<double>(p);
    M.log_M_[p] = p == 0 ? 0.0 : std::pow(x, x) * lq;
  }
  M.finish_from_values();
  return M;
}

WeightSequence WeightSequence::table(std::vector<double> log_m, std::string label) {
  if (log_m.empty()) throw Error(ErrorKind::ConfigInvalid, "table: empty quotient list");
  for (double v : log_m)
    if (!std::isfinite(v)) throw Error(ErrorKind::ConfigInvalid, "table: non-finite log quotient");
  WeightSequence M;
  M.params_ = {Family::Table};
  M.label_ = std::move(label);
  M.log_m_ = std::move(log_m);
  M.finish_from_quotients(0.0);
  M.log_convex_ = std::is_sorted(M.log_m_.begin(), M.log_m_.end());
  return M;
}

WeightSequence WeightSequence::from_log_values(std::vector<double> log_M, std::string label) {
  if (log_M.size() < 2) throw Error(ErrorKind::ConfigInvalid, "table: need at least two values");
  WeightSequence M;
  M.params_ = {Family::Table};
  M.label_ = std::move(label);
  M.log_M_ = std::move(log_M);
  M.finish_from_values();
  M.log_convex_ = std::is_sorted(M.log_m_.begin(), M.log_m_.end());
  return M;
}

double WeightSequence::log_M(std::size_t p) const {
  if (p >= log_M_.size())
    throw Error(ErrorKind::WindowExceeded,
                label_ + ": log M index " + std::to_string(p) + " beyond window");
  return log_M_[p];
}

double WeightSequence::log_m(std::size_t p) const {
  if (p >= log_m_.size())
    throw Error(ErrorKind::WindowExceeded,
                label_ + ": log m index " + std::to_string(p) + " beyond window");
  return log_m_[p];
}

std::vector<double> quotients(const WeightSequence& M, std::size_t p_max) {
  if (p_max > M.window())
    throw Error(ErrorKind::WindowExceeded, "quotients: p_max " + std::to_string(p_max) +
                                               " exceeds window " + std::to_string(M.window()));
  auto v = M.log_m_values();
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(p_max + 1)};
}

namespace {

template <class F>
WeightSequence map_log_values(const WeightSequence& M, const std::string& tag, F&& f) {
  auto src = M.log_M_values();
  std::vector<double> out(src.size());
  for (std::size_t p = 0; p < src.size(); ++p) out[p] = f(p, src[p]);
  return WeightSequence::from_log_values(std::move(out), tag + "(" + M.label() + ")");
}

double lfact(std::size_t p) { return std::lgamma(static_cast<double>(p) + 1.0); }

}  // namespace

WeightSequence transform(const WeightSequence& M, const TransformKind& kind) {
  struct Visitor {
    const WeightSequence& M;
    WeightSequence operator()(Hat) const {
      return map_log_values(M, "hat", [](std::size_t p, double v) { return v + lfact(p); });
    }
    WeightSequence operator()(Check) const {
      return map_log_values(M, "check", [](std::size_t p, double v) { return v - lfact(p); });
    }
    WeightSequence operator()(ShiftPlusOne) const {
      auto src = M.log_M_values();
      std::vector<double> out(src.begin() + 1, src.end());
      return WeightSequence::from_log_values(std::move(out), "shift(" + M.label() + ")");
    }
    WeightSequence operator()(Power k) const {
      require(k.r > 0, "power: exponent must be positive");
      return map_log_values(M, "power", [r = k.r](std::size_t, double v) { return r * v; });
    }
    WeightSequence operator()(GammaMul g) const {
      require(g.alpha > 0, "gammamul: alpha must be positive");
      return map_log_values(M, "gammamul", [a = g.alpha](std::size_t p, double v) {
        return v + std::lgamma(1.0 + a * static_cast<double>(p));
      });
    }
    WeightSequence operator()(GammaDiv g) const {
      require(g.alpha > 0, "gammadiv: alpha must be positive");
      return map_log_values(M, "gammadiv", [a = g.alpha](std::size_t p, double v) {
        return v - std::lgamma(1.0 + a * static_cast<double>(p));
      });
    }
  };
  return std::visit(Visitor{M}, kind);
}

WeightSequence equivalent_scale(const WeightSequence& M, double h) {
  require(h > 0, "equivalent_scale: h must be positive");
  const double lh = std::log(h);
  auto out = map_log_values(M, "scale", [lh](std::size_t p, double v) {
    return v + lh * static_cast<double>(p + 1);
  });
  // Keep M_0 = 1 so the result stays a weight sequence.
  std::vector<double> vals(out.log_M_values().begin(), out.log_M_values().end());
  for (double& v : vals) v -= lh;
  return WeightSequence::from_log_values(std::move(vals), out.label());
}

namespace {

void check_window(const WeightSequence& M, Window w, const char* op) {
  if (w.lo > w.hi) throw Error(ErrorKind::ConfigInvalid, std::string(op) + ": empty window");
  if (w.hi > M.window())
    throw Error(ErrorKind::WindowExceeded, std::string(op) + ": window end " +
                                               std::to_string(w.hi) + " exceeds " +
                                               std::to_string(M.window()) + " of " + M.label());
}

}  // namespace

std::variant<EquivalenceFit, NotEquivalent> equivalence_fit(const WeightSequence& M,
                                                            const WeightSequence& L, Window w,
                                                            const TrendConfig& cfg) {
  check_window(M, w, "equivalence_fit");
  check_window(L, w, "equivalence_fit");
  auto bracket = [&](Window sub) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t p = sub.lo; p <= sub.hi; ++p) {
      const double d = (M.log_M(p) - L.log_M(p)) / static_cast<double>(p + 1);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    return std::pair{lo, hi};
  };
  // The non-decreasing quantity whose trend gauges divergence is the larger
  // of the two bracket magnitudes.
  auto trend = numeric::nested_trend(w, cfg, [&](Window sub) {
    auto [lo, hi] = bracket(sub);
    return std::max(hi, -lo);
  });
  if (trend.diverges) return NotEquivalent{w, trend.slope};
  auto [lo, hi] = bracket(w);
  EquivalenceFit fit;
  fit.lower_h = std::exp(lo);
  fit.upper_h = std::exp(hi);
  fit.window = w;
  fit.trend_slope = trend.slope;
  double resid = 0.0;
  for (std::size_t p = w.lo; p <= w.hi; ++p) {
    const double diff = M.log_M(p) - L.log_M(p);
    const double n = static_cast<double>(p + 1);
    resid = std::max({resid, std::log(fit.lower_h) * n - diff, diff - std::log(fit.upper_h) * n});
  }
  fit.residual = resid;
  return fit;
}

std::variant<ComparabilityFit, NotComparable> quotient_comparability_fit(const WeightSequence& M,
                                                                         const WeightSequence& L,
                                                                         Window w,
                                                                         const TrendConfig& cfg) {
  check_window(M, w, "quotient_comparability_fit");
  check_window(L, w, "quotient_comparability_fit");
  auto sup = [&](Window sub) {
    double s = 0.0;
    for (std::size_t p = sub.lo; p <= sub.hi; ++p) s = std::max(s, std::abs(M.log_m(p) - L.log_m(p)));
    return s;
  };
  auto trend = numeric::nested_trend(w, cfg, sup);
  if (trend.diverges) return NotComparable{w, trend.slope};
  return ComparabilityFit{std::exp(sup(w)), w, trend.slope};
}

FormalSeries FormalSeries::from_coeffs(std::span<const std::complex<double>> coeffs) {
  FormalSeries f;
  f.log_abs_.reserve(coeffs.size());
  f.arg_.reserve(coeffs.size());
  for (auto c : coeffs) {
    const double a = std::abs(c);
    f.log_abs_.push_back(a == 0 ? -std::numeric_limits<double>::infinity() : std::log(a));
    f.arg_.push_back(a == 0 ? 0.0 : std::arg(c));
  }
  return f;
}

FormalSeries FormalSeries::from_log_polar(std::vector<double> log_abs, std::vector<double> arg) {
  if (log_abs.size() != arg.size())
    throw Error(ErrorKind::ConfigInvalid, "series: magnitude and argument lengths differ");
  FormalSeries f;
  f.log_abs_ = std::move(log_abs);
  f.arg_ = std::move(arg);
  return f;
}

void FormalSeries::set_log_abs_lo(std::vector<double> lo) {
  if (!lo.empty() && lo.size() != log_abs_.size())
    throw Error(ErrorKind::ConfigInvalid, "series: residue length differs");
  lo_ = std::move(lo);
}

std::complex<double> FormalSeries::coeff(std::size_t p) const {
  const double la = log_abs_.at(p);
  if (la == -std::numeric_limits<double>::infinity()) return {0.0, 0.0};
  return std::polar(std::exp(la), arg_[p]);
}

bool FormalSeries::satisfies_declared_bound(const WeightSequence& M) const {
  if (!declared_h || !declared_norm) return true;
  const double lh = std::log(*declared_h);
  const double ln = std::log(*declared_norm);
  for (std::size_t p = 0; p < size(); ++p) {
    const double rhs = ln + lh * static_cast<double>(p) + M.log_M(p);
    if (log_abs_[p] > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) return false;
  }
  return true;
}

void SectorSpec::validate() const {
  if (!(opening > 0)) throw Error(ErrorKind::ConfigInvalid, "sector: opening must be positive");
  if (radius && !(*radius > 0))
    throw Error(ErrorKind::ConfigInvalid, "sector: radius must be positive");
}

double SectorSpec::half_angle() const { return opening * std::numbers::pi / 2; }

double relative_arg(std::complex<double> z, double d) { return two_pi_reduce(std::arg(z) - d); }

bool SectorSpec::contains(std::complex<double> z) const {
  if (z == std::complex<double>{}) return false;
  if (radius && std::abs(z) >= *radius) return false;
  // Openings beyond 2 live on the Riemann surface of the logarithm; the
  // principal argument is then interpreted as the relative one.
  return std::abs(relative_arg(z, direction)) < half_angle();
}

}  // namespace asympto
