#include "asympto/flatmom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "asympto/error.hpp"
#include "asympto/growth.hpp"
#include "asympto/numeric.hpp"

namespace asympto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g(n);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? la : la + (lb - la) * i / (n - 1);
  return g;
}

}  // namespace

FlatFunction FlatFunction::gevrey_exp(double alpha, SectorSpec sector) {
  if (!(alpha > 0)) throw Error(ErrorKind::ConfigInvalid, "GevreyExp: alpha must be positive");
  sector.validate();
  if (sector.direction != 0.0)
    throw Error(ErrorKind::ConfigInvalid, "flat functions use bisecting direction 0");
  FlatFunction F;
  F.kind_ = Kind::GevreyExp;
  F.alpha_ = alpha;
  F.decay_ = 1.0 / alpha;
  F.sector_ = sector;
  F.log_G_ = [alpha](std::complex<double> w) { return -std::pow(w, -1.0 / alpha); };
  return F;
}

FlatFunction FlatFunction::user_log(LogEvaluator log_G, SectorSpec sector, double decay_rate) {
  sector.validate();
  if (!(decay_rate > 0))
    throw Error(ErrorKind::PreconditionFailed, "user flat function requires a positive decay hint");
  FlatFunction F;
  F.kind_ = Kind::UserSupplied;
  F.alpha_ = 1.0 / decay_rate;
  F.decay_ = decay_rate;
  F.sector_ = sector;
  F.log_G_ = std::move(log_G);
  return F;
}

FlatFunction FlatFunction::user(std::function<std::complex<double>(std::complex<double>)> G,
                                SectorSpec sector, double decay_rate) {
  return user_log([G = std::move(G)](std::complex<double> w) { return std::log(G(w)); }, sector,
                  decay_rate);
}

std::complex<double> FlatFunction::log_G(std::complex<double> w) const { return log_G_(w); }

std::complex<double> kernel_log_eval(const FlatFunction& F, std::complex<double> z) {
  if (z == std::complex<double>{} || std::abs(std::arg(z)) >= F.sector().half_angle())
    throw Error(ErrorKind::OutsideSector, "kernel argument outside the sector");
  return F.log_G(1.0 / z);
}

std::complex<double> kernel_eval(const FlatFunction& F, std::complex<double> z) {
  return std::exp(kernel_log_eval(F, z));
}

std::variant<FlatnessCertificate, FlatnessFailure> verify_flatness(const FlatFunction& F,
                                                                    const WeightSequence& M,
                                                                    const FlatnessGrids& g) {
  if (!M.log_convex())
    throw Error(ErrorKind::NotLogConvex, M.label() + " is not log-convex");
  const auto ks = log_grid(g.k_min, g.k_max, g.k_points);
  const double lt_min = -M.log_m(M.window());  // smallest admissible log t for h_M

  const double th = F.sector().half_angle();
  std::vector<double> fan(g.fan_points);
  for (int j = 0; j < g.fan_points; ++j)
    fan[j] = g.fan_points == 1 ? 0.0 : -th + 2 * th * j / (g.fan_points - 1);

  // For a chosen K, inf (lower) or sup (upper) over x of the log deficit.
  // The x range starts where K x stays inside the sequence window; the fit
  // closes when the values over nested lower limits (0.1 down to that start)
  // are finite and do not trend in log(1/x).
  struct Fit {
    bool closes;
    double value;
    double x_lo;
  };
  const double lx_max = std::log(g.x_max);
  auto fit_for = [&](double lk, bool lower) -> Fit {
    const double lx_lo = std::max(std::log(g.x_min), lt_min - lk + 1e-9);
    const double top = std::log(0.1);
    if (lx_lo > std::log(1e-2) || lx_lo >= lx_max) return {false, 0.0, 0.0};
    std::vector<double> xs(g.x_points);
    for (int i = 0; i < g.x_points; ++i) xs[i] = lx_lo + (lx_max - lx_lo) * i / (g.x_points - 1);
    std::vector<double> per_x(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double lx = xs[i];
      const double lh = h_eval_log(M, lk + lx);
      if (lower) {
        per_x[i] = F.log_G(std::exp(lx)).real() - lh;
      } else {
        double worst = -kInf;
        for (double t : fan) worst = std::max(worst, F.log_G(std::polar(std::exp(lx), t)).real() - lh);
        per_x[i] = worst;
      }
    }
    std::vector<double> nested(g.nested), vals;
    for (int k = 0; k < g.nested; ++k) {
      nested[k] = g.nested == 1 ? lx_lo : top + (lx_lo - top) * k / (g.nested - 1);
      double v = lower ? kInf : -kInf;
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] >= nested[k] - 1e-12) v = lower ? std::min(v, per_x[i]) : std::max(v, per_x[i]);
      if (!std::isfinite(v)) return {false, 0.0, 0.0};
      vals.push_back(lower ? -v : v);  // nondecreasing as the range grows
    }
    double mx = 0, my = 0;
    for (int k = 0; k < g.nested; ++k) {
      mx += -nested[k];
      my += vals[k];
    }
    mx /= g.nested;
    my /= g.nested;
    double sxy = 0, sxx = 0;
    for (int k = 0; k < g.nested; ++k) {
      sxy += (-nested[k] - mx) * (vals[k] - my);
      sxx += (-nested[k] - mx) * (-nested[k] - mx);
    }
    const double slope = sxx > 0 ? sxy / sxx : 0.0;
    return {slope <= g.trend_threshold, lower ? -vals.back() : vals.back(), std::exp(lx_lo)};
  };

  FlatnessCertificate cert;
  cert.x_min = g.x_min;
  cert.x_max = g.x_max;
  double x_lo_used = g.x_min;
  cert.fan = fan;
  bool found = false;
  // Largest closing K2 keeps the (K2, K1) pair tight.
  for (auto it = ks.rbegin(); it != ks.rend(); ++it) {
    auto f = fit_for(*it, true);
    if (f.closes) {
      cert.K2 = std::exp(*it);
      cert.K1 = std::exp(f.value);
      x_lo_used = std::max(x_lo_used, f.x_lo);
      found = true;
      break;
    }
  }
  if (!found) return FlatnessFailure{"lower", "no K2 in grid closes K1 h_M(K2 x) <= G(x)"};
  found = false;
  for (double lk : ks) {
    auto f = fit_for(lk, false);
    if (f.closes) {
      cert.K4 = std::exp(lk);
      cert.K3 = std::exp(f.value);
      x_lo_used = std::max(x_lo_used, f.x_lo);
      found = true;
      break;
    }
  }
  if (!found) return FlatnessFailure{"upper", "no K4 in grid closes |G(z)| <= K3 h_M(K4 |z|)"};
  cert.x_min = x_lo_used;
  return cert;
}

bool MomentSequence::log_convex() const {
  for (std::size_t p = 1; p + 1 < log_mu.size(); ++p)
    if (log_mu[p + 1] + log_mu[p - 1] < 2 * log_mu[p] - 1e-12 * std::max(1.0, std::abs(log_mu[p])))
      return false;
  return true;
}

namespace {

struct MomentIntegral {
  double log_value;
  double rel_error;
};

MomentIntegral moment_integral(const FlatFunction& F, std::size_t p, const MomentConfig& cfg) {
  const double n = static_cast<double>(p) + 1.0;
  // Integrand after t = e^u is exp(phi(u)).
  auto phi = [&](double u) { return n * u + F.log_G(std::exp(-u)).real(); };
  double peak, sigma;
  if (F.kind() == FlatFunction::Kind::GevreyExp) {
    const double a = F.alpha();
    peak = a * std::log(a * n);
    sigma = std::sqrt(a / n);
  } else {
    const double hi = (std::log(n + 50.0) + 8.0) / F.decay_rate() + 10.0;
    peak = -60.0;
    double best = phi(peak);
    for (double u = -60.0; u <= hi; u += 0.02) {
      const double v = phi(u);
      if (v > best) {
        best = v;
        peak = u;
      }
    }
    const double d = 1e-3;
    const double curv = -(phi(peak + d) - 2 * phi(peak) + phi(peak - d)) / (d * d);
    sigma = curv > 0 ? 1.0 / std::sqrt(curv) : 1.0;
  }
  const double top = phi(peak);
  const double drop = cfg.truncation_decades * std::numbers::ln10;
  auto edge = [&](double dir) {
    double u = peak;
    for (int k = 0; k < 100000; ++k) {
      u += dir * sigma;
      if (phi(u) < top - drop) return u;
    }
    throw Error(ErrorKind::PreconditionFailed, "moment integrand does not decay");
  };
  const double a = edge(-1.0), b = edge(1.0);

  auto trap = [&](double h) {
    numeric::CompensatedSum s;
    const long kl = static_cast<long>(std::floor((a - peak) / h));
    const long kr = static_cast<long>(std::ceil((b - peak) / h));
    for (long k = kl; k <= kr; ++k) s.add(std::exp(phi(peak + k * h) - top));
    return s.value() * h;
  };
  double h = sigma / 2;
  double prev = trap(h);
  double est = 1.0;
  for (int i = 0; i < cfg.max_halvings; ++i) {
    h /= 2;
    const double cur = trap(h);
    est = std::abs(cur - prev) / std::abs(cur);
    prev = cur;
    if (i >= 1 && est < 1e-14) break;
  }
  if (!(est <= cfg.rel_target))
    throw Error(ErrorKind::QuadratureNotConverged,
                "moment " + std::to_string(p) + ": estimated relative error " + std::to_string(est));
  return {top + std::log(prev), est};
}

}  // namespace

MomentSequence moments(const FlatFunction& F, std::size_t p_max, const MomentConfig& cfg) {
  MomentSequence mu;
  mu.log_mu.reserve(p_max + 1);
  for (std::size_t p = 0; p <= p_max; ++p) {
    auto m = moment_integral(F, p, cfg);
    mu.log_mu.push_back(m.log_value);
    mu.rel_error.push_back(m.rel_error);
  }
  return mu;
}

std::variant<MomentFit, MomentNotEquivalent> moment_equiv_fit(const MomentSequence& mu,
                                                              const WeightSequence& M, MomentMode mode,
                                                              Window w, const TrendConfig& trend) {
  if (w.lo > w.hi) throw Error(ErrorKind::ConfigInvalid, "empty window");
  if (w.hi >= mu.size())
    throw Error(ErrorKind::WindowExceeded, "moments computed only to p = " + std::to_string(mu.size() - 1));
  const std::size_t shift = mode == MomentMode::Shifted ? 1 : 0;
  if (w.hi + shift > M.window() + 1)
    throw Error(ErrorKind::WindowExceeded, "window exceeds " + M.label());
  auto d = [&](std::size_t p) {
    return (mu.log_mu[p] - M.log_M(p + shift)) / static_cast<double>(p + 1);
  };
  auto bracket = [&](Window sub) {
    double lo = kInf, hi = -kInf;
    for (std::size_t p = sub.lo; p <= sub.hi; ++p) {
      lo = std::min(lo, d(p));
      hi = std::max(hi, d(p));
    }
    return std::pair{lo, hi};
  };
  auto t = numeric::nested_trend(w, trend, [&](Window sub) {
    auto [lo, hi] = bracket(sub);
    return std::max(hi, -lo);
  });
  if (t.diverges) return MomentNotEquivalent{w, t.slope};
  auto [lo, hi] = bracket(w);
  return MomentFit{std::exp(lo), std::exp(hi), w, t.slope};
}

}  // namespace asympto
