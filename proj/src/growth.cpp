#include "asympto/growth.hpp"

#include <algorithm>
#include <cmath>

#include "asympto/error.hpp"
#include "asympto/numeric.hpp"

namespace asympto {

namespace {

void require_log_convex(const WeightSequence& M) {
  if (!M.log_convex())
    throw Error(ErrorKind::NotLogConvex, M.label() + ": quotients are not nondecreasing");
}

void require_window(const WeightSequence& M, Window w) {
  if (w.lo > w.hi) throw Error(ErrorKind::ConfigInvalid, "empty window");
  if (w.hi > M.window())
    throw Error(ErrorKind::WindowExceeded, "window end " + std::to_string(w.hi) + " exceeds " +
                                               std::to_string(M.window()) + " of " + M.label());
}

std::size_t resolve_horizon(const WeightSequence& M, Window w, std::size_t requested) {
  const std::size_t h = requested ? requested : 4 * w.hi;
  if (h < 4 * w.hi)
    throw Error(ErrorKind::PreconditionFailed, "tail horizon must be at least 4x window end");
  if (h > M.window())
    throw Error(ErrorKind::WindowExceeded, "tail horizon " + std::to_string(h) + " exceeds " +
                                               std::to_string(M.window()) + " of " + M.label());
  return h;
}

}  // namespace

std::size_t h_argmin(const WeightSequence& M, double log_t) {
  require_log_convex(M);
  auto lm = M.log_m_values();
  auto it = std::lower_bound(lm.begin(), lm.end(), -log_t);
  if (it == lm.end())
    throw Error(ErrorKind::WindowExceeded,
                "h_M: minimizing index lies beyond the window of " + M.label());
  return static_cast<std::size_t>(it - lm.begin());
}

double h_eval_log(const WeightSequence& M, double log_t) {
  const std::size_t j = h_argmin(M, log_t);
  if (j == 0) return 0.0;
  return M.log_M(j) + static_cast<double>(j) * log_t;
}

double h_eval(const WeightSequence& M, double t) {
  if (!(t > 0)) throw Error(ErrorKind::ConfigInvalid, "h_M: t must be positive");
  return h_eval_log(M, std::log(t));
}

std::vector<double> default_recovery_grid(const WeightSequence& M, std::size_t window_end,
                                          std::size_t n) {
  const std::size_t W = std::min(window_end, M.window());
  const double a = M.log_m(0) - std::log(2.0);
  const double b = M.log_m(W);
  std::vector<double> g;
  g.reserve(n + W + 1);
  for (std::size_t i = 0; i < n; ++i)
    g.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  for (std::size_t q = 0; q <= W; ++q) g.push_back(M.log_m(q));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double recover_Mp(const WeightSequence& M, std::size_t p, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorKind::ConfigInvalid, "recover_Mp: empty grid");
  double best = -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(p);
  for (double lt : grid) best = std::max(best, n * lt + h_eval_log(M, -lt));
  return best;
}

GammaBetaResult gamma_beta_check(const WeightSequence& M, double beta, Window w,
                                 const GrowthOptions& opts) {
  if (!(beta > 0)) throw Error(ErrorKind::ConfigInvalid, "gamma_beta: beta must be positive");
  require_window(M, w);
  GammaBetaResult r;
  r.beta = beta;
  const std::size_t horizon = resolve_horizon(M, w, opts.tail_horizon);
  r.tail_horizon = horizon;
  std::vector<double> terms(horizon + 1);
  for (std::size_t q = 0; q <= horizon; ++q) terms[q] = -M.log_m(q) / beta;
  std::vector<double> weight(w.size());
  for (std::size_t p = w.lo; p <= w.hi; ++p)
    weight[p - w.lo] = M.log_m(p) / beta - std::log1p(static_cast<double>(p));

  numeric::TailFit full;
  auto trend = numeric::nested_trend(w, opts.trend, [&](Window sub) {
    const std::size_t hk = std::max(sub.hi + 1, horizon * sub.hi / std::max<std::size_t>(w.hi, 1));
    auto f = numeric::tail_fit(terms, hk, weight, sub);
    if (f.truncation_dominant && !f.extrapolated)
      throw Error(ErrorKind::TailTruncationDominant,
                  "gamma_beta: last tail term is " + std::to_string(f.last_term_ratio) +
                      " of the tail");
    if (sub.hi == w.hi) full = f;
    return f.log_constant;
  });
  if (full.truncation_dominant) r.warnings.push_back("TailTruncationDominant: extrapolated tail used");
  r.A = std::exp(full.log_constant);
  r.trend_slope = trend.slope;
  r.holds = !trend.diverges;
  return r;
}

AlmostIncreasingResult almost_increasing_margin(const WeightSequence& M, double gamma, Window w,
                                                const TrendConfig& trend) {
  require_window(M, w);
  std::vector<double> c(w.size());
  for (std::size_t p = w.lo; p <= w.hi; ++p)
    c[p - w.lo] = M.log_m(p) - gamma * std::log1p(static_cast<double>(p));
  auto max_drop = [&](Window sub) {
    double run_min = c[sub.hi - w.lo];
    double drop = 0.0;
    for (std::size_t p = sub.hi; p-- > sub.lo;) {
      drop = std::max(drop, c[p - w.lo] - run_min);
      run_min = std::min(run_min, c[p - w.lo]);
    }
    return drop;
  };
  auto t = numeric::nested_trend(w, trend, max_drop);
  AlmostIncreasingResult r;
  r.gamma = gamma;
  r.a = std::exp(max_drop(w));
  r.trend_slope = t.slope;
  r.holds = !t.diverges;
  return r;
}

GammaEstimate gamma_estimate(const WeightSequence& M, Window w, double res,
                             const GammaOptions& opts) {
  if (!(res > 0 && res <= 0.5))
    throw Error(ErrorKind::ConfigInvalid, "gamma_estimate: resolution must lie in (0, 0.5]");
  require_log_convex(M);
  GammaEstimate est;
  est.window = w;

  auto probe = [&](double beta) {
    GammaEvidence ev;
    ev.beta = beta;
    try {
      auto r = gamma_beta_check(M, beta, w, opts.growth);
      ev.holds = r.holds;
      ev.constant = r.A;
      ev.trend_slope = r.trend_slope;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TailTruncationDominant) throw;
      // Terms too slow for the tail to be resolved: the series is not
      // summable at the required rate.
      ev.holds = false;
      ev.note = "tail truncation dominant";
    }
    est.evidence.push_back(ev);
    return ev.holds;
  };

  const double delta = std::max(res, 2.0 * opts.growth.trend.threshold);
  auto cross = [&](double g, bool expect) {
    auto a = almost_increasing_margin(M, g, w, opts.growth.trend);
    est.cross_checks.push_back({g, a.holds, a.a, a.trend_slope, expect ? "expect holds" : "expect fails"});
    if (a.holds != expect)
      throw Error(ErrorKind::Inconsistent,
                  "almost-increasing criterion at gamma=" + std::to_string(g) +
                      " disagrees with the (gamma_beta) bracket; window may be too short");
  };

  if (probe(opts.beta_cap)) {
    est.lower = opts.beta_cap;
    est.evidence.back().note = "holds at beta cap; reported as +inf";
    cross(opts.beta_cap, true);
    return est;
  }
  double lo = 0.0, hi = opts.beta_cap;
  while (hi - lo > res) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) ? lo : hi) = mid;
  }
  est.lower = lo;
  est.upper = hi;
  if (lo - delta > 0) cross(lo - delta, true);
  cross(hi + delta, false);
  return est;
}

}  // namespace asympto
