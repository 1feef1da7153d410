#include "asympto/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace asympto::numeric {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

std::vector<std::size_t> nested_ends(Window w, int count) {
  count = std::max(count, 2);
  std::vector<std::size_t> ends;
  const double span = static_cast<double>(w.hi - w.lo);
  for (int k = 0; k < count; ++k) {
    const double frac = 0.5 + 0.5 * static_cast<double>(k) / (count - 1);
    auto e = w.lo + static_cast<std::size_t>(std::llround(frac * span));
    e = std::clamp(e, w.lo, w.hi);
    if (ends.empty() || e > ends.back()) ends.push_back(e);
  }
  return ends;
}

double log_slope(std::span<const double> ys, std::span<const std::size_t> ends) {
  const std::size_t n = std::min(ys.size(), ends.size());
  if (n < 2) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log1p(static_cast<double>(ends[i]));
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log1p(static_cast<double>(ends[i])) - mx;
    sxy += dx * (ys[i] - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace asympto::numeric

namespace asympto::numeric {

TailFit tail_fit(std::span<const double> log_terms, std::size_t horizon,
                 std::span<const double> log_weight, Window w) {
  TailFit fit;
  horizon = std::min(horizon, log_terms.size() - 1);
  // Local decay exponent of the terms over [H/2, H].
  const std::size_t half = std::max<std::size_t>(horizon / 2, w.lo);
  double log_extra = -std::numeric_limits<double>::infinity();
  if (horizon > half) {
    const double dl = std::log1p(static_cast<double>(horizon)) - std::log1p(static_cast<double>(half));
    const double s = -(log_terms[horizon] - log_terms[half]) / dl;
    if (s > 1.01) {
      log_extra = log_terms[horizon] + std::log1p(static_cast<double>(horizon)) - std::log(s - 1.0);
      fit.extrapolated = true;
    }
  }
  double acc = log_extra;
  double best = -std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  for (std::size_t q = horizon + 1; q-- > w.lo;) {
    acc = log_add(acc, log_terms[q]);
    if (q <= w.hi) {
      best = std::max(best, acc + log_weight[q - w.lo]);
      worst_ratio = std::max(worst_ratio, std::exp(log_terms[horizon] - acc));
    }
  }
  fit.log_constant = best;
  fit.last_term_ratio = worst_ratio;
  fit.truncation_dominant = worst_ratio > 1e-3;
  return fit;
}

}  // namespace asympto::numeric
