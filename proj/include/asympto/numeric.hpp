#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "asympto/seqcore.hpp"

namespace asympto::numeric {

// Compensated (Neumaier) summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(exp(a) + exp(b)), tolerant of -inf.
double log_add(double a, double b);
double log_sum_exp(std::span<const double> xs);

// End points of nested windows [lo, e_k]; e_k spreads from the midpoint of
// the window to its end.
std::vector<std::size_t> nested_ends(Window w, int count);

// Least-squares slope of ys against log(1 + xs).
double log_slope(std::span<const double> ys, std::span<const std::size_t> ends);

// Slope of a nondecreasing sequence f evaluated on nested windows. Reports
// divergence when slope > threshold.
struct TrendResult {
  double slope = 0.0;
  bool diverges = false;
  std::vector<std::size_t> ends;
  std::vector<double> values;
};

template <class F>
TrendResult nested_trend(Window w, const TrendConfig& cfg, F&& fitted_log_constant) {
  TrendResult r;
  r.ends = nested_ends(w, cfg.nested_windows);
  for (std::size_t e : r.ends) r.values.push_back(fitted_log_constant(Window{w.lo, e}));
  r.slope = log_slope(r.values, r.ends);
  r.diverges = r.slope > cfg.threshold;
  return r;
}

}  // namespace asympto::numeric

namespace asympto::numeric {

// Tail constant fit: with tail(p) = sum_{q=p}^{horizon} exp(log_terms[q]),
// returns max over p in w of log tail(p) + log_weight[p - w.lo].
// A power-law extrapolation beyond the horizon is added when the terms
// decay faster than q^{-1.01} near the horizon.
struct TailFit {
  double log_constant = 0.0;
  bool extrapolated = false;
  bool truncation_dominant = false;
  double last_term_ratio = 0.0;
};

TailFit tail_fit(std::span<const double> log_terms, std::size_t horizon,
                 std::span<const double> log_weight, Window w);

}  // namespace asympto::numeric
