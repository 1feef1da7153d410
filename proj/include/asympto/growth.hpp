#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "asympto/seqcore.hpp"

namespace asympto {

// log h_M(t) with h_M(t) = inf_p M_p t^p. Uses the left-closed convention
// h_M(t) = M_{p+1} t^{p+1} on [1/m_{p+1}, 1/m_p).
double h_eval(const WeightSequence& M, double t);
double h_eval_log(const WeightSequence& M, double log_t);

// Index j with log h_M(t) = log M_j + j log t.
std::size_t h_argmin(const WeightSequence& M, double log_t);

// Log-uniform grid of log t over [log m_0 - log 2, log m_W] with the exact
// points log m_q (q <= W) merged in; W = min(window_end, M.window()).
std::vector<double> default_recovery_grid(const WeightSequence& M, std::size_t window_end,
                                          std::size_t n = 2000);

// max over the grid of p log t + log h_M(1/t).
double recover_Mp(const WeightSequence& M, std::size_t p, std::span<const double> log_t_grid);

struct GammaBetaResult {
  double beta = 0.0;
  bool holds = false;
  double A = 0.0;
  double trend_slope = 0.0;
  std::size_t tail_horizon = 0;
  std::vector<std::string> warnings;
};

struct GrowthOptions {
  TrendConfig trend{};
  std::size_t tail_horizon = 0;  // zero selects 4 * window end
};

GammaBetaResult gamma_beta_check(const WeightSequence& M, double beta, Window window,
                                 const GrowthOptions& opts = {});

struct AlmostIncreasingResult {
  double gamma = 0.0;
  bool holds = false;
  double a = 1.0;  // multiplicative constant exp(max drop)
  double trend_slope = 0.0;
};

AlmostIncreasingResult almost_increasing_margin(const WeightSequence& M, double gamma,
                                                Window window, const TrendConfig& trend = {});

enum class GammaMethod { AlmostIncreasing, GammaBeta };

struct GammaEvidence {
  double beta = 0.0;
  bool holds = false;
  double constant = 0.0;
  double trend_slope = 0.0;
  std::string note;
};

struct GammaEstimate {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  GammaMethod method = GammaMethod::GammaBeta;
  Window window;
  std::vector<GammaEvidence> evidence;
  std::vector<GammaEvidence> cross_checks;
};

struct GammaOptions {
  GrowthOptions growth{};
  double beta_cap = 64.0;
};

GammaEstimate gamma_estimate(const WeightSequence& M, Window window, double resolution,
                             const GammaOptions& opts = {});

}  // namespace asympto
