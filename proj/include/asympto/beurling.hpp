#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asympto/extend.hpp"
#include "asympto/growth.hpp"
#include "asympto/props.hpp"
#include "asympto/seqcore.hpp"

namespace asympto {

// Nonincreasing eps_j with L_p <= eps_0 ... eps_{p-1} M_p for 1 <= p <= n.
struct EpsilonSequence {
  std::vector<double> log_eps;  // j = 0 .. n-1
  std::size_t n = 0;
  // max over p of log(L_p / M_p) - sum_{j<p} log eps_j; never positive.
  double worst_slack = 0.0;
  // Number of ulp nudges applied to make the product bound hold in floating point.
  int nudges = 0;

  double eps(std::size_t j) const;
};

// Inputs are log L_p and log M_p for p = 0..n. Throws NotSmallO unless
// c_p = (L_p/M_p)^{1/p} visibly tends to zero: the largest c_p over the last
// quarter of 1..n must lie below the smallest over the first quarter.
EpsilonSequence epsilon_sequence(std::span<const double> log_L, std::span<const double> log_M);
EpsilonSequence epsilon_sequence(const WeightSequence& L, const WeightSequence& M, std::size_t n);

struct ModulationAudit {
  bool nondecreasing = false;
  bool ED_nonincreasing = false;
  bool tail_sums = false;       // factor-8 inequality at every q <= window
  bool EB_tail_decreasing = false;
  double worst_tail_ratio = 0.0;  // max_q sum E A / (E_q sum A)
  std::string failed_property;
  std::optional<std::size_t> failed_at;

  bool all() const { return nondecreasing && ED_nonincreasing && tail_sums && EB_tail_decreasing; }
};

struct ModulationOptions {
  double theta = 0.85;
  double throttle = 1.5;
  int max_throttle = 4;
  std::size_t horizon = 0;  // zero selects 4 * window
};

struct ModulationSequence {
  std::vector<double> log_E;  // p = 0 .. horizon
  std::size_t window = 0;
  std::size_t horizon = 0;
  double theta = 0.0;
  int throttle_level = 0;
  ModulationAudit audit;
};

// Nondecreasing E with E D nonincreasing, sum_{p>=q} E_p A_p <= 8 E_q
// sum_{p>=q} A_p and E B decreasing at the window tail. Inputs are logs of
// the positive lists A, B, D, each covering 0..horizon.
ModulationSequence modulation_sequence(std::span<const double> log_A, std::span<const double> log_B,
                                       std::span<const double> log_D, std::size_t window,
                                       const ModulationOptions& opts = {});

// Brute-force check of the four properties for an arbitrary E.
ModulationAudit audit_modulation(std::span<const double> log_E, std::span<const double> log_A,
                                 std::span<const double> log_B, std::span<const double> log_D,
                                 std::size_t window, std::size_t horizon);

struct ReportItem {
  std::string name;
  bool pass = false;
  double value = 0.0;  // fitted constant or worst slack
  double trend_slope = 0.0;
  std::string detail;
};

struct DerivedWeight {
  WeightSequence K;
  std::vector<double> log_k;  // quotients k_p = l_p / E_p
  std::vector<double> log_u;  // u_p = 1 / ((p+1) l_p)
  EpsilonSequence eps;
  ModulationSequence E;
  std::vector<ReportItem> report;  // (a)..(e), with one (c) row per h
  bool partial = false;            // (c) failed only at the smallest h

  bool pass() const;
};

struct BuildKOptions {
  std::vector<double> h_grid{1.0, 0.5, 0.1, 0.01};
  ModulationOptions modulation{};
  TrendConfig trend{};
};

// L must carry quotients up to 4 * window; log_A lists log A_p for
// p = 0..4*window.
DerivedWeight build_K(const WeightSequence& L, std::span<const double> log_A, std::size_t window,
                      const BuildKOptions& opts = {});

struct PipelineOptions {
  // N_p ~ p!^r' needs about t^{-1/r'} terms to resolve h_N(t); 2000 (horizon
  // 8000) reaches the flatness grid for r' near 0.575.
  std::size_t window = 2000;
  std::size_t p_max = 12;
  SectorSpec sector{0.0, 0.5, std::nullopt};
  double gamma_resolution = 0.02;
  BuildKOptions build{};
};

struct PipelineTrace {
  double r = 0.0;
  WeightSequence L;
  DerivedWeight K;
  WeightSequence N;
  GammaEstimate gamma_N;
  double kernel_alpha = 0.0;  // order of the GevreyExp kernel used for N
  ExtensionSetup setup;
  RemainderReport remainder;
  bool pass = false;
};

// Beurling surjectivity trace for M and an input series with log |a_p|
// given for p = 0..4*window: l_p = m_p^{1/r}/(p+1) (head-repaired),
// A_p = |a_p|^{1/r}/p!, K from build_K, N_p = (p! K_p)^r, then the
// extension operator for N on opts.sector.
PipelineTrace beurling_pipeline(const WeightSequence& M, double r, std::span<const double> log_abs_a,
                                const PipelineOptions& opts = {});

}  // namespace asympto
