#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "asympto/seqcore.hpp"

namespace asympto {

class FlatFunction {
 public:
  enum class Kind { GevreyExp, UserSupplied };
  using LogEvaluator = std::function<std::complex<double>(std::complex<double>)>;

  // G(z) = exp(-z^{-1/alpha}) on the given sector (direction must be 0).
  static FlatFunction gevrey_exp(double alpha, SectorSpec sector);
  // log G supplied by the caller. decay_rate rho > 0 asserts that e(t)
  // decays at least like exp(-c t^rho) on the positive axis.
  static FlatFunction user_log(LogEvaluator log_G, SectorSpec sector, double decay_rate);
  static FlatFunction user(std::function<std::complex<double>(std::complex<double>)> G,
                           SectorSpec sector, double decay_rate);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const SectorSpec& sector() const { return sector_; }
  double decay_rate() const { return decay_; }

  // Principal log of G(w); no sector check.
  std::complex<double> log_G(std::complex<double> w) const;

 private:
  Kind kind_ = Kind::GevreyExp;
  double alpha_ = 1.0;
  double decay_ = 1.0;
  SectorSpec sector_;
  LogEvaluator log_G_;
};

// e(z) = G(1/z). Throws OutsideSector unless |arg z| < opening * pi / 2.
std::complex<double> kernel_eval(const FlatFunction& F, std::complex<double> z);
std::complex<double> kernel_log_eval(const FlatFunction& F, std::complex<double> z);

struct FlatnessGrids {
  double k_min = 1e-3;
  double k_max = 1e3;
  int k_points = 61;
  double x_min = 1e-4;  // clipped further by the sequence window
  double x_max = 1e3;
  int x_points = 600;
  int fan_points = 9;   // arguments spread over the closed sector
  int nested = 5;       // nested lower limits of x for the trend test
  double trend_threshold = 0.05;
};

struct FlatnessCertificate {
  double K1 = 0, K2 = 0, K3 = 0, K4 = 0;
  double x_min = 0, x_max = 0;
  double max_violation = 0.0;
  std::vector<double> fan;  // arguments used for the upper bound
};

struct FlatnessFailure {
  std::string bound;  // "lower" or "upper"
  std::string detail;
};

std::variant<FlatnessCertificate, FlatnessFailure> verify_flatness(const FlatFunction& F,
                                                                    const WeightSequence& M,
                                                                    const FlatnessGrids& grids = {});

struct MomentConfig {
  double rel_target = 1e-8;
  double truncation_decades = 60.0;
  int max_halvings = 14;
};

struct MomentSequence {
  std::vector<double> log_mu;
  std::vector<double> rel_error;

  std::size_t size() const { return log_mu.size(); }
  bool log_convex() const;
};

MomentSequence moments(const FlatFunction& F, std::size_t p_max, const MomentConfig& cfg = {});

enum class MomentMode { Shifted, Unshifted };

struct MomentFit {
  double h1 = 0.0;
  double h2 = 0.0;
  Window window;
  double trend_slope = 0.0;
};

struct MomentNotEquivalent {
  Window window;
  double trend_slope = 0.0;
};

std::variant<MomentFit, MomentNotEquivalent> moment_equiv_fit(const MomentSequence& mu,
                                                              const WeightSequence& M, MomentMode mode,
                                                              Window window,
                                                              const TrendConfig& trend = {});

}  // namespace asympto
