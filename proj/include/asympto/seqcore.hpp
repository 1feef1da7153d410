#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace asympto {

// Inclusive index range [lo, hi].
struct Window {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t size() const { return hi - lo + 1; }
};

enum class Family { Gevrey, GevreyLog, QGevrey, PowerSigma, QPP, Table };

struct FamilyParams {
  Family family = Family::Table;
  double alpha = 0.0;
  double beta = 0.0;
  double q = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
};

std::string family_name(Family f);

// Positive sequence held as natural logarithms of M_p and of the quotients
// m_p = M_{p+1}/M_p. Values are tabulated at construction, so evaluation is
// a lookup and every instance is immutable.
class WeightSequence {
 public:
  // Empty placeholder; use one of the factories to obtain a usable sequence.
  WeightSequence() = default;
  static constexpr std::size_t kGevreyWindow = 100000;
  static constexpr std::size_t kPolyExpWindow = 2000;
  static constexpr std::size_t kQppWindow = 60;

  static WeightSequence gevrey(double alpha, std::size_t window = kGevreyWindow);
  static WeightSequence gevrey_log(double alpha, double beta, std::size_t window = kGevreyWindow);
  static WeightSequence q_gevrey(double q, double alpha, std::size_t window = kPolyExpWindow);
  static WeightSequence power_sigma(double tau, double sigma, std::size_t window = kPolyExpWindow);
  static WeightSequence qpp(double q, std::size_t window = kQppWindow);
  // Table built from log m_0..log m_{n-1}; the window is n-1.
  static WeightSequence table(std::vector<double> log_m, std::string label = "table");
  // Table built from log M_0..log M_{n}; log M_0 may differ from zero (raw
  // shifted sequences). The window is n-1.
  static WeightSequence from_log_values(std::vector<double> log_M, std::string label);

  // log M_p for p <= window()+1.
  double log_M(std::size_t p) const;
  // log m_p for p <= window().
  double log_m(std::size_t p) const;
  std::size_t window() const { return log_m_.empty() ? 0 : log_m_.size() - 1; }

  std::span<const double> log_M_values() const { return log_M_; }
  std::span<const double> log_m_values() const { return log_m_; }

  const FamilyParams& params() const { return params_; }
  const std::string& label() const { return label_; }
  // Number of head quotients replaced by a running maximum (GevreyLog).
  std::size_t repaired() const { return repaired_; }
  // Built-in families are log-convex by construction; tables are scanned.
  bool log_convex() const { return log_convex_; }

 private:
  void finish_from_quotients(double log_M0);
  void finish_from_values();

  FamilyParams params_;
  std::string label_;
  std::vector<double> log_M_;
  std::vector<double> log_m_;
  std::size_t repaired_ = 0;
  bool log_convex_ = true;
};

// log m_p for p = 0..p_max.
std::vector<double> quotients(const WeightSequence& M, std::size_t p_max);

struct Hat {};
struct Check {};
struct ShiftPlusOne {};
struct Power { double r; };
struct GammaMul { double alpha; };
struct GammaDiv { double alpha; };
using TransformKind = std::variant<Hat, Check, ShiftPlusOne, Power, GammaMul, GammaDiv>;

WeightSequence transform(const WeightSequence& M, const TransformKind& kind);
// Multiplies M_p by h^{p+1}; yields a sequence equivalent to M.
WeightSequence equivalent_scale(const WeightSequence& M, double h);

struct TrendConfig {
  double threshold = 0.05;
  int nested_windows = 5;
};

struct EquivalenceFit {
  double lower_h = 1.0;
  double upper_h = 1.0;
  Window window;
  double residual = 0.0;
  double trend_slope = 0.0;
};

struct NotEquivalent {
  Window window;
  double trend_slope = 0.0;
};

std::variant<EquivalenceFit, NotEquivalent> equivalence_fit(const WeightSequence& M,
                                                            const WeightSequence& L,
                                                            Window window,
                                                            const TrendConfig& cfg = {});

struct ComparabilityFit {
  double c = 1.0;
  Window window;
  double trend_slope = 0.0;
};

struct NotComparable {
  Window window;
  double trend_slope = 0.0;
};

std::variant<ComparabilityFit, NotComparable> quotient_comparability_fit(
    const WeightSequence& M, const WeightSequence& L, Window window, const TrendConfig& cfg = {});

class FormalSeries {
 public:
  FormalSeries() = default;
  static FormalSeries from_coeffs(std::span<const std::complex<double>> coeffs);
  // Zero coefficients use log_abs = -inf.
  static FormalSeries from_log_polar(std::vector<double> log_abs, std::vector<double> arg);

  std::size_t size() const { return log_abs_.size(); }
  bool empty() const { return log_abs_.empty(); }
  std::complex<double> coeff(std::size_t p) const;
  double log_abs(std::size_t p) const { return log_abs_.at(p); }
  // Rounding residue below log_abs(p); zero unless set by an exact shift.
  double log_abs_lo(std::size_t p) const { return lo_.empty() ? 0.0 : lo_.at(p); }
  void set_log_abs_lo(std::vector<double> lo);
  double arg(std::size_t p) const { return arg_.at(p); }
  std::span<const double> log_abs_values() const { return log_abs_; }

  std::optional<double> declared_h;
  std::optional<double> declared_norm;

  // |a_p| <= norm * h^p * M_p in log-space, with a small relative slack.
  bool satisfies_declared_bound(const WeightSequence& M) const;

 private:
  std::vector<double> log_abs_;
  std::vector<double> arg_;
  std::vector<double> lo_;
};

struct SectorSpec {
  double direction = 0.0;
  double opening = 1.0;  // the opening angle is opening * pi
  std::optional<double> radius;

  void validate() const;
  double half_angle() const;
  bool contains(std::complex<double> z) const;
};

// Argument of z relative to the direction d, reduced to (-pi, pi].
double relative_arg(std::complex<double> z, double d);

}  // namespace asympto
