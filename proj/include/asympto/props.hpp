#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asympto/seqcore.hpp"

namespace asympto {

enum class Condition { lc, sm, dc, mg, snq, star };
enum class Verdict { HoldsOnWindow, FailsOnWindow };

std::string to_string(Condition c);
std::string to_string(Verdict v);
Condition parse_condition(const std::string& s);

struct PropertyReport {
  Condition condition = Condition::lc;
  Verdict verdict = Verdict::FailsOnWindow;
  Window window;
  // sm, dc, mg: (C0, H). star: (C1, H) stored as (C0, H). snq: C.
  std::optional<double> C0;
  std::optional<double> H;
  std::optional<double> C;
  double diagnostic_slope = 0.0;
  std::size_t tail_horizon = 0;
  // lc: first index where log m decreases, if any.
  std::optional<std::size_t> first_violation;
  std::vector<std::string> warnings;

  bool holds() const { return verdict == Verdict::HoldsOnWindow; }
};

struct CheckOptions {
  TrendConfig trend{};
  // snq only; zero selects 4 * window end.
  std::size_t tail_horizon = 0;
};

PropertyReport check_condition(const WeightSequence& M, Condition cond, Window window,
                               const CheckOptions& opts = {});

// Direct substitution of a report's constants into the defining inequality
// at every index of the window. Returns true for failing reports.
bool resubstitute(const WeightSequence& M, const PropertyReport& r);

// log M_{p+q} - log(M_p M_q), computed symmetrically in (p, q).
double mg_slack_raw(const WeightSequence& M, std::size_t p, std::size_t q);

enum class AuditStatus { Satisfied, Vacuous, Violated };
std::string to_string(AuditStatus s);

struct AuditEntry {
  std::string implication;
  AuditStatus status = AuditStatus::Vacuous;
  std::string detail;
};

std::vector<AuditEntry> implication_audit(const WeightSequence& M, Window window,
                                          const CheckOptions& opts = {});

enum class PerturbationKind { Hat, Check, Power, EquivalentScale };
std::string to_string(PerturbationKind k);

struct StabilityResult {
  PropertyReport before;
  PropertyReport after;
  bool same_verdict = false;
};

// perturbation_h is the exponent r for Power and the factor h for
// EquivalentScale; it is ignored for Hat and Check.
StabilityResult stability_audit(const WeightSequence& M, double perturbation_h,
                                PerturbationKind kind, Condition cond, Window window,
                                const CheckOptions& opts = {});

}  // namespace asympto
