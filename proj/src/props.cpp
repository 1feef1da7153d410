#include "asympto/props.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asympto/error.hpp"
#include "asympto/numeric.hpp"

namespace asympto {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Smallest admissible log H; H must exceed 1.
constexpr double kMinLogH = 1e-3;

bool leq_with_slack(double lhs, double rhs) {
  return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs));
}

// One index of a geometric-type inequality  value_p <= log C + e_p log H.
// `floored` drives the H fit with C normalized to 1; `exact` is the
// unfloored log of the left side (or -inf when the side is nonpositive).
struct Row {
  double floored;
  double exact;
  double e;
};

struct GeometricFit {
  double log_H;
  double log_C;
};

GeometricFit fit_rows(const std::vector<Row>& rows, std::size_t n, double log_C_fixed) {
  double lh = kMinLogH;
  for (std::size_t i = 0; i < n; ++i)
    if (rows[i].e > 0) lh = std::max(lh, (rows[i].floored - log_C_fixed) / rows[i].e);
  double lc = kNegInf;
  for (std::size_t i = 0; i < n; ++i)
    if (rows[i].exact > kNegInf) lc = std::max(lc, rows[i].exact - rows[i].e * lh);
  if (lc == kNegInf) lc = 0.0;
  return {lh, lc};
}

void require_window(const WeightSequence& M, Window w) {
  if (w.lo > w.hi) throw Error(ErrorKind::ConfigInvalid, "empty window");
  if (w.hi > M.window())
    throw Error(ErrorKind::WindowExceeded, "window end " + std::to_string(w.hi) +
                                               " exceeds " + std::to_string(M.window()) +
                                               " of " + M.label());
}

// Rows indexed by p - w.lo.
std::vector<Row> rows_for(const WeightSequence& M, Condition c, Window w) {
  std::vector<Row> rows;
  rows.reserve(w.size());
  switch (c) {
    case Condition::sm:
      for (std::size_t p = w.lo; p <= w.hi; ++p) {
        const double d = M.log_m(p + 1) - M.log_m(p);
        rows.push_back({std::log(std::max(d, 1.0)), d > 0 ? std::log(d) : kNegInf,
                        static_cast<double>(p + 1)});
      }
      break;
    case Condition::dc:
      for (std::size_t p = w.lo; p <= w.hi; ++p) {
        const double v = M.log_m(p);
        rows.push_back({v, v, static_cast<double>(p + 1)});
      }
      break;
    case Condition::star:
      for (std::size_t p = w.lo; p <= w.hi; ++p) {
        const double v = M.log_m(p);
        rows.push_back({std::log(std::max(v, 1.0)), v > 0 ? std::log(v) : kNegInf,
                        static_cast<double>(p)});
      }
      break;
    case Condition::mg: {
      // Row n holds the worst pair with p + q = n.
      for (std::size_t n = w.lo; n <= w.hi; ++n) {
        double best = kNegInf;
        for (std::size_t p = 0; 2 * p <= n; ++p) best = std::max(best, mg_slack_raw(M, p, n - p));
        rows.push_back({best, best, static_cast<double>(n)});
      }
      break;
    }
    default:
      break;
  }
  return rows;
}

double star_fixed_log_C(const std::vector<Row>& rows, std::size_t n) {
  double lc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (rows[i].e == 0) lc = std::max(lc, rows[i].floored);
  return lc;
}

PropertyReport check_geometric(const WeightSequence& M, Condition c, Window w,
                               const CheckOptions& opts) {
  PropertyReport r;
  r.condition = c;
  if (c == Condition::sm && w.hi + 1 > M.window()) {
    r.warnings.push_back("sm needs m_{p+1}; window end clamped to " +
                         std::to_string(M.window() - 1));
    w.hi = M.window() - 1;
    if (w.hi < w.lo) throw Error(ErrorKind::WindowExceeded, "sm: window too short");
  }
  r.window = w;
  const auto rows = rows_for(M, c, w);
  auto fixed = [&](std::size_t n) { return c == Condition::star ? star_fixed_log_C(rows, n) : 0.0; };
  auto trend = numeric::nested_trend(w, opts.trend, [&](Window sub) {
    const std::size_t n = sub.hi - w.lo + 1;
    return fit_rows(rows, n, fixed(n)).log_H;
  });
  const auto fit = fit_rows(rows, rows.size(), fixed(rows.size()));
  r.C0 = std::exp(fit.log_C);
  r.H = std::exp(fit.log_H);
  r.diagnostic_slope = trend.slope;
  r.verdict = trend.diverges ? Verdict::FailsOnWindow : Verdict::HoldsOnWindow;
  return r;
}

PropertyReport check_snq(const WeightSequence& M, Window w, const CheckOptions& opts) {
  PropertyReport r;
  r.condition = Condition::snq;
  r.window = w;
  const std::size_t horizon = opts.tail_horizon ? opts.tail_horizon : 4 * w.hi;
  if (horizon < 4 * w.hi)
    throw Error(ErrorKind::PreconditionFailed, "snq: tail horizon must be at least 4x window end");
  if (horizon > M.window())
    throw Error(ErrorKind::WindowExceeded, "snq: tail horizon " + std::to_string(horizon) +
                                               " exceeds window " + std::to_string(M.window()) +
                                               " of " + M.label());
  r.tail_horizon = horizon;
  std::vector<double> terms(horizon + 1);
  for (std::size_t q = 0; q <= horizon; ++q)
    terms[q] = -std::log1p(static_cast<double>(q)) - M.log_m(q);
  std::vector<double> weight(w.size());
  for (std::size_t p = w.lo; p <= w.hi; ++p) weight[p - w.lo] = M.log_m(p);

  numeric::TailFit full;
  auto trend = numeric::nested_trend(w, opts.trend, [&](Window sub) {
    const std::size_t hk = std::max(sub.hi + 1, horizon * sub.hi / std::max<std::size_t>(w.hi, 1));
    auto f = numeric::tail_fit(terms, hk, weight, sub);
    if (f.truncation_dominant && !f.extrapolated)
      throw Error(ErrorKind::TailTruncationDominant,
                  "snq: last tail term is " + std::to_string(f.last_term_ratio) + " of the tail");
    if (sub.hi == w.hi) full = f;
    return f.log_constant;
  });
  if (full.truncation_dominant)
    r.warnings.push_back("TailTruncationDominant: extrapolated tail used");
  r.C = std::exp(full.log_constant);
  r.diagnostic_slope = trend.slope;
  r.verdict = trend.diverges ? Verdict::FailsOnWindow : Verdict::HoldsOnWindow;
  return r;
}

}  // namespace

double mg_slack_raw(const WeightSequence& M, std::size_t p, std::size_t q) {
  // The sum of the two factors is commutative, so the slack is symmetric.
  return M.log_M(p + q) - (M.log_M(p) + M.log_M(q));
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::lc: return "lc";
    case Condition::sm: return "sm";
    case Condition::dc: return "dc";
    case Condition::mg: return "mg";
    case Condition::snq: return "snq";
    case Condition::star: return "star";
  }
  return "lc";
}

std::string to_string(Verdict v) {
  return v == Verdict::HoldsOnWindow ? "holds-on-window" : "fails-on-window";
}

Condition parse_condition(const std::string& s) {
  for (auto c : {Condition::lc, Condition::sm, Condition::dc, Condition::mg, Condition::snq,
                 Condition::star})
    if (to_string(c) == s) return c;
  throw Error(ErrorKind::ConfigInvalid, "unknown condition '" + s + "'");
}

std::string to_string(AuditStatus s) {
  switch (s) {
    case AuditStatus::Satisfied: return "Satisfied";
    case AuditStatus::Vacuous: return "Vacuous";
    case AuditStatus::Violated: return "Violated";
  }
  return "Violated";
}

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::Hat: return "hat";
    case PerturbationKind::Check: return "check";
    case PerturbationKind::Power: return "power";
    case PerturbationKind::EquivalentScale: return "equivalent_scale";
  }
  return "hat";
}

PropertyReport check_condition(const WeightSequence& M, Condition cond, Window w,
                               const CheckOptions& opts) {
  require_window(M, w);
  if (cond == Condition::snq) return check_snq(M, w, opts);
  if (cond == Condition::lc) {
    PropertyReport r;
    r.condition = cond;
    r.window = w;
    r.verdict = Verdict::HoldsOnWindow;
    for (std::size_t p = w.lo; p < w.hi; ++p)
      if (M.log_m(p + 1) < M.log_m(p)) {
        r.verdict = Verdict::FailsOnWindow;
        r.first_violation = p + 1;
        break;
      }
    return r;
  }
  return check_geometric(M, cond, w, opts);
}

bool resubstitute(const WeightSequence& M, const PropertyReport& r) {
  if (!r.holds()) return true;
  const Window w = r.window;
  switch (r.condition) {
    case Condition::lc:
      for (std::size_t p = w.lo; p < w.hi; ++p)
        if (M.log_m(p + 1) < M.log_m(p)) return false;
      return true;
    case Condition::snq: {
      // Plain descending accumulation up to the recorded horizon; the
      // extrapolated part only increases the fitted constant.
      const double lc = std::log(*r.C);
      double acc = kNegInf;
      for (std::size_t q = r.tail_horizon + 1; q-- > w.lo;) {
        acc = numeric::log_add(acc, -std::log1p(static_cast<double>(q)) - M.log_m(q));
        if (q <= w.hi && !leq_with_slack(acc, lc - M.log_m(q))) return false;
      }
      return true;
    }
    default:
      break;
  }
  const double lC = std::log(*r.C0);
  const double lH = std::log(*r.H);
  for (std::size_t p = w.lo; p <= w.hi; ++p) {
    const double n = static_cast<double>(p);
    switch (r.condition) {
      case Condition::sm: {
        const double d = M.log_m(p + 1) - M.log_m(p);
        if (d > 0 && !leq_with_slack(std::log(d), lC + (n + 1) * lH)) return false;
        break;
      }
      case Condition::dc:
        if (!leq_with_slack(M.log_M(p + 1), lC + (n + 1) * lH + M.log_M(p))) return false;
        break;
      case Condition::star: {
        const double v = M.log_m(p);
        if (v > 0 && !leq_with_slack(std::log(v), lC + n * lH)) return false;
        break;
      }
      case Condition::mg:
        for (std::size_t a = 0; a <= p; ++a)
          if (!leq_with_slack(M.log_M(p), lC + n * lH + (M.log_M(a) + M.log_M(p - a)))) return false;
        break;
      default:
        break;
    }
  }
  return true;
}

std::vector<AuditEntry> implication_audit(const WeightSequence& M, Window w,
                                          const CheckOptions& opts) {
  require_window(M, w);
  for (std::size_t p = w.lo; p <= std::min(w.hi + 1, M.window()); ++p)
    if (!std::isfinite(M.log_m(p)))
      throw Error(ErrorKind::PreconditionFailed, "inf m_p > 0 cannot be certified");

  std::vector<AuditEntry> out;
  const auto dc = check_condition(M, Condition::dc, w, opts);
  const auto sm = check_condition(M, Condition::sm, w, opts);
  const auto mg = check_condition(M, Condition::mg, w, opts);
  const auto star = check_condition(M, Condition::star, sm.window, opts);

  auto implies = [&](const char* name, const PropertyReport& a, const PropertyReport& b) {
    AuditEntry e{name, AuditStatus::Vacuous, "premise fails on window"};
    if (a.holds()) {
      e.status = b.holds() ? AuditStatus::Satisfied : AuditStatus::Violated;
      e.detail = b.holds() ? "conclusion holds on window" : "conclusion fails on window";
    }
    out.push_back(e);
  };
  implies("dc=>sm", dc, sm);
  implies("mg=>dc", mg, dc);

  AuditEntry e{"sm=>star", AuditStatus::Vacuous, "premise fails on window"};
  if (sm.holds()) {
    // log m_p <= log m_0 + sum_{k<p} C0 H^{k+1} <= (|log m_0| + C0 H/(H-1)) H^p.
    const double H = *sm.H;
    const double C1 = std::abs(M.log_m(0)) + *sm.C0 * H / (H - 1.0);
    bool ok = true;
    for (std::size_t p = 0; p <= sm.window.hi; ++p) {
      const double v = M.log_m(p);
      if (v > 0 && !leq_with_slack(std::log(v), std::log(C1) + static_cast<double>(p) * std::log(H)))
        ok = false;
    }
    const bool consistent = ok && star.holds();
    e.status = consistent ? AuditStatus::Satisfied : AuditStatus::Violated;
    e.detail = "C1=" + std::to_string(C1) + (ok ? " substitutes" : " fails substitution") +
               (star.holds() ? ", star checker holds" : ", star checker fails");
  }
  out.push_back(e);
  return out;
}

StabilityResult stability_audit(const WeightSequence& M, double h, PerturbationKind kind,
                                Condition cond, Window w, const CheckOptions& opts) {
  WeightSequence X = [&] {
    switch (kind) {
      case PerturbationKind::Hat: return transform(M, Hat{});
      case PerturbationKind::Check: return transform(M, Check{});
      case PerturbationKind::Power: return transform(M, Power{h});
      case PerturbationKind::EquivalentScale: return equivalent_scale(M, h);
    }
    return transform(M, Hat{});
  }();
  StabilityResult r;
  r.before = check_condition(M, cond, w, opts);
  r.after = check_condition(X, cond, w, opts);
  r.same_verdict = r.before.verdict == r.after.verdict;
  return r;
}

}  // namespace asympto
