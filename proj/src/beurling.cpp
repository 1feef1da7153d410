#include "asympto/beurling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asympto/error.hpp"
#include "asympto/flatmom.hpp"
#include "asympto/numeric.hpp"

namespace asympto {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double down(double x) { return std::nextafter(x, -kInf); }
double up(double x) { return std::nextafter(x, kInf); }

// Largest value over the last quarter below the smallest over the first.
template <class F>
bool quarters_decrease(std::size_t lo, std::size_t hi, F&& value) {
  const std::size_t n = hi - lo + 1;
  const std::size_t q = std::max<std::size_t>(n / 4, 1);
  double first_min = kInf, last_max = -kInf;
  for (std::size_t p = lo; p < lo + q; ++p) first_min = std::min(first_min, value(p));
  for (std::size_t p = hi + 1 - q; p <= hi; ++p) last_max = std::max(last_max, value(p));
  return last_max < first_min;
}

}  // namespace

double EpsilonSequence::eps(std::size_t j) const { return std::exp(log_eps.at(j)); }

EpsilonSequence epsilon_sequence(std::span<const double> log_L, std::span<const double> log_M) {
  if (log_L.size() != log_M.size() || log_L.size() < 5)
    throw Error(ErrorKind::ConfigInvalid, "epsilon_sequence: need matching lists of length >= 5");
  const std::size_t n = log_L.size() - 1;
  std::vector<double> log_c(n + 1, -kInf);
  for (std::size_t p = 1; p <= n; ++p) log_c[p] = (log_L[p] - log_M[p]) / static_cast<double>(p);
  if (!quarters_decrease(1, n, [&](std::size_t p) { return log_c[p]; }))
    throw Error(ErrorKind::NotSmallO, "(L_p/M_p)^{1/p} does not tend to zero on the window");

  EpsilonSequence e;
  e.n = n;
  e.log_eps.assign(n, -kInf);
  double run = -kInf;
  for (std::size_t j = n; j-- > 0;) {
    run = std::max(run, log_c[j + 1]);
    e.log_eps[j] = run;
  }
  // Direct re-substitution. Rounding in p * log c_p against a running sum
  // can leave an ulp-sized excess; the fix raises every eps by one ulp,
  // which keeps the sequence nonincreasing.
  for (int attempt = 0; attempt < 64; ++attempt) {
    e.worst_slack = -kInf;
    numeric::CompensatedSum s;
    for (std::size_t p = 1; p <= n; ++p) {
      s.add(e.log_eps[p - 1]);
      e.worst_slack = std::max(e.worst_slack, (log_L[p] - log_M[p]) - s.value());
    }
    if (e.worst_slack <= 0) return e;
    for (double& v : e.log_eps) v = up(v);
    ++e.nudges;
  }
  throw Error(ErrorKind::ConstructionFailed, "epsilon_sequence: product bound not restored");
}

EpsilonSequence epsilon_sequence(const WeightSequence& L, const WeightSequence& M, std::size_t n) {
  std::vector<double> a(n + 1), b(n + 1);
  for (std::size_t p = 0; p <= n; ++p) {
    a[p] = L.log_M(p);
    b[p] = M.log_M(p);
  }
  return epsilon_sequence(a, b);
}

ModulationAudit audit_modulation(std::span<const double> log_E, std::span<const double> log_A,
                                 std::span<const double> log_B, std::span<const double> log_D,
                                 std::size_t window, std::size_t horizon) {
  ModulationAudit a;
  auto fail = [&](const char* what, std::size_t q) {
    if (a.failed_property.empty()) {
      a.failed_property = what;
      a.failed_at = q;
    }
  };
  a.nondecreasing = true;
  a.ED_nonincreasing = true;
  for (std::size_t p = 0; p < horizon; ++p) {
    if (log_E[p + 1] < log_E[p]) {
      a.nondecreasing = false;
      fail("E nondecreasing", p + 1);
    }
    if (log_E[p + 1] + log_D[p + 1] > log_E[p] + log_D[p]) {
      a.ED_nonincreasing = false;
      fail("E*D nonincreasing", p + 1);
    }
  }
  // Factor-8 tail inequality for every q <= window, tails up to the horizon.
  a.tail_sums = true;
  a.worst_tail_ratio = -kInf;
  double sEA = -kInf, sA = -kInf;
  for (std::size_t p = horizon + 1; p-- > 0;) {
    sEA = numeric::log_add(sEA, log_E[p] + log_A[p]);
    sA = numeric::log_add(sA, log_A[p]);
    if (p > window) continue;
    const double ratio = sEA - (log_E[p] + sA);
    a.worst_tail_ratio = std::max(a.worst_tail_ratio, ratio);
    if (ratio > std::log(8.0)) {
      a.tail_sums = false;
      fail("factor-8 tail sum", p);
    }
  }
  a.worst_tail_ratio = std::exp(a.worst_tail_ratio);
  // E*B: monotone down over the last quarter of the window, with a net drop.
  const std::size_t start = window - window / 4;
  a.EB_tail_decreasing = log_E[window] + log_B[window] < log_E[start] + log_B[start];
  for (std::size_t p = start; p < window; ++p)
    if (log_E[p + 1] + log_B[p + 1] > log_E[p] + log_B[p]) {
      a.EB_tail_decreasing = false;
      fail("E*B decreasing at the tail", p + 1);
      break;
    }
  if (!a.EB_tail_decreasing) fail("E*B decreasing at the tail", window);
  return a;
}

ModulationSequence modulation_sequence(std::span<const double> log_A, std::span<const double> log_B,
                                       std::span<const double> log_D, std::size_t window,
                                       const ModulationOptions& opts) {
  if (window < 8) throw Error(ErrorKind::ConfigInvalid, "modulation_sequence: window too short");
  const std::size_t horizon = opts.horizon ? opts.horizon : 4 * window;
  if (horizon < window) throw Error(ErrorKind::ConfigInvalid, "modulation_sequence: horizon below window");
  if (log_A.size() <= horizon || log_B.size() <= horizon || log_D.size() <= horizon)
    throw Error(ErrorKind::ConfigInvalid, "modulation_sequence: inputs must cover 0..horizon");
  for (std::size_t p = 0; p <= horizon; ++p)
    if (!std::isfinite(log_A[p]) || !std::isfinite(log_B[p]) || !std::isfinite(log_D[p]))
      throw Error(ErrorKind::ConfigInvalid, "modulation_sequence: inputs must be positive and finite");

  for (std::size_t p = 0; p < horizon; ++p)
    if (log_D[p + 1] > log_D[p])
      throw Error(ErrorKind::InputTrendViolated, "D is not nonincreasing at p = " + std::to_string(p + 1));
  auto idx = [](std::span<const double> v) { return [v](std::size_t p) { return v[p]; }; };
  if (!quarters_decrease(0, horizon, idx(log_D)))
    throw Error(ErrorKind::InputTrendViolated, "D does not tend to zero on the horizon");
  if (!quarters_decrease(0, horizon, idx(log_B)))
    throw Error(ErrorKind::InputTrendViolated, "B does not tend to zero on the horizon");
  if (!quarters_decrease(0, horizon, idx(log_A)))
    throw Error(ErrorKind::InputTrendViolated, "A does not decay on the horizon");
  {
    double head = -kInf, tail = -kInf;
    for (std::size_t p = 0; p <= horizon; ++p)
      (p <= window ? head : tail) = numeric::log_add(p <= window ? head : tail, log_A[p]);
    if (tail - numeric::log_add(head, tail) > std::log(0.1))
      throw Error(ErrorKind::InputTrendViolated, "A carries more than 10% of its mass beyond the window");
  }

  // Phi_p = max(sup_{q >= p} B_q, D_p) is nonincreasing and tends to zero.
  // E tracks Phi^{-theta}, clamped so that E stays nondecreasing and E*D
  // stays nonincreasing exactly in floating point.
  std::vector<double> phi(horizon + 1);
  double run = -kInf;
  for (std::size_t p = horizon + 1; p-- > 0;) {
    run = std::max(run, log_B[p]);
    phi[p] = std::max(run, log_D[p]);
  }
  ModulationSequence out;
  out.window = window;
  out.horizon = horizon;
  double theta = opts.theta;
  for (int level = 0; level <= opts.max_throttle; ++level, theta /= opts.throttle) {
    std::vector<double> lE(horizon + 1);
    lE[0] = -theta * phi[0];
    for (std::size_t p = 0; p < horizon; ++p) {
      double v = std::max(-theta * phi[p + 1], lE[p]);
      double cap = lE[p] + log_D[p] - log_D[p + 1];
      while (cap + log_D[p + 1] > lE[p] + log_D[p]) cap = down(cap);
      v = std::min(v, cap);
      if (v < lE[p]) v = lE[p];  // D nonincreasing makes cap >= lE[p] up to rounding
      lE[p + 1] = v;
    }
    auto audit = audit_modulation(lE, log_A, log_B, log_D, window, horizon);
    out.log_E = std::move(lE);
    out.theta = theta;
    out.throttle_level = level;
    out.audit = audit;
    if (audit.all()) return out;
  }
  throw Error(ErrorKind::ConstructionFailed,
              "modulation_sequence: property '" + out.audit.failed_property + "' fails at q = " +
                  std::to_string(out.audit.failed_at.value_or(0)) + " after throttling");
}

bool DerivedWeight::pass() const {
  return std::all_of(report.begin(), report.end(), [](const ReportItem& r) { return r.pass; });
}

namespace {

// Running maximum of g(p) over lo..e, fed to the nested-window trend test.
template <class G>
numeric::TrendResult prefix_max_trend(std::size_t lo, std::size_t hi, const TrendConfig& cfg, G&& g,
                                      double& overall) {
  std::vector<double> prefix(hi + 1, -kInf);
  double run = -kInf;
  for (std::size_t p = lo; p <= hi; ++p) prefix[p] = run = std::max(run, g(p));
  overall = run;
  return numeric::nested_trend(Window{lo, hi}, cfg, [&](Window w) { return prefix[w.hi]; });
}

}  // namespace

DerivedWeight build_K(const WeightSequence& L, std::span<const double> log_A, std::size_t window,
                      const BuildKOptions& opts) {
  const std::size_t horizon = opts.modulation.horizon ? opts.modulation.horizon : 4 * window;
  if (L.window() < horizon)
    throw Error(ErrorKind::WindowExceeded, "build_K: L must carry quotients up to 4x window");
  if (log_A.size() <= horizon)
    throw Error(ErrorKind::PreconditionFailed, "build_K: coefficients must cover 0..4x window");

  const Window w{0, window};
  CheckOptions copts;
  copts.trend = opts.trend;
  try {
    if (!check_condition(L, Condition::snq, w, copts).holds())
      throw Error(ErrorKind::PreconditionFailed, "build_K: L fails snq on the window");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TailTruncationDominant) throw;
    throw Error(ErrorKind::PreconditionFailed, std::string("build_K: snq of L not evidenced: ") + e.what());
  }
  const PropertyReport sm_L = check_condition(L, Condition::sm, w, copts);
  if (!sm_L.holds()) throw Error(ErrorKind::PreconditionFailed, "build_K: L fails sm on the window");

  DerivedWeight out;
  {
    std::vector<double> lM(horizon + 1);
    for (std::size_t p = 0; p <= horizon; ++p) lM[p] = L.log_M(p);
    out.eps = epsilon_sequence(log_A.first(horizon + 1), lM);
  }

  // A' = u, B = max(eps, (p+1) u), D = (p+1) u with u_p = 1/((p+1) l_p).
  std::vector<double> lu(horizon + 1), lB(horizon + 1), lD(horizon + 1);
  for (std::size_t p = 0; p <= horizon; ++p) {
    lD[p] = -L.log_m(p);
    lu[p] = lD[p] - std::log1p(static_cast<double>(p));
    const double le = p < out.eps.log_eps.size() ? out.eps.log_eps[p] : out.eps.log_eps.back();
    lB[p] = std::max(le, lD[p]);
  }
  out.E = modulation_sequence(lu, lB, lD, window, opts.modulation);
  out.log_u = lu;

  // k_p = l_p / E_p, lowered by ulps where needed so that the quotient
  // increments never exceed those of l in floating point.
  std::vector<double> lk(horizon + 1);
  for (std::size_t p = 0; p <= horizon; ++p) lk[p] = L.log_m(p) - out.E.log_E[p];
  for (std::size_t p = 0; p < horizon; ++p)
    while (lk[p + 1] - lk[p] > L.log_m(p + 1) - L.log_m(p)) lk[p + 1] = down(lk[p + 1]);
  out.log_k = lk;
  out.K = WeightSequence::table(lk, "K(" + L.label() + ")");

  // (a) quotient domination, with zero tolerance.
  {
    ReportItem it;
    it.name = "a: k-ratio domination";
    double worst = -kInf;
    for (std::size_t p = 0; p < horizon; ++p)
      worst = std::max(worst, (lk[p + 1] - lk[p]) - (L.log_m(p + 1) - L.log_m(p)));
    it.value = worst;
    it.pass = worst <= 0.0;
    it.detail = "max log(k_{p+1}/k_p) - log(l_{p+1}/l_p) over 0.." + std::to_string(horizon);
    out.report.push_back(it);
  }
  // (b) A_p <= D K_p.
  {
    ReportItem it;
    it.name = "b: A <= D K";
    double lDfit = 0;
    auto tr = prefix_max_trend(0, window, opts.trend,
                               [&](std::size_t p) { return log_A[p] - out.K.log_M(p); }, lDfit);
    it.value = std::exp(lDfit);
    it.trend_slope = tr.slope;
    it.pass = !tr.diverges;
    it.detail = "fitted D on the window";
    out.report.push_back(it);
  }
  // (c) K_p <= C'(h) h^p L_p on the h grid.
  double smallest_h = kInf;
  for (double h : opts.h_grid) smallest_h = std::min(smallest_h, h);
  bool other_c_failed = false;
  for (double h : opts.h_grid) {
    ReportItem it;
    it.name = "c: K <= C'(h) h^p L, h=" + std::to_string(h);
    const double lh = std::log(h);
    double lC = 0;
    auto tr = prefix_max_trend(
        0, window, opts.trend,
        [&](std::size_t p) { return out.K.log_M(p) - static_cast<double>(p) * lh - L.log_M(p); }, lC);
    it.value = std::exp(lC);
    it.trend_slope = tr.slope;
    it.pass = !tr.diverges;
    if (!it.pass) {
      if (h == smallest_h)
        out.partial = true;
      else
        other_c_failed = true;
    }
    out.report.push_back(it);
  }
  if (other_c_failed) out.partial = false;
  // (d) snq of K.
  {
    ReportItem it;
    it.name = "d: snq(K)";
    const PropertyReport r = check_condition(out.K, Condition::snq, w, copts);
    it.pass = r.holds();
    it.value = r.C.value_or(kInf);
    it.trend_slope = r.diagnostic_slope;
    out.report.push_back(it);
  }
  // (e) sm of K with the constants fitted for L.
  {
    ReportItem it;
    it.name = "e: sm(K) with L's constants";
    PropertyReport r = sm_L;
    it.pass = resubstitute(out.K, r);
    it.value = sm_L.H.value_or(kInf);
    it.detail = "C0 = " + std::to_string(sm_L.C0.value_or(kInf));
    out.report.push_back(it);
  }
  return out;
}

PipelineTrace beurling_pipeline(const WeightSequence& M, double r, std::span<const double> log_abs_a,
                                const PipelineOptions& opts) {
  if (!(r > 0.0)) throw Error(ErrorKind::ConfigInvalid, "pipeline: r must be positive");
  const std::size_t W = opts.window;
  const std::size_t P = 4 * W;
  if (M.window() < P) throw Error(ErrorKind::WindowExceeded, "pipeline: M must cover 4x window");
  if (log_abs_a.size() <= P)
    throw Error(ErrorKind::PreconditionFailed, "pipeline: series must cover 0..4x window");

  PipelineTrace t;
  t.r = r;
  // l_p = m_p^{1/r} / (p+1), made nondecreasing from the head on.
  std::vector<double> ll(P + 1);
  for (std::size_t p = 0; p <= P; ++p) ll[p] = M.log_m(p) / r - std::log1p(static_cast<double>(p));
  for (std::size_t p = 1; p <= P; ++p) ll[p] = std::max(ll[p], ll[p - 1]);
  t.L = WeightSequence::table(ll, "L(" + M.label() + ")");

  std::vector<double> lA(P + 1);
  for (std::size_t p = 0; p <= P; ++p)
    lA[p] = log_abs_a[p] / r - std::lgamma(static_cast<double>(p) + 1.0);
  t.K = build_K(t.L, lA, W, opts.build);

  // N_p = (p! K_p)^r, quotients n_p = ((p+1) k_p)^r.
  std::vector<double> ln(P + 1);
  for (std::size_t p = 0; p <= P; ++p) ln[p] = r * (std::log1p(static_cast<double>(p)) + t.K.log_k[p]);
  t.N = WeightSequence::table(ln, "N");
  t.gamma_N = gamma_estimate(t.N, Window{0, W}, opts.gamma_resolution);

  // Kernel order: least-squares slope of log N_p against log p! over the
  // second half of the window, kept above the sector opening.
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t p = W / 2; p <= W; ++p) {
      const double x = std::lgamma(static_cast<double>(p) + 1.0);
      const double y = t.N.log_M(p);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      n += 1;
    }
    t.kernel_alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  if (!(t.kernel_alpha > opts.sector.opening))
    throw Error(ErrorKind::PreconditionFailed, "pipeline: fitted order of N does not exceed the sector opening");

  // The series is extended over N; coefficients far below double range are
  // dropped once they vanish in the Borel transform.
  const std::size_t keep = std::min<std::size_t>(log_abs_a.size(), opts.p_max + 28);
  std::vector<double> la(log_abs_a.begin(), log_abs_a.begin() + static_cast<std::ptrdiff_t>(keep));
  std::vector<double> ar(keep, 0.0);
  const FormalSeries f = FormalSeries::from_log_polar(la, ar);
  const FlatFunction kernel = FlatFunction::gevrey_exp(t.kernel_alpha, opts.sector);
  t.setup = prepare_extension(f, t.N, kernel, opts.p_max);
  RemainderGrid grid;
  grid.gamma = opts.sector.opening;
  t.remainder = remainder_report(t.setup.borel, kernel, t.setup.certificate, t.N, grid, opts.p_max);
  t.pass = t.K.pass() && t.gamma_N.lower > r && t.remainder.pass;
  return t;
}

}  // namespace asympto
