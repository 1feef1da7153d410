// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asympto/beurling.hpp"
#include "asympto/cli.hpp"
#include "asympto/error.hpp"
#include "asympto/extend.hpp"
#include "asympto/flatmom.hpp"
#include "asympto/growth.hpp"
#include "asympto/numeric.hpp"
#include "asympto/props.hpp"
#include "asympto/ramified.hpp"
#include "asympto/seqcore.hpp"

using namespace asympto;
using cd = std::complex<double>;

namespace {

// Collects failed sub-checks; a criterion passes when none fail.
struct Ledger {
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  void note(const std::string& what) { notes.push_back(what); }
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double x) { return cli::format_double(x); }

double euler_function(double x) { return std::exp(1 / x) * boost::math::expint(1, 1 / x) / x; }

FormalSeries euler(std::size_t n) {
  std::vector<double> la(n + 1), ar(n + 1);
  for (std::size_t p = 0; p <= n; ++p) {
    la[p] = std::lgamma(p + 1.0);
    ar[p] = p % 2 ? std::numbers::pi : 0.0;
  }
  return FormalSeries::from_log_polar(la, ar);
}

std::vector<double> lfact(std::size_t n, double scale = 1.0) {
  std::vector<double> v(n + 1);
  for (std::size_t p = 0; p <= n; ++p) v[p] = scale * std::lgamma(p + 1.0);
  return v;
}

// log sum_{p=q}^{P} exp(x_p) summed from the largest term in long double.
double log_sum(const std::vector<double>& x, std::size_t q, std::size_t P) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t p = q; p <= P; ++p) mx = std::max(mx, x[p]);
  long double s = 0;
  for (std::size_t p = q; p <= P; ++p) s += std::exp(static_cast<long double>(x[p] - mx));
  return mx + static_cast<double>(std::log(s));
}

void c1(Ledger& L) {
  for (const auto& r : cli::examples_matrix())
    L.expect(r.match(), r.family + " " + r.condition + " expected " + (r.expected_holds ? "holds" : "fails"));
}

void c2(Ledger& L) {
  const std::vector<std::pair<WeightSequence, Window>> fams = {
      {WeightSequence::gevrey(0.5), {0, 500}},       {WeightSequence::gevrey(1.0), {0, 500}},
      {WeightSequence::gevrey(2.0), {0, 500}},       {WeightSequence::q_gevrey(2.0, 2.0), {0, 500}},
      {WeightSequence::q_gevrey(2.0, 3.0), {0, 500}}, {WeightSequence::power_sigma(1.0, 2.0), {0, 500}},
      {WeightSequence::qpp(2.0), {0, 60}}};
  for (const auto& [M, w] : fams) {
    for (const auto& e : implication_audit(M, w))
      L.expect(e.status != AuditStatus::Violated, M.label() + ": " + e.implication + " violated: " + e.detail);
    const std::vector<std::pair<PerturbationKind, double>> perturb = {{PerturbationKind::Hat, 0.0},
                                                                      {PerturbationKind::Check, 0.0},
                                                                      {PerturbationKind::Power, 2.0},
                                                                      {PerturbationKind::Power, 0.5},
                                                                      {PerturbationKind::EquivalentScale, 3.0}};
    for (const auto& [kind, h] : perturb) {
      const Window sub{w.lo, w.hi - 1};
      const auto s = stability_audit(M, h, kind, Condition::sm, sub);
      L.expect(s.same_verdict, M.label() + ": sm changes under " + to_string(kind) + " " + fmt(h));
    }
  }
}

void c3(Ledger& L) {
  std::mt19937_64 rng(20261014);
  for (const auto& M : {WeightSequence::gevrey(1.0, 1000), WeightSequence::gevrey(2.0, 1000),
                        WeightSequence::q_gevrey(2.0, 2.0, 1000)}) {
    const auto grid = default_recovery_grid(M, 400);
    double worst = 0;
    for (std::size_t p = 0; p <= 100; ++p) {
      const double v = recover_Mp(M, p, grid);
      // Relative error of M_p itself.
      worst = std::max(worst, std::abs(std::expm1(v - M.log_M(p))));
    }
    L.expect(worst <= 1e-9, M.label() + ": recover_Mp relative error " + fmt(worst));

    std::uniform_real_distribution<double> u(-M.log_m(M.window()) + 1e-9, 1.0);
    double worst_h = 0;
    for (int i = 0; i < 100; ++i) {
      const double lt = u(rng);
      double brute = 0.0;
      for (std::size_t p = 0; p <= M.window(); ++p)
        brute = std::min(brute, M.log_M(p) + static_cast<double>(p) * lt);
      worst_h = std::max(worst_h, std::abs(h_eval_log(M, lt) - brute) / std::max(1.0, std::abs(brute)));
    }
    L.expect(worst_h <= 1e-12, M.label() + ": h_eval vs brute force " + fmt(worst_h));
  }
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void c4(Ledger& L) {
  const WeightSequence G = WeightSequence::gevrey(1.0, 4000);
  const WeightSequence one = WeightSequence::table(std::vector<double>(4001, 0.0), "one");
  GammaEstimate g, g2, gh, q;
  double t = timed([&] { g = gamma_estimate(G, {0, 500}, 0.05); });
  L.expect(t < 30, "gamma(p!) took " + fmt(t) + " s");
  L.expect(g.lower >= 0.9 && g.upper <= 1.1, "gamma(p!) in [" + fmt(g.lower) + ", " + fmt(g.upper) + "]");
  t = timed([&] { g2 = gamma_estimate(transform(one, GammaMul{2.0}), {0, 500}, 0.05); });
  L.expect(t < 30, "gamma(Gamma_2 const) took " + fmt(t) + " s");
  L.expect(g2.lower >= 1.9 && g2.upper <= 2.1, "gamma(Gamma_2 const) in [" + fmt(g2.lower) + ", " + fmt(g2.upper) + "]");
  t = timed([&] { gh = gamma_estimate(transform(G, Hat{}), {0, 500}, 0.05); });
  L.expect(t < 30, "gamma(hat p!) took " + fmt(t) + " s");
  const double dlo = gh.lower - g.lower, dhi = gh.upper - g.upper;
  L.expect(dlo >= 0.8 && dlo <= 1.2 && dhi >= 0.8 && dhi <= 1.2,
           "hat shift bracket [" + fmt(dlo) + ", " + fmt(dhi) + "]");
  t = timed([&] { q = gamma_estimate(WeightSequence::q_gevrey(2.0, 2.0), {0, 500}, 0.05); });
  L.expect(t < 30, "gamma(QGevrey(2,2)) took " + fmt(t) + " s");
  L.expect(std::isinf(q.upper) && q.upper > 0, "QGevrey(2,2) upper = " + fmt(q.upper));
}

void c5(Ledger& L) {
  for (double a : {0.5, 1.0, 2.0}) {
    const auto mu = moments(FlatFunction::gevrey_exp(a, SectorSpec{0.0, a / 2, std::nullopt}), 20);
    for (std::size_t p = 0; p <= 20; ++p) {
      const double ref = std::log(a) + std::lgamma(a * (p + 1.0));
      const double rel = std::abs(std::expm1(mu.log_mu[p] - ref));
      L.expect(rel <= 1e-6, "alpha " + fmt(a) + " p " + std::to_string(p) + " rel " + fmt(rel));
    }
  }
  const auto mu = moments(FlatFunction::gevrey_exp(1.0, SectorSpec{0.0, 0.5, std::nullopt}), 40);
  const auto fit = moment_equiv_fit(mu, WeightSequence::gevrey(1.0, 100), MomentMode::Shifted, {0, 40});
  if (const auto* f = std::get_if<MomentFit>(&fit)) {
    L.expect(f->h1 >= 0.6 && f->h1 <= 0.8, "h1 = " + fmt(f->h1));
    L.expect(f->h2 >= 0.9 && f->h2 <= 1.1, "h2 = " + fmt(f->h2));
  } else {
    L.expect(false, "shifted fit reported not equivalent");
  }
}

void c6(Ledger& L) {
  const WeightSequence M = WeightSequence::gevrey(1.0, 2000);
  const SectorSpec S{0.0, 0.5, std::nullopt};
  const FlatFunction F = FlatFunction::gevrey_exp(1.0, S);
  const ExtensionSetup s = prepare_extension(euler(60), M, F, 12);

  double worst_b = 0;
  for (std::size_t p = 0; p < s.borel.size(); ++p) {
    const double expected = (p % 2 ? 1.0 : -1.0) * (p + 1.0);
    worst_b = std::max(worst_b, std::abs(s.borel.coeff(p) - cd{expected}) / std::abs(expected));
  }
  L.expect(worst_b <= 1e-12, "(a) Borel coefficients rel error " + fmt(worst_b));

  const double R0 = std::pow(3.0, -1.0 / 3.0) / 2;
  L.expect(std::abs(s.borel.R0 - R0) <= 1e-9, "(b) R0 = " + fmt(s.borel.R0));

  const RemainderReport rep = remainder_report(s.borel, F, s.certificate, M, RemainderGrid{}, 12);
  L.expect(rep.pass, "(c) remainder report: " + rep.detail);
  L.expect(rep.fitted_h <= 2 * rep.c_pred, "(c) fitted h' " + fmt(rep.fitted_h) + " > 2 c_pred " + fmt(rep.c_pred));
  L.expect(rep.rows.size() == 13, "(c) rows for p = 0..12");

  const auto xl = geometric_ladder(0.02, 0.75, 24);
  std::vector<cd> T(xl.size());
  for (std::size_t j = 0; j < xl.size(); ++j) T[j] = apply_extension(s.borel, F, xl[j]);
  const auto e = extract_asymptotic_coeffs(xl, T, 4);
  for (std::size_t k = 0; k <= 4; ++k) {
    const double ref = (k % 2 ? -1.0 : 1.0) * std::tgamma(k + 1.0);
    const double d = std::abs(e[k].value - ref);
    L.expect(d <= e[k].error, "(d) a_" + std::to_string(k) + " off by " + fmt(d) + " > error " + fmt(e[k].error));
    L.expect(d <= 1e-2 * std::abs(ref), "(d) a_" + std::to_string(k) + " relative " + fmt(d / std::abs(ref)));
  }

  // (e) The difference to Euler's function is flat. Fit the type h as the
  // smallest grid value for which the log-ratio against h_M(h x) shows no
  // divergence on nested windows toward small x, fit K as the maximal ratio,
  // then require the bound everywhere and h within the predicted type.
  const auto xs = geometric_ladder(0.3, std::pow(0.02 / 0.3, 1.0 / 39), 40);
  std::vector<double> log_diff(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j)
    log_diff[j] = std::log(std::abs(apply_extension(s.borel, F, xs[j]) - euler_function(xs[j])));
  double h_fit = 0, log_K = 0;
  for (double h = 1.0; h <= 2 * rep.c_pred; h *= 1.02) {
    std::vector<double> lr(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) lr[j] = log_diff[j] - h_eval(M, h * xs[j]);
    const auto tr = numeric::nested_trend(Window{0, xs.size() - 1}, TrendConfig{}, [&](Window w) {
      return *std::max_element(lr.begin() + w.lo, lr.begin() + w.hi + 1);
    });
    if (!tr.diverges) {
      h_fit = h;
      log_K = *std::max_element(lr.begin(), lr.end());
      break;
    }
  }
  L.expect(h_fit > 0, "(e) no non-divergent flat type up to 2 c_pred");
  if (h_fit > 0) {
    L.expect(h_fit <= rep.c_pred, "(e) fitted flat type " + fmt(h_fit) + " > c_pred " + fmt(rep.c_pred));
    bool bound = true;
    for (std::size_t j = 0; j < xs.size(); ++j) bound = bound && log_diff[j] <= log_K + h_eval(M, h_fit * xs[j]);
    L.note("flat type " + fmt(h_fit) + ", K " + fmt(std::exp(log_K)) + ", c_pred " + fmt(rep.c_pred));
    L.expect(bound, "(e) flat-difference bound with K = " + fmt(std::exp(log_K)) + ", h = " + fmt(h_fit));
  }
}

void c7(Ledger& L) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-30.0, 30.0), A(-std::numbers::pi, std::numbers::pi);
  for (double alpha : {0.3, 0.5, 1.0, 1.5, 2.5}) {
    std::vector<double> la(40), ar(40);
    for (std::size_t p = 0; p < la.size(); ++p) {
      la[p] = U(rng);
      ar[p] = A(rng);
    }
    const FormalSeries f = FormalSeries::from_log_polar(la, ar);
    const FormalSeries back = formal_alpha_borel(formal_alpha_laplace(f, alpha), alpha);
    for (std::size_t p = 0; p < la.size(); ++p)
      L.expect(back.log_abs(p) == f.log_abs(p) && back.arg(p) == f.arg(p),
               "formal inverse not exact at alpha " + fmt(alpha) + " p " + std::to_string(p));
  }
  for (double alpha : {0.5, 1.0, 1.5})
    for (cd z : {cd{0.3}, std::polar(0.7, 0.3), std::polar(2.0, -0.2)})
      for (int p = 0; p <= 8; ++p) {
        const cd v = analytic_alpha_laplace([p](cd u) { return std::pow(u, p); }, {1.0, 0.0, 0.0}, alpha, 0.0, z);
        const cd ref = std::tgamma(1 + alpha * p) * std::pow(z, p);
        const double rel = std::abs(v - ref) / std::abs(ref);
        L.expect(rel <= 1e-6, "moment identity alpha " + fmt(alpha) + " p " + std::to_string(p) + " rel " + fmt(rel));
      }

  std::vector<cd> geo, expo, poly{1.0, 2.0, 3.0, 0.0, 0.0, 0.0};
  for (int p = 0; p <= 5; ++p) {
    geo.push_back(p % 2 ? -1.0 : 1.0);
    expo.push_back((p % 2 ? -1.0 : 1.0) / std::tgamma(p + 1.0));
  }
  const GrowthCap cap{};
  const std::vector<std::tuple<std::string, ComplexFn, std::vector<cd>>> triples = {
      {"1/(1+u)", [](cd u) { return 1.0 / (1.0 + u); }, geo},
      {"exp(-u)", [](cd u) { return std::exp(-u); }, expo},
      {"1+2u+3u^2", [](cd u) { return 1.0 + 2.0 * u + 3.0 * u * u; }, poly}};
  for (const auto& [name, f, c] : triples)
    for (const auto& r : transform_expansion_check_laplace(f, cap, FormalSeries::from_coeffs(c), 1.0, 0.5, 5))
      L.expect(r.pass, "expansion check " + name + " on ray " + fmt(r.ray_arg));
  const auto b = transform_expansion_check_borel([](cd z) { return 1.0 / (1.0 + z); }, SectorSpec{0.0, 1.5, 1.0},
                                                 FormalSeries::from_coeffs(geo), 1.0,
                                                 BorelPath{0.0, 0.5, std::numbers::pi / 6}, 5);
  L.expect(b.pass, "Borel expansion check of 1/(1+z)");
}

void c8(Ledger& L) {
  const std::size_t n = 200;
  {
    const auto lL = lfact(n), lM = lfact(n, 2.0);
    const EpsilonSequence e = epsilon_sequence(lL, lM);
    L.expect(e.worst_slack <= 0.0, "epsilon p!/p!^2 slack " + fmt(e.worst_slack));
  }
  {
    std::vector<double> lM = lfact(n), lL(n + 1);
    for (std::size_t p = 0; p <= n; ++p) lL[p] = lM[p] - double(p * p) * std::log(2.0);
    const EpsilonSequence e = epsilon_sequence(lL, lM);
    L.expect(e.worst_slack <= 0.0, "epsilon 2^{-p^2} slack " + fmt(e.worst_slack));
  }

  const std::size_t W = 10000, P = 4 * W;
  std::vector<double> lA(P + 1), lH(P + 1);
  for (std::size_t p = 0; p <= P; ++p) {
    lA[p] = -double(p) * std::log(2.0);
    lH[p] = -std::log1p(double(p));
  }
  for (const auto& [name, lB] : {std::pair{std::string("harmonic"), lH}, std::pair{std::string("geometric"), lA}}) {
    const ModulationSequence E = modulation_sequence(lA, lB, lB, W);
    L.expect(E.audit.all(), name + " modulation audit failed: " + E.audit.failed_property);
    // Independent factor-8 inequality at every q of the window.
    std::vector<double> lEA(P + 1);
    for (std::size_t p = 0; p <= P; ++p) lEA[p] = E.log_E[p] + lA[p];
    double worst = -std::numeric_limits<double>::infinity();
    long double tail_EA = 0, tail_A = 0;
    std::vector<double> sEA(W + 1), sA(W + 1);
    // Suffix sums relative to a fixed reference keep this O(P).
    const double refEA = log_sum(lEA, 0, P), refA = log_sum(lA, 0, P);
    for (std::size_t p = P + 1; p-- > 0;) {
      tail_EA += std::exp(static_cast<long double>(lEA[p] - refEA));
      tail_A += std::exp(static_cast<long double>(lA[p] - refA));
      if (p <= W) {
        sEA[p] = refEA + static_cast<double>(std::log(tail_EA));
        sA[p] = refA + static_cast<double>(std::log(tail_A));
      }
    }
    for (std::size_t q = 0; q <= W; ++q) worst = std::max(worst, sEA[q] - E.log_E[q] - sA[q]);
    L.expect(worst <= std::log(8.0) + 1e-12, name + " factor-8 inequality worst log ratio " + fmt(worst));
  }

  const std::size_t WK = 500, PK = 4 * WK;
  std::vector<double> lAK(PK + 1);
  for (std::size_t p = 0; p <= PK; ++p) lAK[p] = std::lgamma(p + 1.0) - double(p) * double(p) * std::log(2.0);
  const DerivedWeight K = build_K(WeightSequence::gevrey(1.0), lAK, WK);
  for (const auto& it : K.report) L.expect(it.pass, "build_K item " + it.name + ": " + it.detail);
  L.expect(K.report.size() == 8, "build_K report has " + std::to_string(K.report.size()) + " items");
  // Zero-tolerance k-ratio domination, recomputed here: k_{p+1}/l_{p+1} <= k_p/l_p.
  const WeightSequence Lw = WeightSequence::gevrey(1.0);
  bool dom = true;
  for (std::size_t p = 0; p + 1 < K.log_k.size() && p + 1 <= Lw.window(); ++p)
    dom = dom && (K.log_k[p + 1] - Lw.log_m(p + 1) <= K.log_k[p] - Lw.log_m(p));
  L.expect(dom, "k-ratio domination with zero tolerance");
}

void c9(Ledger& L) {
  PipelineOptions o;
  const std::size_t P = 4 * o.window;
  std::vector<double> la(P + 1);
  for (std::size_t p = 0; p <= P; ++p) la[p] = std::lgamma(p + 1.0) - double(p) * double(p) * std::log(2.0);
  const PipelineTrace t = beurling_pipeline(WeightSequence::gevrey(1.0), 0.5, la, o);
  L.expect(t.K.pass(), "K report failed");
  L.expect(t.gamma_N.lower > 0.5, "gamma(N) lower " + fmt(t.gamma_N.lower));
  L.expect(t.kernel_alpha > o.sector.opening, "kernel alpha " + fmt(t.kernel_alpha));
  L.expect(t.remainder.pass, "remainder report for N: " + t.remainder.detail);
  L.expect(t.pass, "pipeline pass flag");
  L.note("gamma(N) in [" + fmt(t.gamma_N.lower) + ", " + fmt(t.gamma_N.upper) + "], kernel alpha " + fmt(t.kernel_alpha));
}

}  // namespace

int main(int argc, char** argv) {
  // "--only N" runs a single criterion.
  int only = 0;
  if (argc == 3 && std::string(argv[1]) == "--only") only = std::atoi(argv[2]);
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds; zero means no limit
    std::function<void(Ledger&)> run;
  };
  const std::vector<Criterion> all = {
      {1, "examples matrix", 10, c1},
      {2, "implication and stability audits", 0, c2},
      {3, "associated-function duality", 0, c3},
      {4, "growth index estimates", 120, c4},
      {5, "moment oracle and shifted fit", 0, c5},
      {6, "extension operator end to end", 120, c6},
      {7, "ramified transforms", 0, c7},
      {8, "Beurling constructions", 0, c8},
      {9, "Beurling pipeline trace", 300, c9},
  };
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 1;
  }
  int failed = 0;
  for (const auto& c : all) {
    if (only != 0 && c.id != only) continue;
    Ledger L;
    double secs = 0;
    try {
      secs = timed([&] { c.run(L); });
    } catch (const std::exception& e) {
      L.failures.push_back(std::string("threw: ") + e.what());
    }
    if (c.limit > 0 && secs >= c.limit) L.failures.push_back("runtime " + fmt(secs) + " s over " + fmt(c.limit) + " s");
    const bool ok = L.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("criterion %d (%s): %s [%.2f s]", c.id, c.name, ok ? "PASS" : "FAIL", secs);
    if (!ok) {
      std::printf(" %zu failed check(s); first: %s", L.failures.size(), L.failures.front().c_str());
    }
    for (const auto& n : L.notes) std::printf("; %s", n.c_str());
    std::printf("\n");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
