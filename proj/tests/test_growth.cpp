#include <cmath>
#include <random>

#include "asympto/error.hpp"
#include "asympto/growth.hpp"
#include "asympto/props.hpp"
#include "doctest.h"

using namespace asympto;

namespace {

// Oracle: inf over every index of log M_p + p log t.
double brute_h(const WeightSequence& M, double log_t) {
  double best = 0.0;
  for (std::size_t p = 0; p <= M.window(); ++p)
    best = std::min(best, M.log_M(p) + static_cast<double>(p) * log_t);
  return best;
}

}  // namespace

TEST_CASE("h_eval examples for factorials") {
  auto M = WeightSequence::gevrey(1.0, 50);
  CHECK(h_eval(M, 0.5) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(h_eval(M, 2.0) == 0.0);
  CHECK(h_eval(M, 1.0) == 0.0);
  auto Q = WeightSequence::q_gevrey(2.0, 2.0, 100);
  const double lt = -Q.log_m(3);
  CHECK(h_eval_log(Q, lt) == doctest::Approx(Q.log_M(4) + 4 * lt).epsilon(1e-14));
}

TEST_CASE("h_eval matches brute force on random t") {
  std::mt19937_64 rng(7);
  for (const auto& M : {WeightSequence::gevrey(1.0, 3000), WeightSequence::gevrey(2.0, 3000),
                        WeightSequence::q_gevrey(2.0, 2.0, 300)}) {
    std::uniform_real_distribution<double> u(-M.log_m(M.window()) + 1e-9, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double lt = u(rng);
      const double a = h_eval_log(M, lt);
      const double b = brute_h(M, lt);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST_CASE("h_eval errors") {
  auto M = WeightSequence::gevrey(1.0, 10);
  CHECK_THROWS_AS(h_eval(M, 1e-6), Error);
  auto T = WeightSequence::table({0.0, 1.0, 0.5});
  try {
    (void)h_eval(T, 0.5);
    FAIL("expected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotLogConvex);
  }
}

TEST_CASE("recover_Mp round trip") {
  for (const auto& M : {WeightSequence::gevrey(1.0, 1000), WeightSequence::gevrey(2.0, 1000),
                        WeightSequence::q_gevrey(2.0, 2.0, 1000)}) {
    auto grid = default_recovery_grid(M, 400);
    for (std::size_t p = 0; p <= 100; ++p) {
      const double v = recover_Mp(M, p, grid);
      CHECK(std::abs(v - M.log_M(p)) <= 1e-9 * std::max(1.0, std::abs(M.log_M(p))));
    }
  }
  auto Q = WeightSequence::q_gevrey(2.0, 2.0, 100);
  CHECK(recover_Mp(Q, 5, default_recovery_grid(Q, 50)) == doctest::Approx(25 * std::log(2.0)));
}

TEST_CASE("gamma_beta on factorials") {
  auto M = WeightSequence::gevrey(1.0, 4000);
  auto a = gamma_beta_check(M, 0.5, {0, 500});
  CHECK(a.holds);
  CHECK(a.A < 3.0);
  CHECK_FALSE(gamma_beta_check(M, 1.0, {0, 500}).holds);
  CHECK_FALSE(gamma_beta_check(M, 1.5, {0, 500}).holds);
}

TEST_CASE("almost increasing margin") {
  auto M = WeightSequence::gevrey(1.0, 4000);
  auto a = almost_increasing_margin(M, 1.0, {0, 500});
  CHECK(a.holds);
  CHECK(a.a == doctest::Approx(1.0));
  CHECK_FALSE(almost_increasing_margin(M, 1.5, {0, 500}).holds);
  CHECK(almost_increasing_margin(WeightSequence::q_gevrey(2.0, 2.0), 10.0, {0, 500}).holds);
}

TEST_CASE("gamma estimates and shift rules") {
  auto G = WeightSequence::gevrey(1.0, 4000);
  auto g = gamma_estimate(G, {0, 500}, 0.1);
  CHECK(g.lower >= 0.9);
  CHECK(g.upper <= 1.1);

  auto one = WeightSequence::table(std::vector<double>(4001, 0.0));
  auto G2 = transform(one, GammaMul{2.0});
  auto g2 = gamma_estimate(G2, {0, 500}, 0.1);
  CHECK(g2.lower >= 1.9);
  CHECK(g2.upper <= 2.1);
  CHECK(g2.lower >= g.lower + 1.0 - 0.2);

  auto gh = gamma_estimate(transform(G, Hat{}), {0, 500}, 0.1);
  CHECK(gh.lower - g.lower >= 0.8);
  CHECK(gh.upper - g.upper <= 1.2);

  auto gc = gamma_estimate(one, {0, 500}, 0.1);
  CHECK(gc.lower == 0.0);

  auto q = gamma_estimate(WeightSequence::q_gevrey(2.0, 2.0), {0, 500}, 0.1);
  CHECK(std::isinf(q.upper));
}

TEST_CASE("snq agrees with positive index") {
  std::vector<WeightSequence> fams = {WeightSequence::gevrey(0.5, 4000), WeightSequence::gevrey(2.0, 4000),
                                      WeightSequence::gevrey_log(1.0, -3.0, 4000),
                                      WeightSequence::q_gevrey(2.0, 3.0), WeightSequence::power_sigma(1.0, 2.0),
                                      WeightSequence::table(std::vector<double>(4001, 0.0))};
  for (const auto& M : fams) {
    CAPTURE(M.label());
    auto snq = check_condition(M, Condition::snq, {0, 500});
    auto g = gamma_estimate(M, {0, 500}, 0.1);
    CHECK(snq.holds() == (g.lower > 0));
    // snq for M is (gamma_1) for the quotients of M-hat.
    auto g1 = gamma_beta_check(transform(M, Hat{}), 1.0, {0, 500});
    CHECK(g1.holds == snq.holds());
    if (snq.holds()) CHECK(g1.A == doctest::Approx(*snq.C).epsilon(1e-9));
  }
}
