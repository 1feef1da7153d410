#include <cmath>

#include "asympto/error.hpp"
#include "asympto/props.hpp"
#include "doctest.h"

using namespace asympto;

TEST_CASE("dc on gevrey(1) holds with small constants") {
  auto M = WeightSequence::gevrey(1.0, 2000);
  auto r = check_condition(M, Condition::dc, {0, 500});
  CHECK(r.holds());
  // Oracle: m_p = p+1 <= H^{p+1} with C0 = 1 is tightest at p = 2, H = 3^{1/3}.
  CHECK(*r.H == doctest::Approx(std::cbrt(3.0)).epsilon(1e-12));
  CHECK(*r.C0 <= 1.0 + 1e-12);
  CHECK(*r.H <= 2.0);
  CHECK(resubstitute(M, r));
}

TEST_CASE("qgevrey(2,3): dc fails, sm holds") {
  auto M = WeightSequence::q_gevrey(2.0, 3.0);
  CHECK_FALSE(check_condition(M, Condition::dc, {0, 500}).holds());
  auto sm = check_condition(M, Condition::sm, {0, 500});
  CHECK(sm.holds());
  CHECK(resubstitute(M, sm));
}

TEST_CASE("qpp(2): sm fails") {
  auto r = check_condition(WeightSequence::qpp(2.0), Condition::sm, {0, 60});
  CHECK_FALSE(r.holds());
  CHECK(r.window.hi == 59);
}

TEST_CASE("constant sequence: snq fails, lc sm star hold") {
  auto M = WeightSequence::table(std::vector<double>(2001, 0.0));
  CHECK_FALSE(check_condition(M, Condition::snq, {0, 500}).holds());
  CHECK(check_condition(M, Condition::lc, {0, 500}).holds());
  CHECK(check_condition(M, Condition::sm, {0, 500}).holds());
  CHECK(check_condition(M, Condition::star, {0, 500}).holds());
}

TEST_CASE("snq on gevrey families matches a direct tail oracle") {
  for (double a : {0.5, 1.0, 2.0}) {
    auto M = WeightSequence::gevrey(a, 4000);
    auto r = check_condition(M, Condition::snq, {0, 500});
    CHECK(r.holds());
    // Oracle: m_p * sum_{q>=p} (q+1)^{-1-a} summed far beyond the horizon.
    double worst = 0;
    for (std::size_t p : {0u, 10u, 100u, 500u}) {
      long double s = 0;
      for (std::size_t q = 400000; q-- > p;) s += std::pow(static_cast<long double>(q + 1), -1.0L - a);
      worst = std::max(worst, static_cast<double>(std::pow(p + 1.0L, a) * s));
    }
    CHECK(*r.C >= worst * (1 - 1e-3));
    CHECK(*r.C <= worst * 1.05);
    CHECK(resubstitute(M, r));
  }
}

TEST_CASE("snq horizon precondition") {
  auto M = WeightSequence::gevrey(1.0, 4000);
  CheckOptions o;
  o.tail_horizon = 1000;
  CHECK_THROWS_AS(check_condition(M, Condition::snq, {0, 500}, o), Error);
  auto Q = WeightSequence::qpp(2.0);
  CHECK_THROWS_AS(check_condition(Q, Condition::snq, {0, 60}), Error);
}

TEST_CASE("mg slack is exactly symmetric") {
  auto M = WeightSequence::gevrey_log(1.3, 2.0, 1000);
  for (std::size_t p = 0; p < 60; ++p)
    for (std::size_t q = 0; q < 60; ++q) CHECK(mg_slack_raw(M, p, q) == mg_slack_raw(M, q, p));
}

TEST_CASE("mg on gevrey holds, qgevrey(2,2) fails") {
  auto G = WeightSequence::gevrey(2.0, 1000);
  auto r = check_condition(G, Condition::mg, {0, 500});
  CHECK(r.holds());
  CHECK(resubstitute(G, r));
  CHECK_FALSE(check_condition(WeightSequence::q_gevrey(2.0, 2.0), Condition::mg, {0, 500}).holds());
}

TEST_CASE("monotone windows: constants carry to sub-windows") {
  auto M = WeightSequence::power_sigma(1.0, 2.0);
  auto r = check_condition(M, Condition::sm, {0, 500});
  REQUIRE(r.holds());
  for (std::size_t e : {10u, 100u, 300u}) {
    auto s = r;
    s.window.hi = e;
    CHECK(resubstitute(M, s));
  }
}

TEST_CASE("lc reports the first decrease") {
  auto M = WeightSequence::table({0.0, 1.0, 0.5, 2.0});
  auto r = check_condition(M, Condition::lc, {0, 3});
  CHECK_FALSE(r.holds());
  CHECK(*r.first_violation == 2);
}

TEST_CASE("implication audits") {
  for (const auto& M : {WeightSequence::gevrey(2.0, 2000), WeightSequence::q_gevrey(2.0, 3.0),
                        WeightSequence::gevrey(0.5, 2000), WeightSequence::power_sigma(1.0, 2.0)}) {
    CAPTURE(M.label());
    for (const auto& e : implication_audit(M, {0, 500})) {
      CAPTURE(e.implication);
      CAPTURE(e.detail);
      CHECK(e.status != AuditStatus::Violated);
    }
  }
  auto all = implication_audit(WeightSequence::gevrey(2.0, 2000), {0, 500});
  for (const auto& e : all) CHECK(e.status == AuditStatus::Satisfied);
  auto q = implication_audit(WeightSequence::q_gevrey(2.0, 3.0), {0, 500});
  CHECK(q[0].status == AuditStatus::Vacuous);
  CHECK(q[2].status == AuditStatus::Satisfied);
  auto one = implication_audit(WeightSequence::table(std::vector<double>(600, 0.0)), {0, 500});
  CHECK(one[2].status == AuditStatus::Satisfied);
}

TEST_CASE("stability audits") {
  auto G = WeightSequence::gevrey(1.0, 2000);
  auto a = stability_audit(G, 0, PerturbationKind::Hat, Condition::sm, {0, 500});
  CHECK(a.same_verdict);
  CHECK(a.before.holds());
  auto Q = WeightSequence::q_gevrey(2.0, 3.0);
  auto b = stability_audit(Q, 3.0, PerturbationKind::EquivalentScale, Condition::sm, {0, 500});
  CHECK(b.same_verdict);
  CHECK(b.after.holds());
  auto c = stability_audit(WeightSequence::qpp(2.0), 0.5, PerturbationKind::Power, Condition::sm, {0, 60});
  CHECK(c.same_verdict);
  CHECK_FALSE(c.after.holds());
}
