#include <cmath>
#include <numbers>

#include "asympto/error.hpp"
#include "asympto/flatmom.hpp"
#include "asympto/growth.hpp"
#include "doctest.h"

using namespace asympto;

namespace {
SectorSpec sector(double g) { return SectorSpec{0.0, g, std::nullopt}; }
}  // namespace

TEST_CASE("kernel evaluation") {
  auto F1 = FlatFunction::gevrey_exp(1.0, sector(0.5));
  CHECK(kernel_eval(F1, 1.0).real() == doctest::Approx(std::exp(-1.0)));
  auto F2 = FlatFunction::gevrey_exp(2.0, sector(1.0));
  CHECK(kernel_eval(F2, 4.0).real() == doctest::Approx(std::exp(-2.0)));
  auto F = FlatFunction::gevrey_exp(1.0, sector(0.9));
  const std::complex<double> z = std::polar(0.5, 0.4 * std::numbers::pi / 2);
  auto e = kernel_eval(F, z);
  // Direct oracle exp(-z) and the modulus bound |e(z)| = e(|z| cos(arg z)).
  CHECK(std::abs(e - std::exp(-z)) <= 1e-15);
  CHECK(std::abs(e) == doctest::Approx(std::exp(-0.5 * std::cos(0.4 * std::numbers::pi / 2))));
  CHECK(kernel_eval(F, std::conj(z)) == std::conj(e));
  CHECK_THROWS_AS(kernel_eval(F1, std::complex<double>(0.0, 0.5)), Error);
}

TEST_CASE("moments match the gamma oracle") {
  for (double a : {0.5, 1.0, 2.0}) {
    auto F = FlatFunction::gevrey_exp(a, sector(a / 2));
    auto mu = moments(F, 20);
    for (std::size_t p = 0; p <= 20; ++p) {
      const double ref = std::log(a) + std::lgamma(a * (p + 1.0));
      CHECK(std::abs(mu.log_mu[p] - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
    CHECK(mu.log_convex());
  }
  auto F = FlatFunction::gevrey_exp(1.0, sector(0.5));
  CHECK(std::exp(moments(F, 3).log_mu[3]) == doctest::Approx(6.0).epsilon(1e-13));
}

TEST_CASE("user supplied kernel moments") {
  // G(w) = exp(-1/w) is GevreyExp(1) written by hand.
  auto F = FlatFunction::user_log([](std::complex<double> w) { return -1.0 / w; }, sector(0.5), 1.0);
  auto mu = moments(F, 10);
  for (std::size_t p = 0; p <= 10; ++p) CHECK(mu.log_mu[p] == doctest::Approx(std::lgamma(p + 1.0)).epsilon(1e-10));
  CHECK_THROWS_AS(FlatFunction::user_log([](std::complex<double> w) { return -1.0 / w; }, sector(0.5), 0.0),
                  Error);
}

TEST_CASE("shifted and unshifted moment fits") {
  auto F = FlatFunction::gevrey_exp(1.0, sector(0.5));
  auto mu = moments(F, 40);
  auto M = WeightSequence::gevrey(1.0, 100);
  auto s = std::get<MomentFit>(moment_equiv_fit(mu, M, MomentMode::Shifted, {0, 40}));
  CHECK(s.h1 == doctest::Approx(std::pow(3.0, -1.0 / 3.0)).epsilon(1e-12));
  CHECK(s.h2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.h1 >= 0.5);
  auto u = std::get<MomentFit>(moment_equiv_fit(mu, M, MomentMode::Unshifted, {0, 40}));
  CHECK(u.h1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.h2 == doctest::Approx(1.0).epsilon(1e-12));
  auto M3 = transform(M, Power{3.0});
  CHECK(std::holds_alternative<MomentNotEquivalent>(moment_equiv_fit(mu, M3, MomentMode::Shifted, {0, 40})));
}

TEST_CASE("flatness certificates") {
  auto M = WeightSequence::gevrey(1.0);
  auto F = FlatFunction::gevrey_exp(1.0, sector(0.5));
  auto r = verify_flatness(F, M);
  REQUIRE(std::holds_alternative<FlatnessCertificate>(r));
  auto c = std::get<FlatnessCertificate>(r);
  CHECK(c.K2 < 1.0);
  CHECK(c.K4 > std::sqrt(2.0));

  // Re-check on an independent, finer grid within the certified range.
  double worst = -1e300;
  for (int i = 0; i <= 3000; ++i) {
    const double x = std::exp(std::log(c.x_min) + (std::log(c.x_max) - std::log(c.x_min)) * i / 3000.0);
    const double lower = std::log(c.K1) + h_eval(M, c.K2 * x) - (-1.0 / x);
    worst = std::max(worst, lower);
    for (double t : {-std::numbers::pi / 4, 0.3, std::numbers::pi / 4}) {
      const double up = -std::cos(t) / x - (std::log(c.K3) + h_eval(M, c.K4 * x));
      worst = std::max(worst, up);
    }
  }
  CHECK(worst <= 0.05);

  // Kernel bound transfer: |e(u/z)| <= (K3/K1) e(K2 u / (K4 |z|)).
  double transfer = -1e300;
  for (double u : {1e-3, 0.01, 0.1, 0.3}) {
    for (double r0 : {1e-3, 0.01, 0.1, 1.0}) {
      for (double t : {-0.7, 0.0, 0.7}) {
        const auto z = std::polar(r0, t);
        const double lhs = kernel_log_eval(F, u / z).real();
        const double rhs = std::log(c.K3 / c.K1) - c.K2 * u / (c.K4 * r0);
        transfer = std::max(transfer, lhs - rhs);
      }
    }
  }
  CHECK(transfer <= 1e-9);

  auto P2 = transform(WeightSequence::gevrey(1.0, 20000), Power{2.0});
  auto r2 = verify_flatness(F, P2);
  REQUIRE(std::holds_alternative<FlatnessFailure>(r2));
  CHECK(std::get<FlatnessFailure>(r2).bound == "lower");

  auto F2 = FlatFunction::gevrey_exp(2.0, sector(1.0));
  CHECK(std::holds_alternative<FlatnessCertificate>(verify_flatness(F2, WeightSequence::gevrey(2.0))));
}
