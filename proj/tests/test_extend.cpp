#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>

#include "asympto/error.hpp"
#include "asympto/extend.hpp"
#include "doctest.h"

using namespace asympto;
using cd = std::complex<double>;

namespace {

FormalSeries euler(std::size_t n) {
  std::vector<double> la(n + 1), ar(n + 1);
  for (std::size_t p = 0; p <= n; ++p) {
    la[p] = std::lgamma(p + 1.0);
    ar[p] = p % 2 ? std::numbers::pi : 0.0;
  }
  return FormalSeries::from_log_polar(la, ar);
}

// Oracle: Euler's function int_0^inf e^{-t}/(1+xt) dt = e^{1/x} E1(1/x) / x.
double euler_function(double x) { return std::exp(1 / x) * boost::math::expint(1, 1 / x) / x; }

const SectorSpec kS05{0.0, 0.5, std::nullopt};
const SectorSpec kS09{0.0, 0.9, std::nullopt};

}  // namespace

TEST_CASE("fit_type examples") {
  auto M = WeightSequence::gevrey(1.0, 200);
  auto t = fit_type(euler(40), M);
  CHECK(t.h == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.norm == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> la(31), ar(31, 0.0);
  for (int p = 0; p <= 30; ++p) la[p] = p * std::log(3.0) + std::lgamma(p + 1.0);
  auto t3 = fit_type(FormalSeries::from_log_polar(la, ar), M);
  CHECK(t3.h == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(t3.norm == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<cd> zero(10);
  auto t0 = fit_type(FormalSeries::from_coeffs(zero), M);
  CHECK(t0.h == 1e-3);
  CHECK(t0.norm == 0.0);
  CHECK_THROWS_AS(fit_type(FormalSeries{}, M), Error);
}

TEST_CASE("formal Borel transform of the Euler series") {
  auto M = WeightSequence::gevrey(1.0, 2000);
  auto F = FlatFunction::gevrey_exp(1.0, kS05);
  auto f = euler(60);
  auto s = prepare_extension(f, M, F, 12);
  for (std::size_t p = 0; p < s.borel.size(); ++p) {
    const double expected = (p % 2 ? 1.0 : -1.0) * (p + 1.0);
    CHECK(std::abs(s.borel.coeff(p).real() - expected) <= 1e-12 * std::abs(expected));
    CHECK(std::abs(s.borel.coeff(p).imag()) <= 1e-12 * std::abs(expected));
  }
  CHECK(std::abs(s.borel.R0 - std::pow(3.0, -1.0 / 3.0) / 2) <= 1e-9);
  CHECK(borel_truncation_order(s.borel) <= 60);
  CHECK(borel_truncation_order(s.borel) >= 40);

  auto mu = moments(F, 10);
  CHECK_THROWS_AS(formal_borel(f, s.type, mu, MomentNotEquivalent{}), Error);
  try {
    (void)formal_borel(f, s.type, mu, moment_equiv_fit(mu, M, MomentMode::Shifted, {0, 10}));
    FAIL("expected MomentsMissing");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MomentsMissing);
  }
}

TEST_CASE("extension of simple series") {
  auto M = WeightSequence::gevrey(1.0, 2000);
  auto F = FlatFunction::gevrey_exp(1.0, kS05);
  std::vector<cd> one = {0.0, 1.0, 0.0};
  auto s = prepare_extension(FormalSeries::from_coeffs(one), M, F, 4);
  const double R0 = s.borel.R0;
  for (double x : {0.01, 0.1, 0.5}) {
    const cd v = apply_extension(s.borel, F, x);
    CHECK(std::abs(v - x * (1 - std::exp(-R0 / x))) <= 1e-12 * x);
  }
  const cd z = std::polar(0.2, 0.5);
  CHECK(std::abs(apply_extension(s.borel, F, z) - z * (1.0 - std::exp(-R0 / z))) <= 1e-12);
  // p >= 2 remainder is the flat part -z e^{-R0/z}.
  for (std::size_t p : {2u, 3u}) {
    const cd r = extension_remainder(s.borel, F, z, p);
    CHECK(std::abs(r + z * std::exp(-R0 / z)) <= 1e-12 * std::abs(z * std::exp(-R0 / z)));
  }

  std::vector<cd> zero(5);
  auto sz = prepare_extension(FormalSeries::from_coeffs(zero), M, F, 4);
  CHECK(apply_extension(sz.borel, F, 0.1) == cd{});
  CHECK_THROWS_AS(apply_extension(s.borel, F, cd(0.0, 1.0)), Error);
}

TEST_CASE("Euler extension against Euler's function") {
  auto M = WeightSequence::gevrey(1.0, 2000);
  auto F = FlatFunction::gevrey_exp(1.0, kS05);
  auto s = prepare_extension(euler(60), M, F, 12);
  const double v = apply_extension(s.borel, F, 0.1).real();
  CHECK(std::abs(v - euler_function(0.1)) <= 2e-3);
  // The difference is flat: far below every truncation at small x.
  const double w = apply_extension(s.borel, F, 0.02).real();
  CHECK(std::abs(w - euler_function(0.02)) <= 1e-6);
}

TEST_CASE("conjugate symmetry and linearity") {
  auto M = WeightSequence::gevrey(1.0, 2000);
  auto F = FlatFunction::gevrey_exp(1.0, kS09);
  auto s = prepare_extension(euler(50), M, F, 6);
  const cd z = std::polar(0.05, 0.6);
  const cd a = apply_extension(s.borel, F, z);
  const cd b = apply_extension(s.borel, F, std::conj(z));
  CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));

  std::vector<cd> f1 = {1.0, 0.5, -0.25, 0.125}, f2 = {0.0, cd(0, 1), 2.0, -1.0};
  std::vector<cd> mix(4);
  const cd al(0.3, -0.2), be(1.5, 0.0);
  for (int i = 0; i < 4; ++i) mix[i] = al * f1[i] + be * f2[i];
  // Linearity holds for a common type h; fix it through the cap.
  TypeFitOptions fixed;
  fixed.cap = 100.0;
  auto S1 = prepare_extension(FormalSeries::from_coeffs(f1), M, F, 4, fixed);
  auto S2 = prepare_extension(FormalSeries::from_coeffs(f2), M, F, 4, fixed);
  auto S3 = prepare_extension(FormalSeries::from_coeffs(mix), M, F, 4, fixed);
  S1.borel.R0 = S2.borel.R0 = S3.borel.R0 = 0.2;
  const cd lhs = apply_extension(S3.borel, F, z);
  const cd rhs = al * apply_extension(S1.borel, F, z) + be * apply_extension(S2.borel, F, z);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("remainder report passes for the Euler series") {
  auto M = WeightSequence::gevrey(1.0, 2000);
  auto F = FlatFunction::gevrey_exp(1.0, kS05);
  auto s = prepare_extension(euler(60), M, F, 12);
  auto rep = remainder_report(s.borel, F, s.certificate, M, RemainderGrid{}, 12);
  CAPTURE(rep.detail);
  CHECK(rep.pass);
  CHECK(rep.fitted_h <= 2 * rep.c_pred);
  CHECK(rep.C <= s.certificate.K3 / s.certificate.K1 * s.type.norm * 2 * (1 + 1e-12));
  for (const auto& row : rep.rows) CHECK(row.sup_norm <= rep.C * (1 + 1e-12));
  CHECK(rep.to_csv().rfind("p,sup_norm,fitted\n", 0) == 0);

  std::vector<cd> zero(5);
  auto sz = prepare_extension(FormalSeries::from_coeffs(zero), M, F, 4);
  auto rz = remainder_report(sz.borel, F, sz.certificate, M, RemainderGrid{}, 4);
  CHECK(rz.fitted_h == doctest::Approx(1e-3));
  CHECK(rz.pass);
}

TEST_CASE("coefficient extraction") {
  auto x = geometric_ladder(0.05, 0.7, 20);
  std::vector<cd> ex(x.size()), flat(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    ex[j] = std::exp(x[j]);
    flat[j] = std::exp(-1 / x[j]);
  }
  auto c = extract_asymptotic_coeffs(x, ex, 4);
  for (std::size_t k = 0; k <= 4; ++k) {
    const double ref = 1 / std::tgamma(k + 1.0);
    CHECK(std::abs(c[k].value - ref) <= std::max(c[k].error, 1e-12));
    CHECK(std::abs(c[k].value - ref) <= 1e-3 * ref);
  }
  auto f = extract_asymptotic_coeffs(x, flat, 4);
  for (const auto& v : f) CHECK(std::abs(v.value) <= 1e-9);

  auto M = WeightSequence::gevrey(1.0, 2000);
  auto F = FlatFunction::gevrey_exp(1.0, kS05);
  auto s = prepare_extension(euler(60), M, F, 12);
  auto xl = geometric_ladder(0.02, 0.75, 24);
  std::vector<cd> T(xl.size());
  for (std::size_t j = 0; j < xl.size(); ++j) T[j] = apply_extension(s.borel, F, xl[j]);
  auto e = extract_asymptotic_coeffs(xl, T, 4);
  for (std::size_t k = 0; k <= 4; ++k) {
    const double ref = (k % 2 ? -1.0 : 1.0) * std::tgamma(k + 1.0);
    CAPTURE(k);
    CAPTURE(e[k].value);
    CAPTURE(e[k].error);
    CHECK(std::abs(e[k].value - ref) <= e[k].error);
    CHECK(std::abs(e[k].value - ref) <= 1e-2 * std::abs(ref));
  }
}
