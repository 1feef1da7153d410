#include "asympto/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace asympto::quad {

namespace {

constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece rule(const Integrand& f, double a, double b, int& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const std::complex<double> fc = f(c);
  std::complex<double> k = fc * kWk[7];
  std::complex<double> g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXk[j];
    const std::complex<double> s = f(c - dx) + f(c + dx);
    k += kWk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  evals += 15;
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

Result gk15(const Integrand& f, std::span<const double> bp, const Options& opts) {
  Result r;
  std::priority_queue<Piece> heap;
  std::complex<double> total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    if (!(bp[i + 1] > bp[i])) continue;
    auto p = rule(f, bp[i], bp[i + 1], r.evaluations);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (err <= target) {
      r.converged = true;
      break;
    }
    if (intervals >= opts.max_intervals) break;
    Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    auto l = rule(f, worst.a, mid, r.evaluations);
    auto h = rule(f, mid, worst.b, r.evaluations);
    total += l.value + h.value - worst.value;
    err += l.error + h.error - worst.error;
    heap.push(l);
    heap.push(h);
    ++intervals;
  }
  if (heap.empty()) r.converged = true;
  // Recompute from the pieces to shed accumulated update rounding.
  std::complex<double> sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  r.value = sum;
  r.error = esum;
  if (!r.converged) r.converged = esum <= std::max(opts.abs_tol, opts.rel_tol * std::abs(sum));
  return r;
}

Result gk15(const Integrand& f, double a, double b, const Options& opts) {
  const std::array<double, 2> bp = {a, b};
  return gk15(f, bp, opts);
}

Result semi_infinite(const Integrand& f, double a, double first_length, double growth,
                     const Options& opts) {
  Result r;
  r.converged = true;
  double lo = a, len = first_length;
  int quiet = 0;
  for (int k = 0; k < 200 && quiet < 3; ++k) {
    Options o = opts;
    o.abs_tol = std::max(opts.abs_tol, 0.1 * opts.rel_tol * std::abs(r.value));
    auto piece = gk15(f, lo, lo + len, o);
    r.value += piece.value;
    r.error += piece.error;
    r.evaluations += piece.evaluations;
    r.converged = r.converged && piece.converged;
    const double scale = std::max(std::abs(r.value), opts.abs_tol);
    quiet = std::abs(piece.value) <= 1e-3 * opts.rel_tol * scale ? quiet + 1 : 0;
    lo += len;
    len *= growth;
  }
  if (quiet < 3) r.converged = false;
  return r;
}

}  // namespace asympto::quad
