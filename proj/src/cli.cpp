#include "asympto/cli.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <locale>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "asympto/error.hpp"

namespace asympto::cli {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::ConfigInvalid, "expected a number, got " + j.dump());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

unsigned thread_count() {
  if (const char* env = std::getenv("ASYMPTO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json Envelope::to_json() const {
  return json{{"command", command},     {"version", version}, {"config_hash", config_hash},
              {"timing", {{"seconds", seconds}}}, {"payload", payload}, {"exit_code", exit_code}};
}

Envelope Envelope::from_json(const json& j) {
  Envelope e;
  e.command = j.at("command").get<std::string>();
  e.version = j.at("version").get<std::string>();
  e.config_hash = j.at("config_hash").get<std::string>();
  e.seconds = j.at("timing").at("seconds").get<double>();
  e.payload = j.at("payload");
  e.exit_code = j.value("exit_code", 0);
  return e;
}

namespace {

double req(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::ConfigInvalid, std::string("missing field '") + key + "'");
  return to_double(j.at(key));
}

std::size_t opt_size(const json& j, const char* key, std::size_t dflt) {
  if (!j.contains(key)) return dflt;
  const double v = to_double(j.at(key));
  if (!(v >= 1) || v != std::floor(v)) throw Error(ErrorKind::ConfigInvalid, std::string(key) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

TransformKind transform_from_json(const json& t) {
  const std::string k = t.at("kind").get<std::string>();
  if (k == "hat") return Hat{};
  if (k == "check") return Check{};
  if (k == "shift") return ShiftPlusOne{};
  if (k == "power") return Power{req(t, "r")};
  if (k == "gamma_mul") return GammaMul{req(t, "alpha")};
  if (k == "gamma_div") return GammaDiv{req(t, "alpha")};
  throw Error(ErrorKind::ConfigInvalid, "unknown transform '" + k + "'");
}

}  // namespace

WeightSequence sequence_from_json(const json& spec) {
  if (!spec.is_object()) throw Error(ErrorKind::ConfigInvalid, "sequence spec must be a JSON object");
  const std::string fam = spec.value("family", "");
  WeightSequence M;
  if (fam == "gevrey") {
    M = WeightSequence::gevrey(req(spec, "alpha"), opt_size(spec, "window", WeightSequence::kGevreyWindow));
  } else if (fam == "gevreylog") {
    M = WeightSequence::gevrey_log(req(spec, "alpha"), req(spec, "beta"),
                                   opt_size(spec, "window", WeightSequence::kGevreyWindow));
  } else if (fam == "qgevrey") {
    M = WeightSequence::q_gevrey(req(spec, "q"), req(spec, "alpha"),
                                 opt_size(spec, "window", WeightSequence::kPolyExpWindow));
  } else if (fam == "powsigma") {
    M = WeightSequence::power_sigma(req(spec, "tau"), req(spec, "sigma"),
                                    opt_size(spec, "window", WeightSequence::kPolyExpWindow));
  } else if (fam == "qpp") {
    M = WeightSequence::qpp(req(spec, "q"), opt_size(spec, "window", WeightSequence::kQppWindow));
  } else if (fam == "table") {
    std::vector<double> lm;
    if (spec.contains("log_m")) {
      for (const auto& v : spec.at("log_m")) lm.push_back(to_double(v));
    } else if (spec.contains("m")) {
      for (const auto& v : spec.at("m")) {
        const double m = to_double(v);
        if (!(m > 0)) throw Error(ErrorKind::ConfigInvalid, "table quotients must be positive");
        lm.push_back(std::log(m));
      }
    } else {
      throw Error(ErrorKind::ConfigInvalid, "table needs 'log_m' or 'm'");
    }
    M = WeightSequence::table(std::move(lm), spec.value("label", "table"));
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown sequence family '" + fam + "'");
  }
  if (spec.contains("transforms"))
    for (const auto& t : spec.at("transforms")) M = transform(M, transform_from_json(t));
  return M;
}

SectorSpec sector_from_json(const json& spec) {
  SectorSpec s;
  s.direction = spec.contains("direction") ? to_double(spec.at("direction")) : 0.0;
  s.opening = req(spec, "opening");
  if (spec.contains("radius")) s.radius = to_double(spec.at("radius"));
  s.validate();
  return s;
}

FlatFunction kernel_from_json(const json& spec) {
  const std::string kind = spec.value("kind", "");
  if (kind != "gevrey_exp") throw Error(ErrorKind::ConfigInvalid, "unknown kernel kind '" + kind + "'");
  const SectorSpec s = spec.contains("sector") ? sector_from_json(spec.at("sector")) : SectorSpec{0.0, 0.5, {}};
  return FlatFunction::gevrey_exp(req(spec, "alpha"), s);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, "malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

FormalSeries parse_series_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ConfigInvalid, "series CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  enum class Fmt { ReIm, LogAbs, LogPolar } fmt;
  if (line == "p,re,im") fmt = Fmt::ReIm;
  else if (line == "p,log_abs") fmt = Fmt::LogAbs;
  else if (line == "p,log_abs,arg") fmt = Fmt::LogPolar;
  else throw Error(ErrorKind::ConfigInvalid, "series CSV header must be p,re,im or p,log_abs[,arg]");

  std::vector<double> la, ar;
  std::size_t expect = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    const std::size_t want = fmt == Fmt::LogAbs ? 2 : 3;
    if (cells.size() != want) throw Error(ErrorKind::ConfigInvalid, "series CSV row '" + line + "' has wrong arity");
    auto parse = [&](const std::string& c) {
      if (c == "-inf") return -std::numeric_limits<double>::infinity();
      double v = 0;
      auto r = std::from_chars(c.data(), c.data() + c.size(), v);
      if (r.ec != std::errc{} || r.ptr != c.data() + c.size())
        throw Error(ErrorKind::ConfigInvalid, "series CSV: bad number '" + c + "'");
      return v;
    };
    if (parse(cells[0]) != static_cast<double>(expect))
      throw Error(ErrorKind::ConfigInvalid, "series CSV: indices must run 0, 1, 2, ...");
    ++expect;
    if (fmt == Fmt::ReIm) {
      const std::complex<double> c{parse(cells[1]), parse(cells[2])};
      const double a = std::abs(c);
      la.push_back(a == 0 ? -std::numeric_limits<double>::infinity() : std::log(a));
      ar.push_back(a == 0 ? 0.0 : std::arg(c));
    } else {
      la.push_back(parse(cells[1]));
      ar.push_back(fmt == Fmt::LogPolar ? parse(cells[2]) : 0.0);
    }
  }
  if (la.empty()) throw Error(ErrorKind::ConfigInvalid, "series CSV has no rows");
  return FormalSeries::from_log_polar(std::move(la), std::move(ar));
}

FormalSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_series_csv(ss.str());
}

namespace {

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json window_json(Window w) { return json{{"lo", w.lo}, {"hi", w.hi}}; }

}  // namespace

json to_json(const PropertyReport& r) {
  json j{{"condition", to_string(r.condition)},
         {"verdict", to_string(r.verdict)},
         {"window", window_json(r.window)},
         {"C0", opt_num(r.C0)},
         {"H", opt_num(r.H)},
         {"C", opt_num(r.C)},
         {"diagnostic_slope", num(r.diagnostic_slope)},
         {"tail_horizon", r.tail_horizon},
         {"warnings", r.warnings}};
  j["first_violation"] = r.first_violation ? json(*r.first_violation) : json(nullptr);
  return j;
}

json to_json(const GammaEstimate& g) {
  auto ev = [](const std::vector<GammaEvidence>& v) {
    json a = json::array();
    for (const auto& e : v)
      a.push_back({{"beta", num(e.beta)}, {"holds", e.holds}, {"constant", num(e.constant)},
                   {"trend_slope", num(e.trend_slope)}, {"note", e.note}});
    return a;
  };
  return json{{"lower", num(g.lower)},
              {"upper", num(g.upper)},
              {"method", g.method == GammaMethod::GammaBeta ? "gamma_beta" : "almost_increasing"},
              {"window", window_json(g.window)},
              {"evidence", ev(g.evidence)},
              {"cross_checks", ev(g.cross_checks)}};
}

json to_json(const FlatnessCertificate& c) {
  json fan = json::array();
  for (double a : c.fan) fan.push_back(num(a));
  return json{{"K1", num(c.K1)},       {"K2", num(c.K2)},       {"K3", num(c.K3)},
              {"K4", num(c.K4)},       {"x_min", num(c.x_min)}, {"x_max", num(c.x_max)},
              {"max_violation", num(c.max_violation)}, {"fan", fan}};
}

json to_json(const MomentSequence& m) {
  json rows = json::array();
  for (std::size_t p = 0; p < m.size(); ++p)
    rows.push_back({{"p", p}, {"log_mu", num(m.log_mu[p])}, {"rel_error", num(m.rel_error[p])}});
  return json{{"moments", rows}, {"log_convex", m.log_convex()}};
}

json to_json(const RemainderReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"p", row.p}, {"sup_scaled", num(row.sup_scaled)}, {"sup_norm", num(row.sup_norm)},
                    {"bound", num(row.bound)}});
  return json{{"rows", rows},           {"h", num(r.h)},       {"h1", num(r.h1)},
              {"h2", num(r.h2)},        {"R0", num(r.R0)},     {"c_pred", num(r.c_pred)},
              {"C", num(r.C)},          {"fitted_h", num(r.fitted_h)}, {"safety", num(r.safety)},
              {"pass", r.pass},         {"detail", r.detail}, {"grid_points", r.grid.size()}};
}

json to_json(const DerivedWeight& k) {
  json items = json::array();
  for (const auto& it : k.report)
    items.push_back({{"name", it.name}, {"pass", it.pass}, {"value", num(it.value)},
                     {"trend_slope", num(it.trend_slope)}, {"detail", it.detail}});
  json lk = json::array();
  for (double v : k.log_k) lk.push_back(num(v));
  const auto& a = k.E.audit;
  return json{{"report", items},
              {"partial", k.partial},
              {"pass", k.pass()},
              {"log_k", lk},
              {"modulation",
               {{"theta", num(k.E.theta)},
                {"throttle_level", k.E.throttle_level},
                {"window", k.E.window},
                {"horizon", k.E.horizon},
                {"audit",
                 {{"nondecreasing", a.nondecreasing},
                  {"ED_nonincreasing", a.ED_nonincreasing},
                  {"tail_sums", a.tail_sums},
                  {"EB_tail_decreasing", a.EB_tail_decreasing},
                  {"worst_tail_ratio", num(a.worst_tail_ratio)}}}}},
              {"epsilon", {{"n", k.eps.n}, {"worst_slack", num(k.eps.worst_slack)}, {"nudges", k.eps.nudges}}}};
}

json to_json(const std::vector<TransformCheckReport>& reps) {
  json out = json::array();
  for (const auto& r : reps) {
    json rows = json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"p", row.p},
                      {"expected", {num(row.expected.real()), num(row.expected.imag())}},
                      {"extracted", {num(row.extracted.real()), num(row.extracted.imag())}},
                      {"error", num(row.error)},
                      {"pass", row.pass}});
    out.push_back({{"direction", r.direction}, {"ray_arg", num(r.ray_arg)}, {"rows", rows}, {"pass", r.pass}});
  }
  return out;
}

std::vector<MatrixRow> examples_matrix() {
  struct Cell {
    std::string family;
    json spec;
    Condition cond;
    bool holds;
    std::size_t window;
  };
  std::vector<Cell> cells;
  for (double a : {0.5, 1.0, 2.0}) {
    const json spec{{"family", "gevrey"}, {"alpha", a}};
    const std::string name = "Gevrey(" + format_double(a) + ")";
    for (Condition c : {Condition::lc, Condition::dc, Condition::mg, Condition::snq, Condition::sm})
      cells.push_back({name, spec, c, true, 500});
  }
  const json q22{{"family", "qgevrey"}, {"q", 2.0}, {"alpha", 2.0}};
  for (Condition c : {Condition::lc, Condition::dc, Condition::snq, Condition::sm})
    cells.push_back({"QGevrey(2,2)", q22, c, true, 500});
  cells.push_back({"QGevrey(2,2)", q22, Condition::mg, false, 500});
  const json q23{{"family", "qgevrey"}, {"q", 2.0}, {"alpha", 3.0}};
  cells.push_back({"QGevrey(2,3)", q23, Condition::sm, true, 500});
  cells.push_back({"QGevrey(2,3)", q23, Condition::dc, false, 500});
  const json ps{{"family", "powsigma"}, {"tau", 1.0}, {"sigma", 2.0}};
  cells.push_back({"PowerSigma(1,2)", ps, Condition::sm, true, 500});
  cells.push_back({"PowerSigma(1,2)", ps, Condition::dc, false, 500});
  cells.push_back({"QPP(2)", json{{"family", "qpp"}, {"q", 2.0}}, Condition::sm, false, 60});

  std::vector<MatrixRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  const unsigned T = std::min<unsigned>(thread_count(), static_cast<unsigned>(cells.size()));
  auto work = [&](unsigned t) {
    for (std::size_t i = t; i < cells.size(); i += T) {
      try {
        const auto& c = cells[i];
        const WeightSequence M = sequence_from_json(c.spec);
        rows[i] = {c.family, to_string(c.cond), c.holds, check_condition(M, c.cond, Window{0, c.window})};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < T; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string matrix_csv(const std::vector<MatrixRow>& rows) {
  std::string s = "family,condition,expected,verdict,match,C0,H,C\n";
  auto o = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) {
    s += r.family + "," + r.condition + "," + (r.expected_holds ? "holds" : "fails") + "," +
         to_string(r.report.verdict) + "," + (r.match() ? "yes" : "no") + "," + o(r.report.C0) + "," +
         o(r.report.H) + "," + o(r.report.C) + "\n";
  }
  return s;
}

namespace {

struct Grid {
  double lo = 0, hi = 0;
  std::size_t n = 0;
};

// "a:b:n" for a log-uniform grid of n points on [a, b].
Grid parse_grid(const std::string& s, const char* what) {
  Grid g;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  long n = 0;
  if (!(in >> g.lo >> c1 >> g.hi >> c2 >> n) || c1 != ':' || c2 != ':' || !in.eof() || n < 1 ||
      !(g.lo > 0) || !(g.hi >= g.lo))
    throw Error(ErrorKind::ConfigInvalid, std::string(what) + " must be a:b:n with 0 < a <= b and n >= 1");
  g.n = static_cast<std::size_t>(n);
  return g;
}

std::vector<double> grid_points(const Grid& g) {
  std::vector<double> x(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double t = g.n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(g.n - 1);
    x[i] = std::exp(std::log(g.lo) + t * (std::log(g.hi) - std::log(g.lo)));
  }
  x.front() = g.lo;
  if (g.n > 1) x.back() = g.hi;
  return x;
}

// "lo:hi" index window.
Window parse_window(const std::string& s) {
  std::size_t lo = 0, hi = 0;
  const auto colon = s.find(':');
  auto parse = [&](std::string_view v, std::size_t& out) {
    auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    return r.ec == std::errc{} && r.ptr == v.data() + v.size() && !v.empty();
  };
  const std::string_view sv(s);
  const bool ok = colon == std::string::npos ? parse(sv, hi)
                                              : parse(sv.substr(0, colon), lo) && parse(sv.substr(colon + 1), hi);
  if (!ok || hi <= lo) throw Error(ErrorKind::ConfigInvalid, "window must be 'lo:hi' with lo < hi");
  return Window{lo, hi};
}

void check_window(const WeightSequence& M, Window w) {
  if (w.hi > M.window())
    throw Error(ErrorKind::ConfigInvalid, "window end " + std::to_string(w.hi) + " exceeds the safe window " +
                                              std::to_string(M.window()));
}

std::vector<double> log_abs_values(const FormalSeries& f) {
  std::vector<double> v(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) v[p] = f.log_abs(p);
  return v;
}

json cplx(std::complex<double> z) { return json::array({num(z.real()), num(z.imag())}); }

std::complex<double> cplx_from(const json& j) {
  if (j.is_array() && j.size() == 2) return {to_double(j[0]), to_double(j[1])};
  return {to_double(j), 0.0};
}

struct FnSpec {
  ComplexFn f;
  std::vector<std::complex<double>> expansion;
  std::optional<std::complex<double>> at_zero;
};

// Test functions for the transform command, with their known expansions at 0.
FnSpec fn_from_json(const json& spec, std::size_t p_max) {
  const std::string kind = spec.value("kind", "");
  FnSpec out;
  std::vector<std::complex<double>> c;
  if (kind == "constant") {
    const auto v = cplx_from(spec.at("value"));
    out.f = [v](std::complex<double>) { return v; };
    c = {v};
  } else if (kind == "monomial") {
    const std::size_t n = opt_size(spec, "power", 1);
    out.f = [n](std::complex<double> z) { return std::pow(z, static_cast<int>(n)); };
    c.assign(n + 1, 0.0);
    c[n] = 1.0;
  } else if (kind == "polynomial") {
    for (const auto& v : spec.at("coeffs")) c.push_back(cplx_from(v));
    if (c.empty()) throw Error(ErrorKind::ConfigInvalid, "polynomial needs coefficients");
    out.f = [c](std::complex<double> z) {
      std::complex<double> s = 0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
      return s;
    };
  } else if (kind == "stieltjes") {
    out.f = [](std::complex<double> z) { return 1.0 / (1.0 + z); };
    for (std::size_t p = 0; p <= p_max; ++p) c.push_back(p % 2 ? -1.0 : 1.0);
  } else if (kind == "exp_neg") {
    out.f = [](std::complex<double> z) { return std::exp(-z); };
    double f = 1;
    for (std::size_t p = 0; p <= p_max; ++p) {
      if (p > 0) f *= static_cast<double>(p);
      c.push_back((p % 2 ? -1.0 : 1.0) / f);
    }
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown function kind '" + kind + "'");
  }
  c.resize(std::max(c.size(), p_max + 1), 0.0);
  out.expansion = std::move(c);
  out.at_zero = out.expansion[0];
  return out;
}

GrowthCap cap_from_json(const json& spec) {
  GrowthCap cap;
  if (!spec.contains("cap")) return cap;
  const auto& j = spec.at("cap");
  cap.C = j.contains("C") ? to_double(j.at("C")) : cap.C;
  cap.k = j.contains("k") ? to_double(j.at("k")) : cap.k;
  cap.rho = j.contains("rho") ? to_double(j.at("rho")) : cap.rho;
  return cap;
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

void require_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw Error(ErrorKind::ConfigInvalid, std::string(what) + " must be positive");
}

}  // namespace

namespace {

struct HelpRequested {
  std::string text;
};

struct Output {
  std::string format = "json";
  std::string path;  // empty: stdout
};

// "--out csv" or "--out json" selects the format for stdout; anything else
// is a path whose extension picks the format.
Output resolve_output(const std::string& out, const std::string& format) {
  Output o;
  if (out == "csv" || out == "json") {
    o.format = out;
  } else if (!out.empty()) {
    o.path = out;
    if (out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0) o.format = "csv";
  }
  if (!format.empty()) {
    if (format != "csv" && format != "json") throw Error(ErrorKind::ConfigInvalid, "format must be json or csv");
    o.format = format;
  }
  return o;
}

bool is_verdict_error(ErrorKind k) {
  return k == ErrorKind::NotShiftedEquivalent || k == ErrorKind::NotSmallO;
}

struct Flags {
  std::string seq, seq_L, series, cond = "sm", window, input, kind, t_grid, grid, out, format, recover;
  double res = 0.05, alpha = 1.0, gamma = 0.5, tau = 0.0, radius = 0.5, epsilon = std::numbers::pi / 6;
  double opening = 0.5, r = 1.0;
  std::size_t p_max = 12, w = 500, pipeline_w = PipelineOptions{}.window;
  std::size_t transform_p = 5;
  bool matrix = false, check = false;
};

Envelope dispatch(std::vector<std::string> args, Output& output) {
  CLI::App app{"asympto: weight sequences, flat kernels and Borel-Ritt extensions", "asympto"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Flags F;
  auto out_opts = [&F](CLI::App* c) {
    c->add_option("--out", F.out, "path, or 'json'/'csv' for stdout");
    c->add_option("--format", F.format, "json or csv");
  };

  auto* check = app.add_subcommand("check", "check a condition on a window");
  check->add_option("--seq", F.seq, "sequence spec (JSON)");
  check->add_option("--cond", F.cond, "lc, sm, dc, mg, snq, star or all");
  check->add_option("--window", F.window, "lo:hi");
  check->add_flag("--matrix", F.matrix, "run the built-in examples matrix");
  out_opts(check);

  auto* matrix = app.add_subcommand("matrix", "verdicts for the built-in example families");
  out_opts(matrix);

  auto* gamma = app.add_subcommand("gamma", "estimate the growth index");
  gamma->add_option("--seq", F.seq)->required();
  gamma->add_option("--res", F.res, "bisection resolution");
  gamma->add_option("--window", F.window);
  out_opts(gamma);

  auto* hm = app.add_subcommand("hm", "evaluate the associated function h_M");
  hm->add_option("--seq", F.seq)->required();
  hm->add_option("--t-grid", F.t_grid, "a:b:n (log-uniform)")->required();
  hm->add_option("--recover", F.recover, "window end for recovering M_p from h_M");
  out_opts(hm);

  auto* mom = app.add_subcommand("moments", "moments of the Gevrey flat kernel");
  mom->add_option("--alpha", F.alpha)->required();
  mom->add_option("--pmax", F.p_max);
  mom->add_option("--opening", F.opening, "sector opening in units of pi");
  out_opts(mom);

  auto* flat = app.add_subcommand("flatcheck", "certify flatness of the kernel against M");
  flat->add_option("--alpha", F.alpha)->required();
  flat->add_option("--seq", F.seq)->required();
  flat->add_option("--opening", F.opening);
  out_opts(flat);

  auto* ext = app.add_subcommand("extend", "truncated-Laplace extension and remainder table");
  ext->add_option("--seq", F.seq)->required();
  ext->add_option("--series", F.series)->required();
  ext->add_option("--alpha", F.alpha)->required();
  ext->add_option("--gamma", F.gamma, "sector opening in units of pi");
  ext->add_option("--grid", F.grid, "zmin:zmax:n moduli");
  ext->add_option("--p-max", F.p_max);
  out_opts(ext);

  auto* tr = app.add_subcommand("transform", "analytic ramified Laplace or Borel transform");
  tr->add_option("--kind", F.kind)->required()->check(CLI::IsMember({"laplace", "borel"}));
  tr->add_option("--alpha", F.alpha)->required();
  tr->add_option("--tau", F.tau);
  tr->add_option("--input", F.input, "function spec (JSON)")->required();
  tr->add_option("--grid", F.grid, "a:b:n moduli on the ray tau");
  tr->add_option("--radius", F.radius, "Borel path radius");
  tr->add_option("--epsilon", F.epsilon, "Borel path angle");
  tr->add_flag("--check", F.check, "compare extracted expansions with the formal transform");
  tr->add_option("--p-max", F.transform_p, "highest coefficient compared by --check");
  out_opts(tr);

  auto* beu = app.add_subcommand("beurling", "Beurling-case constructions");
  beu->require_subcommand(1);
  auto* bk = beu->add_subcommand("build-k", "build the intermediate weight K");
  bk->add_option("--seq-L", F.seq_L)->required();
  bk->add_option("--coeffs", F.series)->required();
  bk->add_option("--window", F.w);
  out_opts(bk);
  auto* bp = beu->add_subcommand("pipeline", "full surjectivity trace for M and r");
  bp->add_option("--seq", F.seq)->required();
  bp->add_option("--coeffs", F.series)->required();
  bp->add_option("--r", F.r)->required();
  bp->add_option("--window", F.pipeline_w);
  bp->add_option("--p-max", F.p_max);
  out_opts(bp);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested{std::string(kVersion) + "\n"};
  }

  output = resolve_output(F.out, F.format);
  Envelope env;
  json inputs = json::object();
  auto load_seq = [&](const std::string& path) {
    const json spec = read_json_file(path);
    inputs[path] = spec;
    return sequence_from_json(spec);
  };
  auto load_series = [&](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    inputs[path] = ss.str();
    return parse_series_csv(ss.str());
  };
  json& P = env.payload;
  const auto t0 = std::chrono::steady_clock::now();

  if (*matrix || (*check && F.matrix)) {
    env.command = "matrix";
    const auto rows = examples_matrix();
    P["rows"] = json::array();
    bool all = true;
    for (const auto& r : rows) {
      P["rows"].push_back({{"family", r.family}, {"condition", r.condition},
                           {"expected", r.expected_holds ? "holds" : "fails"}, {"match", r.match()},
                           {"report", to_json(r.report)}});
      all = all && r.match();
    }
    P["all_match"] = all;
    P["csv"] = matrix_csv(rows);
    env.exit_code = all ? kExitOk : kExitVerdict;
  } else if (*check) {
    env.command = "check";
    if (F.seq.empty()) throw Error(ErrorKind::ConfigInvalid, "check needs --seq (or --matrix)");
    const WeightSequence M = load_seq(F.seq);
    const Window w = F.window.empty() ? Window{0, std::min<std::size_t>(500, M.window())} : parse_window(F.window);
    check_window(M, w);
    std::vector<Condition> conds;
    if (F.cond == "all")
      conds = {Condition::lc, Condition::sm, Condition::dc, Condition::mg, Condition::snq, Condition::star};
    else
      conds = {parse_condition(F.cond)};
    P["sequence"] = M.label();
    P["reports"] = json::array();
    std::string csv = "condition,verdict,C0,H,C\n";
    bool all = true;
    for (Condition c : conds) {
      const auto rep = check_condition(M, c, w);
      P["reports"].push_back(to_json(rep));
      auto o = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
      csv += join_csv({to_string(c), to_string(rep.verdict), o(rep.C0), o(rep.H), o(rep.C)});
      all = all && rep.holds();
    }
    P["csv"] = csv;
    env.exit_code = all ? kExitOk : kExitVerdict;
  } else if (*gamma) {
    env.command = "gamma";
    require_positive(F.res, "--res");
    const WeightSequence M = load_seq(F.seq);
    const Window w = F.window.empty() ? Window{0, std::min<std::size_t>(500, M.window())} : parse_window(F.window);
    check_window(M, w);
    P = to_json(gamma_estimate(M, w, F.res));
  } else if (*hm) {
    env.command = "hm";
    const WeightSequence M = load_seq(F.seq);
    const auto ts = grid_points(parse_grid(F.t_grid, "--t-grid"));
    P["rows"] = json::array();
    std::string csv = "t,log_h\n";
    for (double t : ts) {
      const double lh = h_eval(M, t);
      P["rows"].push_back({{"t", num(t)}, {"log_h", num(lh)}});
      csv += join_csv({format_double(t), format_double(lh)});
    }
    if (!F.recover.empty()) {
      std::size_t W = 0;
      auto r = std::from_chars(F.recover.data(), F.recover.data() + F.recover.size(), W);
      if (r.ec != std::errc{} || W == 0) throw Error(ErrorKind::ConfigInvalid, "--recover must be a positive index");
      check_window(M, Window{0, W});
      const auto grid = default_recovery_grid(M, W);
      json rec = json::array();
      for (std::size_t p = 0; p <= W; ++p)
        rec.push_back({{"p", p}, {"log_M", num(M.log_M(p))}, {"recovered", num(recover_Mp(M, p, grid))}});
      P["recovered"] = rec;
    }
    P["csv"] = csv;
  } else if (*mom) {
    env.command = "moments";
    const FlatFunction K = FlatFunction::gevrey_exp(F.alpha, SectorSpec{0.0, F.opening, std::nullopt});
    const auto mu = moments(K, F.p_max);
    P = to_json(mu);
    std::string csv = "p,log_mu,rel_error\n";
    for (std::size_t p = 0; p < mu.size(); ++p)
      csv += join_csv({std::to_string(p), format_double(mu.log_mu[p]), format_double(mu.rel_error[p])});
    P["csv"] = csv;
  } else if (*flat) {
    env.command = "flatcheck";
    const WeightSequence M = load_seq(F.seq);
    const FlatFunction K = FlatFunction::gevrey_exp(F.alpha, SectorSpec{0.0, F.opening, std::nullopt});
    const auto res = verify_flatness(K, M);
    if (const auto* c = std::get_if<FlatnessCertificate>(&res)) {
      P["flat"] = true;
      P["certificate"] = to_json(*c);
    } else {
      const auto& f = std::get<FlatnessFailure>(res);
      P["flat"] = false;
      P["failure"] = {{"bound", f.bound}, {"detail", f.detail}};
      env.exit_code = kExitVerdict;
    }
  } else if (*ext) {
    env.command = "extend";
    const WeightSequence M = load_seq(F.seq);
    const FormalSeries f = load_series(F.series);
    const FlatFunction K = FlatFunction::gevrey_exp(F.alpha, SectorSpec{0.0, F.gamma, std::nullopt});
    RemainderGrid grid;
    grid.gamma = F.gamma;
    if (!F.grid.empty()) {
      const Grid g = parse_grid(F.grid, "--grid");
      grid.z_min = g.lo;
      grid.z_max = g.hi;
      grid.n_moduli = static_cast<int>(g.n);
    }
    try {
      const ExtensionSetup s = prepare_extension(f, M, K, F.p_max);
      const RemainderReport rep = remainder_report(s.borel, K, s.certificate, M, grid, F.p_max);
      P = to_json(rep);
      P["type"] = {{"h", num(s.type.h)}, {"norm", num(s.type.norm)}};
      P["csv"] = rep.to_csv();
      env.exit_code = rep.pass ? kExitOk : kExitVerdict;
    } catch (const Error& e) {
      if (!is_verdict_error(e.kind())) throw;
      P = {{"pass", false}, {"verdict", to_string(e.kind())}, {"detail", e.what()}};
      env.exit_code = kExitVerdict;
    }
  } else if (*tr) {
    env.command = "transform";
    const json spec = read_json_file(F.input);
    inputs[F.input] = spec;
    const FnSpec fn = fn_from_json(spec, F.transform_p);
    const auto xs = grid_points(parse_grid(F.grid.empty() ? "0.05:0.5:10" : F.grid, "--grid"));
    const std::complex<double> dir = std::polar(1.0, F.tau);
    P["rows"] = json::array();
    std::string csv = "r,arg,re,im\n";
    const bool laplace = F.kind == "laplace";
    const GrowthCap cap = cap_from_json(spec);
    SectorSpec source{F.tau, F.alpha + 0.5, 1.0};
    if (spec.contains("sector")) source = sector_from_json(spec.at("sector"));
    const BorelPath path{F.tau, F.radius, F.epsilon};
    for (double x : xs) {
      const std::complex<double> z = x * dir;
      const auto v = laplace ? analytic_alpha_laplace(fn.f, cap, F.alpha, F.tau, z)
                             : analytic_alpha_borel(fn.f, source, F.alpha, path, z, {}, fn.at_zero);
      P["rows"].push_back({{"z", cplx(z)}, {"value", cplx(v)}});
      csv += join_csv({format_double(x), format_double(F.tau), format_double(v.real()), format_double(v.imag())});
    }
    P["csv"] = csv;
    if (F.check) {
      const FormalSeries ex = FormalSeries::from_coeffs(fn.expansion);
      std::vector<TransformCheckReport> reps;
      if (laplace) {
        const double beta = spec.contains("beta") ? to_double(spec.at("beta")) : 1.0;
        reps = transform_expansion_check_laplace(fn.f, cap, ex, F.alpha, beta, F.transform_p);
      } else {
        reps = {transform_expansion_check_borel(fn.f, source, ex, F.alpha, path, F.transform_p)};
      }
      P["checks"] = to_json(reps);
      bool all = true;
      for (const auto& r : reps) all = all && r.pass;
      env.exit_code = all ? kExitOk : kExitVerdict;
    }
  } else if (*bk || *bp) {
    if (*bp) F.w = F.pipeline_w;
    const FormalSeries a = load_series(F.series);
    auto la = log_abs_values(a);
    if (la.size() < 4 * F.w + 1)
      throw Error(ErrorKind::ConfigInvalid, "coefficients must cover p = 0.." + std::to_string(4 * F.w));
    try {
      if (*bk) {
        env.command = "beurling build-k";
        const WeightSequence L = load_seq(F.seq_L);
        std::vector<double> logA(la.begin(), la.begin() + static_cast<std::ptrdiff_t>(4 * F.w + 1));
        const DerivedWeight K = build_K(L, logA, F.w);
        P = to_json(K);
        std::string csv = "p,log_k\n";
        for (std::size_t p = 0; p < K.log_k.size(); ++p)
          csv += join_csv({std::to_string(p), format_double(K.log_k[p])});
        P["csv"] = csv;
        env.exit_code = K.pass() ? kExitOk : kExitVerdict;
      } else {
        env.command = "beurling pipeline";
        const WeightSequence M = load_seq(F.seq);
        PipelineOptions po;
        po.window = F.w;
        la.resize(4 * F.w + 1);
        po.p_max = F.p_max;
        const PipelineTrace t = beurling_pipeline(M, F.r, la, po);
        P = {{"r", num(t.r)},
             {"gamma_N", to_json(t.gamma_N)},
             {"kernel_alpha", num(t.kernel_alpha)},
             {"K", to_json(t.K)},
             {"remainder", to_json(t.remainder)},
             {"pass", t.pass}};
        P["csv"] = t.remainder.to_csv();
        env.exit_code = t.pass ? kExitOk : kExitVerdict;
      }
    } catch (const Error& e) {
      if (!is_verdict_error(e.kind())) throw;
      P = {{"pass", false}, {"verdict", to_string(e.kind())}, {"detail", e.what()}};
      env.exit_code = kExitVerdict;
    }
  }

  env.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  env.config_hash = config_hash(json{{"argv", args}, {"inputs", inputs}});
  return env;
}

}  // namespace

Envelope run_command(const std::vector<std::string>& args) {
  Output o;
  try {
    return dispatch(args, o);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  } catch (const HelpRequested&) {
    throw Error(ErrorKind::ConfigInvalid, "help requested");
  }
}

void emit(const Envelope& e, const std::string& format, const std::string& path) {
  std::string text;
  if (format == "json") {
    text = e.to_json().dump(2) + "\n";
  } else if (format == "csv") {
    if (!e.payload.is_object() || !e.payload.contains("csv"))
      throw Error(ErrorKind::ConfigInvalid, "command '" + e.command + "' has no tabular output");
    text = e.payload.at("csv").get<std::string>();
  } else {
    throw Error(ErrorKind::ConfigInvalid, "format must be json or csv");
  }
  if (path.empty()) {
    std::cout << text << std::flush;
    if (!std::cout) throw Error(ErrorKind::IoError, "write to stdout failed");
  } else {
    write_text_file(path, text);
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  Output o;
  try {
    const Envelope e = dispatch(args, o);
    emit(e, o.format, o.path);
    return e.exit_code;
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "asympto: ConfigInvalid: " << e.what() << "\n";
    return kExitOperational;
  } catch (const Error& e) {
    std::cerr << "asympto: " << e.what() << "\n";
    return kExitOperational;
  } catch (const std::exception& e) {
    std::cerr << "asympto: internal error: " << e.what() << "\n";
    return kExitOperational;
  }
}

}  // namespace asympto::cli
