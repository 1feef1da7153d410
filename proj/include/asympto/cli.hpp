#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "asympto/beurling.hpp"
#include "asympto/extend.hpp"
#include "asympto/flatmom.hpp"
#include "asympto/growth.hpp"
#include "asympto/props.hpp"
#include "asympto/ramified.hpp"
#include "asympto/seqcore.hpp"

namespace asympto::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: success, the mathematics says no, the tool failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitOperational = 1;
inline constexpr int kExitVerdict = 2;

struct Envelope {
  std::string command;
  std::string version = kVersion;
  std::string config_hash;
  double seconds = 0.0;
  json payload;
  int exit_code = kExitOk;

  json to_json() const;
  static Envelope from_json(const json& j);
};

std::uint64_t fnv1a(std::string_view bytes);
// FNV-1a of the canonical (key-sorted, compact) dump, as 16 hex digits.
std::string config_hash(const json& config);

// Doubles as JSON numbers, with non-finite values spelled "inf", "-inf", "nan".
json num(double x);
double to_double(const json& j);
// "%.17g" with a "." separator regardless of locale.
std::string format_double(double x);

// Worker count from ASYMPTO_THREADS, else hardware concurrency, at least 1.
unsigned thread_count();

// Sequence spec: {"family": "gevrey"|"gevreylog"|"qgevrey"|"powsigma"|"qpp"|"table",
// parameters, optional "window", optional "transforms": [{"kind": ...}]}.
WeightSequence sequence_from_json(const json& spec);
// Kernel spec: {"kind": "gevrey_exp", "alpha": a, "sector": {"direction": d, "opening": o}}.
FlatFunction kernel_from_json(const json& spec);
SectorSpec sector_from_json(const json& spec);

// Series CSV with header "p,re,im", "p,log_abs" or "p,log_abs,arg".
FormalSeries read_series_csv(const std::string& path);
FormalSeries parse_series_csv(const std::string& text);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json to_json(const PropertyReport& r);
json to_json(const GammaEstimate& g);
json to_json(const FlatnessCertificate& c);
json to_json(const MomentSequence& m);
json to_json(const RemainderReport& r);
json to_json(const DerivedWeight& k);
json to_json(const std::vector<TransformCheckReport>& reps);

struct MatrixRow {
  std::string family;
  std::string condition;
  bool expected_holds = false;
  PropertyReport report;
  bool match() const { return report.holds() == expected_holds; }
};

// The claimed verdicts for the built-in example families.
std::vector<MatrixRow> examples_matrix();
std::string matrix_csv(const std::vector<MatrixRow>& rows);

// Parses arguments, dispatches, emits. Returns the process exit code.
int run(int argc, char** argv);

// Runs a command without touching stdout; throws on operational errors.
Envelope run_command(const std::vector<std::string>& args);

// Writes the envelope (json) or, for tabular payloads, its CSV rendering.
void emit(const Envelope& e, const std::string& format, const std::string& path);

}  // namespace asympto::cli
