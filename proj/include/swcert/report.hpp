#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "swcert/checker.hpp"
#include "swcert/model.hpp"
#include "swcert/vc.hpp"

namespace swcert {

inline constexpr const char* kToolVersion = "0.1.0";

enum class OverallStatus { Proved, RefutedPremise, Inconclusive };
const char* overall_text(OverallStatus s);

struct RunConfig {
  std::string rule;  // empty: derive from the model kind and annotations
  std::uint64_t seed = 12345;
  unsigned sos_degree = 2;
  std::uint64_t falsify_budget = 20000;
  unsigned exp_terms = 30;
  bool normalize_timings = false;
  std::optional<std::string> region_override;  // predicate text
  int jobs = 1;

  CheckerConfig checker() const;
};

struct VcResult {
  VerificationCondition vc;
  Verdict verdict;
  long long millis = 0;
};

struct Report {
  std::string version = kToolVersion;
  std::string model_name;
  std::string model_hash;
  SwitchKind kind = SwitchKind::StateDependent;
  std::string rule;
  std::vector<VcResult> results;
  OverallStatus overall = OverallStatus::Inconclusive;
  std::uint64_t seed = 0;
};

/// Rule selection per model kind and annotations: state-dependent models with
/// one common candidate use the common-function rule (the restricted variant
/// when a region annotation is present), otherwise the per-kind multiple rule.
std::string select_rule(const SwitchedModel& m, const LyapunovAssignment& A);

std::vector<VerificationCondition> generate_vcs(const SwitchedModel& m, const LyapunovAssignment& A,
                                                const std::string& rule);

/// Generates, checks (set-invariance obligations against the model) and
/// aggregates. Overall is Proved iff every condition is proved.
Report run_verify(const SwitchedModel& m, const LyapunovAssignment& A, const RunConfig& cfg);

nlohmann::ordered_json vc_to_json(const VerificationCondition& vc);
VerificationCondition vc_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json report_to_json(const Report& r, bool normalize_timings);

/// Re-verifies every certificate and counterexample in a report using exact
/// arithmetic only (no search). Returns true when everything replays and the
/// stored verdicts are internally consistent.
bool replay_report(const nlohmann::ordered_json& report_json, std::string* why = nullptr);

struct BenchEntry {
  std::string fixture;
  std::string expected;
  std::string got;
  bool pass = false;
  long long millis = 0;
};

struct BenchResult {
  std::vector<BenchEntry> entries;
  bool all_pass = true;
  std::string table() const;
  nlohmann::ordered_json json() const;
};

/// Runs every .ssm fixture in the directory against its .expect.json sidecar
/// ({"overall": "Proved" | "Refuted-Premise" | "Inconclusive" | "NotRefuted"}).
BenchResult run_bench(const std::string& corpus_dir, const RunConfig& cfg);

}  // namespace swcert
