#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swcert/model.hpp"
#include "swcert/vc.hpp"

namespace swcert {

enum class PolicyKind {
  RandomDwell,   // any domain-satisfying mode, held at least h_min
  GuardDriven,   // follow the controller; nondeterminism resolved by seed
  Scripted,      // explicit (time, mode) schedule
  GreedyGrowth,  // adversarial probe: maximize d||x||^2/dt (test harness use)
};

struct SwitchingPolicy {
  PolicyKind kind = PolicyKind::RandomDwell;
  std::uint64_t seed = 1;
  std::vector<std::pair<double, std::string>> schedule;  // Scripted

  static SwitchingPolicy random_dwell(std::uint64_t seed);
  static SwitchingPolicy guard_driven(std::uint64_t seed);
  static SwitchingPolicy scripted(std::vector<std::pair<double, std::string>> schedule);
  static SwitchingPolicy greedy_growth();
};

struct SimOptions {
  double dt = 1e-3;
  double horizon = 20.0;
  int bisect_iters = 60;
  double domain_tol = 1e-7;  // acceptance band for domain membership checks
  double h_min_steps = 10;   // minimum hold, in units of dt
};

struct SwitchEvent {
  double t = 0;
  std::string from;
  std::string to;
  std::string reason;
};

struct Trace {
  std::vector<std::string> vars;  // continuous variables, state first
  std::vector<double> times;
  std::vector<std::string> modes;
  std::vector<std::vector<double>> states;
  std::vector<double> tau;
  std::vector<std::string> v_modes;           // mode ids with Lyapunov columns
  std::vector<std::vector<double>> v_values;  // per sample, aligned with v_modes
  std::vector<SwitchEvent> events;
  bool stuck = false;
  double end_time = 0;

  double state_norm(std::size_t sample, std::size_t n_state) const;
  std::string csv() const;
  std::string events_json() const;
};

Trace simulate(const SwitchedModel& m, const std::vector<double>& x0, const SwitchingPolicy& policy,
               const SimOptions& opt, const LyapunovAssignment* A = nullptr);

/// Independent constraint audit of an emitted trace: active-mode domain
/// membership at every sample and dwell bounds across events.
bool audit_trace(const SwitchedModel& m, const Trace& tr, double tol, std::string* why = nullptr);

struct StabilityProbeEntry {
  double eps = 0;
  double delta = 0;  // largest grid delta with zero violations (0 if none)
  int samples = 0;
  int violations = 0;
};

struct ProbeReport {
  std::vector<StabilityProbeEntry> stability;
  double attr_delta = 0;
  double attr_eps = 0;
  double attr_T = -1;  // max settling time over samples; -1 when unset
  int attr_samples = 0;
  int attr_violations = 0;
  int attr_stuck = 0;
  bool all_stuck = false;
  std::vector<Trace> violation_traces;

  std::string json() const;
};

ProbeReport probe_stability(const SwitchedModel& m, const std::vector<double>& eps_list, int samples,
                            std::uint64_t seed, const SimOptions& opt,
                            const LyapunovAssignment* A = nullptr);

ProbeReport probe_attractivity(const SwitchedModel& m, double delta, double eps, int samples,
                               std::uint64_t seed, const SimOptions& opt,
                               const Predicate* init_region = nullptr,
                               const LyapunovAssignment* A = nullptr);

/// True iff at every sample the active mode's Lyapunov value stays below W
/// and is non-increasing while that mode remains active (per-step tolerance
/// for integration error). On failure returns the first offending sample.
std::pair<bool, std::optional<std::size_t>> check_trace_sublevel(const Trace& tr,
                                                                 const LyapunovAssignment& A,
                                                                 const Rational& W,
                                                                 double step_tol = 1e-6);

}  // namespace swcert
