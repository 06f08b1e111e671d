#pragma once

#include <bwshare/bounds.hpp>
#include <bwshare/core.hpp>

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bwshare {

enum class RunMode { sync, async_compensated, async_uncompensated, ode_reference };

inline const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::sync: return "sync";
    case RunMode::async_compensated: return "async_compensated";
    case RunMode::async_uncompensated: return "async_uncompensated";
    case RunMode::ode_reference: return "ode_reference";
  }
  return "?";
}

inline std::optional<RunMode> parse_run_mode(const std::string& s) {
  for (RunMode m : {RunMode::sync, RunMode::async_compensated, RunMode::async_uncompensated,
                    RunMode::ode_reference})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

struct MembershipEvent {
  enum class Action { join, leave };
  double time = 0.0;
  Action action = Action::join;
  ApplicationSpec app;  // join only
  std::string app_id;   // leave only

  friend bool operator==(const MembershipEvent&, const MembershipEvent&) = default;
};

struct Scenario {
  std::string name;
  PlatformSpec platform;
  std::vector<ApplicationSpec> apps;
  double rm_period = 1.0;
  double horizon = 1000.0;
  RunMode mode = RunMode::sync;
  std::vector<MembershipEvent> events;
  bool strict_bounds = false;
  // Report f = 0 for every application at t = 0 (no job has completed yet).
  bool cold_start = false;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Initial normalized bandwidths: explicit values where given, the remaining
// assignable bandwidth split equally among the others.
inline std::vector<double> initial_bandwidths(const Scenario& sc) {
  double fixed = 0.0;
  std::size_t unset = 0;
  for (const auto& a : sc.apps) {
    if (a.initial_bandwidth) fixed += *a.initial_bandwidth;
    else ++unset;
  }
  const double share =
      unset ? std::max(0.0, sc.platform.max_total_bandwidth - fixed) / static_cast<double>(unset)
            : 0.0;
  const double upper = 1.0 / sc.platform.cores;
  std::vector<double> v;
  v.reserve(sc.apps.size());
  for (const auto& a : sc.apps) v.push_back(a.initial_bandwidth ? *a.initial_bandwidth
                                                                : std::min(share, upper));
  return v;
}

// Every application spec that is live at some point of the run.
inline std::vector<ApplicationSpec> all_apps(const Scenario& sc) {
  std::vector<ApplicationSpec> out = sc.apps;
  for (const auto& e : sc.events)
    if (e.action == MembershipEvent::Action::join) out.push_back(e.app);
  return out;
}

inline bool on_grid(double t, double period) {
  const double k = std::round(t / period);
  return std::abs(t - k * period) <= 1e-9 * period;
}

inline void validate(const Scenario& sc) {
  validate(sc.platform);
  if (sc.apps.empty()) throw ValidationError("apps: at least one application is required");
  if (!(sc.rm_period > 0.0)) throw ValidationError("rm_period must be > 0");
  if (!(sc.horizon >= 0.0) || !std::isfinite(sc.horizon))
    throw ValidationError("horizon must be finite and >= 0");

  std::set<std::string> live;
  for (std::size_t k = 0; k < sc.apps.size(); ++k) {
    const auto path = "apps[" + std::to_string(k) + "]";
    validate(sc.apps[k], path);
    if (!live.insert(sc.apps[k].id).second) throw ValidationError(path + ".id is not unique");
    const double period = sc.apps[k].update_jobs * sc.apps[k].job_period.value_or(sc.rm_period);
    if (period < sc.rm_period * (1.0 - 1e-12))
      throw ValidationError(path + ": update period shorter than the RM period (requires N >= 1)");
  }

  const auto v = initial_bandwidths(sc);
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] > 1.0 / sc.platform.cores + kSumTolerance)
      throw ValidationError("apps[" + std::to_string(k) +
                            "].initial_bandwidth exceeds 1/cores");
  if (total(v) > sc.platform.max_total_bandwidth + kSumTolerance)
    throw ValidationError("initial bandwidths exceed platform.max_total_bandwidth");

  double last = 0.0;
  for (std::size_t k = 0; k < sc.events.size(); ++k) {
    const auto& e = sc.events[k];
    const auto path = "events[" + std::to_string(k) + "]";
    if (e.time < last) throw ValidationError(path + ".time must be non-decreasing");
    last = e.time;
    if (!(e.time > 0.0) || e.time > sc.horizon)
      throw ValidationError(path + ".time must lie in (0, horizon]");
    if (!on_grid(e.time, sc.rm_period))
      throw ValidationError(path + ".time must coincide with an RM instant");
    if (e.action == MembershipEvent::Action::join) {
      validate(e.app, path + ".app");
      if (!live.insert(e.app.id).second)
        throw ValidationError(path + ".app.id is already live");
    } else if (live.erase(e.app_id) == 0) {
      throw ValidationError(path + ".app_id is not a live application");
    }
  }

  if (sc.strict_bounds) {
    const auto apps = all_apps(sc);
    const auto b = compute_bounds(apps, sc.platform);
    if (!(sc.platform.step < b.epsilon_guard))
      throw ValidationError("platform.step must be below the starvation guard 1/((L+1)kappa) = " +
                            std::to_string(b.epsilon_guard) + " in strict mode");
  }
}

}  // namespace bwshare
