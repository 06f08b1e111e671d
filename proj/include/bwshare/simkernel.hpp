#pragma once

// Deterministic multi-rate simulation. Bandwidth is modeled fluidly: a job
// with execution requirement C running on a reservation v finishes in C / v.
// Jobs are periodic and back to back; the job observed at an RM instant is the
// one executed under the state that is in force at that instant.

#include <bwshare/adaptation.hpp>
#include <bwshare/reference.hpp>
#include <bwshare/scenario.hpp>
#include <bwshare/timeline.hpp>
#include <bwshare/trajectory.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace bwshare {

inline double job_execution_requirement(const JobModel& model, double service) {
  return execution_requirement(model, service);
}

struct JobMeasurement {
  double deadline = 0.0;
  double response = 0.0;
  double matching = 0.0;
};

// R = C / v and f = D / R - 1. Zero bandwidth gives R = inf and f = -1.
inline JobMeasurement measure_job(const JobModel& model, double service,
                                  double bandwidth_unnormalized) {
  JobMeasurement out;
  out.deadline = deadline_of(model, service);
  const double c = execution_requirement(model, service);
  if (!(c > 0.0)) throw ValidationError("measure_job: execution requirement must be > 0");
  if (bandwidth_unnormalized <= 0.0) {
    out.response = std::numeric_limits<double>::infinity();
    out.matching = -1.0;
    return out;
  }
  out.response = c / bandwidth_unnormalized;
  out.matching = matching_from_measurement(out.deadline, out.response);
  return out;
}

// Live membership: specs parallel to the state vectors.
struct LiveSet {
  std::vector<ApplicationSpec> specs;
  SystemState state;
};

// Join: the new app starts at its initial service with min(eps, headroom)
// bandwidth, headroom being what the cap leaves. Leave: its bandwidth returns
// to the unused pool.
inline LiveSet apply_membership_event(const LiveSet& live, const MembershipEvent& event,
                                      const PlatformSpec& platform) {
  LiveSet out = live;
  if (event.action == MembershipEvent::Action::join) {
    for (const auto& s : live.specs)
      if (s.id == event.app.id)
        throw ValidationError("join: application '" + event.app.id + "' is already live");
    const double headroom = platform.max_total_bandwidth - total(live.state.bandwidths);
    const double seed =
        std::min({platform.step, headroom, 1.0 / static_cast<double>(platform.cores)});
    if (!(seed > 0.0))
      throw AdmissionError("join: no unused bandwidth to admit '" + event.app.id + "'");
    out.specs.push_back(event.app);
    out.state.services.push_back(event.app.initial_service);
    out.state.bandwidths.push_back(seed);
  } else {
    std::size_t idx = live.specs.size();
    for (std::size_t i = 0; i < live.specs.size(); ++i)
      if (live.specs[i].id == event.app_id) idx = i;
    if (idx == live.specs.size())
      throw ValidationError("leave: application '" + event.app_id + "' is not live");
    out.specs.erase(out.specs.begin() + static_cast<std::ptrdiff_t>(idx));
    out.state.services.erase(out.state.services.begin() + static_cast<std::ptrdiff_t>(idx));
    out.state.bandwidths.erase(out.state.bandwidths.begin() + static_cast<std::ptrdiff_t>(idx));
  }
  out.state.unused = 1.0 - total(out.state.bandwidths);
  return out;
}

inline double update_period(const ApplicationSpec& spec, const Scenario& sc) {
  if (sc.mode == RunMode::sync) return sc.rm_period;
  return spec.update_jobs * spec.job_period.value_or(sc.rm_period);
}

namespace detail {

inline Trajectory run_discrete(const Scenario& sc) {
  const auto& pf = sc.platform;
  const double P = sc.rm_period;
  const std::size_t M = static_cast<std::size_t>(std::floor(sc.horizon / P + 1e-9));

  AsyncTimeline tl;
  tl.rm_period = P;
  tl.horizon = sc.horizon;
  for (std::size_t m = 0; m <= M; ++m) tl.rm_instants.push_back(static_cast<double>(m) * P);

  LiveSet live;
  live.specs = sc.apps;
  live.state.bandwidths = initial_bandwidths(sc);
  live.state.unused = 1.0 - total(live.state.bandwidths);
  std::vector<std::size_t> slot, next;   // timeline slot and next update index per live app
  std::vector<bool> cold;
  for (const auto& a : sc.apps) {
    live.state.services.push_back(a.initial_service);
    slot.push_back(tl.add_app(update_period(a, sc)));
    next.push_back(0);
    cold.push_back(sc.cold_start);
  }

  Trajectory tr;
  tr.name = sc.name;
  tr.mode = sc.mode;
  tr.rm_period = P;
  tr.cores = pf.cores;
  tr.step = pf.step;
  tr.events = sc.events;

  std::size_t ev = 0;
  std::vector<double> f;
  for (std::size_t m = 0; m <= M; ++m) {
    const double t = static_cast<double>(m) * P;

    while (ev < sc.events.size() &&
           static_cast<std::size_t>(std::llround(sc.events[ev].time / P)) == m) {
      const auto& e = sc.events[ev++];
      std::size_t idx = live.specs.size();
      if (e.action == MembershipEvent::Action::leave)
        for (std::size_t i = 0; i < live.specs.size(); ++i)
          if (live.specs[i].id == e.app_id) idx = i;
      live = apply_membership_event(live, e, pf);
      if (e.action == MembershipEvent::Action::join) {
        slot.push_back(tl.add_app(update_period(e.app, sc), t));
        next.push_back(0);
        cold.push_back(true);
      } else {
        const auto d = static_cast<std::ptrdiff_t>(idx);
        slot.erase(slot.begin() + d);
        next.erase(next.begin() + d);
        cold.erase(cold.begin() + d);
      }
    }

    const std::size_t n = live.specs.size();
    f.assign(n, 0.0);
    std::vector<JobMeasurement> meas(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& spec = live.specs[i];
      const double s = live.state.services[i];
      if (cold[i]) {
        meas[i].deadline = deadline_of(spec.model, s);
        meas[i].response = meas[i].deadline;
        meas[i].matching = 0.0;
        cold[i] = false;
      } else {
        meas[i] = measure_job(spec.model, s, pf.cores * live.state.bandwidths[i]);
      }
      f[i] = meas[i].matching;
    }
    const auto fairness = fairness_vector(f, live.state.bandwidths, weights_of(live.specs));

    tr.begin_instant(t);
    for (std::size_t i = 0; i < n; ++i) {
      tr.note_app(live.specs[i].id);
      tr.push(Sample{t, live.specs[i].id, live.state.services[i], live.state.bandwidths[i],
                     meas[i].deadline, meas[i].response, meas[i].matching, fairness[i]});
    }
    tr.end_instant();

    if (sc.strict_bounds) check_feasible_normalized(live.state.bandwidths, pf, m);
    if (m == M) break;

    const auto rm = rm_step(live.state, f, live.specs, pf, {.require_feasible = sc.strict_bounds});

    const double t_next = static_cast<double>(m + 1) * P;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ts = tl.app_instants[slot[i]];
      const auto dom = domain_of(live.specs[i]);
      while (next[i] < ts.size() && ts[next[i]] < t_next - tl.tol()) {
        double& s = live.state.services[i];
        switch (sc.mode) {
          case RunMode::async_compensated:
            s = app_step_async(s, f[i], tl.updates_between(slot[i], next[i]), pf.step, dom);
            break;
          default: s = app_step_sync(s, f[i], pf.step, dom); break;
        }
        ++next[i];
      }
    }
    live.state.bandwidths = rm.new_bandwidths;
    live.state.unused = rm.unused;
  }
  tr.n_bar = tl.n_bar;
  return tr;
}

inline Trajectory run_ode(const Scenario& sc) {
  if (!sc.events.empty())
    throw ValidationError("mode ode_reference does not support membership events");
  SystemState init;
  for (const auto& a : sc.apps) init.services.push_back(a.initial_service);
  init.bandwidths = initial_bandwidths(sc);
  init.unused = 1.0 - total(init.bandwidths);
  const double eps = sc.platform.step;
  const auto steps = static_cast<std::size_t>(std::floor(sc.horizon / sc.rm_period + 1e-9));
  auto tr = integrate_ode_steps(init, sc.apps, sc.platform, eps, steps);
  // Euler time k * eps is reported on the RM grid k * rm_period.
  for (std::size_t k = 0; k < tr.instants(); ++k) {
    const double t = static_cast<double>(k) * sc.rm_period;
    tr.times[k] = t;
    for (std::size_t j = tr.offsets[k]; j < tr.offsets[k + 1]; ++j) tr.samples[j].time = t;
  }
  tr.name = sc.name;
  tr.mode = RunMode::ode_reference;
  tr.rm_period = sc.rm_period;
  return tr;
}

}  // namespace detail

inline Trajectory run_scenario(const Scenario& sc) {
  validate(sc);
  if (sc.mode == RunMode::ode_reference) return detail::run_ode(sc);
  return detail::run_discrete(sc);
}

}  // namespace bwshare
