#pragma once

// Clock bookkeeping for asynchronous updates: RM instants t_m, application
// instants t_k^i, and the derived indices m(t), k(t, i), psi_i(m), N_i(k).

#include <bwshare/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwshare {

struct AsyncTimeline {
  double rm_period = 1.0;
  double horizon = 0.0;
  std::vector<double> rm_instants;
  // One list per application slot. Each list extends one instant past the
  // horizon so that N_i(k) is defined for the last update inside it.
  std::vector<std::vector<double>> app_instants;
  int n_bar = 1;

  // Time tolerance used when comparing instants.
  double tol() const { return 1e-9 * rm_period; }

  // m(t): index of the most recent RM instant t_m <= t.
  std::size_t rm_index(double t) const {
    return static_cast<std::size_t>(std::floor(t / rm_period + 1e-9));
  }

  // N_i(k) = m(t_{k+1}^i) - m(t_k^i).
  int updates_between(std::size_t app, std::size_t k) const {
    const auto& ts = app_instants.at(app);
    if (k + 1 >= ts.size()) throw ValidationError("timeline: update index past the grid");
    return static_cast<int>(rm_index(ts[k + 1]) - rm_index(ts[k]));
  }

  // Grid for an application whose updates start at `offset` (a join time).
  std::size_t add_app(double period, double offset = 0.0) {
    std::vector<double> ts;
    for (std::size_t k = 0;; ++k) {
      const double t = offset + static_cast<double>(k) * period;
      ts.push_back(t);
      if (t > horizon + tol()) break;
    }
    if (ts.size() < 2) ts.push_back(offset + period);
    app_instants.push_back(std::move(ts));
    const std::size_t slot = app_instants.size() - 1;
    for (std::size_t k = 0; k + 1 < app_instants[slot].size(); ++k)
      n_bar = std::max(n_bar, updates_between(slot, k));
    return slot;
  }
};

inline void check_period(double rm_period, double app_period, std::optional<int> n_bar_limit,
                         std::size_t app) {
  if (!(app_period > 0.0)) throw ValidationError("timeline: application period must be > 0");
  if (app_period < rm_period * (1.0 - 1e-12))
    throw ValidationError("timeline: application " + std::to_string(app) +
                          " updates faster than the RM; the design assumption "
                          "1 <= N_i(k) requires app period >= RM period");
  if (n_bar_limit) {
    const double ratio = std::ceil(app_period / rm_period - 1e-9);
    if (ratio > *n_bar_limit)
      throw ValidationError("timeline: application " + std::to_string(app) +
                            " spans more RM updates than the design bound N_bar = " +
                            std::to_string(*n_bar_limit));
  }
}

inline AsyncTimeline build_timeline(double rm_period, std::span<const double> app_periods,
                                    double horizon, std::optional<int> n_bar_limit = {}) {
  if (!(rm_period > 0.0)) throw ValidationError("timeline: RM period must be > 0");
  if (!(horizon >= 0.0)) throw ValidationError("timeline: horizon must be >= 0");
  AsyncTimeline tl;
  tl.rm_period = rm_period;
  tl.horizon = horizon;
  const auto last = static_cast<std::size_t>(std::floor(horizon / rm_period + 1e-9));
  tl.rm_instants.reserve(last + 1);
  for (std::size_t m = 0; m <= last; ++m) tl.rm_instants.push_back(static_cast<double>(m) * rm_period);
  for (std::size_t i = 0; i < app_periods.size(); ++i) {
    check_period(rm_period, app_periods[i], n_bar_limit, i);
    tl.add_app(app_periods[i]);
  }
  return tl;
}

struct TimelineIndices {
  std::optional<std::size_t> app_index;  // k(t, i); empty before the first update
  std::size_t rm_index = 0;              // m(t)
  std::size_t psi = 0;                   // psi_i(m(t))
  std::optional<int> updates;            // N_i(k(t, i))
};

inline TimelineIndices timeline_indices(const AsyncTimeline& tl, double t, std::size_t app) {
  if (t < -tl.tol() || t > tl.horizon + tl.tol())
    throw ValidationError("timeline_indices: time outside [0, horizon]");
  const auto& ts = tl.app_instants.at(app);
  TimelineIndices out;
  out.rm_index = tl.rm_index(t);

  auto after = std::upper_bound(ts.begin(), ts.end(), t + tl.tol());
  if (after != ts.begin()) {
    out.app_index = static_cast<std::size_t>(std::distance(ts.begin(), after) - 1);
    out.updates = tl.updates_between(app, *out.app_index);
  }
  // psi_i(m): RM index of the latest application instant strictly before t_m.
  const double tm = static_cast<double>(out.rm_index) * tl.rm_period;
  auto before = std::lower_bound(ts.begin(), ts.end(), tm - tl.tol());
  if (before != ts.begin()) out.psi = tl.rm_index(*std::prev(before));
  return out;
}

}  // namespace bwshare
