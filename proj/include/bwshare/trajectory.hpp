#pragma once

#include <bwshare/scenario.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwshare {

struct Sample {
  double time = 0.0;
  std::string app;
  double service = 0.0;
  double bandwidth = 0.0;  // normalized
  double deadline = 0.0;
  double response = 0.0;
  double matching = 0.0;
  double fairness = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Piecewise-constant, left-closed path: value k holds on [breakpoints[k],
// breakpoints[k+1]). NaN before the first breakpoint and wherever the value is
// undefined (an application that is not live).
struct StepPath {
  std::vector<double> breakpoints;
  std::vector<double> values;

  double at(double t) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    if (it == breakpoints.begin()) return std::numeric_limits<double>::quiet_NaN();
    return values[static_cast<std::size_t>(std::distance(breakpoints.begin(), it) - 1)];
  }
};

// Samples grouped by RM instant: instant k owns samples[offsets[k], offsets[k+1]).
struct Trajectory {
  std::string name;
  RunMode mode = RunMode::sync;
  double rm_period = 1.0;
  int cores = 1;
  double step = 0.0;
  std::vector<std::string> app_ids;  // every app ever live, in order of appearance
  std::vector<double> times;
  std::vector<std::size_t> offsets{0};
  std::vector<Sample> samples;
  std::vector<MembershipEvent> events;
  int n_bar = 1;

  std::size_t instants() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }

  std::span<const Sample> at(std::size_t k) const {
    return std::span<const Sample>(samples).subspan(offsets.at(k), offsets.at(k + 1) - offsets[k]);
  }

  const Sample* find(std::size_t k, const std::string& app) const {
    for (const auto& s : at(k))
      if (s.app == app) return &s;
    return nullptr;
  }

  void begin_instant(double t) { times.push_back(t); }
  void push(Sample s) { samples.push_back(std::move(s)); }
  void end_instant() { offsets.push_back(samples.size()); }

  void note_app(const std::string& id) {
    if (std::find(app_ids.begin(), app_ids.end(), id) == app_ids.end()) app_ids.push_back(id);
  }

  // Rebuild app_ids, times and offsets from a flat, time-ordered sample list.
  static Trajectory from_samples(std::vector<Sample> flat) {
    Trajectory tr;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      if (i == 0 || flat[i].time != flat[i - 1].time) {
        if (i != 0) tr.end_instant();
        tr.begin_instant(flat[i].time);
      }
      tr.note_app(flat[i].app);
      tr.push(std::move(flat[i]));
    }
    if (!tr.times.empty()) tr.end_instant();
    return tr;
  }
};

}  // namespace bwshare
