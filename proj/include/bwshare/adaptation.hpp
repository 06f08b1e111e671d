#pragma once

// Resource adaptation (RM side) and service-level adaptation (application
// side). Stateless step functions; callers own sequencing.

#include <bwshare/core.hpp>

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwshare {

struct ServiceDomain {
  double min = 0.0;
  std::optional<double> max;

  double project(double s) const {
    if (s < min) return min;
    if (max && s > *max) return *max;
    return s;
  }
  bool contains(double s) const { return s >= min && (!max || s <= *max); }
};

inline ServiceDomain domain_of(const ApplicationSpec& spec) {
  return ServiceDomain{spec.min_service, spec.max_service};
}

struct RmUpdateResult {
  std::vector<double> new_bandwidths;
  std::vector<double> observed_fairness;
  // Indices where either clip of [0, 1/kappa] or the global cap changed the
  // raw update. Sorted ascending.
  std::vector<std::size_t> projections_hit;
  double unused = 0.0;

  std::vector<double> unnormalized(int cores) const {
    std::vector<double> v(new_bandwidths);
    for (double& x : v) x *= cores;
    return v;
  }
};

inline double observed_fairness(std::size_t index, std::span<const double> matchings,
                                std::span<const double> bandwidths,
                                std::span<const double> weights) {
  for (double f : matchings)
    if (f < -1.0 - 1e-12) throw ValidationError("observed_fairness: matching below -1");
  return fairness_measure(index, matchings, bandwidths, weights);
}

struct RmStepOptions {
  // Reject an input state that is outside the feasible set. Non-strict
  // simulation runs turn this off so that a violation can be recorded rather
  // than aborting the run.
  bool require_feasible = true;
};

inline void check_feasible_normalized(std::span<const double> bandwidths,
                                      const PlatformSpec& platform, std::size_t step = 0) {
  const double upper = 1.0 / platform.cores;
  for (std::size_t i = 0; i < bandwidths.size(); ++i)
    if (!(bandwidths[i] >= -kSumTolerance && bandwidths[i] <= upper + kSumTolerance))
      throw InvariantError("bandwidth of app " + std::to_string(i) + " outside [0, 1/cores]", step);
  if (total(bandwidths) > platform.max_total_bandwidth + kSumTolerance)
    throw InvariantError("sum of bandwidths exceeds the assignable total", step);
}

// Global cap below 1: remove the excess from apps already clipped at 1/kappa
// first (proportionally among them), then proportionally from the rest.
inline void enforce_total_cap(std::vector<double>& w, std::vector<bool>& hit,
                              const std::vector<bool>& upper_clipped, double cap) {
  double excess = total(w) - cap;
  if (excess <= 0.0) return;
  double clipped_sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (upper_clipped[i]) clipped_sum += w[i];
  if (clipped_sum > 0.0) {
    const double take = std::min(excess, clipped_sum);
    const double keep = 1.0 - take / clipped_sum;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (upper_clipped[i]) {
        w[i] *= keep;
        hit[i] = true;
      }
    excess -= take;
  }
  if (excess <= 0.0) return;
  double rest = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!upper_clipped[i]) rest += w[i];
  if (rest <= 0.0) return;
  const double keep = 1.0 - excess / rest;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!upper_clipped[i] && w[i] > 0.0) {
      w[i] *= keep;
      hit[i] = true;
    }
}

// One RM update: v_i <- Pi_[0, 1/kappa](v_i + eps F_i), plus the cap
// extension when max_total_bandwidth < 1.
inline RmUpdateResult rm_step(const SystemState& state, std::span<const double> matchings,
                              std::span<const ApplicationSpec> specs, const PlatformSpec& platform,
                              RmStepOptions options = {}) {
  const std::size_t n = state.size();
  if (matchings.size() != n || specs.size() != n)
    throw ValidationError("rm_step: state, matchings and specs differ in length");
  if (options.require_feasible) check_feasible_normalized(state.bandwidths, platform);

  const auto weights = weights_of(specs);
  RmUpdateResult out;
  out.observed_fairness = fairness_vector(matchings, state.bandwidths, weights);
  out.new_bandwidths.resize(n);

  const double upper = 1.0 / platform.cores;
  std::vector<bool> hit(n, false), upper_clipped(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double w = state.bandwidths[i] + platform.step * out.observed_fairness[i];
    if (w < 0.0) {
      w = 0.0;
      hit[i] = true;
    } else if (w > upper) {
      w = upper;
      hit[i] = true;
      upper_clipped[i] = true;
    }
    out.new_bandwidths[i] = w;
  }
  if (platform.max_total_bandwidth < 1.0)
    enforce_total_cap(out.new_bandwidths, hit, upper_clipped, platform.max_total_bandwidth);

  for (std::size_t i = 0; i < n; ++i)
    if (hit[i]) out.projections_hit.push_back(i);
  out.unused = 1.0 - total(out.new_bandwidths);
  return out;
}

// s <- Pi_S[s + eps Y].
inline double app_step_sync(double service, double observation, double step,
                            const ServiceDomain& domain) {
  return domain.project(service + step * observation);
}

// Compensated asynchronous update: s <- Pi_S[s + eps N Y'], N the number of RM
// updates between this application update and the next.
inline double app_step_async(double service, double raw_observation, int rm_updates, double step,
                             const ServiceDomain& domain) {
  if (rm_updates < 1)
    throw ValidationError("app_step_async: N must be >= 1 (the RM updates at least once per "
                          "application update)");
  return domain.project(service + step * (static_cast<double>(rm_updates) * raw_observation));
}

}  // namespace bwshare
