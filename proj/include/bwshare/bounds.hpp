#pragma once

// Closed-form constants used by the invariant checkers: the bound L on the
// observed fairness, the minimum weight, step-size guards and the bound on
// the application observation signal.

#include <bwshare/core.hpp>

#include <algorithm>
#include <span>

namespace bwshare {

struct TheoreticalBounds {
  double L = 1.0;           // sup |F_i|
  double lambda_min = 1.0;  // min_i lambda_i
  // Step below which starvation avoidance is guaranteed for this app set:
  // min(guard, lambda / ((max_i rho_i kappa + n) (L + 1))).
  double epsilon_star = 0.0;
  double epsilon_guard = 0.0;  // 1 / ((L + 1) kappa)
  double ell = 1.0;            // sup |Y'| for Y' = f
  int n_bar = 1;

  friend bool operator==(const TheoreticalBounds&, const TheoreticalBounds&) = default;
};

// |F_i| <= (1 - v_i) l_i + v_i sum_{j != i} l_j <= max(1, sum_{j != i} l_j).
inline double fairness_bound(std::span<const double> weights) {
  const double sum = total(weights);
  double L = 1.0;
  for (double w : weights) L = std::max(L, sum - w);
  return L;
}

inline double epsilon_star_bound(const TheoreticalBounds& bounds, int cores) {
  return 1.0 / ((bounds.L + 1.0) * cores);
}

// Largest rho_i kappa over the matching models; rho_i = sup (f + 1) / v.
inline double max_demand(std::span<const ApplicationSpec> specs, int cores) {
  double r = 0.0;
  for (const auto& s : specs) r = std::max(r, demand_ratio(s) * cores);
  return r;
}

// f in [-1, rho kappa - 1], so |f| <= max(1, (rho kappa - 1)^+ + 1).
inline double observation_bound(std::span<const ApplicationSpec> specs, int cores) {
  double top = 0.0;
  for (const auto& s : specs) top = std::max(top, demand_ratio(s) * cores - 1.0);
  return std::max(1.0, std::max(top, 0.0) + 1.0);
}

inline TheoreticalBounds compute_bounds(std::span<const ApplicationSpec> specs,
                                        const PlatformSpec& platform, int n_bar = 1) {
  if (specs.empty()) throw ValidationError("compute_bounds: no applications");
  TheoreticalBounds b;
  const auto w = weights_of(specs);
  b.L = fairness_bound(w);
  b.lambda_min = *std::min_element(w.begin(), w.end());
  b.epsilon_guard = epsilon_star_bound(b, platform.cores);
  const double n = static_cast<double>(specs.size());
  b.epsilon_star = std::min(
      b.epsilon_guard, b.lambda_min / ((max_demand(specs, platform.cores) + n) * (b.L + 1.0)));
  b.ell = observation_bound(specs, platform.cores);
  b.n_bar = n_bar;
  return b;
}

}  // namespace bwshare
