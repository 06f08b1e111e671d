#pragma once

// Reference oracles: the ODE limit of the coupled recursions, its stationary
// points, balance thresholds, the Lyapunov function and its derivative terms,
// and the equivalence bounds between asynchronous and synchronous updates.
// The vector field here is evaluated independently of the simulator code
// path so that the two can be checked against each other.

#include <bwshare/adaptation.hpp>
#include <bwshare/bounds.hpp>
#include <bwshare/core.hpp>
#include <bwshare/timeline.hpp>
#include <bwshare/trajectory.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace bwshare {

// ---------------------------------------------------------------------------
// ODE

// phi_i(s_i, kappa v_i): nominal form where the model is exactly nominal,
// the affine-requirement form D kappa v / (a s + b) - 1 otherwise.
inline double reference_matching(const ApplicationSpec& spec, double service, double bandwidth,
                                 int cores) {
  const double v = cores * bandwidth;
  const auto& m = spec.model;
  if (is_nominal(m)) return effective_beta(m) * v / service - 1.0;
  return m.deadline * v / (m.a * service + m.b) - 1.0;
}

// Direct O(n^2) evaluation of the fairness measure.
inline std::vector<double> reference_fairness(std::span<const double> phi,
                                              std::span<const double> bandwidths,
                                              std::span<const double> weights) {
  const std::size_t n = phi.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double others = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others += weights[j] * std::min(phi[j], 0.0);
    out[i] = -(1.0 - bandwidths[i]) * weights[i] * std::min(phi[i], 0.0) + bandwidths[i] * others;
  }
  return out;
}

// Projection onto [0, 1/kappa]^n followed, when the cap is below 1, by removal
// of the excess: first from coordinates clipped at the top, then from the others,
// proportionally in both groups.
inline void reference_project(std::vector<double>& v, int cores, double cap) {
  const double top = 1.0 / cores;
  std::vector<char> at_top(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) v[i] = 0.0;
    if (v[i] > top) {
      v[i] = top;
      at_top[i] = 1;
    }
  }
  if (!(cap < 1.0)) return;
  double sum_top = 0.0, sum_rest = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) (at_top[i] ? sum_top : sum_rest) += v[i];
  double excess = sum_top + sum_rest - cap;
  if (excess <= 0.0) return;
  if (sum_top > 0.0) {
    const double cut = std::min(excess, sum_top);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (at_top[i]) v[i] *= 1.0 - cut / sum_top;
    excess -= cut;
  }
  if (excess > 0.0 && sum_rest > 0.0)
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!at_top[i]) v[i] *= 1.0 - excess / sum_rest;
}

namespace detail {

inline void push_ode_sample(Trajectory& tr, double t, std::span<const ApplicationSpec> specs,
                            const std::vector<double>& s, const std::vector<double>& v,
                            const std::vector<double>& phi, const std::vector<double>& Phi) {
  tr.begin_instant(t);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double d = deadline_of(specs[i].model, s[i]);
    const double r = phi[i] > -1.0 ? d / (phi[i] + 1.0) : std::numeric_limits<double>::infinity();
    tr.push(Sample{t, specs[i].id, s[i], v[i], d, r, phi[i], Phi[i]});
  }
  tr.end_instant();
}

}  // namespace detail

// Explicit Euler on (ds/dtau, dv/dtau) = (phi, Phi), each step projected onto
// the service domains and the bandwidth box. One sample every `sample_every`
// steps, plus the final step.
inline Trajectory integrate_ode_steps(const SystemState& initial,
                                      std::span<const ApplicationSpec> specs,
                                      const PlatformSpec& platform, double tau_step,
                                      std::size_t steps, std::size_t sample_every = 1) {
  if (!(tau_step > 0.0)) throw ValidationError("integrate_ode: tau_step must be > 0");
  if (initial.size() != specs.size() || initial.bandwidths.size() != specs.size())
    throw ValidationError("integrate_ode: state and specs differ in length");
  if (sample_every == 0) sample_every = 1;

  Trajectory tr;
  tr.mode = RunMode::ode_reference;
  tr.rm_period = tau_step;
  tr.cores = platform.cores;
  tr.step = tau_step;
  for (const auto& a : specs) tr.note_app(a.id);

  const auto w = weights_of(specs);
  std::vector<double> s = initial.services, v = initial.bandwidths;
  std::vector<double> phi(specs.size());
  for (std::size_t k = 0;; ++k) {
    for (std::size_t i = 0; i < specs.size(); ++i)
      phi[i] = reference_matching(specs[i], s[i], v[i], platform.cores);
    const auto Phi = reference_fairness(phi, v, w);
    if (k % sample_every == 0 || k == steps)
      detail::push_ode_sample(tr, static_cast<double>(k) * tau_step, specs, s, v, phi, Phi);
    if (k == steps) break;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      s[i] = domain_of(specs[i]).project(s[i] + tau_step * phi[i]);
      v[i] += tau_step * Phi[i];
    }
    reference_project(v, platform.cores, platform.max_total_bandwidth);
  }
  return tr;
}

inline Trajectory integrate_ode(const SystemState& initial, std::span<const ApplicationSpec> specs,
                                const PlatformSpec& platform, double tau_step, double horizon,
                                double sample_period = 0.0) {
  if (!(tau_step > 0.0)) throw ValidationError("integrate_ode: tau_step must be > 0");
  if (!(horizon >= 0.0)) throw ValidationError("integrate_ode: horizon must be >= 0");
  const auto steps = static_cast<std::size_t>(std::floor(horizon / tau_step + 1e-9));
  const auto every = sample_period > 0.0
                         ? static_cast<std::size_t>(std::max(1.0, std::round(sample_period / tau_step)))
                         : std::size_t{1};
  return integrate_ode_steps(initial, specs, platform, tau_step, steps, every);
}

// ---------------------------------------------------------------------------
// Stationary points

struct StationaryPoint {
  std::vector<double> services;
  std::vector<double> bandwidths;
  std::vector<double> residuals;  // Phi_i at the point
  std::vector<std::size_t> capped;
  std::size_t iterations = 0;
};

// min{1/kappa, lambda_i / sum lambda}.
inline std::vector<double> asymptotic_fair_share(std::span<const double> weights, int cores) {
  if (weights.empty()) throw ValidationError("asymptotic_fair_share: no weights");
  if (cores < 1) throw ValidationError("asymptotic_fair_share: cores must be >= 1");
  const double sum = total(weights);
  std::vector<double> out;
  out.reserve(weights.size());
  for (double l : weights) {
    if (!(l > 0.0 && l <= 1.0)) throw ValidationError("asymptotic_fair_share: weight outside (0, 1]");
    out.push_back(std::min(1.0 / cores, l / sum));
  }
  return out;
}

// Damped successive substitution of v_i = min{1/kappa, l_i [phi_i]^- / sum_j l_j [phi_j]^-}
// at s = s_min. The damping factor halves whenever the residual grows. The
// global bandwidth cap is not part of this map.
inline StationaryPoint solve_stationary_point(std::span<const ApplicationSpec> specs,
                                              const PlatformSpec& platform, double tol = 1e-12,
                                              std::size_t max_iters = 100000) {
  if (specs.empty()) throw ValidationError("solve_stationary_point: no applications");
  if (!(tol > 0.0)) throw ValidationError("solve_stationary_point: tol must be > 0");
  const std::size_t n = specs.size();
  const int kappa = platform.cores;
  const double top = 1.0 / kappa;
  const auto w = weights_of(specs);

  StationaryPoint sp;
  for (const auto& a : specs) sp.services.push_back(a.min_service);

  auto map = [&](const std::vector<double>& v) {
    std::vector<double> g(n);
    double S = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = w[i] * std::min(reference_matching(specs[i], sp.services[i], v[i], kappa), 0.0);
      S += g[i];
    }
    std::vector<double> out(v);
    if (S < 0.0)
      for (std::size_t i = 0; i < n; ++i) out[i] = std::min(top, g[i] / S);
    return out;
  };
  auto gap = [](const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
  };

  std::vector<double> v = asymptotic_fair_share(w, kappa);
  double damping = 1.0;
  auto tv = map(v);
  double res = gap(tv, v);
  std::size_t it = 0;
  while (res > tol) {
    if (++it > max_iters)
      throw ConvergenceError("solve_stationary_point: no convergence within max_iters", v, res);
    std::vector<double> cand(n);
    for (std::size_t i = 0; i < n; ++i) cand[i] = v[i] + damping * (tv[i] - v[i]);
    auto tc = map(cand);
    const double rc = gap(tc, cand);
    if (rc > res && damping > 1e-6) {
      damping *= 0.5;
      continue;
    }
    v = std::move(cand);
    tv = std::move(tc);
    res = rc;
  }
  sp.iterations = it;
  sp.bandwidths = v;
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i)
    phi[i] = reference_matching(specs[i], sp.services[i], v[i], kappa);
  sp.residuals = reference_fairness(phi, v, w);
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] >= top - 1e-12) sp.capped.push_back(i);
  return sp;
}

// ---------------------------------------------------------------------------
// Balance thresholds

struct BalanceThresholds {
  double zeta = 0.0;
  double gamma_star = 0.0;
  long long n1 = 0;
  long long n2 = 0;
  long long n_star = 0;
};

inline double robust_floor(double x) { return std::floor(x + 1e-9); }
inline double robust_ceil(double x) { return std::ceil(x - 1e-9); }

// n1 = ceil(floor((1 - z) / z) + (-2 + z) / (z g l)),
// n2 = ceil(1 + floor((1 - z) / z) + (-2 + z - eps L) / ((z - eps L) g l)).
inline BalanceThresholds balance_thresholds(double zeta, double gamma_star, double lambda_min,
                                            double step, double L) {
  if (!(zeta > 0.0 && zeta < 1.0)) throw ValidationError("balance_thresholds: zeta must be in (0, 1)");
  if (!(gamma_star < 0.0))
    throw ValidationError("balance_thresholds: gamma* >= 0 at this zeta (zeta too large)");
  if (!(zeta > step * L))
    throw ValidationError("balance_thresholds: zeta must exceed step * L");
  BalanceThresholds b;
  b.zeta = zeta;
  b.gamma_star = gamma_star;
  const double head = robust_floor((1.0 - zeta) / zeta);
  b.n1 = static_cast<long long>(robust_ceil(head + (-2.0 + zeta) / (zeta * gamma_star * lambda_min)));
  const double ez = zeta - step * L;
  b.n2 = static_cast<long long>(
      robust_ceil(1.0 + head + (-2.0 + zeta - step * L) / (ez * gamma_star * lambda_min)));
  b.n_star = std::max(b.n1, b.n2);
  return b;
}

// gamma* = max_i (rho_i kappa zeta - 1), rho_i the demand ratio at s_min.
inline BalanceThresholds balance_thresholds(double zeta, std::span<const ApplicationSpec> specs,
                                            const PlatformSpec& platform,
                                            const TheoreticalBounds& bounds) {
  if (specs.empty()) throw ValidationError("balance_thresholds: no applications");
  double g = -std::numeric_limits<double>::infinity();
  for (const auto& a : specs) g = std::max(g, demand_ratio(a) * platform.cores * zeta - 1.0);
  return balance_thresholds(zeta, g, bounds.lambda_min, platform.step, bounds.L);
}

// ---------------------------------------------------------------------------
// Lyapunov function

inline double lyapunov_value(std::span<const double> bandwidths, std::span<const double> target) {
  if (bandwidths.size() != target.size())
    throw ValidationError("lyapunov_value: vectors differ in length");
  double w = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = bandwidths[i] - target[i];
    w += d * d;
  }
  return 0.5 * w;
}

inline double lyapunov_value(std::span<const double> bandwidths, const StationaryPoint& target) {
  return lyapunov_value(bandwidths, target.bandwidths);
}

// Decomposition of dW/dtau at s = s* for nominal models in the regime where
// every phi_i < 0, with c_i = beta_i kappa / s_i* and d = v - v*:
//   I1 = -(sum l) |d|^2,  I2 = -sum l_i c_i d_i^2,
//   I3 = -sum_i d_i sum_j l_j c_j (v*_i v*_j - v_i v_j).
struct LyapunovTerms {
  double derivative = 0.0;  // sum_i d_i (Phi_i(v) - Phi_i(v*)), evaluated directly
  double i1 = 0.0, i2 = 0.0, i3 = 0.0;
  double bound_i2 = 0.0;  // max c |d|^2
  double bound_i3 = 0.0;  // max c (n sup v + 1) |d|^2
};

inline LyapunovTerms lyapunov_terms(std::span<const double> bandwidths,
                                    std::span<const double> target,
                                    std::span<const ApplicationSpec> specs,
                                    const PlatformSpec& platform,
                                    std::optional<double> sup_bandwidth = {}) {
  const std::size_t n = specs.size();
  if (bandwidths.size() != n || target.size() != n)
    throw ValidationError("lyapunov_terms: vectors differ in length");
  const int kappa = platform.cores;
  const auto w = weights_of(specs);
  std::vector<double> c(n), phi(n), phi_star(n), s_star(n);
  for (std::size_t i = 0; i < n; ++i) {
    s_star[i] = specs[i].min_service;
    c[i] = demand_ratio(specs[i]) * kappa;
    phi[i] = reference_matching(specs[i], s_star[i], bandwidths[i], kappa);
    phi_star[i] = reference_matching(specs[i], s_star[i], target[i], kappa);
  }
  const auto F = reference_fairness(phi, bandwidths, w);
  const auto F_star = reference_fairness(phi_star, target, w);

  LyapunovTerms t;
  double d2 = 0.0, cmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = bandwidths[i] - target[i];
    d2 += d * d;
    cmax = std::max(cmax, c[i]);
    t.derivative += d * (F[i] - F_star[i]);
    t.i2 -= w[i] * c[i] * d * d;
    double inner = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      inner += w[j] * c[j] * (target[i] * target[j] - bandwidths[i] * bandwidths[j]);
    t.i3 -= d * inner;
  }
  t.i1 = -total(w) * d2;
  const double sup_v =
      sup_bandwidth.value_or(*std::max_element(bandwidths.begin(), bandwidths.end()));
  t.bound_i2 = cmax * d2;
  t.bound_i3 = cmax * (static_cast<double>(n) * sup_v + 1.0) * d2;
  return t;
}

// ---------------------------------------------------------------------------
// Equivalence of asynchronous and synchronous updates

struct EquivalenceBound {
  double async_vs_fictitious = 0.0;  // eps l (3 N - 1)
  double fictitious_vs_sync = 0.0;   // eps N l
  double combined() const { return async_vs_fictitious + fictitious_vs_sync; }
};

inline EquivalenceBound equivalence_bound(double step, double ell, int n_bar) {
  if (!(step > 0.0)) throw ValidationError("equivalence_bound: step must be > 0");
  if (n_bar < 1) throw ValidationError("equivalence_bound: N_bar must be >= 1");
  return {step * ell * (3.0 * n_bar - 1.0), step * n_bar * ell};
}

// Open-loop service paths of one application driven by a common observation
// sequence y_m = Y'(t_m) given at every RM instant:
//   actual:     s(t_{k+1}) = Pi[s(t_k) + eps N(k) y_{m(t_k)}]   at application instants
//   fictitious: s'(t_{m+1}) = Pi[s'(t_m) + eps y_{psi(m)}],     y_{psi(m)} = 0 when psi(m) = 0
//   sync:       s''(t_{m+1}) = Pi[s''(t_m) + eps y_m]
struct EquivalencePaths {
  StepPath actual;
  StepPath fictitious;
  StepPath sync;
};

inline EquivalencePaths equivalence_paths(const AsyncTimeline& tl, std::size_t app,
                                          std::span<const double> observations, double initial,
                                          double step, const ServiceDomain& domain) {
  const std::size_t M = tl.rm_instants.size();
  if (observations.size() != M)
    throw ValidationError("equivalence_paths: one observation per RM instant is required");
  EquivalencePaths p;

  double s = initial;
  const auto& ts = tl.app_instants.at(app);
  for (std::size_t k = 0; k < ts.size() && ts[k] <= tl.horizon + tl.tol(); ++k) {
    p.actual.breakpoints.push_back(ts[k]);
    p.actual.values.push_back(s);
    const std::size_t m = tl.rm_index(ts[k]);
    s = domain.project(s + step * tl.updates_between(app, k) * observations[std::min(m, M - 1)]);
  }

  double sf = initial, ss = initial;
  for (std::size_t m = 0; m < M; ++m) {
    const double t = tl.rm_instants[m];
    p.fictitious.breakpoints.push_back(t);
    p.fictitious.values.push_back(sf);
    p.sync.breakpoints.push_back(t);
    p.sync.values.push_back(ss);
    const std::size_t psi = timeline_indices(tl, t, app).psi;
    sf = domain.project(sf + step * (psi == 0 ? 0.0 : observations[psi]));
    ss = domain.project(ss + step * observations[m]);
  }
  return p;
}

}  // namespace bwshare
