#pragma once

// Post-run checks over trajectories: piecewise-constant interpolation,
// sup-deviation between paths, invariant sweeps and convergence reports.

#include <bwshare/bounds.hpp>
#include <bwshare/reference.hpp>
#include <bwshare/trajectory.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwshare {

enum class PathField { service, bandwidth };

struct InterpolatedPath {
  std::vector<std::string> apps;
  std::vector<StepPath> paths;  // parallel to apps

  const StepPath& of(const std::string& app) const {
    for (std::size_t i = 0; i < apps.size(); ++i)
      if (apps[i] == app) return paths[i];
    throw ValidationError("path: unknown application '" + app + "'");
  }
  double at(const std::string& app, double t) const { return of(app).at(t); }
};

inline InterpolatedPath interpolate(const Trajectory& tr, PathField field) {
  if (tr.empty()) throw ValidationError("interpolate: empty trajectory");
  InterpolatedPath out;
  out.apps = tr.app_ids;
  out.paths.resize(out.apps.size());
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < out.apps.size(); ++i) slot[out.apps[i]] = i;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < tr.instants(); ++k) {
    std::vector<double> row(out.apps.size(), nan);
    for (const auto& s : tr.at(k))
      row[slot.at(s.app)] = field == PathField::service ? s.service : s.bandwidth;
    for (std::size_t i = 0; i < row.size(); ++i) {
      auto& p = out.paths[i];
      // Only store breakpoints where the value changes (NaN compares unequal to itself).
      const bool same = !p.values.empty() &&
                        (p.values.back() == row[i] || (std::isnan(p.values.back()) && std::isnan(row[i])));
      if (!same) {
        p.breakpoints.push_back(tr.times[k]);
        p.values.push_back(row[i]);
      }
    }
  }
  return out;
}

// sup over [0, horizon] of |a(t) - b(t)|, evaluated on the merged breakpoint
// grid. Points where both are undefined are skipped; one-sided undefined gives inf.
inline double sup_deviation(const StepPath& a, const StepPath& b, double horizon) {
  std::vector<double> grid;
  grid.reserve(a.breakpoints.size() + b.breakpoints.size() + 1);
  grid.push_back(0.0);
  for (double t : a.breakpoints) if (t <= horizon) grid.push_back(t);
  for (double t : b.breakpoints) if (t <= horizon) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double sup = 0.0;
  for (double t : grid) {
    const double x = a.at(t), y = b.at(t);
    if (std::isnan(x) && std::isnan(y)) continue;
    if (std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::infinity();
    sup = std::max(sup, std::abs(x - y));
  }
  return sup;
}

inline std::vector<double> sup_deviation_per_app(const InterpolatedPath& a,
                                                 const InterpolatedPath& b, double horizon) {
  std::vector<std::string> sa = a.apps, sb = b.apps;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) throw ValidationError("sup_deviation: paths cover different application sets");
  std::vector<double> out;
  out.reserve(a.apps.size());
  for (std::size_t i = 0; i < a.apps.size(); ++i)
    out.push_back(sup_deviation(a.paths[i], b.of(a.apps[i]), horizon));
  return out;
}

inline double sup_deviation(const InterpolatedPath& a, const InterpolatedPath& b, double horizon) {
  const auto per = sup_deviation_per_app(a, b, horizon);
  return per.empty() ? 0.0 : *std::max_element(per.begin(), per.end());
}

// ---------------------------------------------------------------------------
// Invariant sweep

struct SweepOptions {
  std::optional<double> zeta;  // balance threshold to check containment against
  std::optional<std::vector<double>> target;  // fixed point for the W checks, in app_ids order
  double feasibility_tol = kSumTolerance;
};

struct InvariantReport {
  bool feasibility_ok = true;
  std::optional<double> first_infeasible;
  bool starvation_ok = true;
  std::optional<double> first_starved;
  bool balance_ok = true;
  std::optional<double> balance_entry;  // first instant after which every v <= zeta
  double max_sum = 0.0;
  double min_bandwidth = std::numeric_limits<double>::infinity();
  // Sum identity on consecutive instants where no projection fires.
  std::size_t identity_checked = 0;
  double identity_max_error = 0.0;
  // W checks, present when a target is given.
  std::optional<double> transient_end;  // tau*: all phi < 0 from here on
  std::optional<double> lyapunov_monotone_after;
  double lyapunov_max_relative_increase = 0.0;
  std::optional<double> lyapunov_final;
};

namespace detail {

inline const ApplicationSpec* spec_for(std::span<const ApplicationSpec> specs,
                                       const std::string& id) {
  for (const auto& s : specs)
    if (s.id == id) return &s;
  return nullptr;
}

}  // namespace detail

inline InvariantReport sweep_invariants(const Trajectory& tr, std::span<const ApplicationSpec> specs,
                                        const PlatformSpec& platform,
                                        const TheoreticalBounds& bounds,
                                        const SweepOptions& opt = {}) {
  (void)bounds;
  InvariantReport rep;
  if (tr.empty()) return rep;
  const double eps = platform.step;
  const double top = 1.0 / platform.cores;

  // Starvation applies to apps whose first sample sits above eps.
  std::map<std::string, bool> guarded;
  for (std::size_t k = 0; k < tr.instants(); ++k)
    for (const auto& s : tr.at(k))
      if (!guarded.count(s.app)) guarded[s.app] = s.bandwidth > eps;

  for (std::size_t k = 0; k < tr.instants(); ++k) {
    const auto row = tr.at(k);
    const double t = tr.times[k];
    double sum = 0.0;
    bool ok = true;
    for (const auto& s : row) {
      sum += s.bandwidth;
      rep.min_bandwidth = std::min(rep.min_bandwidth, s.bandwidth);
      if (s.bandwidth < -opt.feasibility_tol || s.bandwidth > top + opt.feasibility_tol) ok = false;
      if (guarded[s.app] && !(s.bandwidth > eps) && rep.starvation_ok) {
        rep.starvation_ok = false;
        rep.first_starved = t;
      }
    }
    rep.max_sum = std::max(rep.max_sum, sum);
    if (sum > platform.max_total_bandwidth + opt.feasibility_tol) ok = false;
    if (!ok && rep.feasibility_ok) {
      rep.feasibility_ok = false;
      rep.first_infeasible = t;
    }

    // sum(v + eps F) - 1 = (sum v - 1)(1 + eps S) whenever nothing is clipped.
    if (k + 1 < tr.instants()) {
      const auto nxt = tr.at(k + 1);
      bool same = nxt.size() == row.size();
      for (std::size_t i = 0; same && i < row.size(); ++i) same = row[i].app == nxt[i].app;
      if (same) {
        double raw_sum = 0.0, S = 0.0, next_sum = 0.0;
        bool clipped = false;
        for (std::size_t i = 0; i < row.size(); ++i) {
          const auto* sp = detail::spec_for(specs, row[i].app);
          if (!sp) throw ValidationError("sweep_invariants: no spec for '" + row[i].app + "'");
          const double w = row[i].bandwidth + eps * row[i].fairness;
          if (w < 0.0 || w > top) clipped = true;
          raw_sum += w;
          S += sp->weight * std::min(row[i].matching, 0.0);
          next_sum += nxt[i].bandwidth;
        }
        if (platform.max_total_bandwidth < 1.0 && raw_sum > platform.max_total_bandwidth)
          clipped = true;
        if (!clipped) {
          const double predicted = (sum - 1.0) * (1.0 + eps * S);
          rep.identity_max_error = std::max(rep.identity_max_error, std::abs((next_sum - 1.0) - predicted));
          ++rep.identity_checked;
        }
      }
    }
  }

  if (opt.zeta) {
    std::optional<std::size_t> entry;
    for (std::size_t k = tr.instants(); k-- > 0;) {
      bool inside = true;
      for (const auto& s : tr.at(k)) inside = inside && s.bandwidth <= *opt.zeta;
      if (!inside) break;
      entry = k;
    }
    rep.balance_ok = entry.has_value() && *entry + 1 < tr.instants();
    if (entry) rep.balance_entry = tr.times[*entry];
  }

  if (opt.target) {
    const auto& target = *opt.target;
    // tau*: first instant after which every matching stays negative.
    std::optional<std::size_t> start;
    for (std::size_t k = tr.instants(); k-- > 0;) {
      bool neg = true;
      for (const auto& s : tr.at(k)) neg = neg && s.matching < 0.0;
      if (!neg) break;
      start = k;
    }
    auto w_at = [&](std::size_t k) {
      std::vector<double> v(tr.app_ids.size(), 0.0);
      for (const auto& s : tr.at(k)) {
        const auto it = std::find(tr.app_ids.begin(), tr.app_ids.end(), s.app);
        v[static_cast<std::size_t>(it - tr.app_ids.begin())] = s.bandwidth;
      }
      return lyapunov_value(v, target);
    };
    rep.lyapunov_final = w_at(tr.instants() - 1);
    if (start) {
      rep.transient_end = tr.times[*start];
      double prev = w_at(*start);
      for (std::size_t k = *start + 1; k < tr.instants(); ++k) {
        const double cur = w_at(k);
        if (prev > 0.0)
          rep.lyapunov_max_relative_increase =
              std::max(rep.lyapunov_max_relative_increase, (cur - prev) / prev);
        else if (cur > 0.0)
          rep.lyapunov_max_relative_increase = std::numeric_limits<double>::infinity();
        prev = cur;
      }
      if (rep.lyapunov_max_relative_increase <= 1e-9) rep.lyapunov_monotone_after = rep.transient_end;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence report

struct ConvergenceReport {
  bool settled = false;
  std::optional<double> settle_time;
  std::vector<double> final_residuals;  // |Phi_i| at the last instant, app_ids order
  std::vector<double> final_errors;     // |v_i - target_i| at the last instant
};

inline constexpr std::size_t kSettleWindow = 100;

inline ConvergenceReport convergence_report(const Trajectory& tr, std::span<const double> target,
                                            double tol, std::size_t window = kSettleWindow) {
  if (!(tol > 0.0)) throw ValidationError("convergence_report: tol must be > 0");
  if (target.size() != tr.app_ids.size())
    throw ValidationError("convergence_report: target does not match the application set");
  ConvergenceReport rep;
  if (tr.empty()) return rep;
  auto error_at = [&](std::size_t k) {
    double e = 0.0;
    for (const auto& s : tr.at(k)) {
      const auto it = std::find(tr.app_ids.begin(), tr.app_ids.end(), s.app);
      e = std::max(e, std::abs(s.bandwidth - target[static_cast<std::size_t>(it - tr.app_ids.begin())]));
    }
    return e;
  };
  std::optional<std::size_t> from;
  for (std::size_t k = tr.instants(); k-- > 0;) {
    if (error_at(k) > tol) break;
    from = k;
  }
  const std::size_t last = tr.instants() - 1;
  const std::size_t need = std::min(window, tr.instants());
  rep.settled = from && last - *from + 1 >= need;
  if (rep.settled) rep.settle_time = tr.times[*from];

  rep.final_residuals.assign(tr.app_ids.size(), std::numeric_limits<double>::quiet_NaN());
  rep.final_errors.assign(tr.app_ids.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& s : tr.at(last)) {
    const auto i = static_cast<std::size_t>(
        std::find(tr.app_ids.begin(), tr.app_ids.end(), s.app) - tr.app_ids.begin());
    rep.final_residuals[i] = std::abs(s.fairness);
    rep.final_errors[i] = std::abs(s.bandwidth - target[i]);
  }
  return rep;
}

inline ConvergenceReport convergence_report(const Trajectory& tr, const StationaryPoint& target,
                                            double tol, std::size_t window = kSettleWindow) {
  return convergence_report(tr, target.bandwidths, tol, window);
}

}  // namespace bwshare
