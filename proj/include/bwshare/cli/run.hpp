#pragma once

// Run orchestration and bundle comparison for the command-line tool.

#include <bwshare/analysis.hpp>
#include <bwshare/cli/config.hpp>
#include <bwshare/cli/output.hpp>
#include <bwshare/cli/presets.hpp>
#include <bwshare/reference.hpp>
#include <bwshare/simkernel.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace bwshare::cli {

namespace fs = std::filesystem;

inline constexpr double kSettleTolerance = 0.02;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline Scenario parse_scenario(const fs::path& path) { return parse_scenario_text(read_file(path)); }

// A preset name or a scenario file.
inline Scenario load_scenario(const std::string& what) {
  if (auto p = preset(what)) return *p;
  return parse_scenario(what);
}

struct RunOutcome {
  Scenario scenario;
  Trajectory trajectory;
  TheoreticalBounds bounds;
  InvariantReport invariants;
  std::vector<double> target;  // fair shares of the apps live at the end, app_ids order
  ConvergenceReport convergence;
  std::vector<std::string> fairness_violations;  // final |v - target| above tolerance
  bool strict_failed = false;
};

inline std::vector<double> final_fair_share(const Trajectory& tr,
                                            std::span<const ApplicationSpec> specs, int cores) {
  std::vector<double> target(tr.app_ids.size(), 0.0);
  if (tr.empty()) return target;
  std::vector<double> w;
  std::vector<std::size_t> idx;
  for (const auto& s : tr.at(tr.instants() - 1)) {
    for (const auto& a : specs)
      if (a.id == s.app) w.push_back(a.weight);
    idx.push_back(static_cast<std::size_t>(
        std::find(tr.app_ids.begin(), tr.app_ids.end(), s.app) - tr.app_ids.begin()));
  }
  if (w.empty()) return target;
  const auto share = asymptotic_fair_share(w, cores);
  for (std::size_t k = 0; k < idx.size(); ++k) target[idx[k]] = share[k];
  return target;
}

inline RunOutcome run(const Scenario& sc) {
  RunOutcome out;
  out.scenario = sc;
  out.trajectory = run_scenario(sc);
  const auto specs = all_apps(sc);
  out.bounds = compute_bounds(specs, sc.platform, out.trajectory.n_bar);
  out.target = final_fair_share(out.trajectory, specs, sc.platform.cores);
  SweepOptions opt;
  opt.target = out.target;
  out.invariants = sweep_invariants(out.trajectory, specs, sc.platform, out.bounds, opt);
  out.convergence = convergence_report(out.trajectory, out.target, kSettleTolerance);
  for (std::size_t i = 0; i < out.trajectory.app_ids.size(); ++i)
    if (out.convergence.final_errors[i] > kSettleTolerance)
      out.fairness_violations.push_back(out.trajectory.app_ids[i]);
  out.strict_failed =
      sc.strict_bounds && !(out.invariants.feasibility_ok && out.invariants.starvation_ok);
  return out;
}

inline json summary_json(const RunOutcome& r) {
  json conv{{"target", r.target},
            {"tolerance", kSettleTolerance},
            {"window", kSettleWindow},
            {"settled", r.convergence.settled},
            {"settle_time", opt(r.convergence.settle_time)},
            {"final_residuals", r.convergence.final_residuals},
            {"final_errors", r.convergence.final_errors}};
  return json{{"scenario", to_json(r.scenario)},
              {"mode", to_string(r.trajectory.mode)},
              {"apps", r.trajectory.app_ids},
              {"instants", r.trajectory.instants()},
              {"bounds", to_json(r.bounds)},
              {"invariants", to_json(r.invariants)},
              {"convergence", conv},
              {"fairness_violations", r.fairness_violations},
              {"strict_failed", r.strict_failed},
              {"trajectory", "trajectory.csv"}};
}

struct OutputBundle {
  fs::path trajectory_path;
  fs::path summary_path;
};

inline OutputBundle write_bundle(const RunOutcome& r, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  OutputBundle b{dir / "trajectory.csv", dir / "summary.json"};
  std::ostringstream csv;
  write_trajectory_csv(csv, r.trajectory);
  write_file(b.trajectory_path, csv.str());
  write_file(b.summary_path, summary_json(r).dump(2) + "\n");
  return b;
}

struct LoadedBundle {
  Scenario scenario;
  TheoreticalBounds bounds;
  Trajectory trajectory;
};

inline LoadedBundle load_bundle(const fs::path& dir) {
  LoadedBundle b;
  json summary;
  try {
    summary = json::parse(read_file(dir / "summary.json"));
    b.scenario = scenario_from_json(summary.at("scenario"));
    b.bounds = bounds_from_json(summary.at("bounds"));
  } catch (const json::exception& e) {
    throw ValidationError("summary.json in '" + dir.string() + "': " + e.what());
  }
  std::istringstream csv(read_file(dir / "trajectory.csv"));
  b.trajectory = read_trajectory_csv(csv);
  b.trajectory.step = b.scenario.platform.step;
  b.trajectory.rm_period = b.scenario.rm_period;
  b.trajectory.n_bar = b.bounds.n_bar;
  return b;
}

struct CompareReport {
  std::vector<std::string> apps;
  std::vector<double> deviations;  // sup |s_a - s_b| per app
  EquivalenceBound bound;
  std::vector<bool> within;
  bool all_within() const {
    return std::all_of(within.begin(), within.end(), [](bool b) { return b; });
  }
};

inline CompareReport compare(const LoadedBundle& a, const LoadedBundle& b) {
  if (a.scenario.platform.step != b.scenario.platform.step ||
      a.scenario.rm_period != b.scenario.rm_period)
    throw ValidationError("compare: bundles come from scenarios with different step or RM period");
  const auto pa = interpolate(a.trajectory, PathField::service);
  const auto pb = interpolate(b.trajectory, PathField::service);
  const double horizon = std::min(a.trajectory.times.back(), b.trajectory.times.back());
  CompareReport r;
  r.apps = pa.apps;
  r.deviations = sup_deviation_per_app(pa, pb, horizon);
  r.bound = equivalence_bound(a.scenario.platform.step, std::max(a.bounds.ell, b.bounds.ell),
                              std::max(a.bounds.n_bar, b.bounds.n_bar));
  for (double d : r.deviations) r.within.push_back(d <= r.bound.combined());
  return r;
}

inline json to_json(const CompareReport& r) {
  json apps = json::array();
  for (std::size_t i = 0; i < r.apps.size(); ++i)
    apps.push_back({{"app", r.apps[i]}, {"sup_deviation", r.deviations[i]}, {"within_bound", r.within[i]}});
  return json{{"apps", apps},
              {"bound",
               {{"async_vs_fictitious", r.bound.async_vs_fictitious},
                {"fictitious_vs_sync", r.bound.fictitious_vs_sync},
                {"combined", r.bound.combined()}}},
              {"all_within", r.all_within()}};
}

}  // namespace bwshare::cli
