#pragma once

// Trajectory CSV and summary JSON.

#include <bwshare/analysis.hpp>
#include <bwshare/bounds.hpp>
#include <bwshare/cli/config.hpp>
#include <bwshare/trajectory.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace bwshare::cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kCsvHeader =
    "time,app,service,bandwidth,deadline,response,matching,fairness";

inline void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  out << kCsvHeader << '\n';
  for (const auto& s : tr.samples)
    out << format_double(s.time) << ',' << s.app << ',' << format_double(s.service) << ','
        << format_double(s.bandwidth) << ',' << format_double(s.deadline) << ','
        << format_double(s.response) << ',' << format_double(s.matching) << ','
        << format_double(s.fairness) << '\n';
}

inline Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw ValidationError("trajectory csv: missing or unexpected header");
  std::vector<Sample> flat;
  std::size_t no = 1;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (cells.size() != 8)
      throw ValidationError("trajectory csv line " + std::to_string(no) + ": expected 8 columns");
    const auto key = "line " + std::to_string(no);
    flat.push_back(Sample{parse_double(cells[0], key), cells[1], parse_double(cells[2], key),
                          parse_double(cells[3], key), parse_double(cells[4], key),
                          parse_double(cells[5], key), parse_double(cells[6], key),
                          parse_double(cells[7], key)});
  }
  return Trajectory::from_samples(std::move(flat));
}

// ---------------------------------------------------------------------------
// JSON

template <class T>
json opt(const std::optional<T>& x) {
  return x ? json(*x) : json(nullptr);
}

inline json to_json(const ApplicationSpec& a) {
  return json{{"id", a.id},
              {"weight", a.weight},
              {"min_service", a.min_service},
              {"max_service", opt(a.max_service)},
              {"initial_service", a.initial_service},
              {"initial_bandwidth", opt(a.initial_bandwidth)},
              {"update_jobs", a.update_jobs},
              {"job_period", opt(a.job_period)},
              {"model",
               {{"kind", to_string(a.model.kind)},
                {"beta", a.model.beta},
                {"alpha", a.model.alpha},
                {"a", a.model.a},
                {"b", a.model.b},
                {"deadline", a.model.deadline}}}};
}

inline json to_json(const Scenario& sc) {
  json apps = json::array();
  for (const auto& a : sc.apps) apps.push_back(to_json(a));
  json events = json::array();
  for (const auto& e : sc.events) {
    if (e.action == MembershipEvent::Action::join)
      events.push_back({{"time", e.time}, {"action", "join"}, {"app", to_json(e.app)}});
    else
      events.push_back({{"time", e.time}, {"action", "leave"}, {"app_id", e.app_id}});
  }
  return json{{"name", sc.name},
              {"mode", to_string(sc.mode)},
              {"rm_period", sc.rm_period},
              {"horizon", sc.horizon},
              {"strict_bounds", sc.strict_bounds},
              {"cold_start", sc.cold_start},
              {"platform",
               {{"cores", sc.platform.cores},
                {"step", sc.platform.step},
                {"match_tol", sc.platform.match_tol},
                {"max_total_bandwidth", sc.platform.max_total_bandwidth}}},
              {"apps", apps},
              {"events", events}};
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

inline ApplicationSpec app_from_json(const json& j) {
  ApplicationSpec a;
  a.id = j.at("id").get<std::string>();
  a.weight = j.at("weight").get<double>();
  a.min_service = j.at("min_service").get<double>();
  a.max_service = opt_from<double>(j, "max_service");
  a.initial_service = j.at("initial_service").get<double>();
  a.initial_bandwidth = opt_from<double>(j, "initial_bandwidth");
  a.update_jobs = j.at("update_jobs").get<int>();
  a.job_period = opt_from<double>(j, "job_period");
  const auto& m = j.at("model");
  auto kind = parse_job_kind(m.at("kind").get<std::string>());
  if (!kind) throw ValidationError("model.kind: unknown kind");
  a.model.kind = *kind;
  a.model.beta = m.at("beta").get<double>();
  a.model.alpha = m.at("alpha").get<double>();
  a.model.a = m.at("a").get<double>();
  a.model.b = m.at("b").get<double>();
  a.model.deadline = m.at("deadline").get<double>();
  return a;
}

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.name = j.at("name").get<std::string>();
  auto mode = parse_run_mode(j.at("mode").get<std::string>());
  if (!mode) throw ValidationError("mode: unknown mode");
  sc.mode = *mode;
  sc.rm_period = j.at("rm_period").get<double>();
  sc.horizon = j.at("horizon").get<double>();
  sc.strict_bounds = j.at("strict_bounds").get<bool>();
  sc.cold_start = j.at("cold_start").get<bool>();
  const auto& p = j.at("platform");
  sc.platform.cores = p.at("cores").get<int>();
  sc.platform.step = p.at("step").get<double>();
  sc.platform.match_tol = p.at("match_tol").get<double>();
  sc.platform.max_total_bandwidth = p.at("max_total_bandwidth").get<double>();
  for (const auto& a : j.at("apps")) sc.apps.push_back(app_from_json(a));
  for (const auto& e : j.at("events")) {
    MembershipEvent ev;
    ev.time = e.at("time").get<double>();
    if (e.at("action").get<std::string>() == "join") {
      ev.action = MembershipEvent::Action::join;
      ev.app = app_from_json(e.at("app"));
    } else {
      ev.action = MembershipEvent::Action::leave;
      ev.app_id = e.at("app_id").get<std::string>();
    }
    sc.events.push_back(std::move(ev));
  }
  return sc;
}

inline json to_json(const TheoreticalBounds& b) {
  return json{{"L", b.L},
              {"lambda_min", b.lambda_min},
              {"epsilon_star", b.epsilon_star},
              {"epsilon_guard", b.epsilon_guard},
              {"ell", b.ell},
              {"n_bar", b.n_bar}};
}

inline TheoreticalBounds bounds_from_json(const json& j) {
  TheoreticalBounds b;
  b.L = j.at("L").get<double>();
  b.lambda_min = j.at("lambda_min").get<double>();
  b.epsilon_star = j.at("epsilon_star").get<double>();
  b.epsilon_guard = j.at("epsilon_guard").get<double>();
  b.ell = j.at("ell").get<double>();
  b.n_bar = j.at("n_bar").get<int>();
  return b;
}

inline json to_json(const BalanceThresholds& b) {
  return json{{"zeta", b.zeta}, {"gamma_star", b.gamma_star}, {"n1", b.n1}, {"n2", b.n2},
              {"n_star", b.n_star}};
}

inline json to_json(const InvariantReport& r) {
  return json{{"feasibility_ok", r.feasibility_ok},
              {"first_infeasible", opt(r.first_infeasible)},
              {"starvation_ok", r.starvation_ok},
              {"first_starved", opt(r.first_starved)},
              {"balance_ok", r.balance_ok},
              {"balance_entry", opt(r.balance_entry)},
              {"max_sum", r.max_sum},
              {"min_bandwidth", r.min_bandwidth},
              {"identity_checked", r.identity_checked},
              {"identity_max_error", r.identity_max_error},
              {"transient_end", opt(r.transient_end)},
              {"lyapunov_monotone_after", opt(r.lyapunov_monotone_after)},
              {"lyapunov_max_relative_increase", r.lyapunov_max_relative_increase},
              {"lyapunov_final", opt(r.lyapunov_final)}};
}

inline json to_json(const StationaryPoint& sp) {
  return json{{"services", sp.services},
              {"bandwidths", sp.bandwidths},
              {"residuals", sp.residuals},
              {"capped", sp.capped},
              {"iterations", sp.iterations}};
}

}  // namespace bwshare::cli
