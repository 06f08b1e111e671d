#pragma once

// Scenario files: one `key = value` pair per line, `#` starts a comment.
// Keys are dotted paths with indexed lists, e.g. `apps[0].model.kind`.
// See README.md for the full key list.

#include <bwshare/scenario.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace bwshare::cli {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& text, const std::string& key) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ValidationError(key + ": expected a number, got '" + text + "'");
  return x;
}

inline long long parse_int(const std::string& text, const std::string& key) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ValidationError(key + ": expected an integer, got '" + text + "'");
  return x;
}

inline bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ValidationError(key + ": expected true or false, got '" + text + "'");
}

class KeyValues {
 public:
  static KeyValues parse(std::istream& in) {
    KeyValues kv;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ValidationError("line " + std::to_string(no) + ": expected 'key = value'");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key.empty()) throw ValidationError("line " + std::to_string(no) + ": empty key");
      if (!kv.values_.emplace(key, value).second)
        throw ValidationError(key + ": duplicate key (line " + std::to_string(no) + ")");
    }
    return kv;
  }

  std::optional<std::string> get(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }
  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ValidationError(key + " is required");
    return *v;
  }
  std::optional<double> number(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return parse_double(*v, key);
  }
  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }
  double require_number(const std::string& key) { return parse_double(require(key), key); }
  bool flag(const std::string& key, bool fallback) {
    auto v = get(key);
    return v ? parse_bool(*v, key) : fallback;
  }
  // Number of consecutive indices prefix[0], prefix[1], ... present in any key.
  std::size_t count(const std::string& prefix) const {
    std::size_t n = 0;
    while (true) {
      const auto head = prefix + "[" + std::to_string(n) + "].";
      auto it = values_.lower_bound(head);
      if (it == values_.end() || it->first.compare(0, head.size(), head) != 0) break;
      ++n;
    }
    return n;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ValidationError(k + ": unknown key");
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

inline std::optional<JobKind> parse_job_kind(const std::string& s) {
  for (JobKind k : {JobKind::multimedia, JobKind::control, JobKind::synthetic})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

inline ApplicationSpec read_app(KeyValues& kv, const std::string& p) {
  ApplicationSpec a;
  a.id = kv.require(p + ".id");
  if (a.id.find_first_of(", \t") != std::string::npos)
    throw ValidationError(p + ".id must not contain commas or whitespace");
  a.weight = kv.require_number(p + ".weight");
  a.min_service = kv.require_number(p + ".min_service");
  a.max_service = kv.number(p + ".max_service");
  a.initial_service = kv.number(p + ".initial_service", a.min_service);
  a.initial_bandwidth = kv.number(p + ".initial_bandwidth");
  if (auto u = kv.get(p + ".update_jobs")) {
    const auto n = parse_int(*u, p + ".update_jobs");
    if (n < 1 || n > 1000000) throw ValidationError(p + ".update_jobs must be in [1, 1e6]");
    a.update_jobs = static_cast<int>(n);
  }
  a.job_period = kv.number(p + ".job_period");
  const auto kind = kv.require(p + ".model.kind");
  auto k = parse_job_kind(kind);
  if (!k) throw ValidationError(p + ".model.kind: unknown kind '" + kind + "'");
  a.model.kind = *k;
  a.model.beta = kv.number(p + ".model.beta", 0.0);
  a.model.alpha = kv.number(p + ".model.alpha", 0.0);
  a.model.a = kv.number(p + ".model.a", 0.0);
  a.model.b = kv.number(p + ".model.b", 0.0);
  a.model.deadline = kv.number(p + ".model.deadline", 1.0);
  return a;
}

inline Scenario read_scenario(KeyValues& kv) {
  Scenario sc;
  sc.name = kv.get("name").value_or("");
  if (auto m = kv.get("mode")) {
    auto mode = parse_run_mode(*m);
    if (!mode) throw ValidationError("mode: unknown mode '" + *m + "'");
    sc.mode = *mode;
  }
  sc.rm_period = kv.require_number("rm_period");
  sc.horizon = kv.require_number("horizon");
  sc.strict_bounds = kv.flag("strict_bounds", false);
  sc.cold_start = kv.flag("cold_start", false);
  if (auto c = kv.get("platform.cores")) {
    const auto n = parse_int(*c, "platform.cores");
    if (n < 1 || n > 1 << 20) throw ValidationError("platform.cores must be in [1, 2^20]");
    sc.platform.cores = static_cast<int>(n);
  }
  sc.platform.step = kv.number("platform.step", sc.platform.step);
  sc.platform.match_tol = kv.number("platform.match_tol", sc.platform.match_tol);
  sc.platform.max_total_bandwidth =
      kv.number("platform.max_total_bandwidth", sc.platform.max_total_bandwidth);

  const std::size_t n = kv.count("apps");
  for (std::size_t i = 0; i < n; ++i) sc.apps.push_back(read_app(kv, "apps[" + std::to_string(i) + "]"));

  const std::size_t ne = kv.count("events");
  for (std::size_t i = 0; i < ne; ++i) {
    const auto p = "events[" + std::to_string(i) + "]";
    MembershipEvent e;
    e.time = kv.require_number(p + ".time");
    const auto action = kv.require(p + ".action");
    if (action == "join") {
      e.action = MembershipEvent::Action::join;
      e.app = read_app(kv, p + ".app");
    } else if (action == "leave") {
      e.action = MembershipEvent::Action::leave;
      e.app_id = kv.require(p + ".app_id");
    } else {
      throw ValidationError(p + ".action must be join or leave");
    }
    sc.events.push_back(std::move(e));
  }
  kv.reject_unknown();
  return sc;
}

// Parse and validate. Schema errors name the offending key.
inline Scenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  auto kv = KeyValues::parse(in);
  auto sc = read_scenario(kv);
  validate(sc);
  return sc;
}

inline void emit_app(std::ostream& out, const ApplicationSpec& a, const std::string& p) {
  auto num = [&](const std::string& k, double v) { out << p << '.' << k << " = " << format_double(v) << '\n'; };
  out << p << ".id = " << a.id << '\n';
  num("weight", a.weight);
  num("min_service", a.min_service);
  if (a.max_service) num("max_service", *a.max_service);
  num("initial_service", a.initial_service);
  if (a.initial_bandwidth) num("initial_bandwidth", *a.initial_bandwidth);
  out << p << ".update_jobs = " << a.update_jobs << '\n';
  if (a.job_period) num("job_period", *a.job_period);
  out << p << ".model.kind = " << to_string(a.model.kind) << '\n';
  num("model.beta", a.model.beta);
  num("model.alpha", a.model.alpha);
  num("model.a", a.model.a);
  num("model.b", a.model.b);
  num("model.deadline", a.model.deadline);
}

inline std::string emit_scenario(const Scenario& sc) {
  std::ostringstream out;
  if (!sc.name.empty()) out << "name = " << sc.name << '\n';
  out << "mode = " << to_string(sc.mode) << '\n';
  out << "rm_period = " << format_double(sc.rm_period) << '\n';
  out << "horizon = " << format_double(sc.horizon) << '\n';
  out << "strict_bounds = " << (sc.strict_bounds ? "true" : "false") << '\n';
  out << "cold_start = " << (sc.cold_start ? "true" : "false") << '\n';
  out << "platform.cores = " << sc.platform.cores << '\n';
  out << "platform.step = " << format_double(sc.platform.step) << '\n';
  out << "platform.match_tol = " << format_double(sc.platform.match_tol) << '\n';
  out << "platform.max_total_bandwidth = " << format_double(sc.platform.max_total_bandwidth) << '\n';
  for (std::size_t i = 0; i < sc.apps.size(); ++i) {
    out << '\n';
    emit_app(out, sc.apps[i], "apps[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const auto& e = sc.events[i];
    const auto p = "events[" + std::to_string(i) + "]";
    out << '\n' << p << ".time = " << format_double(e.time) << '\n';
    if (e.action == MembershipEvent::Action::join) {
      out << p << ".action = join\n";
      emit_app(out, e.app, p + ".app");
    } else {
      out << p << ".action = leave\n" << p << ".app_id = " << e.app_id << '\n';
    }
  }
  return out.str();
}

}  // namespace bwshare::cli
