#pragma once

// Formula layer: matching functions, fairness measure and feasibility tests.
// Everything here is a pure function over value types.

#include <bwshare/errors.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bwshare {

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kDefaultMatchTolerance = 0.05;

enum class JobKind { multimedia, control, synthetic };

inline const char* to_string(JobKind k) {
  switch (k) {
    case JobKind::multimedia: return "multimedia";
    case JobKind::control: return "control";
    case JobKind::synthetic: return "synthetic";
  }
  return "?";
}

// Job model of one application. Only the fields relevant to `kind` are read:
//   multimedia: C = alpha * s,        D = deadline
//   control:    C = b (constant),     D = alpha / s
//   synthetic:  C = a * s + b,        D = deadline
// `beta` is the coefficient of the nominal form beta * v / s - 1. When left at
// zero it is derived from the model where the model is exactly nominal.
struct JobModel {
  JobKind kind = JobKind::synthetic;
  double beta = 0.0;
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
  double deadline = 1.0;

  friend bool operator==(const JobModel&, const JobModel&) = default;
};

struct ApplicationSpec {
  std::string id;
  double weight = 1.0;
  double min_service = 1.0;
  std::optional<double> max_service;
  double initial_service = 1.0;
  // Normalized starting bandwidth; unset means "equal split of the cap".
  std::optional<double> initial_bandwidth;
  JobModel model;
  int update_jobs = 1;
  // Job period in time units; unset means one job per RM period.
  std::optional<double> job_period;

  friend bool operator==(const ApplicationSpec&, const ApplicationSpec&) = default;
};

struct PlatformSpec {
  int cores = 1;
  double step = 0.01;
  double match_tol = kDefaultMatchTolerance;
  double max_total_bandwidth = 1.0;

  friend bool operator==(const PlatformSpec&, const PlatformSpec&) = default;
};

// Live pair (s, normalized v) plus the normalized unused bandwidth 1 - sum(v).
struct SystemState {
  std::vector<double> services;
  std::vector<double> bandwidths;
  double unused = 1.0;

  std::size_t size() const noexcept { return services.size(); }
};

inline double total(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0);
}

inline SystemState make_state(std::vector<double> services, std::vector<double> bandwidths) {
  if (services.size() != bandwidths.size())
    throw ValidationError("make_state: services and bandwidths differ in length");
  SystemState st{std::move(services), std::move(bandwidths), 0.0};
  st.unused = 1.0 - total(st.bandwidths);
  return st;
}

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": non-finite input");
}

// ---------------------------------------------------------------------------
// Scalar functions

inline double neg_part(double x) {
  require_finite(x, "neg_part");
  return x <= 0.0 ? x : 0.0;
}

// D / R - 1. Always >= -1 for D >= 0.
inline double matching_from_measurement(double deadline, double response) {
  if (!(response > 0.0)) throw MeasurementError("matching: response time must be > 0");
  if (!(deadline > 0.0)) throw MeasurementError("matching: deadline must be > 0");
  return deadline / response - 1.0;
}

// beta * v / s - 1.
inline double nominal_matching(double beta, double service, double bandwidth) {
  if (!(service > 0.0)) throw ValidationError("nominal_matching: service must be > 0");
  if (!(beta > 0.0)) throw ValidationError("nominal_matching: beta must be > 0");
  if (bandwidth < 0.0) throw ValidationError("nominal_matching: bandwidth must be >= 0");
  return beta * bandwidth / service - 1.0;
}

// D * v / (a s + b) - 1, the affine-requirement matching of the synthetic job.
// Evaluated as D / (C / v) - 1 so that it agrees bit-for-bit with a measured
// response R = C / v.
inline double synthetic_matching(double deadline, double a, double b, double service,
                                 double bandwidth) {
  const double c = a * service + b;
  if (!(c > 0.0)) throw ValidationError("synthetic_matching: execution requirement must be > 0");
  if (bandwidth <= 0.0) return -1.0;
  return deadline / (c / bandwidth) - 1.0;
}

enum class MatchingClass { scarce, perfect, abundant };

inline MatchingClass classify_matching(double f, double delta) {
  if (!(delta > 0.0)) throw ValidationError("classify_matching: delta must be > 0");
  if (f < -delta) return MatchingClass::scarce;
  if (f > delta) return MatchingClass::abundant;
  return MatchingClass::perfect;
}

// ---------------------------------------------------------------------------
// Job model helpers

inline double execution_requirement(const JobModel& m, double service) {
  switch (m.kind) {
    case JobKind::synthetic: return m.a * service + m.b;
    case JobKind::multimedia: return m.alpha * service;
    case JobKind::control: return m.b;
  }
  throw ValidationError("execution_requirement: unknown job kind");
}

inline double deadline_of(const JobModel& m, double service) {
  switch (m.kind) {
    case JobKind::synthetic:
    case JobKind::multimedia: return m.deadline;
    case JobKind::control:
      if (!(service > 0.0)) throw ValidationError("deadline_of: control service must be > 0");
      return m.alpha / service;
  }
  throw ValidationError("deadline_of: unknown job kind");
}

// beta of the nominal form. Multimedia and control jobs are exactly nominal
// (beta = D / alpha and alpha / C); synthetic jobs use the declared beta, or
// D / a when b == 0.
inline double effective_beta(const JobModel& m) {
  if (m.beta > 0.0) return m.beta;
  switch (m.kind) {
    case JobKind::multimedia: return m.deadline / m.alpha;
    case JobKind::control: return m.alpha / m.b;
    case JobKind::synthetic:
      if (m.b == 0.0 && m.a > 0.0) return m.deadline / m.a;
      break;
  }
  throw ValidationError("effective_beta: synthetic model with b > 0 has no nominal beta");
}

inline bool is_nominal(const JobModel& m) {
  return m.kind != JobKind::synthetic || m.b == 0.0;
}

// Matching function of the job model at (s, v), v un-normalized.
inline double model_matching(const JobModel& m, double service, double bandwidth) {
  const double c = execution_requirement(m, service);
  if (!(c > 0.0)) throw ValidationError("model_matching: execution requirement must be > 0");
  if (bandwidth <= 0.0) return -1.0;
  return deadline_of(m, service) / (c / bandwidth) - 1.0;
}

// sup over the service domain of (f + 1) / v. For every supported kind D/C is
// decreasing in s, so the sup sits at the minimum service. This is the
// beta / s_min of the nominal form.
inline double demand_ratio(const ApplicationSpec& spec) {
  return deadline_of(spec.model, spec.min_service) /
         execution_requirement(spec.model, spec.min_service);
}

// ---------------------------------------------------------------------------
// Fairness

// -(1 - v_i) l_i [x_i]^- + v_i sum_{j != i} l_j [x_j]^-, with v normalized.
// Same expression serves the nominal measure (x = phi) and the observed one
// (x = measured f).
inline double fairness_measure(std::size_t index, std::span<const double> matchings,
                               std::span<const double> bandwidths,
                               std::span<const double> weights) {
  const std::size_t n = matchings.size();
  if (bandwidths.size() != n || weights.size() != n)
    throw ValidationError("fairness_measure: vectors differ in length");
  if (index >= n) throw ValidationError("fairness_measure: index out of range");
  double others = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (j != index) others += weights[j] * neg_part(matchings[j]);
  return -(1.0 - bandwidths[index]) * weights[index] * neg_part(matchings[index]) +
         bandwidths[index] * others;
}

// All n measures in O(n).
inline std::vector<double> fairness_vector(std::span<const double> matchings,
                                           std::span<const double> bandwidths,
                                           std::span<const double> weights) {
  const std::size_t n = matchings.size();
  if (bandwidths.size() != n || weights.size() != n)
    throw ValidationError("fairness_vector: vectors differ in length");
  std::vector<double> weighted(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    weighted[j] = weights[j] * neg_part(matchings[j]);
    sum += weighted[j];
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = -(1.0 - bandwidths[i]) * weighted[i] + bandwidths[i] * (sum - weighted[i]);
  return out;
}

// Un-normalized v: each v_i in [0, 1] and sum v_i <= cores.
inline bool is_feasible(std::span<const double> bandwidths, int cores,
                        double tol = kSumTolerance) {
  double sum = 0.0;
  for (double v : bandwidths) {
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
    sum += v;
  }
  return sum <= static_cast<double>(cores) + tol;
}

inline std::vector<double> weights_of(std::span<const ApplicationSpec> specs) {
  std::vector<double> w;
  w.reserve(specs.size());
  for (const auto& s : specs) w.push_back(s.weight);
  return w;
}

// Model matchings at the state (bandwidths normalized, kappa applied here).
inline std::vector<double> state_matchings(const SystemState& state,
                                           std::span<const ApplicationSpec> specs,
                                           const PlatformSpec& platform) {
  if (specs.size() != state.size()) throw ValidationError("state and specs differ in length");
  std::vector<double> f(state.size());
  for (std::size_t i = 0; i < state.size(); ++i)
    f[i] = model_matching(specs[i].model, state.services[i],
                          platform.cores * state.bandwidths[i]);
  return f;
}

// Relaxed Phi == 0 test: |Phi_i| <= tol for every i.
inline bool is_fair_allocation(const SystemState& state, std::span<const ApplicationSpec> specs,
                               const PlatformSpec& platform, double tol) {
  if (!(tol > 0.0)) throw ValidationError("is_fair_allocation: tol must be > 0");
  const auto f = state_matchings(state, specs, platform);
  const auto w = weights_of(specs);
  const auto phi = fairness_vector(f, state.bandwidths, w);
  for (double p : phi)
    if (std::abs(p) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate(const JobModel& m, const std::string& path) {
  auto positive = [&](double x, const char* field) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw ValidationError(path + "." + field + " must be > 0");
  };
  auto non_negative = [&](double x, const char* field) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw ValidationError(path + "." + field + " must be >= 0");
  };
  if (m.beta < 0.0) throw ValidationError(path + ".beta must be >= 0");
  switch (m.kind) {
    case JobKind::synthetic:
      non_negative(m.a, "a");
      non_negative(m.b, "b");
      if (m.a == 0.0 && m.b == 0.0) throw ValidationError(path + ": a and b cannot both be 0");
      positive(m.deadline, "deadline");
      break;
    case JobKind::multimedia:
      positive(m.alpha, "alpha");
      positive(m.deadline, "deadline");
      break;
    case JobKind::control:
      positive(m.alpha, "alpha");
      positive(m.b, "b");
      break;
  }
}

inline void validate(const ApplicationSpec& s, const std::string& path) {
  if (s.id.empty()) throw ValidationError(path + ".id must be non-empty");
  if (!(s.weight > 0.0 && s.weight <= 1.0)) throw ValidationError(path + ".weight must be in (0, 1]");
  if (!(s.min_service > 0.0) || !std::isfinite(s.min_service))
    throw ValidationError(path + ".min_service must be > 0");
  if (s.max_service && !(*s.max_service >= s.min_service))
    throw ValidationError(path + ".max_service must be >= min_service");
  if (!(s.initial_service >= s.min_service) ||
      (s.max_service && s.initial_service > *s.max_service))
    throw ValidationError(path + ".initial_service must lie in the service domain");
  if (s.initial_bandwidth && !(*s.initial_bandwidth >= 0.0))
    throw ValidationError(path + ".initial_bandwidth must be >= 0");
  if (s.update_jobs < 1) throw ValidationError(path + ".update_jobs must be >= 1");
  if (s.job_period && !(*s.job_period > 0.0))
    throw ValidationError(path + ".job_period must be > 0");
  validate(s.model, path + ".model");
}

inline void validate(const PlatformSpec& p, const std::string& path = "platform") {
  if (p.cores < 1) throw ValidationError(path + ".cores must be >= 1");
  if (!(p.step > 0.0) || !std::isfinite(p.step)) throw ValidationError(path + ".step must be > 0");
  if (!(p.match_tol > 0.0)) throw ValidationError(path + ".match_tol must be > 0");
  if (!(p.max_total_bandwidth > 0.0 && p.max_total_bandwidth <= 1.0))
    throw ValidationError(path + ".max_total_bandwidth must be in (0, 1]");
}

}  // namespace bwshare
