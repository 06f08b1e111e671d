#pragma once

// Built-in scenarios. Time is in logical units; one RM period per job.

#include <bwshare/scenario.hpp>

#include <array>
#include <optional>
#include <string>

namespace bwshare::cli {

// Five synthetic applications updated synchronously under a 90% bandwidth cap.
inline Scenario preset_sync5() {
  Scenario sc;
  sc.name = "sync5";
  sc.mode = RunMode::sync;
  sc.rm_period = 1500.0;
  sc.horizon = 1e4 * sc.rm_period;
  sc.platform.cores = 1;
  sc.platform.step = 0.01;
  sc.platform.max_total_bandwidth = 0.9;
  const std::array<double, 5> weights{0.9, 0.7, 0.5, 0.3, 0.1};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    ApplicationSpec a;
    a.id = "app" + std::to_string(i + 1);
    a.weight = weights[i];
    a.min_service = 0.1;
    a.initial_service = 10.0;
    a.initial_bandwidth = 0.18;
    a.model.kind = JobKind::synthetic;
    a.model.a = 20.0;
    a.model.b = 200.0;
    a.model.deadline = 1500.0;
    sc.apps.push_back(a);
  }
  return sc;
}

// Three synthetic applications; the first updates its service level only
// every 10 jobs, the others after every job.
inline Scenario preset_async3() {
  Scenario sc;
  sc.name = "async3";
  sc.mode = RunMode::async_compensated;
  sc.rm_period = 1000.0;
  sc.horizon = 5e4 * sc.rm_period;
  sc.platform.cores = 1;
  sc.platform.step = 0.03;
  sc.platform.max_total_bandwidth = 1.0;
  const std::array<double, 3> weights{0.1, 0.5, 0.8};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    ApplicationSpec a;
    a.id = "app" + std::to_string(i + 1);
    a.weight = weights[i];
    a.min_service = 0.01;
    a.max_service = 20.0;
    a.initial_service = 10.0;
    a.model.kind = JobKind::synthetic;
    a.model.a = 40.0;
    a.model.b = 100.0;
    a.model.deadline = 1000.0;
    a.update_jobs = i == 0 ? 10 : 1;
    sc.apps.push_back(a);
  }
  return sc;
}

inline std::optional<Scenario> preset(const std::string& name) {
  if (name == "sync5") return preset_sync5();
  if (name == "async3") return preset_async3();
  return std::nullopt;
}

}  // namespace bwshare::cli
