#include <bwshare/analysis.hpp>
#include <bwshare/simkernel.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace bwshare;

namespace {

Trajectory make_traj(const std::vector<double>& times, const std::vector<std::vector<double>>& v) {
  std::vector<Sample> flat;
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < v[k].size(); ++i)
      flat.push_back(Sample{times[k], "a" + std::to_string(i), v[k][i] * 10, v[k][i], 1, 1, 0, 0});
  return Trajectory::from_samples(flat);
}

StepPath constant(double c) { return StepPath{{0.0}, {c}}; }

ApplicationSpec app(const std::string& id, double w, double beta) {
  ApplicationSpec a;
  a.id = id;
  a.weight = w;
  a.min_service = 1;
  a.initial_service = 1;
  a.model.kind = JobKind::multimedia;
  a.model.alpha = 1;
  a.model.deadline = beta;
  return a;
}

}  // namespace

TEST(Interpolate, SingleSampleIsConstant) {
  const auto tr = make_traj({0.0}, {{0.3}});
  const auto p = interpolate(tr, PathField::bandwidth);
  EXPECT_EQ(p.at("a0", 0.0), 0.3);
  EXPECT_EQ(p.at("a0", 1e6), 0.3);
  EXPECT_THROW(interpolate(Trajectory{}, PathField::service), ValidationError);
}

TEST(Interpolate, LeftClosedPiecewiseConstant) {
  const auto tr = make_traj({0, 1, 2}, {{0.1}, {0.2}, {0.4}});
  const auto p = interpolate(tr, PathField::bandwidth);
  EXPECT_EQ(p.at("a0", 1.0), 0.2);
  EXPECT_EQ(p.at("a0", 1.5), 0.2);
  EXPECT_EQ(p.at("a0", 0.999), 0.1);
  const auto s = interpolate(tr, PathField::service);
  EXPECT_DOUBLE_EQ(s.at("a0", 2.5), 4.0);
}

TEST(SupDeviation, Basics) {
  const auto tr = make_traj({0, 1, 2}, {{0.1, 0.5}, {0.2, 0.4}, {0.4, 0.3}});
  const auto p = interpolate(tr, PathField::bandwidth);
  EXPECT_EQ(sup_deviation(p, p, 2.0), 0.0);
  EXPECT_NEAR(sup_deviation(constant(1.5), constant(0.25), 10.0), 1.25, 1e-15);
  const auto q = interpolate(make_traj({0}, {{0.1, 0.5}}), PathField::bandwidth);
  EXPECT_NEAR(sup_deviation(p, q, 2.0), 0.3, 1e-15);
  EXPECT_NEAR(sup_deviation(p, q, 1.0), 0.1, 1e-15);
  const auto r = interpolate(make_traj({0}, {{0.1}}), PathField::bandwidth);
  EXPECT_THROW(sup_deviation(p, r, 2.0), ValidationError);
}

TEST(SupDeviation, IsAMetric) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0, 1);
  auto random_path = [&] {
    StepPath p;
    for (int k = 0; k < 20; ++k) {
      p.breakpoints.push_back(k);
      p.values.push_back(u(rng));
    }
    return p;
  };
  for (int rep = 0; rep < 500; ++rep) {
    const auto a = random_path(), b = random_path(), c = random_path();
    EXPECT_EQ(sup_deviation(a, b, 19), sup_deviation(b, a, 19));
    EXPECT_LE(sup_deviation(a, c, 19), sup_deviation(a, b, 19) + sup_deviation(b, c, 19) + 1e-15);
    EXPECT_EQ(sup_deviation(a, a, 19), 0.0);
  }
}

// Brute-force per-sample re-check against the sweep.
TEST(Sweep, MatchesBruteForce) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0, 0.7);
  PlatformSpec pf;
  pf.step = 0.05;
  std::vector<ApplicationSpec> specs{app("a0", 1, 0.5), app("a1", 1, 0.5)};
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> times;
    std::vector<std::vector<double>> v;
    for (int k = 0; k < 8; ++k) {
      times.push_back(k);
      v.push_back({u(rng), u(rng)});
    }
    const auto tr = make_traj(times, v);
    const auto rep_ = sweep_invariants(tr, specs, pf, compute_bounds(specs, pf));
    std::optional<double> infeasible, starved;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!infeasible && v[k][0] + v[k][1] > 1.0 + kSumTolerance) infeasible = times[k];
      for (std::size_t i = 0; i < 2; ++i)
        if (!starved && v[0][i] > pf.step && !(v[k][i] > pf.step)) starved = times[k];
    }
    EXPECT_EQ(rep_.feasibility_ok, !infeasible.has_value());
    EXPECT_EQ(rep_.first_infeasible, infeasible);
    EXPECT_EQ(rep_.starvation_ok, !starved.has_value());
    EXPECT_EQ(rep_.first_starved, starved);
  }
}

TEST(Sweep, OversizedStepIsDetected) {
  Scenario sc;
  sc.rm_period = 1;
  sc.horizon = 200;
  sc.platform.step = 2.5;
  sc.apps = {app("a", 1, 0.2), app("b", 1, 0.2), app("c", 1, 0.2)};
  sc.apps[0].initial_bandwidth = 0.6;
  sc.apps[1].initial_bandwidth = 0.2;
  sc.apps[2].initial_bandwidth = 0.1;
  const auto tr = run_scenario(sc);
  const auto r = sweep_invariants(tr, sc.apps, sc.platform, compute_bounds(sc.apps, sc.platform));
  EXPECT_FALSE(r.feasibility_ok);
  ASSERT_TRUE(r.first_infeasible.has_value());
  EXPECT_GT(*r.first_infeasible, 0.0);
  EXPECT_GT(r.max_sum, 1.0);
}

TEST(Sweep, SmallStepKeepsInvariants) {
  Scenario sc;
  sc.rm_period = 1;
  sc.horizon = 2000;
  sc.apps = {app("a", 0.3, 0.2), app("b", 1, 0.4), app("c", 0.6, 0.1)};
  sc.platform.step = 0.5 * compute_bounds(sc.apps, sc.platform).epsilon_star;
  const auto tr = run_scenario(sc);
  const auto r = sweep_invariants(tr, sc.apps, sc.platform, compute_bounds(sc.apps, sc.platform));
  EXPECT_TRUE(r.feasibility_ok);
  EXPECT_TRUE(r.starvation_ok);
  EXPECT_GT(r.identity_checked, 1000u);
  EXPECT_LE(r.identity_max_error, 1e-12);
}

TEST(Convergence, AtTargetSettlesAtZero) {
  const auto tr = make_traj({0, 1, 2}, {{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}});
  const auto r = convergence_report(tr, std::vector<double>{0.2, 0.8}, 0.02);
  EXPECT_TRUE(r.settled);
  EXPECT_EQ(*r.settle_time, 0.0);
  EXPECT_THROW(convergence_report(tr, std::vector<double>{0.2, 0.8}, 0.0), ValidationError);
}

TEST(Convergence, WindowRequired) {
  std::vector<double> times;
  std::vector<std::vector<double>> v;
  for (int k = 0; k < 200; ++k) {
    times.push_back(k);
    v.push_back({k < 150 ? 0.5 : 0.2, 0.8});
  }
  const auto tr = make_traj(times, v);
  const auto r = convergence_report(tr, std::vector<double>{0.2, 0.8}, 0.02);
  EXPECT_FALSE(r.settled);  // only 50 instants inside
  const auto r2 = convergence_report(tr, std::vector<double>{0.2, 0.8}, 0.02, 50);
  EXPECT_TRUE(r2.settled);
  EXPECT_EQ(*r2.settle_time, 150.0);
  EXPECT_NEAR(r.final_errors[0], 0.0, 1e-15);
}
