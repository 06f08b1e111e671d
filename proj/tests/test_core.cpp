#include <bwshare/core.hpp>

#include <gtest/gtest.h>

#include <array>
#include <limits>
#include <random>
#include <vector>

using namespace bwshare;

TEST(NegPart, Branches) {
  EXPECT_DOUBLE_EQ(neg_part(-0.3), -0.3);
  EXPECT_DOUBLE_EQ(neg_part(0.5), 0.0);
  EXPECT_DOUBLE_EQ(neg_part(0.0), 0.0);
  EXPECT_THROW(neg_part(std::numeric_limits<double>::infinity()), ValidationError);
  EXPECT_THROW(neg_part(std::numeric_limits<double>::quiet_NaN()), ValidationError);
}

TEST(NegPart, EqualsMinWithZero) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    EXPECT_LE(neg_part(x), 0.0);
    EXPECT_EQ(neg_part(x), std::min(x, 0.0));
  }
}

TEST(Matching, FromMeasurement) {
  EXPECT_DOUBLE_EQ(matching_from_measurement(10, 10), 0.0);
  EXPECT_DOUBLE_EQ(matching_from_measurement(1, 2), -0.5);
  EXPECT_DOUBLE_EQ(matching_from_measurement(3, 2), 0.5);
  EXPECT_THROW(matching_from_measurement(1, 0), MeasurementError);
  EXPECT_THROW(matching_from_measurement(1, -1), MeasurementError);
}

TEST(Matching, NeverBelowMinusOne) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(1e-6, 1e4), r(1e-6, 1e6);
  for (int i = 0; i < 10000; ++i) EXPECT_GE(matching_from_measurement(d(rng), r(rng)), -1.0);
}

TEST(Matching, Nominal) {
  EXPECT_DOUBLE_EQ(nominal_matching(2, 4, 1), -0.5);
  EXPECT_DOUBLE_EQ(nominal_matching(2, 4, 0), -1.0);
  EXPECT_DOUBLE_EQ(nominal_matching(1, 1, 1), 0.0);
  EXPECT_THROW(nominal_matching(1, 0, 1), ValidationError);
  EXPECT_THROW(nominal_matching(1, -2, 1), ValidationError);
}

TEST(Matching, NominalMonotonicity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> b(0.01, 10), s(0.01, 100), v(0, 1);
  for (int i = 0; i < 10000; ++i) {
    const double beta = b(rng), v1 = v(rng), v2 = v(rng), s1 = s(rng), s2 = s(rng);
    // larger service, less matching
    EXPECT_LE(nominal_matching(beta, std::max(s1, s2), v1), nominal_matching(beta, std::min(s1, s2), v1));
    // more bandwidth, more matching
    EXPECT_GE(nominal_matching(beta, s1, std::max(v1, v2)), nominal_matching(beta, s1, std::min(v1, v2)));
  }
}

TEST(Matching, Classify) {
  EXPECT_EQ(classify_matching(0, 0.05), MatchingClass::perfect);
  EXPECT_EQ(classify_matching(-0.2, 0.05), MatchingClass::scarce);
  EXPECT_EQ(classify_matching(0.2, 0.05), MatchingClass::abundant);
  EXPECT_EQ(classify_matching(0.05, 0.05), MatchingClass::perfect);
  EXPECT_EQ(classify_matching(-0.05, 0.05), MatchingClass::perfect);
  EXPECT_THROW(classify_matching(0, 0), ValidationError);
}

TEST(Fairness, SymmetricPairIsFair) {
  const std::vector<double> f{-0.5, -0.5}, v{0.5, 0.5}, w{1, 1};
  EXPECT_DOUBLE_EQ(fairness_measure(0, f, v, w), 0.0);
  EXPECT_DOUBLE_EQ(fairness_measure(1, f, v, w), 0.0);
}

TEST(Fairness, HandEvaluated) {
  const std::vector<double> f{0, -1}, v{0.8, 0.2}, w{1, 1};
  EXPECT_NEAR(fairness_measure(0, f, v, w), -0.8, 1e-15);
  EXPECT_NEAR(fairness_measure(1, f, v, w), 0.8, 1e-15);
  EXPECT_THROW(fairness_measure(2, f, v, w), ValidationError);
}

// A scarce app holding no bandwidth is pushed up by its own scarcity alone.
TEST(Fairness, ZeroBandwidthScarceIsPushedUp) {
  const std::vector<double> f{-0.4, -0.1, 0.3}, v{0.0, 0.5, 0.5}, w{0.3, 0.7, 1.0};
  EXPECT_NEAR(fairness_measure(0, f, v, w), 0.12, 1e-15);
}

TEST(Fairness, VectorMatchesScalar) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> fu(-1, 1), vu(0, 1), wu(0.01, 1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rep % 9;
    std::vector<double> f(n), v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = fu(rng);
      v[i] = vu(rng) / n;
      w[i] = wu(rng);
    }
    const auto all = fairness_vector(f, v, w);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(all[i], fairness_measure(i, f, v, w), 1e-14);
  }
}

// With all matchings negative and v_i / (1 - v_i) = l_i |g_i| / sum_{j != i} l_j |g_j|,
// every measure vanishes.
TEST(Fairness, BalancedRatioGivesZero) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> gu(0.05, 1), wu(0.05, 1);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rep % 6;
    std::vector<double> f(n), w(n), v(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = -gu(rng);
      w[i] = wu(rng);
      sum += w[i] * -f[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double r = w[i] * -f[i] / (sum - w[i] * -f[i]);
      v[i] = r / (1 + r);
    }
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fairness_measure(i, f, v, w), 0.0, 1e-14);
  }
}

TEST(Feasibility, Examples) {
  EXPECT_TRUE(is_feasible(std::vector<double>{0.5, 0.5}, 1));
  EXPECT_FALSE(is_feasible(std::vector<double>{0.6, 0.6}, 1));
  EXPECT_TRUE(is_feasible(std::vector<double>{1.0, 1.0}, 2));
  EXPECT_FALSE(is_feasible(std::vector<double>{1.2, 0.1}, 2));
  EXPECT_FALSE(is_feasible(std::vector<double>{-0.1, 0.1}, 1));
}

namespace {

ApplicationSpec nominal_app(const std::string& id, double weight, double beta, double smin) {
  ApplicationSpec a;
  a.id = id;
  a.weight = weight;
  a.min_service = smin;
  a.initial_service = smin;
  a.model.kind = JobKind::multimedia;
  a.model.alpha = 1.0;
  a.model.deadline = beta;
  return a;
}

}  // namespace

TEST(FairAllocation, Examples) {
  std::vector<ApplicationSpec> specs{nominal_app("a", 1, 0.5, 1), nominal_app("b", 1, 0.5, 1)};
  PlatformSpec pf;
  // symmetric: phi = (-0.75, -0.75), fair
  EXPECT_TRUE(is_fair_allocation(make_state({1, 1}, {0.5, 0.5}), specs, pf, 1e-12));

  // Phi = (-0.8, 0.8): beta v / s = 1 at v = 0.8 (phi_1 = 0), and v = 0 for app 2 (phi_2 = -1)
  std::vector<ApplicationSpec> s2{nominal_app("a", 1, 1.25, 1), nominal_app("b", 1, 1.0, 1)};
  const auto st = make_state({1, 1}, {0.8, 0.0});
  EXPECT_FALSE(is_fair_allocation(st, s2, pf, 1e-6));

  // all abundant
  std::vector<ApplicationSpec> s3{nominal_app("a", 1, 10, 1), nominal_app("b", 0.2, 10, 1)};
  EXPECT_TRUE(is_fair_allocation(make_state({1, 1}, {0.3, 0.6}), s3, pf, 1e-12));
  EXPECT_THROW(is_fair_allocation(st, s2, pf, 0.0), ValidationError);
}

TEST(JobModel, ExecutionAndDeadline) {
  JobModel syn{JobKind::synthetic, 0, 0, 20, 200, 1000};
  EXPECT_DOUBLE_EQ(execution_requirement(syn, 10), 400);
  JobModel syn2{JobKind::synthetic, 0, 0, 40, 100, 10000};
  EXPECT_DOUBLE_EQ(execution_requirement(syn2, 10), 500);
  JobModel mm{JobKind::multimedia, 0, 2, 0, 0, 10};
  EXPECT_DOUBLE_EQ(execution_requirement(mm, 3), 6);
  EXPECT_DOUBLE_EQ(deadline_of(mm, 3), 10);
  EXPECT_DOUBLE_EQ(effective_beta(mm), 5);
  JobModel ctl{JobKind::control, 0, 100, 0, 5, 0};
  EXPECT_DOUBLE_EQ(deadline_of(ctl, 10), 10);
  EXPECT_DOUBLE_EQ(execution_requirement(ctl, 10), 5);
  EXPECT_DOUBLE_EQ(effective_beta(ctl), 20);
  EXPECT_THROW(effective_beta(syn), ValidationError);
  EXPECT_FALSE(is_nominal(syn));
}

// Exactly nominal models agree with beta v / s - 1.
TEST(JobModel, NominalModelsMatchNominalForm) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.1, 10), v(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    JobModel mm{JobKind::multimedia, 0, u(rng), 0, 0, u(rng)};
    JobModel ctl{JobKind::control, 0, u(rng), 0, u(rng), 0};
    JobModel lin{JobKind::synthetic, 0, 0, u(rng), 0, u(rng)};
    const double s = u(rng), b = v(rng);
    for (const auto& m : {mm, ctl, lin})
      EXPECT_NEAR(model_matching(m, s, b), nominal_matching(effective_beta(m), s, b), 1e-12);
  }
}

TEST(Validation, FieldPaths) {
  ApplicationSpec a = nominal_app("x", 1, 1, 1);
  a.weight = 0;
  try {
    validate(a, "apps[3]");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("apps[3].weight"), std::string::npos);
  }
  a.weight = 1.5;
  EXPECT_THROW(validate(a, "apps[0]"), ValidationError);
  a.weight = 1;
  a.initial_service = 0.5;
  EXPECT_THROW(validate(a, "apps[0]"), ValidationError);
  a.initial_service = 1;
  a.update_jobs = 0;
  EXPECT_THROW(validate(a, "apps[0]"), ValidationError);

  PlatformSpec p;
  p.max_total_bandwidth = 1.2;
  EXPECT_THROW(validate(p), ValidationError);
  p.max_total_bandwidth = 1.0;
  p.step = 0;
  EXPECT_THROW(validate(p), ValidationError);
}
