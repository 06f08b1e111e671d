#include <bwshare/timeline.hpp>

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace bwshare;

TEST(Timeline, Synchronous) {
  const std::vector<double> periods{1.0};
  const auto tl = build_timeline(1.0, periods, 3.0);
  EXPECT_EQ(tl.rm_instants, (std::vector<double>{0, 1, 2, 3}));
  const auto& ts = tl.app_instants[0];
  ASSERT_GE(ts.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(ts[k], tl.rm_instants[k]);
  EXPECT_EQ(tl.n_bar, 1);
}

TEST(Timeline, TenJobCadence) {
  const std::vector<double> periods{10.0};
  const auto tl = build_timeline(1.0, periods, 100.0);
  for (std::size_t k = 0; k + 1 < tl.app_instants[0].size(); ++k) EXPECT_EQ(tl.updates_between(0, k), 10);
  EXPECT_EQ(tl.n_bar, 10);
}

TEST(Timeline, FractionalPeriodAlternates) {
  const std::vector<double> periods{2.5};
  const auto tl = build_timeline(1.0, periods, 20.0);
  for (std::size_t k = 0; k + 1 < tl.app_instants[0].size(); ++k)
    EXPECT_EQ(tl.updates_between(0, k), k % 2 == 0 ? 2 : 3);
  EXPECT_EQ(tl.n_bar, 3);
}

TEST(Timeline, RejectsPeriodsViolatingTheDesignAssumption) {
  const std::vector<double> fast{0.5};
  EXPECT_THROW(build_timeline(1.0, fast, 10.0), ValidationError);
  const std::vector<double> slow{12.0};
  EXPECT_THROW(build_timeline(1.0, slow, 10.0, 10), ValidationError);
  EXPECT_NO_THROW(build_timeline(1.0, slow, 10.0, 12));
}

TEST(TimelineIndices, PsiIsZeroBeforeFirstUpdate) {
  const std::vector<double> periods{3.0};
  const auto tl = build_timeline(1.0, periods, 10.0);
  EXPECT_EQ(timeline_indices(tl, 0.0, 0).psi, 0u);
  EXPECT_EQ(timeline_indices(tl, 0.5, 0).psi, 0u);
}

// Synchronous 4-instant grid, enumerated by hand: psi(m) = m - 1 for m >= 1.
TEST(TimelineIndices, SynchronousPsiLagsByOne) {
  const std::vector<double> periods{1.0};
  const auto tl = build_timeline(1.0, periods, 3.0);
  EXPECT_EQ(timeline_indices(tl, 0.0, 0).psi, 0u);
  EXPECT_EQ(timeline_indices(tl, 1.0, 0).psi, 0u);
  EXPECT_EQ(timeline_indices(tl, 2.0, 0).psi, 1u);
  EXPECT_EQ(timeline_indices(tl, 3.0, 0).psi, 2u);
}

TEST(TimelineIndices, HalfOpenIntervals) {
  const std::vector<double> periods{2.0};
  const auto tl = build_timeline(1.0, periods, 6.0);
  EXPECT_EQ(timeline_indices(tl, 3.0, 0).rm_index, 3u);
  EXPECT_EQ(timeline_indices(tl, 2.999, 0).rm_index, 2u);
  EXPECT_EQ(*timeline_indices(tl, 4.0, 0).app_index, 2u);
  EXPECT_EQ(*timeline_indices(tl, 3.9, 0).app_index, 1u);
  EXPECT_EQ(*timeline_indices(tl, 3.9, 0).updates, 2);
  // latest app instant strictly before t_4 = 4 is t_1 = 2
  EXPECT_EQ(timeline_indices(tl, 4.0, 0).psi, 2u);
  EXPECT_THROW(timeline_indices(tl, 7.0, 0), ValidationError);
  EXPECT_THROW(timeline_indices(tl, -1.0, 0), ValidationError);
}

// sum_k N_i(k) equals the RM instants spanned by the application's updates.
TEST(Timeline, UpdateCountsSumToSpan) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pu(1.0, 10.0);
  for (int rep = 0; rep < 200; ++rep) {
    const std::vector<double> periods{pu(rng), pu(rng), pu(rng)};
    const auto tl = build_timeline(1.0, periods, 200.0);
    for (std::size_t i = 0; i < periods.size(); ++i) {
      const auto& ts = tl.app_instants[i];
      long total = 0;
      for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const int n = tl.updates_between(i, k);
        EXPECT_GE(n, 1);
        EXPECT_LE(n, tl.n_bar);
        total += n;
      }
      EXPECT_EQ(total, static_cast<long>(tl.rm_index(ts.back()) - tl.rm_index(ts.front())));
    }
  }
}
