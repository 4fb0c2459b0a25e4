#include <cmath>
#include <numeric>
#include <stdexcept>

#include <gtest/gtest.h>

#include "rdecusum/random.hpp"
#include "rdecusum/stats.hpp"

using namespace rdecusum;

TEST(Stats, SummaryMatchesDefinition) {
  const std::vector<double> xs{1, 2, 3, 4, 10};
  const auto s = summarize(xs);
  EXPECT_EQ(s.count, 5u);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.variance, 12.5);
  EXPECT_DOUBLE_EQ(s.std_error, std::sqrt(12.5 / 5.0));
  EXPECT_DOUBLE_EQ(s.ci95(), 1.959963984540054 * s.std_error);
}

TEST(Stats, PairwiseSumIsAccurate) {
  std::vector<double> xs(1'000'000, 0.1);
  EXPECT_NEAR(pairwise_sum(xs), 100000.0, 1e-8);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(Stats, ConfidenceIntervalShrinksWithSampleSize) {
  Engine engine(1);
  std::normal_distribution<double> x;
  std::vector<double> small(1000);
  std::vector<double> large(16000);
  for (auto& v : small) v = x(engine);
  for (auto& v : large) v = x(engine);
  EXPECT_LT(summarize(large).ci95(), summarize(small).ci95() / 2.0);
}

TEST(Stats, ParallelForVisitsEveryItemOnceAndRethrows) {
  for (unsigned workers : {1u, 2u, 7u}) {
    std::vector<int> hits(1003, 0);
    parallel_for(hits.size(), workers, [&](std::size_t i) { ++hits[i]; });
    EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  EXPECT_GE(default_workers(), 1u);
}

TEST(Random, DerivedSeedsAreDistinctAndStable) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 2, 1));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 3, 0));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(2, 2, 0));
  // Reference value of the SplitMix64 finalizer for input 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}
