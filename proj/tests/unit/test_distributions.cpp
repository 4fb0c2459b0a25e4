#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rdecusum/distributions.hpp"
#include "rdecusum/errors.hpp"
#include "rdecusum/stats.hpp"

using namespace rdecusum;

TEST(DistributionSpec, ParsesFlagSyntax) {
  EXPECT_EQ(DistributionSpec::parse("norm:0.5"), DistributionSpec::gaussian(0.5));
  EXPECT_EQ(DistributionSpec::parse("pois:2"), DistributionSpec::poisson(2.0));
  EXPECT_EQ(DistributionSpec::parse("norm:-1.25").mean(), -1.25);
  for (const char* text : {"norm:0.5", "pois:2", "pois:0.25", "norm:-3"}) {
    EXPECT_EQ(DistributionSpec::parse(DistributionSpec::parse(text).to_string()),
              DistributionSpec::parse(text));
  }
}

TEST(DistributionSpec, RejectsMalformedText) {
  for (const char* text : {"", "norm", "norm:", "pois:-1", "pois:0", "gamma:1", "norm:abc", "pois:1x"}) {
    EXPECT_THROW(DistributionSpec::parse(text), InvalidInput) << text;
  }
}

TEST(DistributionSpec, LogDensityMatchesReference) {
  const auto g = DistributionSpec::gaussian(0.5);
  for (double x : {-3.0, -0.2, 0.0, 0.5, 2.7}) {
    EXPECT_NEAR(g.log_density(x), std::log(oracle::normal_pdf(x, 0.5)), 1e-12);
  }
  const auto p = DistributionSpec::poisson(1.5);
  for (long k : {0L, 1L, 4L, 12L}) {
    EXPECT_NEAR(p.log_density(static_cast<double>(k)), oracle::poisson_log_pmf(k, 1.5), 1e-12);
  }
  EXPECT_EQ(p.log_density(1.5), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(p.log_density(-1.0), -std::numeric_limits<double>::infinity());
}

TEST(LogLikelihoodRatio, ClosedFormEqualsLogDensityDifference) {
  const std::pair<DistributionSpec, DistributionSpec> pairs[] = {
      {DistributionSpec::gaussian(0.0), DistributionSpec::gaussian(0.5)},
      {DistributionSpec::gaussian(-1.0), DistributionSpec::gaussian(2.0)},
      {DistributionSpec::poisson(1.0), DistributionSpec::poisson(2.0)},
      {DistributionSpec::poisson(0.5), DistributionSpec::poisson(1.0)},
  };
  for (const auto& [f, g] : pairs) {
    const bool gauss = f.law() == Law::GaussianUnitVar;
    for (double x : gauss ? std::vector<double>{-2.5, 0.0, 0.3, 4.0} : std::vector<double>{0, 1, 3, 9}) {
      EXPECT_NEAR(log_likelihood_ratio(f, g, x), g.log_density(x) - f.log_density(x), 1e-12);
    }
  }
}

TEST(LogLikelihoodRatio, RejectsMixedKindsAndOffSupportCounts) {
  const auto n = DistributionSpec::gaussian(0.0);
  const auto p = DistributionSpec::poisson(1.0);
  EXPECT_THROW(log_likelihood_ratio(n, p, 1.0), InvalidInput);
  EXPECT_THROW(log_likelihood_ratio(p, DistributionSpec::poisson(2.0), 1.5), InvalidInput);
  EXPECT_THROW(log_likelihood_ratio(p, DistributionSpec::poisson(2.0), -1.0), InvalidInput);
  EXPECT_THROW(log_likelihood_ratio(n, DistributionSpec::gaussian(1.0), NAN), InvalidInput);
}

TEST(KlDivergence, GaussianMatchesQuadrature) {
  for (auto [a, b] : {std::pair{0.0, 0.5}, {0.5, 0.0}, {0.0, 1.0}, {-1.0, 2.0}}) {
    EXPECT_NEAR(kl_divergence(DistributionSpec::gaussian(a), DistributionSpec::gaussian(b)),
                oracle::gaussian_kl_quadrature(a, b), 1e-9);
  }
  // Frozen from the quadrature oracle: KL(N(0,1) || N(0.5,1)).
  EXPECT_NEAR(kl_divergence(DistributionSpec::gaussian(0.0), DistributionSpec::gaussian(0.5)), 0.125, 1e-15);
}

TEST(KlDivergence, PoissonMatchesTruncatedSeries) {
  for (auto [a, b] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {0.5, 1.0}, {1.0, 0.5}, {3.0, 1.5}}) {
    EXPECT_NEAR(kl_divergence(DistributionSpec::poisson(a), DistributionSpec::poisson(b)),
                oracle::poisson_kl_series(a, b), 1e-12);
  }
  // Frozen from the series oracle: KL(Pois(1) || Pois(2)) = 1 - ln 2.
  EXPECT_NEAR(kl_divergence(DistributionSpec::poisson(1.0), DistributionSpec::poisson(2.0)),
              0.30685281944005466, 1e-14);
}

TEST(KlDivergence, NonnegativeAndZeroOnlyOnEquality) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mean(-5.0, 5.0);
  std::uniform_real_distribution<double> rate(0.05, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = mean(rng);
    const double b = mean(rng);
    EXPECT_GE(kl_divergence(DistributionSpec::gaussian(a), DistributionSpec::gaussian(b)), 0.0);
    const double r = rate(rng);
    const double s = rate(rng);
    EXPECT_GE(kl_divergence(DistributionSpec::poisson(r), DistributionSpec::poisson(s)), 0.0);
    EXPECT_EQ(kl_divergence(DistributionSpec::poisson(r), DistributionSpec::poisson(r)), 0.0);
  }
  EXPECT_THROW(kl_divergence(DistributionSpec::gaussian(0), DistributionSpec::poisson(1)), InvalidInput);
}

TEST(Sampler, SampleMeansAgreeWithLaw) {
  for (const auto& spec : {DistributionSpec::gaussian(0.5), DistributionSpec::poisson(1.5),
                           DistributionSpec::poisson(0.5)}) {
    Engine engine(99);
    Sampler draw(spec);
    std::vector<double> xs(200000);
    for (auto& x : xs) x = draw(engine);
    const auto s = summarize(xs);
    // Four standard errors: a false failure has probability below 1e-4.
    EXPECT_NEAR(s.mean, spec.mean(), 4.0 * s.std_error) << spec.to_string();
  }
}

TEST(Sampler, PoissonDrawsAreNonnegativeIntegers) {
  Engine engine(5);
  Sampler draw(DistributionSpec::poisson(3.0));
  for (int i = 0; i < 10000; ++i) {
    const double x = draw(engine);
    EXPECT_GE(x, 0.0);
    EXPECT_EQ(x, std::floor(x));
  }
}

TEST(PostChangeFamily, LeastFavorableLawIsTheBoundary) {
  const auto g = PostChangeFamily::gaussian_mean_at_least(0.5);
  EXPECT_EQ(lfl_of_family(g), DistributionSpec::gaussian(0.5));
  EXPECT_TRUE(g.contains(DistributionSpec::gaussian(1.0)));
  EXPECT_TRUE(g.contains(DistributionSpec::gaussian(0.5)));
  EXPECT_FALSE(g.contains(DistributionSpec::gaussian(0.4)));
  EXPECT_FALSE(g.contains(DistributionSpec::poisson(1.0)));

  const auto p = PostChangeFamily::parse("pois-rate-at-least:1");
  EXPECT_EQ(lfl_of_family(p), DistributionSpec::poisson(1.0));
  EXPECT_TRUE(p.contains(DistributionSpec::poisson(3.0)));
  EXPECT_FALSE(p.contains(DistributionSpec::poisson(0.9)));

  const auto e = PostChangeFamily::parse("lfl:pois:2");
  EXPECT_EQ(lfl_of_family(e), DistributionSpec::poisson(2.0));
  EXPECT_EQ(PostChangeFamily::parse(g.to_string()).to_string(), g.to_string());
  EXPECT_THROW(PostChangeFamily::parse("norm-mean-at-most:1"), InvalidInput);
}

TEST(Dominance, LflAgainstItselfHasZeroViolation) {
  const auto f = DistributionSpec::gaussian(0.0);
  const auto fam = PostChangeFamily::gaussian_mean_at_least(0.5);
  const auto r = check_lfl_dominance(f, fam, lfl_of_family(fam), 5000, 3);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.max_cdf_violation, 0.0);
}

TEST(Dominance, HoldsForFamilyMembersAndSlackFollowsDkw) {
  const auto f = DistributionSpec::poisson(0.5);
  const auto fam = PostChangeFamily::poisson_rate_at_least(1.0);
  const std::size_t n = 20000;
  const auto r = check_lfl_dominance(f, fam, DistributionSpec::poisson(3.0), n, 4);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.slack, 2.0 * std::sqrt(std::log(2.0 / 0.01) / (2.0 * n)), 1e-15);
  EXPECT_GT(r.mean_llr_under_g, r.mean_llr_under_lfl);
}

TEST(Dominance, DetectsAReversedOrdering) {
  // Claiming N(2,1) is least favorable for means >= 0.5 is false: N(0.5,1)
  // in the family yields a stochastically smaller log-likelihood ratio.
  const auto f = DistributionSpec::gaussian(0.0);
  const auto fam = PostChangeFamily::explicit_lfl(DistributionSpec::gaussian(2.0));
  const auto r = check_lfl_dominance(f, fam, DistributionSpec::gaussian(0.5), 20000, 8);
  EXPECT_FALSE(r.holds);
  EXPECT_GT(r.max_cdf_violation, 0.3);
}

TEST(Dominance, RejectsOutsidersAndTinySamples) {
  const auto f = DistributionSpec::gaussian(0.0);
  const auto fam = PostChangeFamily::gaussian_mean_at_least(0.5);
  EXPECT_THROW(check_lfl_dominance(f, fam, DistributionSpec::gaussian(0.1), 5000, 1), InvalidInput);
  EXPECT_THROW(check_lfl_dominance(f, fam, DistributionSpec::gaussian(1.0), 10, 1), InvalidInput);
}
