#include "rdecusum/design.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rdecusum/errors.hpp"
#include "rdecusum/stats.hpp"

namespace rdecusum {
namespace {

void require_open_unit(double value, const char* name) {
  if (!(value > 0.0 && value < 1.0)) {
    throw InvalidInput(fmt::format("{} must lie in (0, 1), got {}", name, value));
  }
}

double positive_kl(const DistributionSpec& p, const DistributionSpec& q) {
  const double kl = kl_divergence(p, q);
  if (!(kl > 0.0) || !std::isfinite(kl)) {
    throw InvalidInput(fmt::format("KL({} || {}) must be positive and finite", p.to_string(), q.to_string()));
  }
  return kl;
}

}  // namespace

void DesignConstraints::validate() const {
  require_open_unit(alpha, "alpha");
  require_open_unit(beta, "beta");
  if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidInput("h must be finite and nonnegative");
}

double threshold_for_far(double alpha) {
  require_open_unit(alpha, "alpha");
  return -std::log(alpha);
}

double mu_asymptotic(double beta, const DistributionSpec& f, const DistributionSpec& gbar) {
  require_open_unit(beta, "beta");
  return beta / (1.0 - beta) * kl_divergence(f, gbar);
}

LadderSample simulate_descending_ladder(const DistributionSpec& f, const DistributionSpec& gbar,
                                        std::uint64_t n_trials, std::uint64_t seed,
                                        std::uint64_t cap, unsigned workers) {
  positive_kl(f, gbar);
  const auto llr = llr_function(f, gbar);
  LadderSample out;
  out.epochs.resize(n_trials);
  out.undershoots.resize(n_trials);
  std::vector<char> capped(n_trials, 0);
  parallel_for(n_trials, workers, [&](std::size_t i) {
    Engine engine = make_engine(seed, i, streams::kObservations);
    Sampler draw(f);
    double walk = 0.0;
    std::uint64_t n = 0;
    while (n < cap) {
      ++n;
      walk += llr(draw(engine));
      if (walk < 0.0) break;
    }
    if (walk >= 0.0) capped[i] = 1;
    out.epochs[i] = static_cast<double>(n);
    out.undershoots[i] = walk < 0.0 ? -walk : 0.0;
  });
  for (char c : capped) out.capped += static_cast<std::uint64_t>(c);
  return out;
}

AppendixConstants estimate_appendix_constants(const DistributionSpec& f,
                                              const DistributionSpec& gbar, double h,
                                              std::uint64_t n_trials, std::uint64_t seed,
                                              unsigned workers) {
  if (n_trials < 10'000) throw InvalidInput("estimate_appendix_constants needs n_trials >= 10^4");
  if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidInput("h must be finite and nonnegative");
  positive_kl(f, gbar);

  const auto ladder = simulate_descending_ladder(f, gbar, n_trials, seed, kLadderWalkCap, workers);
  if (static_cast<double>(ladder.capped) > 1e-3 * static_cast<double>(n_trials)) {
    throw EstimationError(EstimationError::Kind::Unstable,
                          fmt::format("{} of {} ladder walks exceeded {} steps; drift too small",
                                      ladder.capped, n_trials, kLadderWalkCap));
  }

  // One-step quantities on an independent stream of single draws.
  const auto llr = llr_function(f, gbar);
  std::vector<double> truncated_negative;
  truncated_negative.reserve(n_trials);
  {
    Engine engine = make_engine(seed, 0, 3);
    Sampler draw(f);
    for (std::uint64_t i = 0; i < n_trials; ++i) {
      const double z = llr(draw(engine));
      if (z < 0.0) truncated_negative.push_back(std::abs(std::max(z, -h)));
    }
  }

  const auto epochs = summarize(ladder.epochs);
  const auto under = summarize(truncated_negative);
  const double n = static_cast<double>(n_trials);
  const double p = static_cast<double>(truncated_negative.size()) / n;

  AppendixConstants c;
  c.n_trials = n_trials;
  c.capped_walks = ladder.capped;
  c.p_negative = p;
  c.mean_truncated_undershoot = under.mean;
  c.c1 = epochs.mean;
  c.c1_ci = epochs.ci95();
  c.c2 = under.mean * p * p;
  // Delta method, treating the conditional mean and the frequency as
  // uncorrelated: var(m p^2) ~ p^4 var(m) + (2 m p)^2 var(p).
  const double var_p = p * (1.0 - p) / n;
  const double var_m = under.std_error * under.std_error;
  c.c2_ci = kZ95 * std::sqrt(p * p * p * p * var_m + 4.0 * under.mean * under.mean * p * p * var_p);
  if (!(c.c1 > 0.0) || (h > 0.0 && !(c.c2 > 0.0))) {
    throw EstimationError(EstimationError::Kind::Failed, "appendix constants are not positive");
  }
  return c;
}

double mu_for_pdc(double beta, const AppendixConstants& constants) {
  require_open_unit(beta, "beta");
  if (!(constants.c1 > 0.0)) throw InvalidInput("c1 must be positive");
  if (constants.c2 < 0.0) throw InvalidInput("c2 must be nonnegative");
  return beta / (1.0 - beta) * constants.c2 / constants.c1;
}

double wadd_lower_bound(double alpha, const DistributionSpec& gbar, const DistributionSpec& f) {
  require_open_unit(alpha, "alpha");
  return std::abs(std::log(alpha)) / positive_kl(gbar, f);
}

double wadd_upper_bound_first_order(double threshold, const DistributionSpec& gbar,
                                    const DistributionSpec& f) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw InvalidInput("threshold must be finite and nonnegative");
  }
  return threshold / positive_kl(gbar, f);
}

WaldCheck wald_identity_check(const DistributionSpec& f, const DistributionSpec& gbar,
                              std::uint64_t n_trials, std::uint64_t seed, unsigned workers) {
  const double kl = positive_kl(f, gbar);
  const auto ladder = simulate_descending_ladder(f, gbar, n_trials, seed, kLadderWalkCap, workers);
  if (ladder.capped > 0) {
    throw EstimationError(EstimationError::Kind::Unstable, "ladder walk exceeded its cap");
  }
  std::vector<double> scaled(ladder.epochs.size());
  std::vector<double> gap(ladder.epochs.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] = kl * ladder.epochs[i];
    gap[i] = ladder.undershoots[i] - scaled[i];
  }
  const auto u = summarize(ladder.undershoots);
  const auto s = summarize(scaled);
  const auto d = summarize(gap);
  WaldCheck w;
  w.n_trials = n_trials;
  w.mean_undershoot = u.mean;
  w.mean_undershoot_ci = u.ci95();
  w.mean_epoch_times_kl = s.mean;
  w.mean_epoch_times_kl_ci = s.ci95();
  w.gap = d.mean;
  w.gap_std_error = d.std_error;
  return w;
}

}  // namespace rdecusum
