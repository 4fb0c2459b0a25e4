#pragma once

#include <cstdint>
#include <vector>

#include "rdecusum/distributions.hpp"

namespace rdecusum {

/// FAR <= alpha and PDC <= beta, with the truncation depth h fixed by the user.
struct DesignConstraints {
  double alpha = 0.0;
  double beta = 0.0;
  double h = 0.0;

  void validate() const;
};

/// Threshold that guarantees FAR <= alpha: |ln alpha|.
double threshold_for_far(double alpha);

/// Largest mu admitted by the large-A, large-h duty-cycle rule:
/// beta / (1 - beta) * KL(f || gbar).
double mu_asymptotic(double beta, const DistributionSpec& f, const DistributionSpec& gbar);

/// Monte-Carlo estimates of the constants in the finite-h duty-cycle bound.
///
///   c1 = E_inf[lambda_inf], lambda_inf the first n with sum_{i<=n} Z_i < 0;
///   c2 = E_inf[|max(Z, -h)| | Z < 0] * P_inf(Z < 0)^2,
///
/// with Z = log gbar(X)/f(X), X ~ f.
struct AppendixConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c1_ci = 0.0;
  double c2_ci = 0.0;

  double p_negative = 0.0;                  // P_inf(Z < 0)
  double mean_truncated_undershoot = 0.0;   // E_inf[|max(Z,-h)| | Z < 0]
  std::uint64_t n_trials = 0;
  std::uint64_t capped_walks = 0;
};

inline constexpr std::uint64_t kLadderWalkCap = 1'000'000;

AppendixConstants estimate_appendix_constants(const DistributionSpec& f,
                                              const DistributionSpec& gbar, double h,
                                              std::uint64_t n_trials, std::uint64_t seed,
                                              unsigned workers = 0);

/// mu bound from the finite-h rule: beta / (1 - beta) * c2 / c1.
double mu_for_pdc(double beta, const AppendixConstants& constants);

/// First-order lower bound on worst-case delay for any policy meeting FAR <= alpha:
/// |ln alpha| / KL(gbar || f).
double wadd_lower_bound(double alpha, const DistributionSpec& gbar, const DistributionSpec& f);

/// Leading term of the RDE-CUSUM delay bound: A / KL(gbar || f).
double wadd_upper_bound_first_order(double threshold, const DistributionSpec& gbar,
                                    const DistributionSpec& f);

/// Descending ladder epochs of the pre-change log-likelihood random walk:
/// per trial, lambda_inf and the first value of the walk below zero.
struct LadderSample {
  std::vector<double> epochs;       // lambda_inf (as double for summation)
  std::vector<double> undershoots;  // |D_{lambda_inf}|
  std::uint64_t capped = 0;
};

LadderSample simulate_descending_ladder(const DistributionSpec& f, const DistributionSpec& gbar,
                                        std::uint64_t n_trials, std::uint64_t seed,
                                        std::uint64_t cap = kLadderWalkCap, unsigned workers = 0);

/// Monte-Carlo check of E_inf[|D_{lambda_inf}|] = E_inf[lambda_inf] * KL(f || gbar).
struct WaldCheck {
  double mean_undershoot = 0.0;
  double mean_undershoot_ci = 0.0;
  double mean_epoch_times_kl = 0.0;
  double mean_epoch_times_kl_ci = 0.0;
  /// Paired difference |D| - KL * lambda over trials, and its standard error.
  double gap = 0.0;
  double gap_std_error = 0.0;
  std::uint64_t n_trials = 0;
};

WaldCheck wald_identity_check(const DistributionSpec& f, const DistributionSpec& gbar,
                              std::uint64_t n_trials, std::uint64_t seed, unsigned workers = 0);

}  // namespace rdecusum
