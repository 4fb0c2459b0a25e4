#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdecusum/detectors.hpp"
#include "rdecusum/distributions.hpp"

namespace rdecusum {

/// One Monte-Carlo experiment: X_n ~ f before the change point, ~ true_g from
/// it on. `change_point` counts from 1; nullopt means the change never occurs.
struct ExperimentConfig {
  DistributionSpec f;
  PostChangeFamily family;
  DistributionSpec true_g;
  PolicyParams params;
  std::optional<std::uint64_t> change_point;
  std::uint64_t n_trials = 1000;
  std::uint64_t max_steps = 10'000'000;
  std::uint64_t base_seed = 0;
  unsigned workers = 0;

  [[nodiscard]] DistributionSpec gbar() const { return lfl_of_family(family); }
  void validate() const;
};

enum class Metric { Far, EInfTau, PdcDirect, PdcRenewal, Wadd, DelayAtOne };

std::string_view to_string(Metric metric) noexcept;

struct MetricEstimate {
  Metric name = Metric::Far;
  double value = 0.0;
  double ci_halfwidth = 0.0;  // 95%
  std::uint64_t n_trials = 0;
  std::uint64_t censored_trials = 0;
};

struct TrialRecord {
  std::optional<std::uint64_t> stop_time;
  std::uint64_t steps_run = 0;
  std::uint64_t samples_used_prechange = 0;
  std::uint64_t samples_used_total = 0;
  /// |statistic| the first time it went below zero, if it ever did.
  std::optional<double> undershoot_at_first_negative;
};

/// Runs every trial of `config`; trial i uses observation stream (seed, i, 0)
/// and coin stream (seed, i, 1), so detectors given the same seed see the
/// same observations.
std::vector<TrialRecord> simulate_trials(const ExperimentConfig& config);

struct FarEstimate {
  MetricEstimate far;        // 1 / E_inf[tau], delta-method CI
  MetricEstimate mean_time;  // E_inf[tau], censored trials imputed at max_steps
};

FarEstimate estimate_far(const ExperimentConfig& config);

struct PdcDirectOptions {
  std::uint64_t horizon = 100'000;
  double min_survival = 0.02;
  double threshold_step = 1.0;
  int max_threshold_raises = 40;
  std::uint64_t min_survivors = 100;
};

struct PdcDirectEstimate {
  MetricEstimate pdc;
  /// Same survivors measured over the first horizon/10 steps.
  MetricEstimate pdc_short_horizon;
  double threshold_used = 0.0;
  std::uint64_t survivors = 0;
};

/// Finite-horizon duty cycle: over trials with no alarm in steps 1..k-1,
/// the mean of (samples used in steps 1..k-1) / (k-1).
PdcDirectEstimate estimate_pdc_direct(const ExperimentConfig& config,
                                      const PdcDirectOptions& options = {});

/// Duty cycle from i.i.d. renewal cycles of the statistic under f:
/// E[lambda_A | exit below] / (E[lambda_A | exit below] + E[T | exit below]),
/// T(x) = ceil(|max(x, -h)| / mu).
MetricEstimate estimate_pdc_renewal(const DistributionSpec& f, const DistributionSpec& gbar,
                                    const PolicyParams& params, std::uint64_t n_cycles,
                                    std::uint64_t seed, unsigned workers = 0);

struct WaddEstimate {
  /// ceil(h/mu) + E_1[tau] for RDE-CUSUM; E_1[tau] for the other kinds.
  MetricEstimate wadd;
  /// E_1[tau] with the statistic started at zero.
  MetricEstimate delay_at_one;
  std::uint64_t worst_case_skips = 0;
};

WaddEstimate estimate_wadd(const ExperimentConfig& config);

struct ThresholdBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct Calibration {
  double threshold = 0.0;
  FarEstimate far;
  int iterations = 0;
  bool converged = false;
};

/// Bisection on the threshold until |FAR - target| / target <= tol.
///
/// All candidate thresholds are scored on the same sample paths: each trial's
/// statistic path does not depend on the threshold, so it is simulated once
/// up to `bracket.hi` and every candidate's stopping time is read off the
/// running-maximum record of that path. The result is identical to calling
/// estimate_far() at each candidate with the same seed.
Calibration calibrate_threshold(ExperimentConfig config, double target_far,
                                ThresholdBracket bracket, double tol);

/// A named detector in a sweep; `params.threshold` is filled per grid point.
struct DetectorSpec {
  std::string name;
  PolicyParams params;
};

struct SweepPlan {
  DistributionSpec f;
  PostChangeFamily family;
  DistributionSpec true_g;
  std::vector<DetectorSpec> detectors;
  std::vector<double> thresholds;   // either a threshold grid...
  std::vector<double> target_fars;  // ...or a target-FAR grid
  ThresholdBracket calibration_bracket{0.1, 12.0};
  double calibration_tol = 0.02;
  std::uint64_t n_trials = 5000;
  std::uint64_t max_steps = 100'000;
  std::uint64_t base_seed = 1;
  bool compute_pdc = true;
  std::uint64_t pdc_trials = 500;
  PdcDirectOptions pdc_direct{};
  std::uint64_t renewal_cycles = 100'000;
  unsigned workers = 0;
};

struct OcRow {
  std::string detector;
  PolicyParams params;
  std::optional<double> target_far;
  FarEstimate far;
  WaddEstimate wadd;
  std::optional<PdcDirectEstimate> pdc_direct;
  std::optional<MetricEstimate> pdc_renewal;
};

/// One row per (detector, grid point), detectors in plan order. Every
/// detector shares `base_seed`, so rows at the same grid point are computed
/// on common sample paths. PDC_direct may raise the threshold (see
/// PdcDirectOptions); PDC_renewal is evaluated at that same threshold.
std::vector<OcRow> operating_characteristic_sweep(const SweepPlan& plan);

}  // namespace rdecusum
