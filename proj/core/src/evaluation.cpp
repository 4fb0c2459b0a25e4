#include "rdecusum/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rdecusum/errors.hpp"
#include "rdecusum/random.hpp"
#include "rdecusum/stats.hpp"

namespace rdecusum {
namespace {

/// Shared per-experiment state; each trial copies the samplers so that no
/// mutable state crosses threads.
struct TrialKernel {
  Sampler pre;
  Sampler post;
  AffineLlr llr;
  PolicyParams params;
  std::optional<std::uint64_t> change_point;
  std::uint64_t base_seed;

  explicit TrialKernel(const ExperimentConfig& c)
      : pre(c.f),
        post(c.true_g),
        llr(llr_function(c.f, c.gbar())),
        params(c.params),
        change_point(c.change_point),
        base_seed(c.base_seed) {}

  TrialRecord run(std::uint64_t trial, std::uint64_t max_steps) const {
    Engine engine = make_engine(base_seed, trial, streams::kObservations);
    Detector detector(params, derive_seed(base_seed, trial, streams::kCoin));
    Sampler draw_pre = pre;
    Sampler draw_post = post;
    TrialRecord rec;
    for (std::uint64_t n = 1; n <= max_steps; ++n) {
      const bool changed = change_point && n >= *change_point;
      // The observation exists whether or not the detector reads it.
      const double x = changed ? draw_post(engine) : draw_pre(engine);
      const auto step = detector.step([&] { return llr(x); });
      if (step.sampled && !changed) ++rec.samples_used_prechange;
      if (!rec.undershoot_at_first_negative && step.statistic_after < 0.0) {
        rec.undershoot_at_first_negative = -step.statistic_after;
      }
      if (step.alarmed) {
        rec.stop_time = n;
        break;
      }
    }
    rec.steps_run = detector.state().step_index;
    rec.samples_used_total = detector.state().samples_used;
    return rec;
  }
};

MetricEstimate make_estimate(Metric name, const SampleSummary& s, std::uint64_t n,
                             std::uint64_t censored) {
  return {name, s.mean, s.ci95(), n, censored};
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config, std::uint64_t max_steps) {
  const TrialKernel kernel(config);
  std::vector<TrialRecord> out(config.n_trials);
  parallel_for(config.n_trials, config.workers,
               [&](std::size_t i) { out[i] = kernel.run(i, max_steps); });
  return out;
}

FarEstimate far_from_times(std::span<const double> times, std::uint64_t censored) {
  const auto n = static_cast<std::uint64_t>(times.size());
  if (censored == n) {
    throw EstimationError(EstimationError::Kind::Failed,
                          "every trial was censored; raise max_steps or lower the threshold");
  }
  const auto s = summarize(times);
  FarEstimate est;
  est.mean_time = make_estimate(Metric::EInfTau, s, n, censored);
  est.far = {Metric::Far, 1.0 / s.mean, s.ci95() / (s.mean * s.mean), n, censored};
  return est;
}

/// Running-maximum records of one threshold-free statistic path: stopping
/// time for threshold A is the time of the first record with value >= A.
struct PassageRecord {
  std::vector<double> level;
  std::vector<std::uint64_t> time;

  std::optional<std::uint64_t> stop_time(double threshold) const {
    const auto it = std::lower_bound(level.begin(), level.end(), threshold);
    if (it == level.end()) return std::nullopt;
    return time[static_cast<std::size_t>(it - level.begin())];
  }
};

PassageRecord record_passages(const TrialKernel& kernel, std::uint64_t trial, double cap,
                              std::uint64_t max_steps) {
  // Threshold never reached inside the loop; stop manually at `cap`.
  auto params = kernel.params;
  params.threshold = std::numeric_limits<double>::max();
  Engine engine = make_engine(kernel.base_seed, trial, streams::kObservations);
  Detector detector(params, derive_seed(kernel.base_seed, trial, streams::kCoin));
  Sampler draw_pre = kernel.pre;
  Sampler draw_post = kernel.post;
  PassageRecord rec;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 1; n <= max_steps; ++n) {
    const bool changed = kernel.change_point && n >= *kernel.change_point;
    const double x = changed ? draw_post(engine) : draw_pre(engine);
    const auto step = detector.step([&] { return kernel.llr(x); });
    if (step.statistic_after > best) {
      best = step.statistic_after;
      rec.level.push_back(best);
      rec.time.push_back(n);
      if (best >= cap) break;
    }
  }
  return rec;
}

/// Threshold-free pre-change pass: the running maximum of the statistic and
/// the samples used, over steps 1..last and 1..checkpoint.
struct PathSummary {
  double max_statistic = -std::numeric_limits<double>::infinity();
  std::uint64_t samples = 0;
  std::uint64_t checkpoint_samples = 0;
};

PathSummary summarize_path(const TrialKernel& kernel, std::uint64_t trial, std::uint64_t last,
                           std::uint64_t checkpoint) {
  auto params = kernel.params;
  params.threshold = std::numeric_limits<double>::max();
  Engine engine = make_engine(kernel.base_seed, trial, streams::kObservations);
  Detector detector(params, derive_seed(kernel.base_seed, trial, streams::kCoin));
  Sampler draw = kernel.pre;
  PathSummary out;
  for (std::uint64_t n = 1; n <= last; ++n) {
    const double x = draw(engine);
    const auto step = detector.step([&] { return kernel.llr(x); });
    out.max_statistic = std::max(out.max_statistic, step.statistic_after);
    if (n == checkpoint) out.checkpoint_samples = detector.state().samples_used;
  }
  out.samples = detector.state().samples_used;
  return out;
}

FarEstimate far_from_passages(const std::vector<PassageRecord>& records, double threshold,
                              std::uint64_t max_steps) {
  std::vector<double> times(records.size());
  std::uint64_t censored = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto t = records[i].stop_time(threshold);
    if (!t) ++censored;
    times[i] = static_cast<double>(t.value_or(max_steps));
  }
  return far_from_times(times, censored);
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::Far:
      return "FAR";
    case Metric::EInfTau:
      return "E_inf_tau";
    case Metric::PdcDirect:
      return "PDC_direct";
    case Metric::PdcRenewal:
      return "PDC_renewal";
    case Metric::Wadd:
      return "WADD";
    case Metric::DelayAtOne:
      return "delay_at_one";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  params.validate();
  if (!family.contains(true_g)) {
    throw InvalidInput(fmt::format("true post-change law {} is not in {}", true_g.to_string(),
                                   family.to_string()));
  }
  llr_function(f, gbar());
  if (change_point && *change_point == 0) throw InvalidInput("change point counts from 1");
  if (n_trials == 0) throw InvalidInput("n_trials must be positive");
  if (max_steps == 0) throw InvalidInput("max_steps must be positive");
}

std::vector<TrialRecord> simulate_trials(const ExperimentConfig& config) {
  config.validate();
  return run_trials(config, config.max_steps);
}

FarEstimate estimate_far(const ExperimentConfig& config) {
  if (config.change_point) throw InvalidInput("estimate_far needs a config with no change point");
  const auto records = simulate_trials(config);
  std::vector<double> times(records.size());
  std::uint64_t censored = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].stop_time) ++censored;
    times[i] = static_cast<double>(records[i].stop_time.value_or(config.max_steps));
  }
  return far_from_times(times, censored);
}

PdcDirectEstimate estimate_pdc_direct(const ExperimentConfig& config,
                                      const PdcDirectOptions& options) {
  if (config.change_point) {
    throw InvalidInput("estimate_pdc_direct needs a config with no change point");
  }
  if (options.horizon < 20) throw InvalidInput("PDC horizon must be at least 20 steps");
  config.validate();

  // Condition {tau >= k}: survive steps 1..k-1 without alarm. Neither the
  // statistic path nor the sampling decisions depend on the threshold, so one
  // threshold-free pass per trial serves every candidate threshold.
  const std::uint64_t last = options.horizon - 1;
  const std::uint64_t short_last = options.horizon / 10 - 1;
  const TrialKernel kernel(config);
  std::vector<PathSummary> paths(config.n_trials);
  parallel_for(config.n_trials, config.workers,
               [&](std::size_t i) { paths[i] = summarize_path(kernel, i, last, short_last); });

  const double n_trials = static_cast<double>(config.n_trials);
  const auto needed = std::max<std::uint64_t>(
      options.min_survivors, static_cast<std::uint64_t>(std::ceil(options.min_survival * n_trials)));
  double threshold = config.params.threshold;
  auto survivors_at = [&](double a) {
    return static_cast<std::uint64_t>(std::count_if(
        paths.begin(), paths.end(), [a](const PathSummary& p) { return p.max_statistic < a; }));
  };
  for (int raise = 0; raise < options.max_threshold_raises && survivors_at(threshold) < needed; ++raise) {
    threshold += options.threshold_step;
  }

  std::vector<double> ratio;
  std::vector<double> short_ratio;
  for (const auto& p : paths) {
    if (!(p.max_statistic < threshold)) continue;
    ratio.push_back(static_cast<double>(p.samples) / static_cast<double>(last));
    short_ratio.push_back(static_cast<double>(p.checkpoint_samples) / static_cast<double>(short_last));
  }
  if (ratio.size() < options.min_survivors) {
    throw EstimationError(EstimationError::Kind::Unstable,
                          fmt::format("only {} of {} trials survived {} steps at threshold {}",
                                      ratio.size(), config.n_trials, last, threshold));
  }
  const auto n = static_cast<std::uint64_t>(ratio.size());
  const std::uint64_t dropped = config.n_trials - n;
  PdcDirectEstimate est;
  est.pdc = make_estimate(Metric::PdcDirect, summarize(ratio), n, dropped);
  est.pdc_short_horizon = make_estimate(Metric::PdcDirect, summarize(short_ratio), n, dropped);
  est.threshold_used = threshold;
  est.survivors = n;
  return est;
}

MetricEstimate estimate_pdc_renewal(const DistributionSpec& f, const DistributionSpec& gbar,
                                    const PolicyParams& params, std::uint64_t n_cycles,
                                    std::uint64_t seed, unsigned workers) {
  params.validate();
  if (!(params.mu > 0.0)) throw InvalidInput("renewal duty cycle needs mu > 0");
  if (n_cycles == 0) throw InvalidInput("n_cycles must be positive");
  const auto llr = llr_function(f, gbar);
  const double floor = 0.0 - params.h;
  constexpr std::uint64_t kCycleCap = 10'000'000;

  // Per cycle: lambda_A and T, or NaN when the cycle exits above A.
  std::vector<double> lambda(n_cycles);
  std::vector<double> skips(n_cycles);
  parallel_for(n_cycles, workers, [&](std::size_t i) {
    Engine engine = make_engine(seed, i, streams::kObservations);
    Sampler draw(f);
    double d = 0.0;
    std::uint64_t n = 0;
    while (n < kCycleCap) {
      ++n;
      d = std::max(d + llr(draw(engine)), floor);
      if (d < 0.0 || d >= params.threshold) break;
    }
    if (d < 0.0) {
      lambda[i] = static_cast<double>(n);
      skips[i] = std::ceil(std::abs(d) / params.mu);
    } else {
      lambda[i] = skips[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });

  std::vector<double> lam;
  std::vector<double> tee;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (std::isnan(lambda[i])) continue;
    lam.push_back(lambda[i]);
    tee.push_back(skips[i]);
  }
  if (lam.empty()) {
    throw EstimationError(EstimationError::Kind::Failed,
                          "no renewal cycle exited below zero; threshold too small for the drift");
  }
  const auto a = summarize(lam);
  const auto b = summarize(tee);
  const double denom = a.mean + b.mean;
  const double ratio = a.mean / denom;
  // Influence function of a / (a + b).
  std::vector<double> psi(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    psi[i] = (b.mean * lam[i] - a.mean * tee[i]) / (denom * denom);
  }
  const auto s = summarize(psi);
  const auto m = static_cast<std::uint64_t>(lam.size());
  return {Metric::PdcRenewal, ratio, s.ci95(), m, n_cycles - m};
}

WaddEstimate estimate_wadd(const ExperimentConfig& config) {
  if (config.change_point != std::optional<std::uint64_t>{1}) {
    throw InvalidInput("estimate_wadd needs change_point = 1");
  }
  const auto records = simulate_trials(config);
  std::vector<double> delays(records.size());
  std::uint64_t censored = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].stop_time) ++censored;
    delays[i] = static_cast<double>(records[i].stop_time.value_or(config.max_steps));
  }
  const auto n = static_cast<std::uint64_t>(records.size());
  if (static_cast<double>(censored) > 0.01 * static_cast<double>(n)) {
    throw EstimationError(EstimationError::Kind::Unstable,
                          fmt::format("{} of {} delay trials censored at {} steps", censored, n,
                                      config.max_steps));
  }
  const auto s = summarize(delays);
  WaddEstimate est;
  est.worst_case_skips = config.params.worst_case_skips();
  est.delay_at_one = make_estimate(Metric::DelayAtOne, s, n, censored);
  est.wadd = est.delay_at_one;
  est.wadd.name = Metric::Wadd;
  est.wadd.value += static_cast<double>(est.worst_case_skips);
  return est;
}

Calibration calibrate_threshold(ExperimentConfig config, double target_far,
                                ThresholdBracket bracket, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("calibration tolerance must be positive");
  if (!(target_far > 0.0 && target_far < 1.0)) throw InvalidInput("target FAR must lie in (0, 1)");
  if (!(bracket.lo >= 0.0 && bracket.hi > bracket.lo)) {
    throw InvalidInput("calibration bracket must satisfy 0 <= lo < hi");
  }
  if (config.change_point) throw InvalidInput("calibration needs a config with no change point");
  config.params.threshold = bracket.hi;
  config.validate();

  const TrialKernel kernel(config);
  std::vector<PassageRecord> records(config.n_trials);
  parallel_for(config.n_trials, config.workers, [&](std::size_t i) {
    records[i] = record_passages(kernel, i, bracket.hi, config.max_steps);
  });
  auto far_at = [&](double a) { return far_from_passages(records, a, config.max_steps); };

  const auto at_lo = far_at(bracket.lo);
  const auto at_hi = far_at(bracket.hi);
  if (!(at_lo.far.value >= target_far && at_hi.far.value <= target_far)) {
    throw InvalidInput(fmt::format(
        "bracket [{}, {}] gives FAR [{}, {}], which does not straddle target {}", bracket.lo,
        bracket.hi, at_hi.far.value, at_lo.far.value, target_far));
  }

  double lo = bracket.lo;
  double hi = bracket.hi;
  Calibration cal;
  for (cal.iterations = 1; cal.iterations <= 200; ++cal.iterations) {
    const double mid = 0.5 * (lo + hi);
    cal.threshold = mid;
    cal.far = far_at(mid);
    if (std::abs(cal.far.far.value - target_far) <= tol * target_far) {
      cal.converged = true;
      return cal;
    }
    if (cal.far.far.value > target_far) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-10) break;
  }
  return cal;
}

std::vector<OcRow> operating_characteristic_sweep(const SweepPlan& plan) {
  if (plan.detectors.empty()) throw InvalidInput("sweep needs at least one detector");
  if (plan.thresholds.empty() == plan.target_fars.empty()) {
    throw InvalidInput("sweep needs exactly one of a threshold grid or a target-FAR grid");
  }
  const auto gbar = lfl_of_family(plan.family);
  const std::size_t points = std::max(plan.thresholds.size(), plan.target_fars.size());

  std::vector<OcRow> rows;
  for (const auto& det : plan.detectors) {
    for (std::size_t p = 0; p < points; ++p) {
      ExperimentConfig cfg{plan.f,        plan.family,    plan.true_g,    det.params,
                           std::nullopt,  plan.n_trials,  plan.max_steps, plan.base_seed,
                           plan.workers};
      OcRow row{det.name, det.params, std::nullopt, {}, {}, std::nullopt, std::nullopt};
      if (!plan.thresholds.empty()) {
        cfg.params.threshold = plan.thresholds[p];
        row.far = estimate_far(cfg);
      } else {
        row.target_far = plan.target_fars[p];
        const auto cal = calibrate_threshold(cfg, plan.target_fars[p], plan.calibration_bracket,
                                             plan.calibration_tol);
        cfg.params.threshold = cal.threshold;
        row.far = cal.far;
      }
      row.params = cfg.params;

      auto delay_cfg = cfg;
      delay_cfg.change_point = 1;
      row.wadd = estimate_wadd(delay_cfg);

      if (plan.compute_pdc) {
        auto pdc_cfg = cfg;
        pdc_cfg.n_trials = plan.pdc_trials;
        row.pdc_direct = estimate_pdc_direct(pdc_cfg, plan.pdc_direct);
        if (cfg.params.kind == DetectorKind::RdeCusum && cfg.params.mu > 0.0) {
          // Same threshold as the direct estimate, so the two are comparable.
          auto renewal_params = cfg.params;
          renewal_params.threshold = row.pdc_direct->threshold_used;
          row.pdc_renewal = estimate_pdc_renewal(plan.f, gbar, renewal_params, plan.renewal_cycles,
                                                 plan.base_seed, plan.workers);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace rdecusum
