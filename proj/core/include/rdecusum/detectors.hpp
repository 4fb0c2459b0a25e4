#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdecusum/errors.hpp"
#include "rdecusum/random.hpp"

namespace rdecusum {

enum class DetectorKind { RdeCusum, RobustCusum, FractionalSampling };

std::string_view to_string(DetectorKind kind) noexcept;
/// Accepts `rde`, `robust-cusum` and `fractional`.
DetectorKind parse_detector_kind(std::string_view text);

/// Tunables of one stopping rule.
///
/// For RdeCusum the statistic is truncated below at -h after sampled updates
/// and climbs back by mu per skipped step. RobustCusum is RdeCusum with
/// mu = h = 0. FractionalSampling runs the robust CUSUM recursion on a coin
/// flip with probability `prob` of using each observation after the first.
struct PolicyParams {
  double threshold = 0.0;
  double mu = 0.0;
  double h = 0.0;
  DetectorKind kind = DetectorKind::RobustCusum;
  double prob = 0.5;

  static PolicyParams rde_cusum(double threshold, double mu, double h);
  static PolicyParams robust_cusum(double threshold);
  static PolicyParams fractional(double threshold, double prob = 0.5);

  void validate() const;

  /// Skips forced by the worst pre-change history, ceil(h / mu); zero for the
  /// kinds that never drop below zero.
  [[nodiscard]] std::uint64_t worst_case_skips() const;
};

enum class Action { Sample, Skip };

struct DetectorState {
  double statistic = 0.0;
  std::uint64_t step_index = 0;
  std::uint64_t samples_used = 0;
  bool alarmed = false;
};

struct StepOutcome {
  bool sampled = false;
  double statistic_after = 0.0;
  bool alarmed = false;
};

/// Streaming stopping rule with a two-phase step: next_action() announces
/// whether observation n+1 will be used, computed from the state at n only;
/// update() then consumes the log-likelihood ratio (present iff Sample).
class Detector {
 public:
  explicit Detector(const PolicyParams& params, std::uint64_t coin_seed = 0)
      : params_(validated(params)), floor_(0.0 - params.h), coin_(coin_seed), flip_(params.prob) {}

  Action next_action() {
    if (state_.alarmed) throw ContractViolation("next_action() called after alarm");
    if (!pending_) pending_ = decide();
    return *pending_;
  }

  StepOutcome update(std::optional<double> llr) {
    if (state_.alarmed) throw ContractViolation("update() called after alarm");
    if (!pending_) throw ContractViolation("update() without a preceding next_action()");
    const bool sampled = *pending_ == Action::Sample;
    if (sampled != llr.has_value()) {
      throw ContractViolation(sampled ? "Sample announced but no observation supplied"
                                      : "Skip announced but an observation was supplied");
    }
    pending_.reset();
    if (sampled) {
      if (!std::isfinite(*llr)) throw InvalidInput("log-likelihood ratio must be finite");
      state_.statistic = params_.kind == DetectorKind::RdeCusum
                             ? std::max(state_.statistic + *llr, floor_)
                             : std::max(state_.statistic + *llr, 0.0);
      ++state_.samples_used;
    } else if (params_.kind == DetectorKind::RdeCusum) {
      state_.statistic = std::min(state_.statistic + params_.mu, 0.0);
    }
    ++state_.step_index;
    state_.alarmed = state_.statistic >= params_.threshold;
    return {sampled, state_.statistic, state_.alarmed};
  }

  /// next_action() followed by update(), evaluating `llr` only when sampled.
  template <class LlrOf>
  StepOutcome step(LlrOf&& llr_of) {
    if (next_action() == Action::Sample) return update(llr_of());
    return update(std::nullopt);
  }

  [[nodiscard]] const DetectorState& state() const noexcept { return state_; }
  [[nodiscard]] const PolicyParams& params() const noexcept { return params_; }

 private:
  static const PolicyParams& validated(const PolicyParams& params) {
    params.validate();
    return params;
  }

  Action decide() {
    switch (params_.kind) {
      case DetectorKind::RdeCusum:
      case DetectorKind::RobustCusum:
        return state_.statistic >= 0.0 ? Action::Sample : Action::Skip;
      case DetectorKind::FractionalSampling:
        if (state_.step_index == 0) return Action::Sample;
        return flip_(coin_) ? Action::Sample : Action::Skip;
    }
    return Action::Sample;
  }

  PolicyParams params_;
  double floor_;
  DetectorState state_{};
  std::optional<Action> pending_;
  Engine coin_;
  std::bernoulli_distribution flip_;
};

struct Trajectory {
  std::optional<std::uint64_t> stop_time;
  std::uint64_t steps_run = 0;
  std::uint64_t samples_used = 0;
  std::vector<double> statistic_path;
  std::vector<bool> sampled;

  [[nodiscard]] bool censored() const noexcept { return !stop_time.has_value(); }
};

/// Runs until alarm or `max_steps`. `next_llr` yields the log-likelihood ratio
/// of the next stream slot, or nullopt once the stream is exhausted; it is
/// called once per step, including skipped steps, so slots stay aligned with
/// time. A stream that runs dry yields a censored trajectory.
Trajectory run_detector(const PolicyParams& params,
                        const std::function<std::optional<double>()>& next_llr,
                        std::uint64_t max_steps, std::uint64_t coin_seed = 0);

Trajectory run_detector(const PolicyParams& params, std::span<const double> llrs,
                        std::uint64_t max_steps, std::uint64_t coin_seed = 0);

/// Classical CUSUM recursion W_n = max(W_{n-1} + l_n, 0), W_0 = 0.
std::vector<double> classical_cusum_path(std::span<const double> llrs);

}  // namespace rdecusum
