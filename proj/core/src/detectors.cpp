#include "rdecusum/detectors.hpp"

#include <cmath>

#include <fmt/format.h>

namespace rdecusum {

std::string_view to_string(DetectorKind kind) noexcept {
  switch (kind) {
    case DetectorKind::RdeCusum:
      return "rde";
    case DetectorKind::RobustCusum:
      return "robust-cusum";
    case DetectorKind::FractionalSampling:
      return "fractional";
  }
  return "?";
}

DetectorKind parse_detector_kind(std::string_view text) {
  if (text == "rde" || text == "rde-cusum") return DetectorKind::RdeCusum;
  if (text == "robust-cusum" || text == "robust") return DetectorKind::RobustCusum;
  if (text == "fractional" || text == "fractional-sampling") return DetectorKind::FractionalSampling;
  throw InvalidInput(fmt::format("unknown detector kind '{}'", text));
}

PolicyParams PolicyParams::rde_cusum(double threshold, double mu, double h) {
  PolicyParams p{threshold, mu, h, DetectorKind::RdeCusum, 1.0};
  p.validate();
  return p;
}

PolicyParams PolicyParams::robust_cusum(double threshold) {
  PolicyParams p{threshold, 0.0, 0.0, DetectorKind::RobustCusum, 1.0};
  p.validate();
  return p;
}

PolicyParams PolicyParams::fractional(double threshold, double prob) {
  PolicyParams p{threshold, 0.0, 0.0, DetectorKind::FractionalSampling, prob};
  p.validate();
  return p;
}

void PolicyParams::validate() const {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw InvalidInput(fmt::format("threshold must be finite and nonnegative, got {}", threshold));
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidInput("mu must be finite and nonnegative");
  if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidInput("h must be finite and nonnegative");
  if (kind == DetectorKind::RdeCusum && h > 0.0 && mu == 0.0) {
    throw InvalidInput("RDE-CUSUM with h > 0 needs mu > 0, or the statistic never returns to zero");
  }
  if (kind == DetectorKind::FractionalSampling && !(prob >= 0.0 && prob <= 1.0)) {
    throw InvalidInput(fmt::format("sampling probability must lie in [0, 1], got {}", prob));
  }
}

std::uint64_t PolicyParams::worst_case_skips() const {
  if (kind != DetectorKind::RdeCusum || h == 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(h / mu));
}

Trajectory run_detector(const PolicyParams& params,
                        const std::function<std::optional<double>()>& next_llr,
                        std::uint64_t max_steps, std::uint64_t coin_seed) {
  Detector detector(params, coin_seed);
  Trajectory out;
  for (std::uint64_t n = 0; n < max_steps; ++n) {
    const auto slot = next_llr();
    if (!slot) break;
    const auto outcome = detector.step([&] { return *slot; });
    out.statistic_path.push_back(outcome.statistic_after);
    out.sampled.push_back(outcome.sampled);
    if (outcome.alarmed) {
      out.stop_time = detector.state().step_index;
      break;
    }
  }
  out.steps_run = detector.state().step_index;
  out.samples_used = detector.state().samples_used;
  return out;
}

Trajectory run_detector(const PolicyParams& params, std::span<const double> llrs,
                        std::uint64_t max_steps, std::uint64_t coin_seed) {
  std::size_t next = 0;
  return run_detector(
      params,
      [&]() -> std::optional<double> {
        if (next == llrs.size()) return std::nullopt;
        return llrs[next++];
      },
      max_steps, coin_seed);
}

std::vector<double> classical_cusum_path(std::span<const double> llrs) {
  std::vector<double> path;
  path.reserve(llrs.size());
  double w = 0.0;
  for (double l : llrs) {
    w = std::max(w + l, 0.0);
    path.push_back(w);
  }
  return path;
}

}  // namespace rdecusum
