#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace rdecusum {

/// Two-sided 95% normal quantile.
inline constexpr double kZ95 = 1.959963984540054;

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, never on how work was scheduled to produce them.
double pairwise_sum(std::span<const double> values);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;

  [[nodiscard]] double ci95() const noexcept { return kZ95 * std_error; }
};

/// Mean, unbiased variance and standard error via two pairwise-summed passes.
SampleSummary summarize(std::span<const double> values);

/// Runs `body(i)` for every i in [0, count) on up to `workers` threads.
/// Items are split into contiguous blocks; `workers == 0` means hardware
/// concurrency. Exceptions from any item are rethrown on the caller.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

unsigned default_workers() noexcept;

}  // namespace rdecusum
