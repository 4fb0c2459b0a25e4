#include "rdecusum/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "rdecusum/errors.hpp"

namespace rdecusum {
namespace {

bool is_count(double x) { return x >= 0.0 && std::floor(x) == x && std::isfinite(x); }

double parse_real(std::string_view text, std::string_view context) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw InvalidInput(fmt::format("{}: '{}' is not a number", context, text));
  }
  return value;
}

void require_same_kind(const DistributionSpec& a, const DistributionSpec& b) {
  if (a.law() != b.law()) {
    throw InvalidInput(fmt::format("mixed laws {} and {}", a.to_string(), b.to_string()));
  }
}

}  // namespace

DistributionSpec DistributionSpec::gaussian(double mean) {
  if (!std::isfinite(mean)) throw InvalidInput("Gaussian mean must be finite");
  return {Law::GaussianUnitVar, mean};
}

DistributionSpec DistributionSpec::poisson(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidInput(fmt::format("Poisson rate must be positive, got {}", rate));
  }
  return {Law::Poisson, rate};
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput(fmt::format("distribution '{}' must look like norm:<mean> or pois:<rate>", text));
  }
  const auto kind = text.substr(0, colon);
  const double param = parse_real(text.substr(colon + 1), text);
  if (kind == "norm" || kind == "gauss") return gaussian(param);
  if (kind == "pois" || kind == "poisson") return poisson(param);
  throw InvalidInput(fmt::format("unknown distribution kind '{}'", kind));
}

double DistributionSpec::log_density(double x) const {
  switch (law_) {
    case Law::GaussianUnitVar: {
      const double d = x - param_;
      return -0.5 * d * d - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    case Law::Poisson:
      if (!is_count(x)) return -std::numeric_limits<double>::infinity();
      return x * std::log(param_) - param_ - std::lgamma(x + 1.0);
  }
  return 0.0;
}

double DistributionSpec::density(double x) const { return std::exp(log_density(x)); }

std::string DistributionSpec::to_string() const {
  return fmt::format("{}:{}", law_ == Law::Poisson ? "pois" : "norm", param_);
}

Sampler::Sampler(const DistributionSpec& spec)
    : spec_(spec),
      dist_(spec.law() == Law::Poisson
                ? decltype(dist_){std::poisson_distribution<std::int64_t>(spec.param())}
                : decltype(dist_){std::normal_distribution<double>(spec.param(), 1.0)}) {}

double sample(const DistributionSpec& spec, Engine& engine) {
  Sampler s(spec);
  return s(engine);
}

AffineLlr llr_function(const DistributionSpec& f, const DistributionSpec& gbar) {
  require_same_kind(f, gbar);
  const double a = f.param();
  const double b = gbar.param();
  if (f.law() == Law::GaussianUnitVar) {
    // (b - a) x - (b^2 - a^2) / 2
    return {b - a, -0.5 * (b * b - a * a)};
  }
  // x log(b / a) - b + a
  return {std::log(b / a), a - b};
}

double log_likelihood_ratio(const DistributionSpec& f, const DistributionSpec& gbar, double x) {
  const auto llr = llr_function(f, gbar);
  if (!std::isfinite(x)) throw InvalidInput("observation must be finite");
  if (f.law() == Law::Poisson && !is_count(x)) {
    throw InvalidInput(fmt::format("Poisson observation {} is not a nonnegative integer", x));
  }
  return llr(x);
}

double kl_divergence(const DistributionSpec& p, const DistributionSpec& q) {
  require_same_kind(p, q);
  const double a = p.param();
  const double b = q.param();
  if (p.law() == Law::GaussianUnitVar) return 0.5 * (a - b) * (a - b);
  if (a == b) return 0.0;
  return std::max(0.0, a * std::log(a / b) - a + b);
}

PostChangeFamily PostChangeFamily::gaussian_mean_at_least(double bound) {
  return {Kind::GaussianMeanAtLeast, bound, DistributionSpec::gaussian(bound)};
}

PostChangeFamily PostChangeFamily::poisson_rate_at_least(double bound) {
  return {Kind::PoissonRateAtLeast, bound, DistributionSpec::poisson(bound)};
}

PostChangeFamily PostChangeFamily::explicit_lfl(const DistributionSpec& lfl) {
  return {Kind::ExplicitLfl, lfl.param(), lfl};
}

PostChangeFamily PostChangeFamily::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput(fmt::format("family '{}' must look like <kind>:<bound>", text));
  }
  const auto kind = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  if (kind == "lfl") return explicit_lfl(DistributionSpec::parse(rest));
  const double bound = parse_real(rest, text);
  if (kind == "norm-mean-at-least") return gaussian_mean_at_least(bound);
  if (kind == "pois-rate-at-least") return poisson_rate_at_least(bound);
  throw InvalidInput(fmt::format("unknown family kind '{}'", kind));
}

bool PostChangeFamily::contains(const DistributionSpec& g) const {
  switch (kind_) {
    case Kind::GaussianMeanAtLeast:
      return g.law() == Law::GaussianUnitVar && g.param() >= bound_;
    case Kind::PoissonRateAtLeast:
      return g.law() == Law::Poisson && g.param() >= bound_;
    case Kind::ExplicitLfl:
      return g.law() == lfl_.law();
  }
  return false;
}

std::string PostChangeFamily::to_string() const {
  switch (kind_) {
    case Kind::GaussianMeanAtLeast:
      return fmt::format("norm-mean-at-least:{}", bound_);
    case Kind::PoissonRateAtLeast:
      return fmt::format("pois-rate-at-least:{}", bound_);
    case Kind::ExplicitLfl:
      return "lfl:" + lfl_.to_string();
  }
  return {};
}

DistributionSpec lfl_of_family(const PostChangeFamily& family) { return family.lfl_; }

std::vector<LlrSample> draw_llr_samples(const DistributionSpec& f, const DistributionSpec& gbar,
                                        const DistributionSpec& source, std::size_t n,
                                        Engine& engine) {
  const auto llr = llr_function(f, gbar);
  require_same_kind(f, source);
  Sampler draw(source);
  const bool pre = source == f;
  std::vector<LlrSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({llr(draw(engine)), pre, source.param()});
  }
  return out;
}

DominanceReport check_lfl_dominance(const DistributionSpec& f, const PostChangeFamily& family,
                                    const DistributionSpec& g, std::size_t n_samples,
                                    std::uint64_t seed) {
  if (n_samples < 1000) throw InvalidInput("dominance check needs at least 1000 samples");
  if (!family.contains(g)) {
    throw InvalidInput(fmt::format("{} is not a member of {}", g.to_string(), family.to_string()));
  }
  const auto gbar = lfl_of_family(family);
  const auto llr = llr_function(f, gbar);

  auto values = [&](const DistributionSpec& source) {
    Engine engine{seed};
    std::vector<double> v;
    v.reserve(n_samples);
    for (const auto& s : draw_llr_samples(f, gbar, source, n_samples, engine)) v.push_back(s.value);
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto under_g = values(g);
  const auto under_lfl = values(gbar);

  // Empirical survival S(t) = #{z >= t} / n, evaluated at every pooled sample
  // point; between grid points both step functions are constant.
  const double n = static_cast<double>(n_samples);
  auto survival = [n](const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / n;
  };
  double worst = 0.0;
  for (const auto* grid : {&under_g, &under_lfl}) {
    for (double t : *grid) {
      worst = std::max(worst, survival(under_lfl, t) - survival(under_g, t));
    }
  }

  DominanceReport report;
  report.max_cdf_violation = worst;
  report.slack = 2.0 * std::sqrt(std::log(2.0 / kDominanceDelta) / (2.0 * n));
  report.holds = worst <= report.slack;
  report.mean_llr_under_g = llr(g.mean());
  report.mean_llr_under_lfl = llr(gbar.mean());
  return report;
}

}  // namespace rdecusum
