#include "rdecusum/plan.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "rdecusum/design.hpp"
#include "rdecusum/errors.hpp"

namespace rdecusum {
namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const YAML::Node& node, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw SchemaError(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw SchemaError(join(path, key), "unknown key");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path, const char* expected) {
  if (!node.IsScalar()) throw SchemaError(path, fmt::format("expected {}", expected));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw SchemaError(path, fmt::format("expected {}, got '{}'", expected, node.Scalar()));
  }
}

double real(const YAML::Node& node, const std::string& path) {
  const auto v = scalar<double>(node, path, "a number");
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

double nonnegative(const YAML::Node& node, const std::string& path) {
  const double v = real(node, path);
  if (v < 0.0) throw SchemaError(path, "expected a nonnegative number");
  return v;
}

std::uint64_t count(const YAML::Node& node, const std::string& path) {
  const auto v = scalar<long long>(node, path, "a positive integer");
  if (v <= 0) throw SchemaError(path, "expected a positive integer");
  return static_cast<std::uint64_t>(v);
}

template <class Fn>
auto wrap(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
}

std::vector<double> real_list(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() == 0) throw SchemaError(path, "expected a non-empty list");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(real(node[i], fmt::format("{}[{}]", path, i)));
  }
  return out;
}

const YAML::Node require(const YAML::Node& parent, const std::string& parent_path, const char* key) {
  const auto node = parent[key];
  if (!node) throw SchemaError(join(parent_path, key), "required key is missing");
  return node;
}

}  // namespace

SweepPlan parse_plan(std::string_view text, PlanMode mode, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(source, static_cast<std::size_t>(e.mark.line + 1), e.msg);
  }
  if (!root || root.IsNull()) throw SchemaError("<root>", "empty document");
  reject_unknown(root, "", {"model", "detectors", "operating_point", "grid", "calibration",
                            "trials", "max_steps", "seed", "workers", "pdc"});

  const auto model = require(root, "", "model");
  reject_unknown(model, "model", {"f", "family", "true_g"});
  auto spec_at = [&](const char* key) {
    const std::string path = join("model", key);
    const auto text_value = scalar<std::string>(require(model, "model", key), path, "a law");
    return wrap(path, [&] { return DistributionSpec::parse(text_value); });
  };
  const auto f = spec_at("f");
  const auto true_g = spec_at("true_g");
  const auto family_text =
      scalar<std::string>(require(model, "model", "family"), "model.family", "a family");
  const auto family = wrap("model.family", [&] { return PostChangeFamily::parse(family_text); });
  if (!family.contains(true_g)) throw SchemaError("model.true_g", "not a member of model.family");
  if (lfl_of_family(family).law() != f.law()) {
    throw SchemaError("model.family", "law differs from model.f");
  }

  SweepPlan plan{f, family, true_g, {}, {}, {}};

  const auto detectors = require(root, "", "detectors");
  if (!detectors.IsSequence() || detectors.size() == 0) {
    throw SchemaError("detectors", "expected a non-empty list");
  }
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    const auto path = fmt::format("detectors[{}]", i);
    const auto d = detectors[i];
    reject_unknown(d, path, {"name", "kind", "mu", "beta", "h", "prob"});
    const auto kind_text = scalar<std::string>(require(d, path, "kind"), path + ".kind", "a kind");
    const auto kind = wrap(path + ".kind", [&] { return parse_detector_kind(kind_text); });
    PolicyParams params;
    params.kind = kind;
    switch (kind) {
      case DetectorKind::RobustCusum:
        if (d["mu"] || d["beta"] || d["h"] || d["prob"]) {
          throw SchemaError(path, "robust-cusum takes no mu, beta, h or prob");
        }
        break;
      case DetectorKind::RdeCusum: {
        params.h = nonnegative(require(d, path, "h"), path + ".h");
        if (d["mu"] && d["beta"]) throw SchemaError(path, "give either mu or beta, not both");
        if (d["mu"]) {
          params.mu = nonnegative(d["mu"], path + ".mu");
        } else if (d["beta"]) {
          const double beta = real(d["beta"], path + ".beta");
          params.mu = wrap(path + ".beta", [&] { return mu_asymptotic(beta, f, lfl_of_family(family)); });
        } else {
          throw SchemaError(path + ".mu", "rde needs mu or beta");
        }
        break;
      }
      case DetectorKind::FractionalSampling:
        if (d["mu"] || d["beta"] || d["h"]) throw SchemaError(path, "fractional takes only prob");
        params.prob = d["prob"] ? real(d["prob"], path + ".prob") : 0.5;
        break;
    }
    wrap(path, [&] {
      params.validate();
      return 0;
    });
    const std::string name =
        d["name"] ? scalar<std::string>(d["name"], path + ".name", "a string") : std::string(to_string(kind));
    plan.detectors.push_back({name, params});
  }

  if (mode == PlanMode::Evaluate) {
    if (root["grid"]) throw SchemaError("grid", "evaluate takes operating_point, not grid");
    const auto op = require(root, "", "operating_point");
    reject_unknown(op, "operating_point", {"threshold", "target_far"});
    if (op["threshold"].IsDefined() == op["target_far"].IsDefined()) {
      throw SchemaError("operating_point", "give exactly one of threshold or target_far");
    }
    if (op["threshold"]) plan.thresholds = {nonnegative(op["threshold"], "operating_point.threshold")};
    if (op["target_far"]) plan.target_fars = {real(op["target_far"], "operating_point.target_far")};
  } else {
    if (root["operating_point"]) throw SchemaError("operating_point", "sweep takes grid, not operating_point");
    const auto grid = require(root, "", "grid");
    reject_unknown(grid, "grid", {"thresholds", "target_far"});
    if (grid["thresholds"].IsDefined() == grid["target_far"].IsDefined()) {
      throw SchemaError("grid", "give exactly one of thresholds or target_far");
    }
    if (grid["thresholds"]) plan.thresholds = real_list(grid["thresholds"], "grid.thresholds");
    if (grid["target_far"]) plan.target_fars = real_list(grid["target_far"], "grid.target_far");
  }
  for (std::size_t i = 0; i < plan.target_fars.size(); ++i) {
    if (!(plan.target_fars[i] > 0.0 && plan.target_fars[i] < 1.0)) {
      throw SchemaError(fmt::format("target_far[{}]", i), "expected a value in (0, 1)");
    }
  }

  if (const auto cal = root["calibration"]) {
    reject_unknown(cal, "calibration", {"lo", "hi", "tol"});
    if (cal["lo"]) plan.calibration_bracket.lo = nonnegative(cal["lo"], "calibration.lo");
    if (cal["hi"]) plan.calibration_bracket.hi = nonnegative(cal["hi"], "calibration.hi");
    if (cal["tol"]) plan.calibration_tol = nonnegative(cal["tol"], "calibration.tol");
    if (!(plan.calibration_tol > 0.0)) throw SchemaError("calibration.tol", "must be positive");
    if (!(plan.calibration_bracket.hi > plan.calibration_bracket.lo)) {
      throw SchemaError("calibration.hi", "must exceed calibration.lo");
    }
  }
  if (root["trials"]) plan.n_trials = count(root["trials"], "trials");
  if (root["max_steps"]) plan.max_steps = count(root["max_steps"], "max_steps");
  if (root["seed"]) plan.base_seed = scalar<std::uint64_t>(root["seed"], "seed", "an unsigned integer");
  if (root["workers"]) plan.workers = static_cast<unsigned>(count(root["workers"], "workers"));
  if (const auto pdc = root["pdc"]) {
    reject_unknown(pdc, "pdc", {"enabled", "trials", "horizon", "renewal_cycles"});
    if (pdc["enabled"]) plan.compute_pdc = scalar<bool>(pdc["enabled"], "pdc.enabled", "true or false");
    if (pdc["trials"]) plan.pdc_trials = count(pdc["trials"], "pdc.trials");
    if (pdc["horizon"]) plan.pdc_direct.horizon = count(pdc["horizon"], "pdc.horizon");
    if (pdc["renewal_cycles"]) plan.renewal_cycles = count(pdc["renewal_cycles"], "pdc.renewal_cycles");
    if (plan.pdc_direct.horizon < 20) throw SchemaError("pdc.horizon", "must be at least 20");
  }
  return plan;
}

}  // namespace rdecusum
