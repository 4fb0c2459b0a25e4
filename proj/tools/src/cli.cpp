#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rdecusum/design.hpp"
#include "rdecusum/detectors.hpp"
#include "rdecusum/distributions.hpp"
#include "rdecusum/errors.hpp"
#include "rdecusum/evaluation.hpp"
#include "rdecusum/manifest.hpp"
#include "rdecusum/plan.hpp"
#include "rdecusum/random.hpp"
#include "rdecusum/report.hpp"
#include "rdecusum/series.hpp"
#include "rdecusum/trajectory_io.hpp"

#ifndef RDECUSUM_VERSION
#define RDECUSUM_VERSION "0.0.0"
#endif

namespace rdecusum::cli {
namespace fs = std::filesystem;

namespace {

using Arguments = std::vector<std::pair<std::string, std::string>>;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RDECUSUM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidInput(fmt::format("RDECUSUM_SEED='{}' is not an unsigned integer", env));
    }
  }
  return 0;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

fs::path manifest_path_for(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

struct Recorder {
  RunManifest manifest;

  Recorder(std::string command, std::uint64_t seed) {
    manifest.version = RDECUSUM_VERSION;
    manifest.command = std::move(command);
    manifest.base_seed = seed;
    manifest.started_at = utc_timestamp();
  }

  void arg(std::string key, std::string value) {
    manifest.arguments.emplace_back(std::move(key), std::move(value));
  }
  void arg(std::string key, double value) { arg(std::move(key), format_real(value)); }

  void input(const fs::path& path) {
    manifest.inputs.push_back({fs::absolute(path).string(), file_digest(path)});
  }

  void finish(const fs::path& out) {
    manifest.outputs.push_back({fs::absolute(out).string(), file_digest(out)});
    manifest.finished_at = utc_timestamp();
    manifest.config_hash = manifest.compute_config_hash();
    write_manifest(manifest_path_for(out), manifest);
  }
};

// ---------------------------------------------------------------- detect

struct DetectOptions {
  std::string input;
  std::string index_col = "index";
  std::string value_col = "value";
  std::string f;
  std::string gbar;
  double threshold = 0.0;
  std::string kind = "rde";
  double mu = 0.0;
  double h = 0.0;
  double beta = 0.0;
  double prob = 0.5;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string out;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* h_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* prob_opt = nullptr;
};

int run_detect(const DetectOptions& o, std::ostream& out, std::ostream& err) {
  const auto f = DistributionSpec::parse(o.f);
  const auto gbar = DistributionSpec::parse(o.gbar);
  const auto kind = parse_detector_kind(o.kind);

  Recorder rec("detect", o.seed);
  rec.arg("input", fs::absolute(o.input).string());
  rec.arg("index-col", o.index_col);
  rec.arg("value-col", o.value_col);
  rec.arg("f", f.to_string());
  rec.arg("gbar", gbar.to_string());
  rec.arg("threshold", o.threshold);
  rec.arg("kind", std::string(to_string(kind)));

  PolicyParams params;
  params.kind = kind;
  params.threshold = o.threshold;
  switch (kind) {
    case DetectorKind::RobustCusum:
      if (o.mu_opt->count() || o.h_opt->count() || o.beta_opt->count()) {
        err << "warning: robust-cusum ignores --mu, --beta and --h\n";
      }
      break;
    case DetectorKind::RdeCusum:
      if (o.mu_opt->count() && o.beta_opt->count()) throw InvalidInput("give either --mu or --beta");
      if (!o.mu_opt->count() && !o.beta_opt->count()) throw InvalidInput("rde needs --mu or --beta");
      if (!o.h_opt->count()) throw InvalidInput("rde needs --h");
      params.mu = o.beta_opt->count() ? mu_asymptotic(o.beta, f, gbar) : o.mu;
      params.h = o.h;
      if (o.beta_opt->count()) {
        rec.arg("beta", o.beta);
      } else {
        rec.arg("mu", o.mu);
      }
      rec.arg("h", o.h);
      break;
    case DetectorKind::FractionalSampling:
      if (o.mu_opt->count() || o.h_opt->count() || o.beta_opt->count()) {
        err << "warning: fractional ignores --mu, --beta and --h\n";
      }
      params.prob = o.prob;
      rec.arg("prob", o.prob);
      break;
  }
  params.validate();
  if (o.noise < 0.0 || !std::isfinite(o.noise)) throw InvalidInput("--noise must be nonnegative");
  rec.arg("noise", o.noise);
  rec.arg("seed", std::to_string(o.seed));
  rec.arg("out", o.out);

  auto series = ingest_csv(o.input, ColumnSpec{o.index_col, o.value_col});
  rec.input(o.input);
  if (o.noise > 0.0) series = add_poisson_noise(series, o.noise, o.seed);

  Detector detector(params, derive_seed(o.seed, 0, streams::kCoin));
  std::vector<TrajectoryRow> rows;
  std::optional<std::int64_t> detection;
  for (const auto& r : series) {
    const auto step = detector.step([&] { return log_likelihood_ratio(f, gbar, r.value); });
    rows.push_back({r.index, step.sampled, step.statistic_after, step.alarmed});
    if (step.alarmed) {
      detection = r.index;
      break;
    }
  }

  {
    auto file = open_output(o.out);
    write_trajectory_csv(file, rows);
  }
  rec.finish(o.out);

  out << fmt::format("detection_index={} steps={} samples_used={}\n",
                     detection ? std::to_string(*detection) : std::string("none"), rows.size(),
                     detector.state().samples_used);
  return detection ? kAlarm : kNoAlarm;
}

// ---------------------------------------------------------------- design

struct DesignOptions {
  double alpha = 0.0;
  double beta = 0.0;
  std::string f;
  std::string gbar;
  double h = 0.0;
  std::string mode = "asymptotic";
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;
  std::string out;
  unsigned workers = 0;
  CLI::Option* h_opt = nullptr;
};

int run_design(const DesignOptions& o, std::ostream& out) {
  const auto f = DistributionSpec::parse(o.f);
  const auto gbar = DistributionSpec::parse(o.gbar);
  const bool montecarlo = o.mode == "montecarlo";
  if (montecarlo && !o.h_opt->count()) throw InvalidInput("--mode montecarlo needs --h");
  DesignConstraints{o.alpha, o.beta, o.h}.validate();

  const double threshold = threshold_for_far(o.alpha);
  std::string row;
  if (!montecarlo) {
    const double mu = mu_asymptotic(o.beta, f, gbar);
    row = fmt::format("{},{},{},{},{},{},,,,,", format_real(o.alpha), format_real(o.beta),
                      format_real(o.h), o.mode, format_real(threshold), format_real(mu));
  } else {
    const auto c = estimate_appendix_constants(f, gbar, o.h, o.trials, o.seed, o.workers);
    const double mu = mu_for_pdc(o.beta, c);
    // Delta method on c2 / c1 with the two estimates independent.
    const double rel = std::hypot(c.c1_ci / c.c1, c.c2 > 0.0 ? c.c2_ci / c.c2 : 0.0);
    row = fmt::format("{},{},{},{},{},{},{},{},{},{},{}", format_real(o.alpha),
                      format_real(o.beta), format_real(o.h), o.mode, format_real(threshold),
                      format_real(mu), format_real(mu * rel), format_real(c.c1),
                      format_real(c.c1_ci), format_real(c.c2), format_real(c.c2_ci));
  }
  const std::string header = "alpha,beta,h,mode,threshold,mu_bound,mu_bound_ci,c1,c1_ci,c2,c2_ci\n";
  out << header << row << '\n';

  if (!o.out.empty()) {
    Recorder rec("design", o.seed);
    rec.arg("alpha", o.alpha);
    rec.arg("beta", o.beta);
    rec.arg("f", f.to_string());
    rec.arg("gbar", gbar.to_string());
    rec.arg("h", o.h);
    rec.arg("mode", o.mode);
    if (montecarlo) rec.arg("trials", std::to_string(o.trials));
    rec.arg("seed", std::to_string(o.seed));
    rec.arg("out", o.out);
    {
      auto file = open_output(o.out);
      file << header << row << '\n';
    }
    rec.finish(o.out);
  }
  return kOk;
}

// ------------------------------------------------------- evaluate / sweep

struct PlanOptions {
  std::string config;
  std::string out;
  unsigned workers = 0;
};

int run_plan(const PlanOptions& o, PlanMode mode, std::ostream& out) {
  const auto text = read_text(o.config);
  auto plan = parse_plan(text, mode, o.config);
  if (o.workers > 0) plan.workers = o.workers;

  const std::string command = mode == PlanMode::Evaluate ? "evaluate" : "sweep";
  Recorder rec(command, plan.base_seed);
  rec.manifest.config_text = text;
  rec.arg("out", o.out);

  const auto rows = operating_characteristic_sweep(plan);
  {
    auto file = open_output(o.out);
    write_oc_csv(file, rows);
  }
  rec.finish(o.out);
  out << fmt::format("{} rows written to {}\n", rows.size(), o.out);
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  std::string trajectory;
  std::string manifest;
  std::string kind = "rde";
  double threshold = 0.0;
  double mu = 0.0;
  double h = 0.0;
  double prob = 0.5;
};

PolicyParams params_from_manifest(const RunManifest& m) {
  if (m.command != "detect") throw InvalidInput("manifest does not describe a detect run");
  std::optional<std::string> beta;
  std::optional<std::string> f;
  std::optional<std::string> gbar;
  PolicyParams p;
  for (const auto& [k, v] : m.arguments) {
    if (k == "kind") p.kind = parse_detector_kind(v);
    if (k == "threshold") p.threshold = std::stod(v);
    if (k == "mu") p.mu = std::stod(v);
    if (k == "h") p.h = std::stod(v);
    if (k == "prob") p.prob = std::stod(v);
    if (k == "beta") beta = v;
    if (k == "f") f = v;
    if (k == "gbar") gbar = v;
  }
  if (beta && f && gbar) {
    p.mu = mu_asymptotic(std::stod(*beta), DistributionSpec::parse(*f), DistributionSpec::parse(*gbar));
  }
  return p;
}

int run_verify(const VerifyOptions& o, std::ostream& out) {
  PolicyParams params;
  if (!o.manifest.empty()) {
    params = params_from_manifest(read_manifest(o.manifest));
  } else {
    params.kind = parse_detector_kind(o.kind);
    params.threshold = o.threshold;
    if (params.kind == DetectorKind::RdeCusum) {
      params.mu = o.mu;
      params.h = o.h;
    }
    params.prob = o.prob;
  }
  std::ifstream in(o.trajectory);
  if (!in) throw ParseError(o.trajectory, 0, "cannot open file");
  const auto rows = read_trajectory_csv(in, o.trajectory);
  const auto violations = verify_trajectory(rows, params);
  for (const auto& v : violations) out << fmt::format("row {}: {}\n", v.row + 1, v.message);
  out << fmt::format("rows={} violations={}\n", rows.size(), violations.size());
  return violations.empty() ? kOk : kViolations;
}

// ---------------------------------------------------------------- replay

struct ReplayOptions {
  std::string manifest;
  std::string out_dir;
};

int run_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err) {
  const auto m = read_manifest(o.manifest);
  if (m.outputs.empty()) throw InvalidInput("manifest lists no outputs");
  if (m.config_hash != m.compute_config_hash()) {
    throw InvalidInput("manifest config_hash does not match its contents");
  }
  for (const auto& in : m.inputs) {
    if (file_digest(in.path) != in.digest) {
      err << fmt::format("warning: input {} changed since the recorded run\n", in.path);
    }
  }

  const fs::path dir = o.out_dir.empty() ? fs::temp_directory_path() / fmt::format("rdecusum-replay-{}", m.config_hash)
                                         : fs::path(o.out_dir);
  fs::create_directories(dir);
  const fs::path replay_out = dir / fs::path(m.outputs.front().path).filename();

  std::vector<std::string> args{m.command};
  if (m.command == "evaluate" || m.command == "sweep") {
    const fs::path config = dir / "config.yaml";
    {
      auto file = open_output(config);
      file << m.config_text;
    }
    args.insert(args.end(), {"--config", config.string()});
  }
  for (const auto& [k, v] : m.arguments) {
    args.push_back("--" + k);
    args.push_back(k == "out" ? replay_out.string() : v);
  }

  std::ostringstream sink;
  const int code = run(args, sink, err);
  if (code == kError) return kError;

  const auto digest = file_digest(replay_out);
  const bool same = digest == m.outputs.front().digest;
  out << fmt::format("replayed={} recorded={} digest={} {}\n", replay_out.string(),
                     m.outputs.front().path, digest, same ? "identical" : "DIFFERENT");
  return same ? kOk : kMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-efficient robust quickest change detection", "rdecusum"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", RDECUSUM_VERSION);
  app.require_subcommand(1);

  DetectOptions detect;
  detect.seed = 0;
  auto* d = app.add_subcommand("detect", "Stream a CSV series through a detector");
  d->add_option("--input", detect.input, "Input CSV")->required()->check(CLI::ExistingFile);
  d->add_option("--index-col", detect.index_col, "Index column name")->capture_default_str();
  d->add_option("--value-col", detect.value_col, "Value column name")->capture_default_str();
  d->add_option("--f", detect.f, "Pre-change law, e.g. pois:1")->required();
  d->add_option("--gbar", detect.gbar, "Least favorable post-change law, e.g. pois:2")->required();
  d->add_option("--threshold", detect.threshold, "Alarm threshold A")->required();
  d->add_option("--kind", detect.kind, "rde | robust-cusum | fractional")->capture_default_str();
  detect.mu_opt = d->add_option("--mu", detect.mu, "Skip recovery rate");
  detect.h_opt = d->add_option("--h", detect.h, "Truncation depth");
  detect.beta_opt = d->add_option("--beta", detect.beta, "Duty-cycle target; sets mu asymptotically");
  detect.prob_opt = d->add_option("--prob", detect.prob, "Sampling probability (fractional)");
  auto* d_seed = d->add_option("--seed", detect.seed, "Seed for noise and coin flips");
  d->add_option("--noise", detect.noise, "Add Pois(rate) noise to every value");
  d->add_option("--out", detect.out, "Trajectory CSV")->required();

  DesignOptions design;
  auto* g = app.add_subcommand("design", "Threshold and mu for FAR/PDC constraints");
  g->add_option("--alpha", design.alpha, "FAR bound")->required();
  g->add_option("--beta", design.beta, "PDC bound")->required();
  g->add_option("--f", design.f, "Pre-change law")->required();
  g->add_option("--gbar", design.gbar, "Least favorable post-change law")->required();
  design.h_opt = g->add_option("--h", design.h, "Truncation depth");
  g->add_option("--mode", design.mode)->check(CLI::IsMember({"asymptotic", "montecarlo"}))->capture_default_str();
  g->add_option("--trials", design.trials, "Monte-Carlo trials")->capture_default_str();
  auto* g_seed = g->add_option("--seed", design.seed, "Monte-Carlo seed");
  g->add_option("--out", design.out, "Also write the CSV row here");
  g->add_option("--workers", design.workers, "Worker threads (0 = all cores)");

  PlanOptions evaluate;
  auto* e = app.add_subcommand("evaluate", "Evaluate detectors at one operating point");
  e->add_option("--config", evaluate.config, "YAML recipe")->required()->check(CLI::ExistingFile);
  e->add_option("--out", evaluate.out, "Operating-characteristic CSV")->required();
  e->add_option("--workers", evaluate.workers, "Worker threads (0 = all cores)");

  PlanOptions sweep;
  auto* s = app.add_subcommand("sweep", "Operating-characteristic sweep over a grid");
  s->add_option("--config", sweep.config, "YAML recipe")->required()->check(CLI::ExistingFile);
  s->add_option("--out", sweep.out, "Operating-characteristic CSV")->required();
  s->add_option("--workers", sweep.workers, "Worker threads (0 = all cores)");

  VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Check a detect trajectory against the detector invariants");
  v->add_option("--trajectory", verify.trajectory, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  auto* v_manifest = v->add_option("--manifest", verify.manifest, "Take parameters from a detect manifest");
  v->add_option("--kind", verify.kind)->excludes(v_manifest);
  v->add_option("--threshold", verify.threshold)->excludes(v_manifest);
  v->add_option("--mu", verify.mu)->excludes(v_manifest);
  v->add_option("--h", verify.h)->excludes(v_manifest);
  v->add_option("--prob", verify.prob)->excludes(v_manifest);

  ReplayOptions replay;
  auto* r = app.add_subcommand("replay", "Re-run a recorded command and compare outputs");
  r->add_option("--manifest", replay.manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);
  r->add_option("--out-dir", replay.out_dir, "Directory for replayed outputs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << RDECUSUM_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kError;
  }

  try {
    if (*d) {
      if (!d_seed->count()) detect.seed = default_seed();
      return run_detect(detect, out, err);
    }
    if (*g) {
      if (!g_seed->count()) design.seed = default_seed();
      return run_design(design, out);
    }
    if (*e) return run_plan(evaluate, PlanMode::Evaluate, out);
    if (*s) return run_plan(sweep, PlanMode::Sweep, out);
    if (*v) return run_verify(verify, out);
    if (*r) return run_replay(replay, out, err);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace rdecusum::cli
