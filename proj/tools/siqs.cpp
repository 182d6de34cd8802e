#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "siqs/config.hpp"
#include "siqs/errors.hpp"
#include "siqs/estimator.hpp"
#include "siqs/harness.hpp"
#include "siqs/meanfield.hpp"
#include "siqs/spectral.hpp"

namespace {

using namespace siqs;

const std::vector<std::string> kExtraKeys = {
    "backbone", "seed", "jobs", "horizon", "replicates", "initial_infected", "initial_fraction",
    "sample_interval", "dt", "tau_lo", "tau_hi", "coarse_step", "fine_step", "metric", "x", "y"};

// Options shared by every subcommand. Values given on the command line
// override those of the config file, which override the defaults.
struct Options {
  std::string config;
  std::vector<std::string> params;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::string> backbone;
  std::optional<double> horizon;
  std::optional<int> replicates;
  std::optional<Index> initial_infected;
  std::optional<double> initial_fraction;
  std::optional<double> sample_interval;
  std::optional<double> dt;
  std::optional<double> tau_lo, tau_hi, coarse_step, fine_step;
  std::optional<std::string> metric, x, y;
  std::string out;
  double scale = 1.0;
  bool svg = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "key=value configuration file");
  cmd->add_option("-p,--param", o.params, "parameter override, key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output directory (stdout when omitted)");
  cmd->add_option("--jobs", o.jobs, "worker threads");
  cmd->add_option("--backbone", o.backbone, "none | complete | er:<p> | ba:<m> | file:<path>");
  cmd->add_option("--scale", o.scale, "shrink factor for population, replicates and grids")
      ->check(CLI::Range(1e-6, 1.0));
}

void add_run(CLI::App* cmd, Options& o) {
  cmd->add_option("--horizon", o.horizon, "time horizon T");
  cmd->add_option("--replicates", o.replicates, "independent runs");
  cmd->add_option("--initial-infected", o.initial_infected, "initially infected individuals");
  cmd->add_option("--initial-fraction", o.initial_fraction, "initially infected fraction (overrides the count)");
}

struct Resolved {
  ModelParams params;
  KeyValues kv;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  BackboneSpec backbone;
  double horizon = 200.0;
  int replicates = 10;
  Index initial_infected = 10;
  double initial_fraction = 0.0;
  double sample_interval = 1.0;
  double dt = 0.01;
  EstimationConfig estimation;
};

template <class T>
T pick(const std::optional<T>& cli, const KeyValues& kv, const char* key, T fallback, T (*parse)(const std::string&)) {
  if (cli) return *cli;
  if (auto it = kv.find(key); it != kv.end()) return parse(it->second);
  return fallback;
}

double as_double(const std::string& s) { return parse_double("value", s); }
int as_int(const std::string& s) { return static_cast<int>(parse_int("value", s)); }
Index as_index(const std::string& s) { return parse_int("value", s); }
std::uint64_t as_u64(const std::string& s) { return parse_u64("value", s); }
unsigned as_unsigned(const std::string& s) { return static_cast<unsigned>(parse_u64("value", s)); }
std::string as_string(const std::string& s) { return s; }

Resolved resolve(const Options& o, BackboneSpec default_backbone) {
  Resolved r;
  if (!o.config.empty()) r.kv = load_key_values(o.config);
  check_known_keys(r.kv, kExtraKeys);
  apply_params(r.params, r.kv);
  KeyValues overrides;
  for (const auto& kv : o.params) {
    std::istringstream in(kv);
    auto parsed = parse_key_values(in);
    if (parsed.size() != 1) throw ConfigError("--param expects key=value, got '" + kv + "'");
    overrides.insert(parsed.begin(), parsed.end());
  }
  check_known_keys(overrides, {});
  apply_params(r.params, overrides);

  r.seed = pick(o.seed, r.kv, "seed", std::uint64_t{1}, as_u64);
  r.jobs = pick(o.jobs, r.kv, "jobs", 1u, as_unsigned);
  const auto bb = pick<std::string>(o.backbone, r.kv, "backbone", to_string(default_backbone), as_string);
  r.backbone = parse_backbone(bb);
  r.horizon = pick(o.horizon, r.kv, "horizon", 200.0, as_double);
  r.replicates = pick(o.replicates, r.kv, "replicates", 10, as_int);
  r.initial_infected = pick(o.initial_infected, r.kv, "initial_infected", Index{10}, as_index);
  r.initial_fraction = pick(o.initial_fraction, r.kv, "initial_fraction", 0.0, as_double);
  r.sample_interval = pick(o.sample_interval, r.kv, "sample_interval", 1.0, as_double);
  r.dt = pick(o.dt, r.kv, "dt", 0.01, as_double);
  EstimationConfig& e = r.estimation;
  e.horizon = r.horizon;
  e.replicates = r.replicates;
  e.initial_infected = initial_count(r.params.n, r.initial_infected, r.initial_fraction);
  e.tau_lo = pick(o.tau_lo, r.kv, "tau_lo", e.tau_lo, as_double);
  e.tau_hi = pick(o.tau_hi, r.kv, "tau_hi", e.tau_hi, as_double);
  e.coarse_step = pick(o.coarse_step, r.kv, "coarse_step", e.coarse_step, as_double);
  e.fine_step = pick(o.fine_step, r.kv, "fine_step", e.fine_step, as_double);
  e.master_seed = r.seed;
  e.jobs = r.jobs;
  return r;
}

// Writes to <out>/<name> when --out is set, otherwise to stdout.
template <class Fn>
void emit(const Options& o, const std::string& name, Fn&& fn) {
  if (o.out.empty()) {
    fn(std::cout);
    return;
  }
  std::filesystem::create_directories(o.out);
  const auto path = (std::filesystem::path(o.out) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  fn(out);
  std::cerr << "wrote " << path << '\n';
}

std::string run_comment(const Resolved& r, Index infected) {
  return provenance_comment(r.params, r.seed,
                            "backbone=" + to_string(r.backbone) + " replicates=" + std::to_string(r.replicates) +
                                " initial_infected=" + std::to_string(infected));
}

void cmd_simulate(const Options& o) {
  Resolved r = resolve(o, {BackboneSpec::Kind::None});
  const ModelParams p = validate(r.params);
  const auto backbone = build_backbone(r.backbone, p.n, backbone_seed(r.seed));
  const Index infected = initial_count(p.n, r.initial_infected, r.initial_fraction);
  const auto runs = simulate_replicates(p, backbone, infected, r.horizon, r.sample_interval, r.replicates, r.seed, r.jobs);
  const Trajectory avg = average(runs);
  emit(o, "trajectory.csv", [&](std::ostream& out) { write_csv(out, avg, run_comment(r, infected)); });
}

void cmd_meanfield(const Options& o) {
  Resolved r = resolve(o, {BackboneSpec::Kind::None});
  const ModelParams p = normalized(r.params);
  const double f = r.initial_fraction > 0.0 ? r.initial_fraction
                                            : static_cast<double>(r.initial_infected) / static_cast<double>(p.n);
  MacroState y0{(1 - p.v) * (1 - f), (1 - p.v) * f, 0.0, p.v * (1 - f), p.v * f, 0.0};
  const Trajectory traj = integrate(y0, p, {r.horizon, r.dt, r.sample_interval});
  std::ostringstream extra;
  extra << "initial_fraction=" << f << " dt=" << r.dt;
  emit(o, "meanfield.csv", [&](std::ostream& out) { write_csv(out, traj, provenance_comment(r.params, r.seed, extra.str())); });
}

void cmd_threshold(const Options& o) {
  Resolved r = resolve(o, {BackboneSpec::Kind::None});
  const auto x = o.x ? o.x : (r.kv.count("x") ? std::optional(r.kv.at("x")) : std::nullopt);
  const auto y = o.y ? o.y : (r.kv.count("y") ? std::optional(r.kv.at("y")) : std::nullopt);
  if (!x) {
    std::cout << to_key_values(threshold_report(r.params));
    return;
  }
  SweepSpec spec;
  spec.base = r.params;
  spec.axes.push_back(parse_axis(*x));
  if (y) spec.axes.push_back(parse_axis(*y));
  spec.metric = Metric::ThresholdAnalytic;
  spec.seed = r.seed;
  const SweepResult result = run_sweep(spec, &std::cerr);
  emit(o, "threshold.csv", [&](std::ostream& out) { write_sweep_csv(out, result); });
}

void cmd_estimate(const Options& o) {
  Resolved r = resolve(o, {BackboneSpec::Kind::Complete});
  const ModelParams p = validate(r.params);
  const auto backbone = build_backbone(r.backbone, p.n, backbone_seed(r.seed));
  const ThresholdEstimate est = estimate_threshold(p, backbone, r.estimation);
  std::ostringstream extra;
  extra << "backbone=" << to_string(r.backbone) << " horizon=" << r.estimation.horizon
        << " replicates=" << r.estimation.replicates << " initial_infected=" << r.estimation.initial_infected
        << " tau_lo=" << r.estimation.tau_lo << " tau_hi=" << r.estimation.tau_hi
        << " coarse_step=" << r.estimation.coarse_step << " fine_step=" << r.estimation.fine_step;
  emit(o, "estimate.csv", [&](std::ostream& out) {
    write_estimate(out, est, provenance_comment(r.params, r.seed, extra.str()));
  });
}

void cmd_sweep(const Options& o) {
  Resolved r = resolve(o, {BackboneSpec::Kind::Complete});
  SweepSpec spec;
  spec.base = r.params;
  const auto x = o.x ? o.x : (r.kv.count("x") ? std::optional(r.kv.at("x")) : std::nullopt);
  const auto y = o.y ? o.y : (r.kv.count("y") ? std::optional(r.kv.at("y")) : std::nullopt);
  if (x) spec.axes.push_back(parse_axis(*x));
  if (y) spec.axes.push_back(parse_axis(*y));
  spec.metric = parse_metric(pick<std::string>(o.metric, r.kv, "metric", "threshold_analytic", as_string));
  spec.backbone = r.backbone;
  spec.horizon = r.horizon;
  spec.replicates = r.replicates;
  spec.initial_infected = r.initial_infected;
  spec.initial_fraction = r.initial_fraction;
  spec.seed = r.seed;
  spec.jobs = r.jobs;
  spec.estimation = r.estimation;
  const SweepResult result = run_sweep(spec, &std::cerr);
  emit(o, "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, result); });
}

void cmd_reproduce(const Options& o, const std::string& figure) {
  Resolved r = resolve(o, {BackboneSpec::Kind::Complete});
  ReproduceOptions opts;
  opts.scale = o.scale;
  opts.seed = r.seed;
  opts.jobs = r.jobs;
  opts.out_dir = o.out.empty() ? "." : o.out;
  opts.svg = o.svg;
  opts.log = &std::cerr;
  for (const auto& path : reproduce(figure, opts)) std::cerr << "wrote " << path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIQS epidemics on activity-driven networks with vaccination and testing"};
  app.require_subcommand(1);
  Options o;
  std::string figure;

  auto* simulate = app.add_subcommand("simulate", "stochastic simulation, averaged trajectory CSV");
  add_common(simulate, o);
  add_run(simulate, o);
  simulate->add_option("--interval", o.sample_interval, "sampling interval");

  auto* meanfield = app.add_subcommand("meanfield", "RK4 integration of the macroscopic equations");
  add_common(meanfield, o);
  meanfield->add_option("--horizon", o.horizon, "time horizon T");
  meanfield->add_option("--dt", o.dt, "RK4 step");
  meanfield->add_option("--interval", o.sample_interval, "sampling interval");
  meanfield->add_option("--initial-infected", o.initial_infected, "initially infected individuals");
  meanfield->add_option("--initial-fraction", o.initial_fraction, "initially infected fraction");

  auto* threshold = app.add_subcommand("threshold", "closed-form epidemic threshold report or grid");
  add_common(threshold, o);
  threshold->add_option("--x", o.x, "grid axis name:lo:hi:points");
  threshold->add_option("--y", o.y, "second grid axis name:lo:hi:points");

  auto* estimate = app.add_subcommand("estimate", "Monte Carlo threshold estimate");
  add_common(estimate, o);
  add_run(estimate, o);
  estimate->add_option("--tau-lo", o.tau_lo, "lower end of the coarse scan");
  estimate->add_option("--tau-hi", o.tau_hi, "upper end of the coarse scan");
  estimate->add_option("--coarse-step", o.coarse_step, "coarse step");
  estimate->add_option("--fine-step", o.fine_step, "fine step");

  auto* sweep = app.add_subcommand("sweep", "metric over a one- or two-parameter grid");
  add_common(sweep, o);
  add_run(sweep, o);
  sweep->add_option("--x", o.x, "first axis name:lo:hi:points");
  sweep->add_option("--y", o.y, "second axis name:lo:hi:points");
  sweep->add_option("--metric", o.metric,
                    "threshold_analytic | threshold_estimated | final_infected_fraction | eradication_probability");
  sweep->add_option("--tau-lo", o.tau_lo, "lower end of the coarse scan");
  sweep->add_option("--tau-hi", o.tau_hi, "upper end of the coarse scan");
  sweep->add_option("--coarse-step", o.coarse_step, "coarse step");
  sweep->add_option("--fine-step", o.fine_step, "fine step");

  auto* repro = app.add_subcommand("reproduce", "preset figure data");
  add_common(repro, o);
  repro->add_option("figure", figure, "fig1 .. fig5")->required()->check(CLI::IsMember(figure_ids()));
  repro->add_flag("--svg", o.svg, "also write SVG plots");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) cmd_simulate(o);
    else if (*meanfield) cmd_meanfield(o);
    else if (*threshold) cmd_threshold(o);
    else if (*estimate) cmd_estimate(o);
    else if (*sweep) cmd_sweep(o);
    else if (*repro) cmd_reproduce(o, figure);
  } catch (const siqs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
