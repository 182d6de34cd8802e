#include "siqs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "siqs/engine.hpp"
#include "siqs/errors.hpp"
#include "siqs/meanfield.hpp"
#include "siqs/parallel.hpp"
#include "siqs/rng.hpp"
#include "siqs/spectral.hpp"
#include "siqs/svg.hpp"

namespace siqs {

namespace {

constexpr std::uint64_t kBackboneStream = 0x6261636b626f6e65;  // "backbone"

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<double> axis_values(const Axis& a) {
  std::vector<double> xs;
  for (int i = 0; i < a.points; ++i) xs.push_back(a.value(i));
  return xs;
}

}  // namespace

Metric parse_metric(std::string_view text) {
  if (text == "threshold_analytic") return Metric::ThresholdAnalytic;
  if (text == "threshold_estimated") return Metric::ThresholdEstimated;
  if (text == "final_infected_fraction") return Metric::FinalInfectedFraction;
  if (text == "eradication_probability") return Metric::EradicationProbability;
  throw ConfigError("unknown metric '" + std::string(text) + "'");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::ThresholdAnalytic: return "threshold_analytic";
    case Metric::ThresholdEstimated: return "threshold_estimated";
    case Metric::FinalInfectedFraction: return "final_infected_fraction";
    case Metric::EradicationProbability: return "eradication_probability";
  }
  return "threshold_analytic";
}

bool is_stochastic(Metric m) { return m != Metric::ThresholdAnalytic; }

double Axis::value(int i) const {
  if (points <= 1) return lo;
  if (i == points - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

Axis parse_axis(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto colon = text.find(':');
    parts.push_back(text.substr(0, colon));
    if (colon == std::string_view::npos) break;
    text = text.substr(colon + 1);
  }
  Axis a;
  if (parts.size() == 2) {
    a.name = std::string(parts[0]);
    a.lo = a.hi = parse_double(a.name, parts[1]);
    a.points = 1;
  } else if (parts.size() == 4) {
    a.name = std::string(parts[0]);
    a.lo = parse_double(a.name, parts[1]);
    a.hi = parse_double(a.name, parts[2]);
    a.points = static_cast<int>(parse_int(a.name, parts[3]));
  } else {
    throw ConfigError("axis: expected name:lo:hi:points or name:value");
  }
  return a;
}

std::uint64_t backbone_seed(std::uint64_t seed) { return derive_seed(seed, {kBackboneStream}); }

Index initial_count(Index n, Index count, double fraction) {
  if (fraction > 0.0) return static_cast<Index>(std::llround(fraction * static_cast<double>(n)));
  return count;
}

std::vector<Trajectory> simulate_replicates(const ModelParams& params,
                                            std::shared_ptr<const Backbone> backbone,
                                            Index initial_infected, double horizon,
                                            double sample_interval, int replicates,
                                            std::uint64_t seed, unsigned jobs) {
  if (replicates < 1) throw RangeError("replicates", "must be at least 1");
  std::vector<Trajectory> runs(static_cast<std::size_t>(replicates));
  parallel_for(runs.size(), jobs, [&](std::size_t r) {
    Engine engine = Engine::init(params, backbone, initial_infected,
                                 derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    runs[r] = engine.run(horizon, sample_interval);
  });
  return runs;
}

double final_infected_fraction(const ModelParams& params, std::shared_ptr<const Backbone> backbone,
                               Index initial_infected, double horizon, int replicates,
                               std::uint64_t seed, unsigned jobs) {
  if (replicates < 1) throw RangeError("replicates", "must be at least 1");
  std::vector<double> finals(static_cast<std::size_t>(replicates));
  parallel_for(finals.size(), jobs, [&](std::size_t r) {
    Engine engine = Engine::init(params, backbone, initial_infected,
                                 derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    engine.run_until(horizon);
    finals[r] = static_cast<double>(engine.population().infected()) / static_cast<double>(engine.population().n());
  });
  double sum = 0.0;
  for (double f : finals) sum += f;
  return sum / static_cast<double>(replicates);
}

void SweepSpec::check() const {
  if (axes.size() > 2) throw ConfigError("at most two swept parameters");
  const auto& names = param_names();
  for (const auto& a : axes) {
    if (std::find(names.begin(), names.end(), a.name) == names.end())
      throw ConfigError("unknown swept parameter '" + a.name + "'");
    if (a.points < 1) throw ConfigError(a.name + ": grid needs at least one point");
  }
  if (axes.size() == 2 && axes[0].name == axes[1].name) throw ConfigError("axes must differ");
  if (is_stochastic(metric)) {
    if (!(horizon > 0.0)) throw RangeError("horizon", "must be positive");
    if (replicates < 1) throw RangeError("replicates", "must be at least 1");
    if (initial_infected < 0 || initial_fraction < 0.0 || initial_fraction > 1.0)
      throw RangeError("initial_infected", "must be non-negative");
  }
  if (metric == Metric::ThresholdEstimated) {
    EstimationConfig cfg = estimation;
    cfg.horizon = horizon;
    cfg.replicates = replicates;
    cfg.check();
  }
}

SweepResult run_sweep(const SweepSpec& spec, std::ostream* log) {
  spec.check();
  SweepResult result;
  result.spec = spec;

  const Axis single{"", 0.0, 0.0, 1};
  const Axis& ax = spec.axes.size() > 0 ? spec.axes[0] : single;
  const Axis& ay = spec.axes.size() > 1 ? spec.axes[1] : single;
  const auto nx = static_cast<std::size_t>(ax.points);
  const auto ny = static_cast<std::size_t>(ay.points);
  result.cells.resize(nx * ny);

  const bool n_swept = std::any_of(spec.axes.begin(), spec.axes.end(), [](const Axis& a) { return a.name == "n"; });
  std::shared_ptr<const Backbone> shared;
  if (is_stochastic(spec.metric) && !n_swept) {
    shared = build_backbone(spec.backbone, spec.base.n, backbone_seed(spec.seed));
  }

  const std::size_t count = result.cells.size();
  const unsigned outer = count > 1 ? spec.jobs : 1;
  const unsigned inner = count > 1 ? 1 : spec.jobs;

  parallel_for(count, outer, [&](std::size_t idx) {
    SweepCell& cell = result.cells[idx];
    const int ix = static_cast<int>(idx / ny);
    const int iy = static_cast<int>(idx % ny);
    ModelParams p = spec.base;
    if (!ax.name.empty()) set_param(p, ax.name, cell.x = ax.value(ix));
    if (!ay.name.empty()) set_param(p, ay.name, cell.y = ay.value(iy));
    try {
      if (spec.metric == Metric::ThresholdAnalytic) {
        cell.value = analytic_threshold(p);
        return;
      }
      p = validate(p);
      auto backbone = shared ? shared : build_backbone(spec.backbone, p.n, backbone_seed(spec.seed));
      const Index infected = initial_count(p.n, spec.initial_infected, spec.initial_fraction);
      EstimationConfig cfg = spec.estimation;
      cfg.horizon = spec.horizon;
      cfg.replicates = spec.replicates;
      cfg.initial_infected = infected;
      cfg.master_seed = spec.seed;
      cfg.jobs = inner;
      switch (spec.metric) {
        case Metric::ThresholdEstimated:
          cell.value = estimate_threshold(p, backbone, cfg).tau_hat;
          break;
        case Metric::FinalInfectedFraction:
          cell.value = final_infected_fraction(p, backbone, infected, spec.horizon, spec.replicates, spec.seed, inner);
          break;
        case Metric::EradicationProbability:
          cell.value = eradication_probability(p, backbone, p.tau, cfg).probability;
          break;
        case Metric::ThresholdAnalytic:
          break;
      }
    } catch (const std::exception& e) {
      cell.value.reset();
      cell.error = e.what();
    }
  });

  if (log) {
    for (const auto& cell : result.cells) {
      if (cell.error.empty()) continue;
      *log << "point";
      if (!ax.name.empty()) *log << ' ' << ax.name << '=' << fmt(cell.x);
      if (!ay.name.empty()) *log << ' ' << ay.name << '=' << fmt(cell.y);
      *log << ": " << cell.error << '\n';
    }
  }
  return result;
}

std::string provenance_comment(const ModelParams& params, std::uint64_t seed, std::string_view extra) {
  std::string s = describe(params) + " seed=" + std::to_string(seed);
  if (!extra.empty()) {
    s += ' ';
    s += extra;
  }
  return s;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const SweepSpec& spec = result.spec;
  std::ostringstream extra;
  extra << "metric=" << to_string(spec.metric);
  if (is_stochastic(spec.metric)) {
    extra << " backbone=" << to_string(spec.backbone) << " horizon=" << fmt(spec.horizon)
          << " replicates=" << spec.replicates;
    if (spec.initial_fraction > 0.0)
      extra << " initial_fraction=" << fmt(spec.initial_fraction);
    else
      extra << " initial_infected=" << spec.initial_infected;
  }
  if (spec.metric == Metric::ThresholdEstimated) {
    extra << " tau_lo=" << fmt(spec.estimation.tau_lo) << " tau_hi=" << fmt(spec.estimation.tau_hi)
          << " coarse_step=" << fmt(spec.estimation.coarse_step)
          << " fine_step=" << fmt(spec.estimation.fine_step);
  }
  out << "# " << provenance_comment(spec.base, spec.seed, extra.str()) << '\n';
  out << "# x=" << (spec.axes.size() > 0 ? spec.axes[0].name : "-")
      << " y=" << (spec.axes.size() > 1 ? spec.axes[1].name : "-") << '\n';
  out << "x,y,value\n";
  for (const auto& cell : result.cells) {
    if (spec.axes.size() > 0) out << fmt(cell.x);
    out << ',';
    if (spec.axes.size() > 1) out << fmt(cell.y);
    out << ',';
    if (cell.value) out << fmt(*cell.value);
    out << '\n';
  }
}

// Presets -------------------------------------------------------------------

namespace {

struct Writer {
  const ReproduceOptions& opts;
  std::vector<std::string> paths;

  std::ofstream open(const std::string& name) {
    const auto path = (std::filesystem::path(opts.out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    paths.push_back(path);
    return out;
  }
};

Index scaled_n(Index n, double scale) {
  return std::max<Index>(200, static_cast<Index>(std::llround(static_cast<double>(n) * scale)));
}

int scaled_replicates(int r, double scale) {
  return std::max(1, static_cast<int>(std::llround(r * scale)));
}

int scaled_points(int points, double scale) {
  return std::max(3, static_cast<int>(std::llround(points * std::min(1.0, scale))));
}

// Keeps the mean degree of the reference population.
double scaled_er_probability(double p, Index reference_n, Index n) {
  return std::min(1.0, p * static_cast<double>(reference_n - 1) / static_cast<double>(n - 1));
}

void log_line(const ReproduceOptions& opts, const std::string& msg) {
  if (opts.log) *opts.log << msg << '\n';
}

void write_heatmap_svg(Writer& w, const std::string& name, const std::string& title, const SweepResult& r) {
  std::vector<double> xs = axis_values(r.spec.axes[0]);
  std::vector<double> ys = axis_values(r.spec.axes[1]);
  std::vector<std::optional<double>> values;
  for (const auto& c : r.cells) values.push_back(c.value);
  auto out = w.open(name);
  svg::heatmap(out, title, r.spec.axes[0].name, r.spec.axes[1].name, xs, ys, values);
}

void emit_sweep(Writer& w, const std::string& stem, const std::string& title, const SweepSpec& spec) {
  log_line(w.opts, "running " + stem);
  const SweepResult r = run_sweep(spec, w.opts.log);
  {
    auto out = w.open(stem + ".csv");
    write_sweep_csv(out, r);
  }
  if (w.opts.svg && spec.axes.size() == 2) write_heatmap_svg(w, stem + ".svg", title, r);
}

ModelParams fig1_params() {
  ModelParams p;
  p.n = 20000;
  p.v = 0.8;
  p.lambda = 0.2;
  p.sigma_v = 0.7;
  p.sigma_n = 0.2;
  p.p_q = 0.2;
  p.beta = 0.02;
  p.gamma_t = 0.5;
  p.gamma_q = 0.9;
  p.tau = 0.05;
  p.theta = 0.5;
  return p;
}

ModelParams fig2_params() {
  ModelParams p;
  p.lambda = 0.2;
  p.sigma_v = 0.5;
  p.p_q = 0.2;
  p.beta = 0.02;
  p.gamma_t = 0.5;
  p.gamma_q = 0.9;
  p.tau = 0.05;
  return p;
}

ModelParams fig3_params() {
  ModelParams p;
  p.n = 10000;
  p.lambda = 0.2;
  p.beta = 0.02;
  p.sigma_v = 0.5;
  p.p_q = 0.2;
  p.tau = 0.05;
  p.sigma_n = 0.5;
  p.theta = 0.5;
  p.gamma_t = 0.5;
  p.gamma_q = 0.9;
  return p;
}

ModelParams case_study_params() {
  ModelParams p;
  p.n = 10000;
  p.lambda = 0.36;
  p.beta = 0.1;
  p.v = 0.821;
  p.p_q = 0.19;
  p.gamma_t = 0.65;
  p.gamma_q = 0.92;
  return p;
}

void fig1(Writer& w) {
  const auto& o = w.opts;
  ModelParams p = fig1_params();
  p.n = scaled_n(p.n, o.scale);
  const int reps = scaled_replicates(10, o.scale);
  const Index infected = initial_count(p.n, 0, 0.01);
  const double horizon = 200.0;

  const auto runs = simulate_replicates(p, nullptr, infected, horizon, 1.0, reps, o.seed, o.jobs);
  const Trajectory sim = average(runs);
  const Trajectory mf = integrate(MacroState::from_array(sim.samples.front()), p, {horizon, 0.01, 1.0});
  const Fractions err = sup_norm_error(sim, mf);

  const std::string comment = provenance_comment(p, o.seed, "backbone=none replicates=" + std::to_string(reps) +
                                                                " initial_infected=" + std::to_string(infected));
  {
    auto out = w.open("fig1_simulation.csv");
    write_csv(out, sim, comment + " source=simulation");
  }
  {
    auto out = w.open("fig1_meanfield.csv");
    write_csv(out, mf, comment + " source=meanfield dt=0.01");
  }
  {
    auto out = w.open("fig1_error.csv");
    out << "# " << comment << '\n' << "compartment,sup_norm_error\n";
    const char* names[] = {"S_n", "I_n", "Q_n", "S_v", "I_v", "Q_v"};
    for (std::size_t k = 0; k < 6; ++k) out << names[k] << ',' << fmt(err[k]) << '\n';
  }
  if (o.svg) {
    std::vector<svg::Series> series;
    const char* names[] = {"S_n", "I_n", "Q_n", "S_v", "I_v", "Q_v"};
    for (std::size_t k : {kIn, kQn, kIv, kQv}) {
      svg::Series s{std::string(names[k]), sim.times, {}, false};
      svg::Series m{std::string(names[k]) + " mean field", mf.times, {}, true};
      for (const auto& f : sim.samples) s.y.push_back(f[k]);
      for (const auto& f : mf.samples) m.y.push_back(f[k]);
      series.push_back(std::move(s));
      series.push_back(std::move(m));
    }
    auto out = w.open("fig1.svg");
    svg::line_plot(out, "simulation vs mean field", "t", "fraction", series);
  }
}

void fig2(Writer& w) {
  const auto& o = w.opts;
  SweepSpec a;
  a.base = fig2_params();
  a.base.v = 0.5;
  a.axes = {{"sigma_n", 0.0, 1.0, 21}, {"theta", 0.0, 0.95, 20}};
  a.metric = Metric::ThresholdAnalytic;
  a.seed = o.seed;
  emit_sweep(w, "fig2a", "threshold, v=0.5", a);

  SweepSpec b = a;
  b.base.sigma_n = 0.2;
  b.axes = {{"v", 0.0, 1.0, 21}, {"theta", 0.0, 0.95, 20}};
  emit_sweep(w, "fig2b", "threshold, sigma_n=0.2", b);
}

void fig3(Writer& w) {
  const auto& o = w.opts;
  const int pts = scaled_points(11, o.scale);
  SweepSpec base;
  base.base = fig3_params();
  base.base.n = scaled_n(base.base.n, o.scale);
  base.backbone.kind = BackboneSpec::Kind::None;
  base.metric = Metric::FinalInfectedFraction;
  base.horizon = 200.0;
  base.replicates = scaled_replicates(10, o.scale);
  base.initial_fraction = 0.01;
  base.seed = o.seed;
  base.jobs = o.jobs;

  const Axis v{"v", 0.02, 0.98, pts};
  const struct {
    const char* stem;
    Axis y;
  } panels[] = {
      {"fig3a", {"gamma_t", 0.02, 0.98, pts}},
      {"fig3b", {"gamma_q", 0.02, 0.98, pts}},
      {"fig3c", {"theta", 0.02, 0.98, pts}},
      {"fig3d", {"sigma_n", 0.0, 1.0, pts}},
  };
  for (const auto& panel : panels) {
    SweepSpec s = base;
    s.axes = {v, panel.y};
    emit_sweep(w, panel.stem, std::string("infected at T=200 over v, ") + panel.y.name, s);
  }
}

void fig4(Writer& w) {
  const auto& o = w.opts;
  ModelParams p = case_study_params();
  p.sigma_n = 0.5;
  p.theta = 0.5;
  p.sigma_v = 0.3;
  const Index reference_n = p.n;
  p.n = scaled_n(p.n, o.scale);
  const int reps = scaled_replicates(10, o.scale);
  const Index infected = 10;
  const double horizon = 200.0;
  const double tau_bar = analytic_threshold(p);

  const std::vector<BackboneSpec> specs = {
      {BackboneSpec::Kind::BarabasiAlbert, 0.0, std::min<Index>(50, p.n / 4), {}},
      {BackboneSpec::Kind::ErdosRenyi, scaled_er_probability(0.01, reference_n, p.n), 0, {}},
      {BackboneSpec::Kind::Complete, 0.0, 0, {}},
  };
  std::vector<double> taus;
  for (int k = 0; k <= 20; ++k) taus.push_back(0.01 * k);

  struct Row {
    double eradicated = 0.0;
    double infected = 0.0;
  };
  std::vector<Row> rows(specs.size() * taus.size());
  std::vector<std::shared_ptr<const Backbone>> backbones;
  for (const auto& s : specs) backbones.push_back(build_backbone(s, p.n, backbone_seed(o.seed)));

  log_line(o, "running fig4");
  const std::size_t per_point = static_cast<std::size_t>(reps);
  std::vector<char> erad(rows.size() * per_point);
  std::vector<double> inf(rows.size() * per_point);
  parallel_for(erad.size(), o.jobs, [&](std::size_t idx) {
    const std::size_t point = idx / per_point;
    const std::size_t r = idx % per_point;
    const std::size_t b = point / taus.size();
    ModelParams q = p;
    q.tau = taus[point % taus.size()];
    Engine engine = Engine::init(q, backbones[b], infected,
                                 derive_seed(o.seed, {tau_key(q.tau), static_cast<std::uint64_t>(r)}));
    erad[idx] = engine.run_until(horizon) ? 1 : 0;
    inf[idx] = static_cast<double>(engine.population().infected()) / static_cast<double>(q.n);
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t r = 0; r < per_point; ++r) {
      rows[i].eradicated += erad[i * per_point + r];
      rows[i].infected += inf[i * per_point + r];
    }
    rows[i].eradicated /= reps;
    rows[i].infected /= reps;
  }

  const std::string comment = provenance_comment(p, o.seed, "replicates=" + std::to_string(reps) +
                                                                " initial_infected=" + std::to_string(infected) +
                                                                " horizon=200");
  {
    auto out = w.open("fig4.csv");
    out << "# " << comment << '\n' << "backbone,tau,eradication_probability,infected_fraction\n";
    for (std::size_t b = 0; b < specs.size(); ++b)
      for (std::size_t t = 0; t < taus.size(); ++t) {
        const Row& row = rows[b * taus.size() + t];
        out << to_string(specs[b]) << ',' << fmt(taus[t]) << ',' << fmt(row.eradicated) << ','
            << fmt(row.infected) << '\n';
      }
  }
  {
    auto out = w.open("fig4_threshold.csv");
    out << "# " << comment << '\n' << "tau_bar\n" << fmt(tau_bar) << '\n';
  }
  if (o.svg) {
    std::vector<svg::Series> erad_series, inf_series;
    for (std::size_t b = 0; b < specs.size(); ++b) {
      svg::Series e{to_string(specs[b]), taus, {}, false};
      svg::Series f{to_string(specs[b]), taus, {}, false};
      for (std::size_t t = 0; t < taus.size(); ++t) {
        e.y.push_back(rows[b * taus.size() + t].eradicated);
        f.y.push_back(rows[b * taus.size() + t].infected);
      }
      erad_series.push_back(std::move(e));
      inf_series.push_back(std::move(f));
    }
    {
      auto out = w.open("fig4a.svg");
      svg::line_plot(out, "eradication probability", "tau", "eradication", erad_series, tau_bar);
    }
    auto out = w.open("fig4b.svg");
    svg::line_plot(out, "infected at T=200", "tau", "infections", inf_series, tau_bar);
  }
}

void fig5(Writer& w) {
  const auto& o = w.opts;
  const int pts = scaled_points(11, o.scale);
  SweepSpec base;
  base.base = case_study_params();
  const Index reference_n = base.base.n;
  base.base.n = scaled_n(base.base.n, o.scale);
  base.backbone = {BackboneSpec::Kind::ErdosRenyi, scaled_er_probability(0.01, reference_n, base.base.n), 0, {}};
  base.axes = {{"theta", 0.01, 0.99, pts}, {"sigma_n", 0.0, 1.0, pts}};
  base.horizon = 200.0;
  base.replicates = scaled_replicates(10, o.scale);
  base.seed = o.seed;
  base.jobs = o.jobs;

  const struct {
    const char* stem;
    double sigma_v;
    Metric metric;
  } panels[] = {
      {"fig5a", 0.3, Metric::ThresholdEstimated},
      {"fig5b", 0.7, Metric::ThresholdEstimated},
      {"fig5c", 0.3, Metric::FinalInfectedFraction},
      {"fig5d", 0.7, Metric::FinalInfectedFraction},
  };
  for (const auto& panel : panels) {
    SweepSpec s = base;
    s.base.sigma_v = panel.sigma_v;
    s.metric = panel.metric;
    if (panel.metric == Metric::ThresholdEstimated) {
      s.initial_infected = 10;
      s.estimation.tau_hi = 0.4;
    } else {
      s.base.tau = 0.06;
      s.initial_fraction = 0.01;
    }
    emit_sweep(w, panel.stem, to_string(panel.metric) + ", sigma_v=" + fmt(panel.sigma_v), s);
  }
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {"fig1", "fig2", "fig3", "fig4", "fig5"};
  return ids;
}

std::vector<std::string> reproduce(std::string_view figure, const ReproduceOptions& opts) {
  if (!(opts.scale > 0.0 && opts.scale <= 1.0)) throw RangeError("scale", "must lie in (0, 1]");
  std::filesystem::create_directories(opts.out_dir);
  Writer w{opts, {}};
  if (figure == "fig1") {
    fig1(w);
  } else if (figure == "fig2") {
    fig2(w);
  } else if (figure == "fig3") {
    fig3(w);
  } else if (figure == "fig4") {
    fig4(w);
  } else if (figure == "fig5") {
    fig5(w);
  } else {
    throw ConfigError("unknown figure '" + std::string(figure) + "'");
  }
  return w.paths;
}

}  // namespace siqs
