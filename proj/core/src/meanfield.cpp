#include "siqs/meanfield.hpp"

#include <cmath>
#include <sstream>

#include "siqs/errors.hpp"

namespace siqs {

namespace {

constexpr double kBoxTolerance = 1e-9;

/// Per-unit-susceptible infection pressure on each group.
struct Pressure {
  double on_n = 0.0;
  double on_v = 0.0;
};

void require_interior_coverage(const ModelParams& p) {
  if (p.theta > 0.0 && (p.v <= 0.0 || p.v >= 1.0)) {
    std::ostringstream os;
    os << "coverage v=" << p.v << " with theta=" << p.theta
       << " makes the within-group contact rate undefined";
    throw DegenerateCoverage(os.str());
  }
}

template <class Rhs>
void rk4_step(std::vector<double>& x, double h, Rhs&& rhs, std::vector<double> (&k)[4],
              std::vector<double>& tmp) {
  const std::size_t dim = x.size();
  rhs(x, k[0]);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k[0][i];
  rhs(tmp, k[1]);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + 0.5 * h * k[1][i];
  rhs(tmp, k[2]);
  for (std::size_t i = 0; i < dim; ++i) tmp[i] = x[i] + h * k[2][i];
  rhs(tmp, k[3]);
  for (std::size_t i = 0; i < dim; ++i)
    x[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
}

void check_box(const std::vector<double>& x, double t) {
  for (double c : x) {
    if (!std::isfinite(c) || c < -kBoxTolerance || c > 1.0 + kBoxTolerance) {
      std::ostringstream os;
      os << "integration left the probability simplex at t=" << t << " (component " << c
         << "); reduce dt";
      throw NonFiniteState(os.str());
    }
  }
}

/// Fixed-step driver shared by both systems. `observe` maps the raw state to
/// the six sampled fractions.
template <class Rhs, class Observe>
Trajectory drive(std::vector<double> x, Rhs&& rhs, Observe&& observe, const IntegrationOptions& opts) {
  if (!(opts.dt > 0.0)) throw RangeError("dt", "must be positive");
  if (!(opts.horizon > 0.0)) throw RangeError("horizon", "must be positive");
  if (!(opts.sample_interval > 0.0)) throw RangeError("sample_interval", "must be positive");

  const auto steps = static_cast<std::int64_t>(std::ceil(opts.horizon / opts.dt - 1e-9));
  const double h = opts.horizon / static_cast<double>(steps);
  const auto per_sample =
      std::max<std::int64_t>(1, std::llround(opts.sample_interval / h));

  std::vector<double> k[4];
  for (auto& ki : k) ki.resize(x.size());
  std::vector<double> tmp(x.size());

  Trajectory traj;
  check_box(x, 0.0);
  traj.push(0.0, observe(x));
  for (std::int64_t s = 1; s <= steps; ++s) {
    rk4_step(x, h, rhs, k, tmp);
    const double t = static_cast<double>(s) * h;
    check_box(x, t);
    if (s % per_sample == 0 || s == steps) traj.push(s == steps ? opts.horizon : t, observe(x));
  }
  return traj;
}

}  // namespace

MicroState MicroState::homogeneous(const PopulationSplit& split, const std::array<double, 3>& vaccinated,
                                   const std::array<double, 3>& non_vaccinated) {
  MicroState m;
  m.split = split;
  m.probs.resize(static_cast<std::size_t>(split.n()));
  for (Index j = 0; j < split.n(); ++j)
    m.probs[static_cast<std::size_t>(j)] =
        split.group_of(j) == Group::Vaccinated ? vaccinated : non_vaccinated;
  return m;
}

MacroState MicroState::aggregate() const {
  Fractions y{};
  for (Index j = 0; j < split.n(); ++j) {
    const std::size_t base = split.group_of(j) == Group::Vaccinated ? 3 : 0;
    for (std::size_t c = 0; c < 3; ++c) y[base + c] += probs[static_cast<std::size_t>(j)][c];
  }
  const double n_inv = 1.0 / static_cast<double>(split.n());
  for (auto& c : y) c *= n_inv;
  return MacroState::from_array(y);
}

MacroState dfe(const ModelParams& params) { return {1.0 - params.v, 0.0, 0.0, params.v, 0.0, 0.0}; }

MacroState macro_rhs(const MacroState& y, const ModelParams& params) {
  const ModelParams p = normalized(params);
  require_interior_coverage(p);

  const double theta = p.theta;
  const double within_n = theta > 0.0 ? theta / (1.0 - p.v) + 1.0 - theta : 1.0;
  const double within_v = theta > 0.0 ? theta / p.v + 1.0 - theta : 1.0;

  Pressure force;
  force.on_n = 2.0 * p.lambda *
               (within_n * (1.0 - p.sigma_n) * y.ni + (1.0 - theta) * (1.0 - p.sigma_v) * y.vi);
  force.on_v = 2.0 * p.lambda * (1.0 - p.gamma_t) *
               ((1.0 - theta) * (1.0 - p.sigma_n) * y.ni + within_v * (1.0 - p.sigma_v) * y.vi);

  const double new_n = force.on_n * y.ns;
  const double new_v = force.on_v * y.vs;
  const double severe_v = p.p_q * (1.0 - p.gamma_q);

  MacroState d;
  d.ns = -new_n + p.beta * (y.ni + y.nq);
  d.ni = (1.0 - p.p_q) * new_n - (p.beta + p.tau) * y.ni;
  d.nq = p.p_q * new_n + p.tau * y.ni - p.beta * y.nq;
  d.vs = -new_v + p.beta * (y.vi + y.vq);
  d.vi = (1.0 - severe_v) * new_v - (p.beta + p.tau) * y.vi;
  d.vq = severe_v * new_v + p.tau * y.vi - p.beta * y.vq;
  return d;
}

std::vector<std::array<double, 3>> micro_rhs(const MicroState& m, const ModelParams& params) {
  const ModelParams p = normalized(params);
  const auto& sp = m.split;
  if (sp.n_v < 1 || sp.n_n < 1) throw SubpopulationTooSmall("micro_rhs: empty subpopulation");
  if (p.theta > 0.0 && (sp.n_v < 2 || sp.n_n < 2))
    throw SubpopulationTooSmall("micro_rhs: homophily needs two members per subpopulation");

  const double n = static_cast<double>(sp.n());
  const double mix = (1.0 - p.theta) / (n - 1.0);
  const double within_n = p.theta > 0.0 ? p.theta / static_cast<double>(sp.n_n - 1) : 0.0;
  const double within_v = p.theta > 0.0 ? p.theta / static_cast<double>(sp.n_v - 1) : 0.0;

  double total_i_n = 0.0;
  double total_i_v = 0.0;
  for (Index j = 0; j < sp.n(); ++j) {
    const double i = m.probs[static_cast<std::size_t>(j)][1];
    (sp.group_of(j) == Group::Vaccinated ? total_i_v : total_i_n) += i;
  }

  const double severe_v = p.p_q * (1.0 - p.gamma_q);
  std::vector<std::array<double, 3>> out(m.probs.size());
  for (Index j = 0; j < sp.n(); ++j) {
    const auto& [s, i, q] = m.probs[static_cast<std::size_t>(j)];
    auto& d = out[static_cast<std::size_t>(j)];
    if (sp.group_of(j) == Group::NonVaccinated) {
      const double others_n = total_i_n - i;
      const double alpha = 2.0 * (1.0 - p.sigma_n) * (within_n + mix) * others_n +
                           2.0 * (1.0 - p.sigma_v) * mix * total_i_v;
      const double flow = p.lambda * alpha * s;
      d[0] = -flow + p.beta * (i + q);
      d[1] = (1.0 - p.p_q) * flow - (p.beta + p.tau) * i;
      d[2] = p.p_q * flow + p.tau * i - p.beta * q;
    } else {
      const double others_v = total_i_v - i;
      const double alpha = 2.0 * (1.0 - p.sigma_n) * mix * total_i_n +
                           2.0 * (1.0 - p.sigma_v) * (within_v + mix) * others_v;
      const double flow = p.lambda * (1.0 - p.gamma_t) * alpha * s;
      d[0] = -flow + p.beta * (i + q);
      d[1] = (1.0 - severe_v) * flow - (p.beta + p.tau) * i;
      d[2] = severe_v * flow + p.tau * i - p.beta * q;
    }
  }
  return out;
}

Trajectory integrate(const MacroState& y0, const ModelParams& params, const IntegrationOptions& opts) {
  const ModelParams p = normalized(params);
  require_interior_coverage(p);
  const Fractions a = y0.as_array();
  auto rhs = [&](const std::vector<double>& x, std::vector<double>& out) {
    const MacroState d = macro_rhs(MacroState{x[0], x[1], x[2], x[3], x[4], x[5]}, p);
    const Fractions da = d.as_array();
    std::copy(da.begin(), da.end(), out.begin());
  };
  auto observe = [](const std::vector<double>& x) {
    return Fractions{x[0], x[1], x[2], x[3], x[4], x[5]};
  };
  return drive(std::vector<double>(a.begin(), a.end()), rhs, observe, opts);
}

Trajectory integrate(const MicroState& m0, const ModelParams& params, const IntegrationOptions& opts) {
  const std::size_t count = m0.probs.size();
  MicroState work = m0;
  std::vector<double> x(3 * count);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t c = 0; c < 3; ++c) x[3 * j + c] = m0.probs[j][c];

  auto unpack = [&](const std::vector<double>& flat) {
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t c = 0; c < 3; ++c) work.probs[j][c] = flat[3 * j + c];
  };
  auto rhs = [&](const std::vector<double>& flat, std::vector<double>& out) {
    unpack(flat);
    const auto d = micro_rhs(work, params);
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t c = 0; c < 3; ++c) out[3 * j + c] = d[j][c];
  };
  auto observe = [&](const std::vector<double>& flat) {
    unpack(flat);
    return work.aggregate().as_array();
  };
  return drive(std::move(x), rhs, observe, opts);
}

MacroState integrate_to(const MacroState& y0, const ModelParams& params, double horizon, double dt) {
  IntegrationOptions opts{horizon, dt, horizon};
  const Trajectory t = integrate(y0, params, opts);
  return MacroState::from_array(t.samples.back());
}

}  // namespace siqs
