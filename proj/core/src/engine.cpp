#include "siqs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "siqs/errors.hpp"

namespace siqs {

// ---------------------------------------------------------------------------
// Population

Population::Population(PopulationSplit split)
    : split_(split),
      health_(static_cast<std::size_t>(split.n()), Health::S),
      slot_(static_cast<std::size_t>(split.n()), -1) {
  counts_[static_cast<std::size_t>(Group::NonVaccinated) * 3] = split.n_n;
  counts_[static_cast<std::size_t>(Group::Vaccinated) * 3] = split.n_v;
}

void Population::set(Index j, Health h) {
  const auto ju = static_cast<std::size_t>(j);
  const Health old = health_[ju];
  if (old == h) return;

  auto remove_from = [&](std::vector<Index>& list) {
    const Index pos = slot_[ju];
    const Index last = list.back();
    list[static_cast<std::size_t>(pos)] = last;
    slot_[static_cast<std::size_t>(last)] = pos;
    list.pop_back();
    slot_[ju] = -1;
  };
  auto add_to = [&](std::vector<Index>& list) {
    slot_[ju] = static_cast<Index>(list.size());
    list.push_back(j);
  };

  if (old == Health::I) remove_from(infectious_);
  if (old == Health::Q) remove_from(quarantined_);
  if (h == Health::I) add_to(infectious_);
  if (h == Health::Q) add_to(quarantined_);

  const auto g = static_cast<std::size_t>(group(j)) * 3;
  --counts_[g + static_cast<std::size_t>(old)];
  ++counts_[g + static_cast<std::size_t>(h)];
  health_[ju] = h;
}

Fractions Population::fractions() const {
  const double n_inv = 1.0 / static_cast<double>(n());
  auto frac = [&](Group g, Health h) { return static_cast<double>(count(g, h)) * n_inv; };
  return {frac(Group::NonVaccinated, Health::S), frac(Group::NonVaccinated, Health::I),
          frac(Group::NonVaccinated, Health::Q), frac(Group::Vaccinated, Health::S),
          frac(Group::Vaccinated, Health::I),    frac(Group::Vaccinated, Health::Q)};
}

bool Population::consistent() const {
  std::array<Index, 6> tally{};
  for (Index j = 0; j < n(); ++j)
    ++tally[static_cast<std::size_t>(group(j)) * 3 + static_cast<std::size_t>(health(j))];
  if (tally != counts_) return false;
  if (static_cast<Index>(infectious_.size()) != count(Health::I)) return false;
  if (static_cast<Index>(quarantined_.size()) != count(Health::Q)) return false;
  for (std::size_t i = 0; i < infectious_.size(); ++i)
    if (health(infectious_[i]) != Health::I || slot_[static_cast<std::size_t>(infectious_[i])] != static_cast<Index>(i))
      return false;
  for (std::size_t i = 0; i < quarantined_.size(); ++i)
    if (health(quarantined_[i]) != Health::Q || slot_[static_cast<std::size_t>(quarantined_[i])] != static_cast<Index>(i))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(const ModelParams& params, std::shared_ptr<const Backbone> backbone,
               Population population, Rng rng, double clock)
    : params_(validate(params)),
      backbone_(std::move(backbone)),
      pop_(std::move(population)),
      rng_(std::move(rng)),
      clock_(clock) {
  if (pop_.split() != split(params_))
    throw Error("engine: population split does not match parameters");
  if (backbone_ && backbone_->n() != params_.n) {
    std::ostringstream os;
    os << "engine: backbone has " << backbone_->n() << " nodes, population has " << params_.n;
    throw Error(os.str());
  }
}

Engine Engine::init(const ModelParams& params, std::shared_ptr<const Backbone> backbone,
                    Index initial_infected, double severe_fraction, std::uint64_t seed) {
  const ModelParams p = validate(params);
  if (initial_infected < 0 || initial_infected > p.n) {
    std::ostringstream os;
    os << "initial_infected=" << initial_infected << " exceeds population n=" << p.n;
    throw CountExceedsPopulation(os.str());
  }
  if (!(severe_fraction >= 0.0 && severe_fraction <= 1.0))
    throw RangeError("severe_fraction", "must lie in [0, 1]");

  Rng rng = make_rng(seed);
  Population pop(split(p));

  // Partial Fisher-Yates: the first `initial_infected` entries form a uniform
  // sample without replacement.
  std::vector<Index> order(static_cast<std::size_t>(p.n));
  for (Index j = 0; j < p.n; ++j) order[static_cast<std::size_t>(j)] = j;
  for (Index i = 0; i < initial_infected; ++i) {
    const auto r = i + static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(p.n - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(r)]);
    const bool severe = severe_fraction > 0.0 && bernoulli(rng, severe_fraction);
    pop.set(order[static_cast<std::size_t>(i)], severe ? Health::Q : Health::I);
  }
  return Engine(p, std::move(backbone), std::move(pop), std::move(rng));
}

RateMasses Engine::masses() const {
  RateMasses m;
  m.activation = static_cast<double>(pop_.n());
  m.recovery = params_.beta * static_cast<double>(pop_.infected());
  m.testing = params_.tau * static_cast<double>(pop_.count(Health::I));
  return m;
}

Index Engine::select_partner(Index j) {
  const Group g = pop_.group(j);
  const bool same_group = params_.theta > 0.0 && bernoulli(rng_, params_.theta);

  if (!backbone_ || backbone_->is_complete()) {
    const auto& sp = pop_.split();
    const Index lo = same_group ? sp.first(g) : 0;
    const Index size = same_group ? sp.size(g) : sp.n();
    if (size < 2) return -1;
    const Index k = lo + static_cast<Index>(uniform_below(rng_, static_cast<std::uint64_t>(size - 1)));
    return k >= j ? k + 1 : k;
  }

  const NeighborView view =
      same_group ? backbone_->neighbors(j, g, pop_.split()) : backbone_->neighbors(j);
  if (view.empty()) return -1;
  return view[static_cast<Index>(uniform_below(rng_, static_cast<std::uint64_t>(view.size())))];
}

void Engine::activate(Index j, Event& ev) {
  // Quarantined individuals never make contact; their ticks are no-ops.
  if (pop_.health(j) == Health::Q) return;

  const Index k = select_partner(j);
  ev.partner = k;
  if (k < 0) return;

  const Health hj = pop_.health(j);
  const Health hk = pop_.health(k);
  if (hk == Health::Q) return;
  // Only an S-I pair can change state.
  if (hj == hk) return;

  const Index susceptible = hj == Health::S ? j : k;
  const Index infectious = hj == Health::S ? k : j;

  const double sigma =
      pop_.group(infectious) == Group::Vaccinated ? params_.sigma_v : params_.sigma_n;
  if (bernoulli(rng_, sigma)) return;

  const bool vaccinated = pop_.group(susceptible) == Group::Vaccinated;
  const double p_transmit = vaccinated ? params_.lambda * (1.0 - params_.gamma_t) : params_.lambda;
  if (!bernoulli(rng_, p_transmit)) return;

  const double p_severe = vaccinated ? params_.p_q * (1.0 - params_.gamma_q) : params_.p_q;
  const bool severe = bernoulli(rng_, p_severe);
  pop_.set(susceptible, severe ? Health::Q : Health::I);
  ev.changed = susceptible;
  ev.transition = severe ? Transition::SusceptibleToQuarantined : Transition::SusceptibleToInfectious;
}

void Engine::recover(Event& ev) {
  const Index n_i = pop_.count(Health::I);
  const Index n_q = pop_.count(Health::Q);
  const auto r = static_cast<Index>(uniform_below(rng_, static_cast<std::uint64_t>(n_i + n_q)));
  const bool from_i = r < n_i;
  const Index j = from_i ? pop_.nth_infectious(r) : pop_.nth_quarantined(r - n_i);
  pop_.set(j, Health::S);
  ev.actor = j;
  ev.changed = j;
  ev.transition = from_i ? Transition::InfectiousToSusceptible : Transition::QuarantinedToSusceptible;
}

void Engine::test(Event& ev) {
  const Index n_i = pop_.count(Health::I);
  const Index j = pop_.nth_infectious(static_cast<Index>(uniform_below(rng_, static_cast<std::uint64_t>(n_i))));
  pop_.set(j, Health::Q);
  ev.actor = j;
  ev.changed = j;
  ev.transition = Transition::InfectiousToQuarantined;
}

Event Engine::execute(const RateMasses& m) {
  Event ev;
  ev.time = clock_;
  const double u = uniform01(rng_) * m.total();
  if (u < m.activation) {
    ev.kind = EventKind::Activation;
    ev.actor = static_cast<Index>(uniform_below(rng_, static_cast<std::uint64_t>(pop_.n())));
    activate(ev.actor, ev);
  } else if (u < m.activation + m.recovery || m.testing <= 0.0) {
    ev.kind = EventKind::Recovery;
    recover(ev);
  } else {
    ev.kind = EventKind::Testing;
    test(ev);
  }
  return ev;
}

Event Engine::step() {
  const RateMasses m = masses();
  const double total = m.total();
  if (!(total > 0.0)) throw DeadState("engine: total event rate is zero");
  clock_ += exponential(rng_, total);
  return execute(m);
}

Trajectory Engine::run(double horizon, double sample_interval) {
  if (!(horizon > 0.0)) throw RangeError("horizon", "must be positive");
  if (!(sample_interval > 0.0)) throw RangeError("sample_interval", "must be positive");

  Trajectory traj;
  auto next_grid = static_cast<std::int64_t>(std::ceil(clock_ / sample_interval - 1e-12));
  auto grid_time = [&](std::int64_t k) { return static_cast<double>(k) * sample_interval; };

  // Emits every pending grid point strictly before `until` (and `horizon`).
  auto emit_until = [&](double until) {
    const Fractions f = pop_.fractions();
    while (grid_time(next_grid) < until && grid_time(next_grid) < horizon) {
      traj.push(grid_time(next_grid), f);
      ++next_grid;
    }
  };

  if (absorbed()) traj.eradication_time = clock_;

  while (!absorbed() && clock_ < horizon) {
    const RateMasses m = masses();
    const double total = m.total();
    if (!(total > 0.0)) throw DeadState("engine: total event rate is zero");

    // An event beyond the horizon is never executed; by memorylessness the
    // state at the horizon is the current one.
    const double next = clock_ + exponential(rng_, total);
    if (next > horizon) {
      emit_until(horizon);
      clock_ = horizon;
      break;
    }
    // Grid points in [clock, next) see the current state.
    emit_until(next);
    clock_ = next;
    execute(m);
    if (absorbed()) traj.eradication_time = clock_;
  }

  // Absorbed or at the horizon: the state no longer changes.
  emit_until(horizon);
  traj.push(horizon, pop_.fractions());
  return traj;
}

bool Engine::run_until(double horizon) {
  while (!absorbed() && clock_ < horizon) {
    const RateMasses m = masses();
    const double next = clock_ + exponential(rng_, m.total());
    if (next > horizon) {
      clock_ = horizon;
      break;
    }
    clock_ = next;
    execute(m);
  }
  return absorbed();
}

// ---------------------------------------------------------------------------
// Closed-form rates

ContagionRates empirical_rates(const ModelParams& params, const Population& population, Index j,
                               const Backbone* backbone) {
  if (backbone && !backbone->is_complete())
    throw BackbonePresent("empirical_rates: closed-form rates need unconstrained mixing");

  const ModelParams p = validate(params);
  const auto& sp = population.split();
  const double n = static_cast<double>(sp.n());
  const double i_n = static_cast<double>(population.count(Group::NonVaccinated, Health::I));
  const double i_v = static_cast<double>(population.count(Group::Vaccinated, Health::I));
  const double mix = (1.0 - p.theta) / (n - 1.0);

  ContagionRates r;
  r.group = population.group(j);
  if (r.group == Group::NonVaccinated) {
    const double within = sp.n_n > 1 ? p.theta / static_cast<double>(sp.n_n - 1) : 0.0;
    const double contact = (1.0 - p.sigma_n) * (within + mix) * i_n + (1.0 - p.sigma_v) * mix * i_v;
    r.kappa = 2.0 * p.lambda * (1.0 - p.p_q) * contact;
    r.nu = 2.0 * p.lambda * p.p_q * contact;
  } else {
    const double within = sp.n_v > 1 ? p.theta / static_cast<double>(sp.n_v - 1) : 0.0;
    const double contact = (1.0 - p.sigma_n) * mix * i_n + (1.0 - p.sigma_v) * (within + mix) * i_v;
    const double p_transmit = p.lambda * (1.0 - p.gamma_t);
    const double p_severe = p.p_q * (1.0 - p.gamma_q);
    r.kappa = 2.0 * p_transmit * (1.0 - p_severe) * contact;
    r.nu = 2.0 * p_transmit * p_severe * contact;
  }
  return r;
}

RateMatrix transition_rate_matrix(const ModelParams& params, const Population& population,
                                  Index j, const Backbone* backbone) {
  const ContagionRates r = empirical_rates(params, population, j, backbone);
  const ModelParams p = validate(params);
  return {{{-r.kappa - r.nu, r.kappa, r.nu},
           {p.beta, -p.beta - p.tau, p.tau},
           {p.beta, 0.0, -p.beta}}};
}

}  // namespace siqs
