#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "siqs/netgen.hpp"
#include "siqs/params.hpp"
#include "siqs/rng.hpp"
#include "siqs/trajectory.hpp"

namespace siqs {

enum class Health : std::uint8_t { S = 0, I = 1, Q = 2 };

/// Health states of every individual plus per-group S/I/Q counters, kept in
/// sync with the health array. Members of I and of Q are additionally kept in
/// dense index lists so that a uniform member can be drawn in O(1).
class Population {
 public:
  explicit Population(PopulationSplit split);

  const PopulationSplit& split() const { return split_; }
  Index n() const { return split_.n(); }
  Health health(Index j) const { return health_[static_cast<std::size_t>(j)]; }
  Group group(Index j) const { return split_.group_of(j); }

  void set(Index j, Health h);

  Index count(Group g, Health h) const {
    return counts_[static_cast<std::size_t>(g) * 3 + static_cast<std::size_t>(h)];
  }
  Index count(Health h) const { return count(Group::NonVaccinated, h) + count(Group::Vaccinated, h); }
  Index infected() const { return count(Health::I) + count(Health::Q); }

  /// i-th member of I (resp. Q) in the internal dense list.
  Index nth_infectious(Index i) const { return infectious_[static_cast<std::size_t>(i)]; }
  Index nth_quarantined(Index i) const { return quarantined_[static_cast<std::size_t>(i)]; }

  /// (S_n, I_n, Q_n, S_v, I_v, Q_v) / n.
  Fractions fractions() const;

  /// Recounts from the health array and compares with the counters.
  bool consistent() const;

 private:
  PopulationSplit split_;
  std::vector<Health> health_;
  // Position of j inside infectious_ or quarantined_, -1 when S.
  std::vector<Index> slot_;
  std::vector<Index> infectious_;
  std::vector<Index> quarantined_;
  // Indexed by group * 3 + health.
  std::array<Index, 6> counts_{};
};

enum class EventKind : std::uint8_t { Activation, Recovery, Testing };

enum class Transition : std::uint8_t {
  None,
  SusceptibleToInfectious,
  SusceptibleToQuarantined,
  InfectiousToQuarantined,
  InfectiousToSusceptible,
  QuarantinedToSusceptible,
};

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Activation;
  /// The activating, recovering or tested individual.
  Index actor = -1;
  /// Selected partner for activations; -1 when no partner was drawn.
  Index partner = -1;
  /// Individual whose health changed, -1 for none.
  Index changed = -1;
  Transition transition = Transition::None;
};

/// Event-rate masses of the aggregate Gillespie scheme.
struct RateMasses {
  double activation = 0.0;
  double recovery = 0.0;
  double testing = 0.0;
  double total() const { return activation + recovery + testing; }
};

/// Exact event-driven simulation of the SIQS process on an activity-driven
/// network. A null backbone means unconstrained mixing; a complete backbone is
/// equivalent.
class Engine {
 public:
  /// Seeds `initial_infected` individuals drawn uniformly from the whole
  /// population; each starts in Q with probability `severe_fraction`, else I.
  static Engine init(const ModelParams& params, std::shared_ptr<const Backbone> backbone,
                     Index initial_infected, double severe_fraction, std::uint64_t seed);
  static Engine init(const ModelParams& params, std::shared_ptr<const Backbone> backbone,
                     Index initial_infected, std::uint64_t seed) {
    return init(params, std::move(backbone), initial_infected, 0.0, seed);
  }

  /// Starts from an explicit configuration.
  Engine(const ModelParams& params, std::shared_ptr<const Backbone> backbone,
         Population population, Rng rng, double clock = 0.0);

  /// Executes one event.
  Event step();

  /// Steps until the clock reaches `horizon` (absolute time) or I + Q = 0.
  /// Samples are taken on the grid k * sample_interval within
  /// [clock, horizon], with `horizon` itself always included. After
  /// eradication the remaining grid is filled with the absorbed state.
  Trajectory run(double horizon, double sample_interval);

  /// Like `run` without sampling. Returns true when I + Q reached zero.
  bool run_until(double horizon);

  /// Uniform partner for an activation of j under the homophily rule and the
  /// backbone; -1 when the candidate set is empty.
  Index select_partner(Index j);

  double clock() const { return clock_; }
  const Population& population() const { return pop_; }
  const ModelParams& params() const { return params_; }
  const Backbone* backbone() const { return backbone_.get(); }
  RateMasses masses() const;
  bool absorbed() const { return pop_.infected() == 0; }

 private:
  Event execute(const RateMasses& m);
  void activate(Index j, Event& ev);
  void recover(Event& ev);
  void test(Event& ev);

  ModelParams params_;
  std::shared_ptr<const Backbone> backbone_;
  Population pop_;
  Rng rng_;
  double clock_ = 0.0;
};

/// Contagion clock rates of individual j given a frozen configuration.
struct ContagionRates {
  Group group = Group::NonVaccinated;
  /// S -> I rate.
  double kappa = 0.0;
  /// S -> Q rate.
  double nu = 0.0;
};

/// Closed-form S->I and S->Q rates for unconstrained mixing. Throws
/// BackbonePresent when a non-complete backbone is supplied.
ContagionRates empirical_rates(const ModelParams& params, const Population& population, Index j,
                               const Backbone* backbone = nullptr);

using RateMatrix = std::array<std::array<double, 3>, 3>;

/// Generator of X_j with rows/columns ordered S, I, Q.
RateMatrix transition_rate_matrix(const ModelParams& params, const Population& population,
                                  Index j, const Backbone* backbone = nullptr);

}  // namespace siqs
