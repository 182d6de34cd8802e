#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>

#include "siqs/engine.hpp"
#include "siqs/errors.hpp"
#include "support.hpp"

using namespace siqs;

namespace {

// Direct evaluation of the per-individual contagion rates by summing over
// every other individual.
ContagionRates brute_force_rates(const ModelParams& p, const Population& pop, Index j) {
  const PopulationSplit s = pop.split();
  const double n = static_cast<double>(s.n());
  const Group gj = s.group_of(j);
  double contact = 0.0;
  for (Index k = 0; k < s.n(); ++k) {
    if (k == j || pop.health(k) != Health::I) continue;
    const Group gk = s.group_of(k);
    const double sigma = gk == Group::Vaccinated ? p.sigma_v : p.sigma_n;
    double pick = (1 - p.theta) / (n - 1);
    if (gk == gj) pick += p.theta / (static_cast<double>(s.size(gj)) - 1);
    contact += 2 * pick * (1 - sigma);
  }
  ContagionRates r;
  r.group = gj;
  const double lam = (1 - p.eta) * p.lambda;
  if (gj == Group::Vaccinated) {
    r.kappa = lam * (1 - p.gamma_t) * (1 - p.p_q * (1 - p.gamma_q)) * contact;
    r.nu = lam * (1 - p.gamma_t) * p.p_q * (1 - p.gamma_q) * contact;
  } else {
    r.kappa = lam * (1 - p.p_q) * contact;
    r.nu = lam * p.p_q * contact;
  }
  return r;
}

ModelParams small_params() {
  ModelParams p;
  p.n = 4;
  p.v = 0.5;
  p.theta = 0.5;
  p.lambda = 1.0;
  p.p_q = 0.0;
  p.sigma_n = 0.0;
  p.sigma_v = 0.0;
  p.beta = 0.02;
  p.tau = 0.05;
  return p;
}

}  // namespace

TEST_CASE("population counters") {
  Population pop(PopulationSplit{3, 5});
  CHECK(pop.count(Group::Vaccinated, Health::S) == 3);
  CHECK(pop.count(Group::NonVaccinated, Health::S) == 5);
  pop.set(0, Health::I);
  pop.set(4, Health::Q);
  pop.set(5, Health::I);
  pop.set(0, Health::Q);
  CHECK(pop.count(Health::I) == 1);
  CHECK(pop.count(Health::Q) == 2);
  CHECK(pop.nth_infectious(0) == 5);
  CHECK(pop.consistent());
  const Fractions f = pop.fractions();
  CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(1.0));
  CHECK(f[kQv] == doctest::Approx(1.0 / 8));
  pop.set(4, Health::S);
  CHECK(pop.infected() == 2);
  CHECK(pop.consistent());
}

TEST_CASE("initial conditions") {
  ModelParams p;
  Engine e = Engine::init(p, nullptr, 10, 1);
  CHECK(e.population().count(Health::I) == 10);
  CHECK(e.population().count(Health::S) == 9990);
  CHECK(Engine::init(p, nullptr, 0, 1).absorbed());
  p.n = 100;
  CHECK(Engine::init(p, nullptr, 100, 1).population().count(Health::S) == 0);
  CHECK_THROWS_AS(Engine::init(p, nullptr, 101, 1), CountExceedsPopulation);
  Engine severe = Engine::init(p, nullptr, 40, 1.0, 1);
  CHECK(severe.population().count(Health::Q) == 40);
  CHECK_THROWS_AS(Engine::init(p, std::make_shared<const Backbone>(Backbone::complete(99)), 1, 1), Error);
}

TEST_CASE("initial infected are spread over both groups") {
  ModelParams p;
  p.n = 1000;
  p.v = 0.3;
  Index vaccinated = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Engine e = Engine::init(p, nullptr, 10, s);
    vaccinated += e.population().count(Group::Vaccinated, Health::I);
  }
  // Expected 0.3 of 2000 draws.
  CHECK(std::abs(vaccinated - 600.0) < 4 * std::sqrt(2000 * 0.3 * 0.7));
}

TEST_CASE("no contagion without lambda") {
  ModelParams p;
  p.n = 500;
  p.lambda = 0.0;
  p.theta = 0.4;
  Engine e = Engine::init(p, nullptr, 100, 3);
  Index prev = e.population().infected();
  for (int i = 0; i < 20000 && !e.absorbed(); ++i) {
    const Event ev = e.step();
    CHECK(ev.transition != Transition::SusceptibleToInfectious);
    CHECK(ev.transition != Transition::SusceptibleToQuarantined);
    CHECK(e.population().infected() <= prev);
    prev = e.population().infected();
  }
}

TEST_CASE("full responsibility blocks every contact") {
  ModelParams p;
  p.n = 300;
  p.lambda = 1.0;
  p.sigma_n = 1.0;
  p.sigma_v = 1.0;
  Engine e = Engine::init(p, nullptr, 50, 4);
  for (int i = 0; i < 20000 && !e.absorbed(); ++i) {
    const Event ev = e.step();
    CHECK(ev.transition != Transition::SusceptibleToInfectious);
    CHECK(ev.transition != Transition::SusceptibleToQuarantined);
  }
}

TEST_CASE("no exits without recovery and testing") {
  ModelParams p;
  p.n = 400;
  p.beta = 1e-300;
  p.tau = 0.0;
  p.lambda = 0.5;
  Engine e = Engine::init(p, nullptr, 10, 5);
  Index prev = e.population().count(Health::I);
  for (int i = 0; i < 30000; ++i) {
    e.step();
    CHECK(e.population().count(Health::I) >= prev);
    prev = e.population().count(Health::I);
  }
  CHECK_FALSE(e.absorbed());
}

TEST_CASE("run samples and absorption") {
  ModelParams p;
  p.n = 1000;
  p.lambda = 0.0;
  Engine e = Engine::init(p, nullptr, 20, 6);
  const Trajectory t = e.run(200.0, 10.0);
  REQUIRE(t.size() == 21);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(t.times[k] == doctest::Approx(10.0 * k));
    const auto& f = t.samples[k];
    CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  if (t.eradication_time) {
    CHECK(*t.eradication_time <= 200.0);
    CHECK(infected_fraction(t.samples.back()) == 0.0);
  } else {
    CHECK(e.clock() == doctest::Approx(200.0));
  }
}

TEST_CASE("sampled fractions always sum to one") {
  ModelParams p = testing::fig1_params();
  p.n = 2000;
  Engine e = Engine::init(p, nullptr, 40, 7);
  const Trajectory t = e.run(50.0, 0.5);
  for (const auto& f : t.samples) {
    double s = 0;
    for (double x : f) s += x * 2000;
    CHECK(std::llround(s) == 2000);
  }
}

TEST_CASE("conservation of subpopulation sizes") {
  ModelParams p = testing::fig1_params();
  p.n = 1000;
  Engine e = Engine::init(p, nullptr, 50, 8);
  const PopulationSplit s = e.population().split();
  for (int i = 0; i < 50000 && !e.absorbed(); ++i) {
    e.step();
    const auto& pop = e.population();
    for (Group g : {Group::NonVaccinated, Group::Vaccinated}) {
      REQUIRE(pop.count(g, Health::S) + pop.count(g, Health::I) + pop.count(g, Health::Q) == s.size(g));
    }
  }
  CHECK(e.population().consistent());
}

TEST_CASE("same seed, same events") {
  ModelParams p = testing::fig1_params();
  p.n = 1500;
  Engine a = Engine::init(p, nullptr, 30, 99);
  Engine b = Engine::init(p, nullptr, 30, 99);
  for (int i = 0; i < 20000; ++i) {
    const Event x = a.step();
    const Event y = b.step();
    REQUIRE(x.time == y.time);
    REQUIRE(x.actor == y.actor);
    REQUIRE(x.partner == y.partner);
    REQUIRE(x.transition == y.transition);
  }
  Engine c = Engine::init(p, nullptr, 30, 100);
  Engine d = Engine::init(p, nullptr, 30, 99);
  bool differs = false;
  for (int i = 0; i < 100; ++i) differs |= c.step().time != d.step().time;
  CHECK(differs);
}

TEST_CASE("clock is non-decreasing and masses track counters") {
  ModelParams p = testing::fig1_params();
  p.n = 800;
  Engine e = Engine::init(p, nullptr, 40, 10);
  double last = 0.0;
  for (int i = 0; i < 5000 && !e.absorbed(); ++i) {
    const Event ev = e.step();
    CHECK(ev.time >= last);
    last = ev.time;
    const RateMasses m = e.masses();
    const auto& pop = e.population();
    CHECK(m.activation == 800.0);
    CHECK(m.recovery == doctest::Approx(p.beta * pop.infected()));
    CHECK(m.testing == doctest::Approx(p.tau * pop.count(Health::I)));
  }
}

TEST_CASE("partner choice is uniform without homophily") {
  ModelParams p;
  p.n = 20;
  p.v = 0.4;
  p.theta = 0.0;
  Engine e = Engine::init(p, nullptr, 0, 11);
  std::vector<int> hits(20, 0);
  const int draws = 190000;
  for (int i = 0; i < draws; ++i) ++hits[static_cast<std::size_t>(e.select_partner(5))];
  CHECK(hits[5] == 0);
  double chi2 = 0;
  const double expected = draws / 19.0;
  for (Index k = 0; k < 20; ++k)
    if (k != 5) chi2 += std::pow(hits[static_cast<std::size_t>(k)] - expected, 2) / expected;
  // 18 degrees of freedom; 45 is beyond the 0.9995 quantile.
  CHECK(chi2 < 45);
}

TEST_CASE("homophily raises same-group partner frequency") {
  ModelParams p;
  p.n = 50;
  p.v = 0.2;
  p.theta = 0.6;
  Engine e = Engine::init(p, nullptr, 0, 12);
  const int draws = 100000;
  int same = 0;
  for (int i = 0; i < draws; ++i) same += e.select_partner(3) < 10;  // j = 3 is vaccinated
  const double expected = 0.6 + 0.4 * 9.0 / 49.0;
  CHECK(std::abs(same / double(draws) - expected) < 4 * std::sqrt(expected * (1 - expected) / draws));
}

TEST_CASE("backbone restricts partners") {
  ModelParams p;
  p.n = 6;
  p.v = 0.5;
  p.theta = 0.5;
  const std::vector<std::pair<Index, Index>> edges = {{0, 3}, {0, 4}, {1, 2}};
  auto b = std::make_shared<const Backbone>(Backbone::from_edges(6, edges));
  Engine e = Engine::init(p, b, 0, 13);
  for (int i = 0; i < 2000; ++i) {
    const Index k = e.select_partner(0);
    // Vaccinated 0 has no vaccinated neighbours, so homophilous draws fail.
    CHECK((k == -1 || k == 3 || k == 4));
    CHECK(e.select_partner(5) == -1);
  }
}

TEST_CASE("closed-form contagion rates") {
  SUBCASE("worked example") {
    const ModelParams p = small_params();
    Population pop(split(p));
    pop.set(3, Health::I);
    const ContagionRates r = empirical_rates(p, pop, 2);
    CHECK(r.group == Group::NonVaccinated);
    CHECK(r.kappa == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(r.nu == 0.0);
    const RateMatrix m = transition_rate_matrix(p, pop, 2);
    CHECK(m[1][0] == doctest::Approx(0.02));
    CHECK(m[1][1] == doctest::Approx(-0.07));
    CHECK(m[1][2] == doctest::Approx(0.05));
  }
  SUBCASE("no infected, no contagion") {
    const ModelParams p = testing::fig1_params();
    Population pop(split(p));
    for (Index j : {Index{0}, Index{19999}}) {
      const ContagionRates r = empirical_rates(p, pop, j);
      CHECK(r.kappa == 0.0);
      CHECK(r.nu == 0.0);
      const RateMatrix m = transition_rate_matrix(p, pop, j);
      CHECK(m[0] == std::array<double, 3>{0, 0, 0});
    }
  }
  SUBCASE("full responsibility") {
    ModelParams p = testing::fig1_params();
    p.sigma_n = p.sigma_v = 1.0;
    Population pop(split(p));
    for (Index k = 0; k < 20000; k += 7) pop.set(k, Health::I);
    CHECK(empirical_rates(p, pop, 1).kappa == 0.0);
    CHECK(empirical_rates(p, pop, 19999).nu == 0.0);
  }
  SUBCASE("backbones other than complete are rejected") {
    const ModelParams p = small_params();
    Population pop(split(p));
    const Backbone er = Backbone::erdos_renyi(4, 0.5, 1);
    const Backbone full = Backbone::complete(4);
    CHECK_THROWS_AS(empirical_rates(p, pop, 0, &er), BackbonePresent);
    CHECK_NOTHROW(empirical_rates(p, pop, 0, &full));
  }
}

TEST_CASE("contagion rates agree with a pairwise sum") {
  Rng rng = make_rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams p = testing::random_params(rng);
    p.n = 40 + static_cast<Index>(uniform_below(rng, 60));
    p.v = testing::draw(rng, 0.1, 0.9);
    Population pop(split(p));
    for (Index k = 0; k < p.n; ++k) {
      const double u = uniform01(rng);
      if (u < 0.3) pop.set(k, Health::I);
      else if (u < 0.4) pop.set(k, Health::Q);
    }
    for (Index j = 0; j < p.n; ++j) {
      if (pop.health(j) != Health::S) continue;
      const ContagionRates got = empirical_rates(p, pop, j);
      const ContagionRates want = brute_force_rates(p, pop, j);
      CHECK(got.kappa == doctest::Approx(want.kappa).epsilon(1e-12));
      CHECK(got.nu == doctest::Approx(want.nu).epsilon(1e-12));
      const RateMatrix m = transition_rate_matrix(p, pop, j);
      for (const auto& row : m) CHECK(std::abs(row[0] + row[1] + row[2]) <= 1e-15);
      CHECK(m[0][1] >= 0.0);
      CHECK(m[2][0] == p.beta);
    }
  }
}
