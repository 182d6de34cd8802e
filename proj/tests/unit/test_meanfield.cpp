#include <doctest.h>

#include <cmath>

#include "siqs/errors.hpp"
#include "siqs/meanfield.hpp"
#include "support.hpp"

using namespace siqs;

namespace {

using Real = long double;

// Term-by-term evaluation of the macroscopic equations in extended precision.
std::array<Real, 6> macro_oracle(const std::array<Real, 6>& y, const ModelParams& p) {
  const Real lam = static_cast<Real>(p.lambda) * (1 - static_cast<Real>(p.eta));
  const Real th = p.theta, v = p.v, sn = p.sigma_n, sv = p.sigma_v, pq = p.p_q;
  const Real gt = p.gamma_t, gq = p.gamma_q, b = p.beta, tau = p.tau;
  const Real ns = y[0], ni = y[1], nq = y[2], vs = y[3], vi = y[4], vq = y[5];

  const Real a_nn = 2 * lam * (th / (1 - v) + 1 - th) * (1 - sn) * ns * ni;
  const Real a_nv = 2 * lam * (1 - th) * (1 - sv) * ns * vi;
  const Real a_vn = 2 * lam * (1 - gt) * (1 - th) * (1 - sn) * vs * ni;
  const Real a_vv = 2 * lam * (1 - gt) * (th / v + 1 - th) * (1 - sv) * vs * vi;
  const Real sev = pq * (1 - gq);

  return {
      -a_nn - a_nv + b * ni + b * nq,
      (1 - pq) * (a_nn + a_nv) - (b + tau) * ni,
      pq * (a_nn + a_nv) + tau * ni - b * nq,
      -a_vn - a_vv + b * vi + b * vq,
      (1 - sev) * (a_vn + a_vv) - (b + tau) * vi,
      sev * (a_vn + a_vv) + tau * vi - b * vq,
  };
}

// Per-individual right-hand side summed directly over pairs.
std::vector<std::array<double, 3>> micro_oracle(const MicroState& m, const ModelParams& p) {
  const PopulationSplit s = m.split;
  const double n = static_cast<double>(s.n());
  std::vector<std::array<double, 3>> out(m.probs.size());
  for (Index j = 0; j < s.n(); ++j) {
    const Group gj = s.group_of(j);
    double contact = 0;
    for (Index k = 0; k < s.n(); ++k) {
      if (k == j) continue;
      const Group gk = s.group_of(k);
      double pick = (1 - p.theta) / (n - 1);
      if (gk == gj) pick += p.theta / (static_cast<double>(s.size(gj)) - 1);
      const double sigma = gk == Group::Vaccinated ? p.sigma_v : p.sigma_n;
      contact += 2 * pick * (1 - sigma) * m.probs[static_cast<std::size_t>(k)][1];
    }
    double to_i, to_q;
    if (gj == Group::Vaccinated) {
      to_i = p.lambda * (1 - p.gamma_t) * (1 - p.p_q * (1 - p.gamma_q)) * contact;
      to_q = p.lambda * (1 - p.gamma_t) * p.p_q * (1 - p.gamma_q) * contact;
    } else {
      to_i = p.lambda * (1 - p.p_q) * contact;
      to_q = p.lambda * p.p_q * contact;
    }
    const auto& x = m.probs[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(j)] = {-(to_i + to_q) * x[0] + p.beta * (x[1] + x[2]),
                                        to_i * x[0] - (p.beta + p.tau) * x[1],
                                        to_q * x[0] + p.tau * x[1] - p.beta * x[2]};
  }
  return out;
}

MacroState random_state(Rng& rng, double v) {
  auto simplex = [&](double mass) {
    double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
    const double s = a + b + c;
    return std::array<double, 3>{mass * a / s, mass * b / s, mass * c / s};
  };
  const auto n = simplex(1 - v);
  const auto w = simplex(v);
  return {n[0], n[1], n[2], w[0], w[1], w[2]};
}

}  // namespace

TEST_CASE("disease-free equilibrium") {
  ModelParams p;
  p.v = 0.8;
  const MacroState d = dfe(p);
  CHECK(d.ns == doctest::Approx(0.2));
  CHECK(d.vs == 0.8);
  CHECK(d.ni + d.nq + d.vi + d.vq == 0.0);
  p.v = 0.5;
  CHECK(dfe(p).ns == dfe(p).vs);

  Rng rng = make_rng(3);
  for (int i = 0; i < 100; ++i) {
    const ModelParams q = testing::random_params(rng);
    for (double x : macro_rhs(dfe(q), q).as_array()) CHECK(x == 0.0);
  }
}

TEST_CASE("macroscopic derivatives conserve group masses") {
  Rng rng = make_rng(4);
  for (int i = 0; i < 200; ++i) {
    const ModelParams p = testing::random_params(rng);
    const MacroState d = macro_rhs(random_state(rng, p.v), p);
    CHECK(std::abs(d.ns + d.ni + d.nq) < 1e-15);
    CHECK(std::abs(d.vs + d.vi + d.vq) < 1e-15);
  }
}

TEST_CASE("macroscopic derivatives match an extended-precision evaluation") {
  const ModelParams p = testing::fig1_params();
  const MacroState y{0.1995, 0.0005, 0, 0.7995, 0.0005, 0};
  const auto got = macro_rhs(y, p).as_array();
  const auto want = macro_oracle({0.1995L, 0.0005L, 0, 0.7995L, 0.0005L, 0}, p);
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(std::abs(got[k] - static_cast<double>(want[k])) <= 1e-17 + 1e-13 * std::abs(static_cast<double>(want[k])));

  Rng rng = make_rng(5);
  for (int i = 0; i < 200; ++i) {
    ModelParams q = testing::random_params(rng);
    q.eta = testing::draw(rng, 0, 1);
    const MacroState s = random_state(rng, q.v);
    const auto a = macro_rhs(s, q).as_array();
    std::array<Real, 6> ys;
    for (std::size_t k = 0; k < 6; ++k) ys[k] = s.as_array()[k];
    const auto b = macro_oracle(ys, q);
    for (std::size_t k = 0; k < 6; ++k)
      CHECK(std::abs(a[k] - static_cast<double>(b[k])) <= 1e-14);
  }
}

TEST_CASE("degenerate coverage with homophily") {
  ModelParams p;
  p.theta = 0.3;
  p.v = 0.0;
  CHECK_THROWS_AS(macro_rhs(dfe(p), p), DegenerateCoverage);
  p.v = 1.0;
  CHECK_THROWS_AS(macro_rhs(dfe(p), p), DegenerateCoverage);
  p.theta = 0.0;
  CHECK_NOTHROW(macro_rhs(dfe(p), p));
}

TEST_CASE("per-individual system") {
  ModelParams p = testing::fig1_params();
  p.n = 4;
  p.v = 0.5;
  const PopulationSplit s = split(p);

  SUBCASE("all susceptible is stationary") {
    const MicroState m = MicroState::homogeneous(s, {1, 0, 0}, {1, 0, 0});
    for (const auto& d : micro_rhs(m, p))
      for (double x : d) CHECK(x == 0.0);
  }
  SUBCASE("hand-sized instance matches pairwise sums") {
    MicroState m;
    m.split = s;
    m.probs = {{0.7, 0.2, 0.1}, {0.5, 0.5, 0.0}, {0.9, 0.05, 0.05}, {0.2, 0.3, 0.5}};
    const auto got = micro_rhs(m, p);
    const auto want = micro_oracle(m, p);
    for (std::size_t j = 0; j < 4; ++j) {
      double sum = 0;
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(got[j][c] == doctest::Approx(want[j][c]).epsilon(1e-13));
        sum += got[j][c];
      }
      CHECK(std::abs(sum) < 1e-15);
    }
  }
  SUBCASE("small groups are rejected") {
    p.n = 10;
    p.v = 0.05;
    const PopulationSplit tiny{1, 9};
    const MicroState m = MicroState::homogeneous(tiny, {1, 0, 0}, {1, 0, 0});
    CHECK_THROWS_AS(micro_rhs(m, p), SubpopulationTooSmall);
  }
}

TEST_CASE("micro aggregate converges to the macroscopic system like 1/n") {
  ModelParams p = testing::fig1_params();
  const std::array<double, 3> vac{0.9, 0.07, 0.03};
  const std::array<double, 3> non{0.6, 0.3, 0.1};
  double prev = 0.0;
  for (Index n : {100, 1000, 10000}) {
    p.n = n;
    const PopulationSplit s = split(p);
    const MicroState m = MicroState::homogeneous(s, vac, non);
    const auto d = micro_rhs(m, p);
    MicroState dm{s, d};
    const auto micro = dm.aggregate().as_array();
    const auto macro = macro_rhs(m.aggregate(), p).as_array();
    double err = 0;
    for (std::size_t k = 0; k < 6; ++k) err = std::max(err, std::abs(micro[k] - macro[k]));
    CHECK(err > 0.0);
    if (prev > 0.0) CHECK(err * 10 == doctest::Approx(prev).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("integration invariants") {
  const ModelParams p = testing::fig1_params();
  SUBCASE("constant at the DFE") {
    const Trajectory t = integrate(dfe(p), p, {50, 0.01, 10});
    for (const auto& f : t.samples) CHECK(f == dfe(p).as_array());
  }
  SUBCASE("group masses are preserved") {
    const MacroState y0{0.19, 0.01, 0, 0.79, 0.01, 0};
    const Trajectory t = integrate(y0, p, {200, 0.01, 1});
    CHECK(t.size() == 201);
    CHECK(t.times.back() == 200.0);
    for (const auto& f : t.samples) {
      CHECK(std::abs(f[kSn] + f[kIn] + f[kQn] - 0.2) <= 1e-12);
      CHECK(std::abs(f[kSv] + f[kIv] + f[kQv] - 0.8) <= 1e-12);
      for (double x : f) CHECK(x >= -1e-9);
    }
  }
  SUBCASE("fourth-order convergence") {
    const MacroState y0{0.19, 0.01, 0, 0.79, 0.01, 0};
    ModelParams q = p;
    q.lambda = 0.6;
    q.beta = 0.3;
    auto final_at = [&](double dt) { return integrate_to(y0, q, 20, dt).as_array(); };
    const auto a = final_at(0.2), b = final_at(0.1), c = final_at(0.05);
    double e1 = 0, e2 = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      e1 = std::max(e1, std::abs(a[k] - b[k]));
      e2 = std::max(e2, std::abs(b[k] - c[k]));
    }
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
  }
  SUBCASE("too large a step leaves the simplex") {
    ModelParams q = p;
    q.beta = 0.9;
    q.tau = 0.5;
    q.lambda = 1.0;
    const MacroState y0{0.1, 0.1, 0, 0.4, 0.4, 0};
    CHECK_THROWS_AS(integrate(y0, q, {50, 5.0, 5.0}), NonFiniteState);
  }
  SUBCASE("positive invariance from random states") {
    Rng rng = make_rng(8);
    for (int i = 0; i < 20; ++i) {
      const ModelParams q = testing::random_params(rng);
      const MacroState y0 = random_state(rng, q.v);
      CHECK_NOTHROW(integrate(y0, q, {100, 0.01, 10}));
    }
  }
  SUBCASE("micro integration of a homogeneous state") {
    ModelParams q = p;
    q.n = 200;
    const PopulationSplit s = split(q);
    const MicroState m = MicroState::homogeneous(s, {0.99, 0.01, 0}, {0.99, 0.01, 0});
    const Trajectory micro = integrate(m, q, {20, 0.01, 5});
    const Trajectory macro = integrate(m.aggregate(), q, {20, 0.01, 5});
    REQUIRE(micro.size() == macro.size());
    const Fractions err = sup_norm_error(micro, macro);
    for (double e : err) CHECK(e < 5e-3);
  }
}
