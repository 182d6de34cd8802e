#include <doctest.h>

#include <cmath>
#include <sstream>

#include "siqs/errors.hpp"
#include "siqs/estimator.hpp"
#include "support.hpp"

using namespace siqs;

namespace {

EstimationConfig quick_config() {
  EstimationConfig cfg;
  cfg.replicates = 8;
  cfg.horizon = 100;
  return cfg;
}

}  // namespace

TEST_CASE("eradication without contagion") {
  ModelParams p;
  p.n = 500;
  p.lambda = 0.0;
  p.beta = 0.1;
  EstimationConfig cfg = quick_config();
  cfg.horizon = 200;
  const EradicationPoint pt = eradication_probability(p, nullptr, 0.05, cfg);
  CHECK(pt.probability == 1.0);
  CHECK(pt.replicates == 8);
  CHECK(pt.std_dev() == 0.0);
}

TEST_CASE("no eradication without exits") {
  ModelParams p;
  p.n = 300;
  p.lambda = 0.5;
  p.sigma_n = p.sigma_v = 0.0;
  p.beta = 1e-300;
  EstimationConfig cfg = quick_config();
  cfg.horizon = 20;
  CHECK(eradication_probability(p, nullptr, 0.0, cfg).probability == 0.0);
}

TEST_CASE("configuration checks") {
  EstimationConfig cfg;
  CHECK_NOTHROW(cfg.check());
  cfg.fine_step = cfg.coarse_step;
  CHECK_THROWS_AS(cfg.check(), RangeError);
  cfg = {};
  cfg.tau_lo = -0.1;
  CHECK_THROWS_AS(cfg.check(), RangeError);
  cfg = {};
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.check(), RangeError);
}

TEST_CASE("stable disease is never bracketed") {
  ModelParams p = testing::case_study();
  p.n = 500;
  p.sigma_n = p.sigma_v = 1.0;
  EstimationConfig cfg = quick_config();
  cfg.tau_hi = 0.1;
  CHECK_THROWS_AS(estimate_threshold(p, nullptr, cfg), NotBracketed);
}

TEST_CASE("two-step scan on a small complete population") {
  ModelParams p = testing::case_study();
  p.n = 1000;
  EstimationConfig cfg = quick_config();
  cfg.master_seed = 5;
  const ThresholdEstimate est = estimate_threshold(p, nullptr, cfg);

  REQUIRE_FALSE(est.coarse.empty());
  CHECK(est.coarse.back().probability < 0.5);
  for (std::size_t i = 0; i + 1 < est.coarse.size(); ++i) CHECK(est.coarse[i].probability >= 0.5);
  CHECK(est.tau_coarse == est.coarse.back().tau);
  CHECK(est.tau_hat >= est.tau_coarse - cfg.coarse_step - 1e-12);
  CHECK(est.tau_hat <= est.tau_coarse + cfg.coarse_step + 1e-12);

  // tau_hat maximises the indicator spread among fine points, smallest first.
  double best = -1;
  for (const auto& pt : est.fine) best = std::max(best, pt.std_dev());
  for (const auto& pt : est.fine) {
    if (pt.tau < est.tau_hat - 1e-12) CHECK(pt.std_dev() < best);
    if (std::abs(pt.tau - est.tau_hat) < 1e-12) CHECK(pt.std_dev() == best);
  }

  // Every table entry comes from exactly `replicates` runs.
  const auto table = est.table();
  for (const auto& pt : table) CHECK(pt.replicates == cfg.replicates);
  for (std::size_t i = 1; i < table.size(); ++i) CHECK(table[i].tau > table[i - 1].tau);
  CHECK(isotonic_violations(table) <= 2);

  const ThresholdEstimate again = estimate_threshold(p, nullptr, cfg);
  CHECK(again.tau_hat == est.tau_hat);
  CHECK(again.table().size() == table.size());
}

TEST_CASE("replicate streams do not depend on the scanned grid") {
  ModelParams p = testing::case_study();
  p.n = 800;
  EstimationConfig a = quick_config();
  EstimationConfig b = a;
  b.coarse_step = 0.05;
  b.fine_step = 0.01;
  CHECK(eradication_probability(p, nullptr, 0.12, a).probability ==
        eradication_probability(p, nullptr, 0.12, b).probability);
  CHECK(tau_key(0.1) == tau_key(0.2 - 5 * 0.02));
}

TEST_CASE("isotonic violations and CSV") {
  std::vector<EradicationPoint> t = {{0.0, 0.0, 10}, {0.1, 0.4, 10}, {0.2, 0.3, 10}, {0.3, 1.0, 10}};
  CHECK(isotonic_violations(t) == 1);

  ThresholdEstimate est;
  est.coarse = {{0.2, 1.0, 10}, {0.1, 0.3, 10}};
  est.fine = {{0.1, 0.3, 10}, {0.15, 0.5, 10}};
  est.tau_hat = 0.15;
  std::ostringstream os;
  write_estimate(os, est, "seed=1");
  CHECK(os.str() ==
        "# seed=1\n"
        "tau,eradication_probability,std_dev\n"
        "0.1,0.3,0.458257569496\n"
        "0.15,0.5,0.5\n"
        "0.2,1,0\n"
        "tau_hat=0.15\n");
}
