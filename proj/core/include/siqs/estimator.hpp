#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "siqs/netgen.hpp"
#include "siqs/params.hpp"

namespace siqs {

struct EstimationConfig {
  double horizon = 200.0;
  int replicates = 10;
  Index initial_infected = 10;
  double tau_lo = 0.0;
  double tau_hi = 0.2;
  double coarse_step = 0.02;
  double fine_step = 0.005;
  std::uint64_t master_seed = 1;
  unsigned jobs = 1;

  /// Throws RangeError when the scan is ill-formed.
  void check() const;
};

struct EradicationPoint {
  double tau = 0.0;
  double probability = 0.0;
  int replicates = 0;
  /// Standard deviation of the binary eradication indicator, sqrt(p (1 - p)).
  double std_dev() const;
};

struct ThresholdEstimate {
  double tau_hat = 0.0;
  /// tau at which the coarse downward scan first dropped below 0.5.
  double tau_coarse = 0.0;
  std::vector<EradicationPoint> coarse;
  std::vector<EradicationPoint> fine;
  /// coarse and fine merged, sorted by tau, duplicates removed.
  std::vector<EradicationPoint> table() const;
};

/// Key identifying a tau value for seeding: tau rounded to 1e-9.
std::uint64_t tau_key(double tau);

/// Fraction of `cfg.replicates` runs (each from `cfg.initial_infected`
/// uniformly seeded infections) in which I + Q hits zero by `cfg.horizon`.
/// `params.tau` is replaced by `tau`. Replicate r runs on the stream
/// (master_seed, tau_key(tau), r).
EradicationPoint eradication_probability(const ModelParams& params,
                                         std::shared_ptr<const Backbone> backbone, double tau,
                                         const EstimationConfig& cfg);

/// Coarse downward scan from tau_hi until the eradication probability drops
/// below 0.5, then a fine scan of [tau~ - coarse_step, tau~ + coarse_step]
/// returning the tau that maximises the indicator's standard deviation (ties
/// toward smaller tau). Throws NotBracketed when the coarse scan never drops
/// below 0.5.
ThresholdEstimate estimate_threshold(const ModelParams& params,
                                     std::shared_ptr<const Backbone> backbone,
                                     const EstimationConfig& cfg);

/// CSV `tau,eradication_probability,std_dev` followed by `tau_hat=<value>`.
void write_estimate(std::ostream& out, const ThresholdEstimate& est, const std::string& comment = {});

/// Number of adjacent decreases in a probability table sorted by tau.
int isotonic_violations(const std::vector<EradicationPoint>& table);

}  // namespace siqs
