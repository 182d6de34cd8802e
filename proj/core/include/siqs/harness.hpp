#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "siqs/config.hpp"
#include "siqs/estimator.hpp"
#include "siqs/params.hpp"
#include "siqs/trajectory.hpp"

namespace siqs {

enum class Metric { ThresholdAnalytic, ThresholdEstimated, FinalInfectedFraction, EradicationProbability };

Metric parse_metric(std::string_view text);
std::string to_string(Metric m);
bool is_stochastic(Metric m);

/// Evenly spaced values of one parameter, endpoints included.
struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int points = 1;

  double value(int i) const;
};

/// `name:lo:hi:points`, or `name:value` for a single point.
Axis parse_axis(std::string_view text);

/// Seed of the random backbone built for a run with master seed `seed`.
std::uint64_t backbone_seed(std::uint64_t seed);

/// Number of initially infected: `fraction * n` rounded when fraction > 0,
/// otherwise `count`.
Index initial_count(Index n, Index count, double fraction);

/// Independent engine runs from uniformly seeded infections; replicate r
/// uses the stream (seed, r).
std::vector<Trajectory> simulate_replicates(const ModelParams& params,
                                            std::shared_ptr<const Backbone> backbone,
                                            Index initial_infected, double horizon,
                                            double sample_interval, int replicates,
                                            std::uint64_t seed, unsigned jobs = 1);

/// Mean of I + Q at `horizon` over the runs of `simulate_replicates`.
double final_infected_fraction(const ModelParams& params, std::shared_ptr<const Backbone> backbone,
                               Index initial_infected, double horizon, int replicates,
                               std::uint64_t seed, unsigned jobs = 1);

struct SweepSpec {
  ModelParams base;
  /// Zero, one or two axes; the second varies fastest in the output.
  std::vector<Axis> axes;
  BackboneSpec backbone;
  Metric metric = Metric::ThresholdAnalytic;
  double horizon = 200.0;
  int replicates = 10;
  Index initial_infected = 10;
  /// When positive, overrides `initial_infected` as a fraction of n.
  double initial_fraction = 0.0;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  /// Scan settings for ThresholdEstimated; horizon, replicates, initial
  /// infected and seed are taken from the fields above.
  EstimationConfig estimation;

  /// Throws ConfigError or RangeError.
  void check() const;
};

struct SweepCell {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> value;
  std::string error;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;
};

/// Evaluates the metric on every grid point. Every point uses the same master
/// seed. A failing point leaves an empty cell and, if `log` is given, one
/// line naming the point and the error.
SweepResult run_sweep(const SweepSpec& spec, std::ostream* log = nullptr);

/// `# ...` lines recording the resolved configuration, then `x,y,value`.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Header comment shared by every CSV produced by the harness.
std::string provenance_comment(const ModelParams& params, std::uint64_t seed, std::string_view extra = {});

struct ReproduceOptions {
  /// Shrinks population sizes, replicate counts and grids; 1 is the full
  /// preset.
  double scale = 1.0;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out_dir = ".";
  bool svg = false;
  std::ostream* log = nullptr;
};

const std::vector<std::string>& figure_ids();

/// Runs the preset of `figure` and writes its CSV files (and SVG files when
/// requested) into `out_dir`. Returns the written paths.
std::vector<std::string> reproduce(std::string_view figure, const ReproduceOptions& opts);

}  // namespace siqs
