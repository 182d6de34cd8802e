#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace siqs {

using Index = std::int64_t;

/// Vaccination status. Vaccinated individuals occupy the low indices.
enum class Group : std::uint8_t { NonVaccinated = 0, Vaccinated = 1 };

constexpr std::string_view to_string(Group g) {
  return g == Group::Vaccinated ? "v" : "n";
}

/// Scalar model and control parameters.
///
/// `lambda` is the raw per-contact infection probability and `eta` the
/// effectiveness of non-pharmaceutical interventions. After `validate`,
/// `lambda` holds the effective value (1 - eta) * lambda and `eta` is 0, so
/// every downstream routine reads `lambda` directly.
struct ModelParams {
  std::int64_t n = 10000;
  double v = 0.5;
  double lambda = 0.2;
  double p_q = 0.2;
  double beta = 0.02;
  double gamma_t = 0.5;
  double gamma_q = 0.9;
  double tau = 0.05;
  double theta = 0.0;
  double sigma_v = 0.5;
  double sigma_n = 0.5;
  double eta = 0.0;

  bool operator==(const ModelParams&) const = default;
};

/// Names of the scalar fields, in the order used by config files and CSV
/// header comments.
const std::vector<std::string>& param_names();

/// Read/write a field by name. Throws ConfigError for unknown names.
double get_param(const ModelParams& p, std::string_view name);
void set_param(ModelParams& p, std::string_view name, double value);

/// Sizes of the two subpopulations. Vaccinated individuals have indices
/// [0, n_v), non-vaccinated [n_v, n).
struct PopulationSplit {
  Index n_v = 0;
  Index n_n = 0;

  Index n() const { return n_v + n_n; }
  Group group_of(Index j) const {
    return j < n_v ? Group::Vaccinated : Group::NonVaccinated;
  }
  Index size(Group g) const { return g == Group::Vaccinated ? n_v : n_n; }
  /// First index of the group's contiguous block.
  Index first(Group g) const { return g == Group::Vaccinated ? 0 : n_v; }

  bool operator==(const PopulationSplit&) const = default;
};

/// n_v = round(v * n), ties rounded up.
Index vaccinated_count(std::int64_t n, double v);

/// Splits the population; both groups must be nonempty.
PopulationSplit split(const ModelParams& p);

/// Range-checks every field, folds eta into lambda, and checks that both
/// subpopulations have at least two members when theta > 0.
/// Throws RangeError or SubpopulationTooSmall.
ModelParams validate(const ModelParams& p);

/// Range checks plus the eta folding of `validate`, without the population
/// size checks. Used by the n -> infinity routines.
ModelParams normalized(const ModelParams& p);

/// Range checks only; does not touch n or the population split. Used by the
/// closed-form threshold routines, which live in the n -> infinity limit.
void check_ranges(const ModelParams& p);

/// One-line `key=value ...` rendering of every field.
std::string describe(const ModelParams& p);

}  // namespace siqs
