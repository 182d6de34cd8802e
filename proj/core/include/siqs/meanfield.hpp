#pragma once

#include <array>
#include <vector>

#include "siqs/params.hpp"
#include "siqs/trajectory.hpp"

namespace siqs {

/// Population-averaged state probabilities (y_ns, y_ni, y_nq, y_vs, y_vi, y_vq).
struct MacroState {
  double ns = 0.0;
  double ni = 0.0;
  double nq = 0.0;
  double vs = 0.0;
  double vi = 0.0;
  double vq = 0.0;

  Fractions as_array() const { return {ns, ni, nq, vs, vi, vq}; }
  static MacroState from_array(const Fractions& a) { return {a[0], a[1], a[2], a[3], a[4], a[5]}; }
};

/// Per-individual (s, i, q) probabilities. Each individual only carries the
/// triple of its own group; the other group's entries are identically zero.
struct MicroState {
  PopulationSplit split;
  std::vector<std::array<double, 3>> probs;

  /// Every individual in the same state.
  static MicroState homogeneous(const PopulationSplit& split, const std::array<double, 3>& vaccinated,
                                const std::array<double, 3>& non_vaccinated);
  /// Averages per group, normalised by n (y of the macroscopic system).
  MacroState aggregate() const;
};

/// The disease-free equilibrium (1 - v, 0, 0, v, 0, 0).
MacroState dfe(const ModelParams& params);

/// Right-hand side of the macroscopic system in the n -> infinity limit.
/// Throws DegenerateCoverage when theta > 0 and v is 0 or 1.
MacroState macro_rhs(const MacroState& y, const ModelParams& params);

/// Right-hand side of the per-individual mean-field system with the exact
/// n - 1 denominators. Throws SubpopulationTooSmall like `validate`.
std::vector<std::array<double, 3>> micro_rhs(const MicroState& m, const ModelParams& params);

struct IntegrationOptions {
  double horizon = 200.0;
  double dt = 0.01;
  double sample_interval = 1.0;
};

/// Classical fixed-step RK4. Samples land on the grid k * sample_interval
/// (rounded to whole steps) with the horizon always included. Throws
/// NonFiniteState when a component leaves [-1e-9, 1 + 1e-9].
Trajectory integrate(const MacroState& y0, const ModelParams& params, const IntegrationOptions& opts);
Trajectory integrate(const MicroState& m0, const ModelParams& params, const IntegrationOptions& opts);

/// Final state of a macroscopic integration without sampling.
MacroState integrate_to(const MacroState& y0, const ModelParams& params, double horizon, double dt);

}  // namespace siqs
