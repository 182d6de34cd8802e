#pragma once

#include <array>
#include <string>
#include <string_view>

#include "siqs/params.hpp"

namespace siqs {

/// Closed-form threshold analysis of the disease-free equilibrium of the
/// macroscopic mean-field system. All routines work on the effective lambda
/// (eta folded in) and ignore n.

/// Aggregate transmission factor of vaccinated infectious individuals:
/// (1 - gamma_t) [1 - p_q (1 - gamma_q)] (1 - sigma_v).
double phi(const ModelParams& params);

/// Aggregate transmission factor of non-vaccinated infectious individuals:
/// (1 - p_q)(1 - sigma_n).
double rho(const ModelParams& params);

double xi(const ModelParams& params);

/// xi^2 - 4 theta phi rho. Near cancellation it is evaluated through the
/// equivalent polynomial in theta.
double discriminant(const ModelParams& params);

/// The same quantity through its expansion in powers of theta.
double discriminant_polynomial(const ModelParams& params);

/// Critical testing rate: the DFE is locally asymptotically stable iff
/// tau exceeds it.
double analytic_threshold(const ModelParams& params);

/// Threshold for theta = 0 (theta in `params` is ignored).
double threshold_no_homophily(const ModelParams& params);

/// True when the DFE is stable even without testing.
bool no_control_needed(const ModelParams& params);

using Matrix4 = std::array<std::array<double, 4>, 4>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Jacobian of the reduced system at the DFE, variables ordered
/// (y_nq, y_vq, y_ni, y_vi).
Matrix4 dfe_jacobian(const ModelParams& params);

/// Lower-right (y_ni, y_vi) block of `dfe_jacobian`.
Matrix2 infectious_block(const ModelParams& params);

/// Eigenvalues of the infectious block, larger first. Throws
/// NegativeDiscriminant if the discriminant is not positive.
std::array<double, 2> iblock_eigenvalues(const ModelParams& params);

/// Sign of d(tau_bar)/dv: -1, 0 or +1 according to phi - rho.
int coverage_sensitivity(const ModelParams& params);

enum class Direction { Increasing, Decreasing };

struct MonotonicityReport {
  std::string parameter;
  Direction expected = Direction::Increasing;
  double value_before = 0.0;
  double value_after = 0.0;
  double tau_bar_before = 0.0;
  double tau_bar_after = 0.0;
  double change() const { return tau_bar_after - tau_bar_before; }
};

/// Expected direction of tau_bar in the named parameter. Throws ConfigError
/// for parameters without a definite direction.
Direction threshold_direction(std::string_view parameter);

/// Evaluates tau_bar at params and at params with `parameter` increased by
/// `step` (or, if that would leave [0, 1], at params - step and params).
/// Throws MonotonicityViolated if tau_bar moves against the expected
/// direction by more than rounding.
MonotonicityReport monotonicity_check(const ModelParams& params, std::string_view parameter, double step);

struct ThresholdReport {
  double xi = 0.0;
  double tau_bar = 0.0;
  double phi = 0.0;
  double rho = 0.0;
  double discriminant = 0.0;
  std::array<double, 2> eigenvalues{};
  bool dfe_stable = false;
  bool no_control_needed = false;
  int coverage_derivative_sign = 0;
};

ThresholdReport threshold_report(const ModelParams& params);

/// `key=value` lines.
std::string to_key_values(const ThresholdReport& r);

}  // namespace siqs
