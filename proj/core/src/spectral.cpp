#include "siqs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "siqs/errors.hpp"

namespace siqs {

namespace {

// Relative distance between xi^2 and 4 theta phi rho below which the
// polynomial form of the discriminant is used instead.
constexpr double kCancellationGuard = 1e-6;

double severe_vaccinated(const ModelParams& p) { return p.p_q * (1.0 - p.gamma_q); }

// Weights of the non-vaccinated and vaccinated infectious pools seen by a
// member of the same group.
double weight_n(const ModelParams& p) { return p.theta + (1.0 - p.theta) * (1.0 - p.v); }
double weight_v(const ModelParams& p) { return p.theta + (1.0 - p.theta) * p.v; }

}  // namespace

double phi(const ModelParams& params) {
  const ModelParams p = normalized(params);
  return (1.0 - p.gamma_t) * (1.0 - severe_vaccinated(p)) * (1.0 - p.sigma_v);
}

double rho(const ModelParams& params) {
  const ModelParams p = normalized(params);
  return (1.0 - p.p_q) * (1.0 - p.sigma_n);
}

double xi(const ModelParams& params) {
  const ModelParams p = normalized(params);
  return rho(p) * weight_n(p) + phi(p) * weight_v(p);
}

double discriminant_polynomial(const ModelParams& params) {
  const ModelParams p = normalized(params);
  const double f = phi(p);
  const double r = rho(p);
  const double v = p.v;
  const double t = p.theta;
  const double lead = v * r + (1.0 - v) * f;
  const double tail = (1.0 - v) * r + v * f;
  return t * t * lead * lead + 2.0 * t * (v * (1.0 - v) * (f - r) * (f - r) - f * r) + tail * tail;
}

double discriminant(const ModelParams& params) {
  const ModelParams p = normalized(params);
  const double x = xi(p);
  const double coupling = 4.0 * p.theta * phi(p) * rho(p);
  const double direct = x * x - coupling;
  if (std::abs(direct) < kCancellationGuard * x * x) return discriminant_polynomial(p);
  return direct;
}

double analytic_threshold(const ModelParams& params) {
  const ModelParams p = normalized(params);
  const double root = std::sqrt(std::max(0.0, discriminant(p)));
  return p.lambda * xi(p) - p.beta + p.lambda * root;
}

double threshold_no_homophily(const ModelParams& params) {
  const ModelParams p = normalized(params);
  return 2.0 * p.lambda * (1.0 - p.p_q) * (1.0 - p.v) * (1.0 - p.sigma_n) +
         2.0 * p.lambda * (1.0 - p.gamma_t) * p.v * (1.0 - severe_vaccinated(p)) * (1.0 - p.sigma_v) -
         p.beta;
}

bool no_control_needed(const ModelParams& params) {
  const ModelParams p = normalized(params);
  const double root = std::sqrt(std::max(0.0, discriminant(p)));
  return p.beta > p.lambda * xi(p) + p.lambda * root;
}

Matrix4 dfe_jacobian(const ModelParams& params) {
  const ModelParams p = normalized(params);
  const double l2 = 2.0 * p.lambda;
  const double wn = weight_n(p);
  const double wv = weight_v(p);
  const double cross_into_n = (1.0 - p.theta) * (1.0 - p.v);  // y_vi -> non-vaccinated
  const double cross_into_v = (1.0 - p.theta) * p.v;          // y_ni -> vaccinated
  const double sn = 1.0 - p.sigma_n;
  const double sv = 1.0 - p.sigma_v;
  const double tv = 1.0 - p.gamma_t;
  const double qv = severe_vaccinated(p);

  Matrix4 j{};
  // Row y_nq.
  j[0][0] = -p.beta;
  j[0][2] = l2 * p.p_q * wn * sn + p.tau;
  j[0][3] = l2 * p.p_q * cross_into_n * sv;
  // Row y_vq.
  j[1][1] = -p.beta;
  j[1][2] = l2 * tv * qv * cross_into_v * sn;
  j[1][3] = l2 * tv * qv * wv * sv + p.tau;
  // Row y_ni.
  j[2][2] = l2 * (1.0 - p.p_q) * wn * sn - p.beta - p.tau;
  j[2][3] = l2 * (1.0 - p.p_q) * cross_into_n * sv;
  // Row y_vi.
  j[3][2] = l2 * tv * (1.0 - qv) * cross_into_v * sn;
  j[3][3] = l2 * tv * (1.0 - qv) * wv * sv - p.beta - p.tau;
  return j;
}

Matrix2 infectious_block(const ModelParams& params) {
  const Matrix4 j = dfe_jacobian(params);
  return {{{j[2][2], j[2][3]}, {j[3][2], j[3][3]}}};
}

std::array<double, 2> iblock_eigenvalues(const ModelParams& params) {
  const ModelParams p = normalized(params);
  const double d = discriminant(p);
  if (d < 0.0) {
    std::ostringstream os;
    os << "discriminant " << d << " is negative for " << describe(p);
    throw NegativeDiscriminant(os.str());
  }
  const double centre = p.lambda * xi(p) - p.beta - p.tau;
  const double half_gap = p.lambda * std::sqrt(d);
  return {centre + half_gap, centre - half_gap};
}

int coverage_sensitivity(const ModelParams& params) {
  const double diff = phi(params) - rho(params);
  return (diff > 0.0) - (diff < 0.0);
}

Direction threshold_direction(std::string_view parameter) {
  if (parameter == "lambda" || parameter == "gamma_q") return Direction::Increasing;
  if (parameter == "beta" || parameter == "gamma_t" || parameter == "sigma_v" ||
      parameter == "sigma_n" || parameter == "p_q")
    return Direction::Decreasing;
  throw ConfigError("no monotonicity statement for parameter '" + std::string(parameter) + "'");
}

MonotonicityReport monotonicity_check(const ModelParams& params, std::string_view parameter,
                                      double step) {
  if (!(step > 0.0)) throw RangeError("step", "must be positive");
  MonotonicityReport rep;
  rep.parameter = std::string(parameter);
  rep.expected = threshold_direction(parameter);

  ModelParams lo = normalized(params);
  ModelParams hi = lo;
  const double value = get_param(lo, parameter);
  const bool bounded = parameter != "beta";
  if (bounded && value + step > 1.0) {
    set_param(lo, parameter, value - step);
  } else {
    set_param(hi, parameter, value + step);
  }
  rep.value_before = get_param(lo, parameter);
  rep.value_after = get_param(hi, parameter);
  rep.tau_bar_before = analytic_threshold(lo);
  rep.tau_bar_after = analytic_threshold(hi);

  const double slack = 1e-12 * std::max(1.0, std::abs(rep.tau_bar_before));
  const double delta = rep.change();
  const bool violated = rep.expected == Direction::Increasing ? delta < -slack : delta > slack;
  if (violated) {
    std::ostringstream os;
    os.precision(17);
    os << "threshold moved the wrong way in " << parameter << ": " << rep.tau_bar_before << " -> "
       << rep.tau_bar_after << " at " << describe(lo);
    throw MonotonicityViolated(os.str());
  }
  return rep;
}

ThresholdReport threshold_report(const ModelParams& params) {
  const ModelParams p = normalized(params);
  ThresholdReport r;
  r.xi = xi(p);
  r.phi = phi(p);
  r.rho = rho(p);
  r.discriminant = discriminant(p);
  r.tau_bar = analytic_threshold(p);
  r.eigenvalues = iblock_eigenvalues(p);
  r.dfe_stable = p.tau > r.tau_bar;
  r.no_control_needed = no_control_needed(p);
  r.coverage_derivative_sign = coverage_sensitivity(p);
  return r;
}

std::string to_key_values(const ThresholdReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << "xi=" << r.xi << '\n'
     << "tau_bar=" << r.tau_bar << '\n'
     << "phi=" << r.phi << '\n'
     << "rho=" << r.rho << '\n'
     << "discriminant=" << r.discriminant << '\n'
     << "eigenvalue_max=" << r.eigenvalues[0] << '\n'
     << "eigenvalue_min=" << r.eigenvalues[1] << '\n'
     << "dfe_stable=" << (r.dfe_stable ? "true" : "false") << '\n'
     << "no_control_needed=" << (r.no_control_needed ? "true" : "false") << '\n'
     << "coverage_derivative_sign=" << r.coverage_derivative_sign << '\n';
  return os.str();
}

}  // namespace siqs
