#pragma once

#include <cmath>
#include <cstdint>

#include "siqs/meanfield.hpp"
#include "siqs/params.hpp"
#include "siqs/rng.hpp"
#include "siqs/spectral.hpp"
#include "siqs/trajectory.hpp"

namespace siqs::testing {

inline double draw(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Random valid parameters. v stays away from 0 and 1 so both groups exist.
inline ModelParams random_params(Rng& rng) {
  ModelParams p;
  p.n = 10000;
  p.v = draw(rng, 0.02, 0.98);
  p.lambda = draw(rng, 0.01, 1.0);
  p.p_q = draw(rng, 0.0, 1.0);
  p.beta = draw(rng, 0.001, 0.5);
  p.gamma_t = draw(rng, 0.0, 1.0);
  p.gamma_q = draw(rng, 0.0, 1.0);
  p.tau = draw(rng, 0.0, 0.5);
  p.theta = draw(rng, 0.0, 0.99);
  p.sigma_v = draw(rng, 0.0, 1.0);
  p.sigma_n = draw(rng, 0.0, 1.0);
  return p;
}

/// Parameters of the case study with the backbone experiment settings.
inline ModelParams case_study() {
  ModelParams p;
  p.n = 10000;
  p.lambda = 0.36;
  p.beta = 0.1;
  p.v = 0.821;
  p.p_q = 0.19;
  p.gamma_t = 0.65;
  p.gamma_q = 0.92;
  p.sigma_n = 0.5;
  p.theta = 0.5;
  p.sigma_v = 0.3;
  return p;
}

inline ModelParams fig1_params() {
  ModelParams p;
  p.n = 20000;
  p.v = 0.8;
  p.lambda = 0.2;
  p.sigma_v = 0.7;
  p.sigma_n = 0.2;
  p.p_q = 0.2;
  p.beta = 0.02;
  p.gamma_t = 0.5;
  p.gamma_q = 0.9;
  p.tau = 0.05;
  p.theta = 0.5;
  return p;
}

// Central-difference Jacobian of the macroscopic right-hand side at the DFE
// in the variables (y_nq, y_vq, y_ni, y_vi), with the susceptible
// components eliminated through the group mass constraints.
inline Matrix4 fd_jacobian(const ModelParams& p, double h) {
  const int idx[4] = {kQn, kQv, kIn, kIv};
  auto rhs = [&](const std::array<double, 4>& z) {
    Fractions y{};
    y[kQn] = z[0];
    y[kQv] = z[1];
    y[kIn] = z[2];
    y[kIv] = z[3];
    y[kSn] = 1 - p.v - z[0] - z[2];
    y[kSv] = p.v - z[1] - z[3];
    const Fractions d = macro_rhs(MacroState::from_array(y), p).as_array();
    return std::array<double, 4>{d[idx[0]], d[idx[1]], d[idx[2]], d[idx[3]]};
  };
  Matrix4 J{};
  for (int c = 0; c < 4; ++c) {
    std::array<double, 4> up{}, dn{};
    up[c] = h;
    dn[c] = -h;
    const auto a = rhs(up), b = rhs(dn);
    for (int r = 0; r < 4; ++r) J[r][c] = (a[r] - b[r]) / (2 * h);
  }
  return J;
}

}  // namespace siqs::testing
