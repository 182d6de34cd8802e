#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace siqs {

/// Compartment fractions (S_n, I_n, Q_n, S_v, I_v, Q_v), each relative to the
/// whole population.
using Fractions = std::array<double, 6>;

enum Compartment : std::size_t { kSn = 0, kIn, kQn, kSv, kIv, kQv };

inline double infected_fraction(const Fractions& f) {
  return f[kIn] + f[kQn] + f[kIv] + f[kQv];
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Fractions> samples;
  /// Time at which I + Q first reached zero, if it did.
  std::optional<double> eradication_time;

  std::size_t size() const { return times.size(); }
  void push(double t, const Fractions& f) {
    times.push_back(t);
    samples.push_back(f);
  }
};

/// Pointwise mean of trajectories sampled on identical time grids.
Trajectory average(std::span<const Trajectory> runs);

/// Largest absolute difference per compartment over the common grid.
Fractions sup_norm_error(const Trajectory& a, const Trajectory& b);

/// CSV with header `t,S_n,I_n,Q_n,S_v,I_v,Q_v`. `comment`, when nonempty, is
/// written first as a `# ...` line.
void write_csv(std::ostream& out, const Trajectory& traj, const std::string& comment = {});
Trajectory read_csv(std::istream& in);

}  // namespace siqs
