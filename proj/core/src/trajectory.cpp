#include "siqs/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "siqs/errors.hpp"

namespace siqs {

Trajectory average(std::span<const Trajectory> runs) {
  Trajectory out;
  if (runs.empty()) return out;
  const auto& first = runs.front();
  for (const auto& r : runs) {
    if (r.times.size() != first.times.size())
      throw Error("average: trajectories sampled on different grids");
  }
  out.times = first.times;
  out.samples.assign(first.samples.size(), Fractions{});
  const double w = 1.0 / static_cast<double>(runs.size());
  for (const auto& r : runs)
    for (std::size_t i = 0; i < r.samples.size(); ++i)
      for (std::size_t c = 0; c < 6; ++c) out.samples[i][c] += w * r.samples[i][c];
  return out;
}

Fractions sup_norm_error(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size())
    throw Error("sup_norm_error: trajectories sampled on different grids");
  Fractions err{};
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    for (std::size_t c = 0; c < 6; ++c)
      err[c] = std::max(err[c], std::abs(a.samples[i][c] - b.samples[i][c]));
  return err;
}

void write_csv(std::ostream& out, const Trajectory& traj, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,S_n,I_n,Q_n,S_v,I_v,Q_v\n";
  std::ostringstream row;
  row.precision(12);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    row.str({});
    row << traj.times[i];
    for (double x : traj.samples[i]) row << ',' << x;
    out << row.str() << '\n';
  }
}

Trajectory read_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "t,S_n,I_n,Q_n,S_v,I_v,Q_v") throw ConfigError("unexpected trajectory header");
      header_seen = true;
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t = 0;
    Fractions f{};
    row >> t;
    for (auto& x : f) row >> x;
    if (!row) throw ConfigError("malformed trajectory row: " + line);
    traj.push(t, f);
  }
  return traj;
}

}  // namespace siqs
