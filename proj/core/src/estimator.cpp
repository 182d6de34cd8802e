#include "siqs/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "siqs/engine.hpp"
#include "siqs/errors.hpp"
#include "siqs/parallel.hpp"
#include "siqs/rng.hpp"

namespace siqs {

void EstimationConfig::check() const {
  if (!(horizon > 0.0)) throw RangeError("horizon", "must be positive");
  if (replicates < 1) throw RangeError("replicates", "must be at least 1");
  if (initial_infected < 0) throw RangeError("initial_infected", "must be non-negative");
  if (!(tau_lo >= 0.0)) throw RangeError("tau_lo", "must be non-negative");
  if (!(tau_hi >= tau_lo)) throw RangeError("tau_hi", "must not be below tau_lo");
  if (!(coarse_step > 0.0)) throw RangeError("coarse_step", "must be positive");
  if (!(fine_step > 0.0 && fine_step < coarse_step))
    throw RangeError("fine_step", "must be positive and smaller than coarse_step");
}

double EradicationPoint::std_dev() const { return std::sqrt(probability * (1.0 - probability)); }

std::vector<EradicationPoint> ThresholdEstimate::table() const {
  std::map<std::uint64_t, EradicationPoint> merged;
  for (const auto& p : coarse) merged.emplace(tau_key(p.tau), p);
  for (const auto& p : fine) merged.emplace(tau_key(p.tau), p);
  std::vector<EradicationPoint> out;
  out.reserve(merged.size());
  for (const auto& [key, p] : merged) out.push_back(p);
  return out;
}

std::uint64_t tau_key(double tau) { return static_cast<std::uint64_t>(std::llround(tau * 1e9)); }

EradicationPoint eradication_probability(const ModelParams& params,
                                         std::shared_ptr<const Backbone> backbone, double tau,
                                         const EstimationConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw RangeError("horizon", "must be positive");
  if (cfg.replicates < 1) throw RangeError("replicates", "must be at least 1");

  ModelParams p = params;
  p.tau = tau;
  p = validate(p);

  const auto key = tau_key(tau);
  std::vector<char> eradicated(static_cast<std::size_t>(cfg.replicates), 0);
  parallel_for(eradicated.size(), cfg.jobs, [&](std::size_t r) {
    Engine engine = Engine::init(p, backbone, cfg.initial_infected,
                                 derive_seed(cfg.master_seed, {key, static_cast<std::uint64_t>(r)}));
    eradicated[r] = engine.run_until(cfg.horizon) ? 1 : 0;
  });

  EradicationPoint point;
  point.tau = tau;
  point.replicates = cfg.replicates;
  point.probability = static_cast<double>(std::count(eradicated.begin(), eradicated.end(), 1)) /
                      static_cast<double>(cfg.replicates);
  return point;
}

ThresholdEstimate estimate_threshold(const ModelParams& params,
                                     std::shared_ptr<const Backbone> backbone,
                                     const EstimationConfig& cfg) {
  cfg.check();
  ThresholdEstimate est;
  std::map<std::uint64_t, EradicationPoint> cache;
  auto evaluate = [&](double tau) {
    const auto key = tau_key(tau);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const EradicationPoint pt = eradication_probability(params, backbone, tau, cfg);
    cache.emplace(key, pt);
    return pt;
  };

  // Step 1: walk down from tau_hi until eradication becomes unlikely.
  bool bracketed = false;
  const auto coarse_points =
      static_cast<std::int64_t>(std::floor((cfg.tau_hi - cfg.tau_lo) / cfg.coarse_step + 1e-9));
  for (std::int64_t k = 0; k <= coarse_points; ++k) {
    const double tau = cfg.tau_hi - static_cast<double>(k) * cfg.coarse_step;
    const EradicationPoint pt = evaluate(tau);
    est.coarse.push_back(pt);
    if (pt.probability < 0.5) {
      est.tau_coarse = tau;
      bracketed = true;
      break;
    }
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "eradication probability never dropped below 0.5 on [" << cfg.tau_lo << ", " << cfg.tau_hi
       << "]";
    throw NotBracketed(os.str());
  }

  // Step 2: fine scan around tau~.
  const double start = est.tau_coarse - cfg.coarse_step;
  const auto fine_points = static_cast<std::int64_t>(std::llround(2.0 * cfg.coarse_step / cfg.fine_step));
  double best_sd = -1.0;
  for (std::int64_t i = 0; i <= fine_points; ++i) {
    const double tau = start + static_cast<double>(i) * cfg.fine_step;
    if (tau < -1e-12) continue;
    const EradicationPoint pt = evaluate(std::max(0.0, tau));
    est.fine.push_back(pt);
    // Ascending tau with a strict comparison keeps the smallest tau on ties.
    if (pt.std_dev() > best_sd + 1e-15) {
      best_sd = pt.std_dev();
      est.tau_hat = pt.tau;
    }
  }
  return est;
}

void write_estimate(std::ostream& out, const ThresholdEstimate& est, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "tau,eradication_probability,std_dev\n";
  std::ostringstream row;
  row.precision(12);
  for (const auto& p : est.table()) {
    row.str({});
    row << p.tau << ',' << p.probability << ',' << p.std_dev();
    out << row.str() << '\n';
  }
  row.str({});
  row << "tau_hat=" << est.tau_hat;
  out << row.str() << '\n';
}

int isotonic_violations(const std::vector<EradicationPoint>& table) {
  int violations = 0;
  for (std::size_t i = 1; i < table.size(); ++i)
    if (table[i].probability < table[i - 1].probability) ++violations;
  return violations;
}

}  // namespace siqs
