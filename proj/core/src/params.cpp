#include "siqs/params.hpp"

#include <cmath>
#include <sstream>

#include "siqs/errors.hpp"

namespace siqs {

namespace {

struct FieldRef {
  const char* name;
  double ModelParams::*member;
};

constexpr FieldRef kFields[] = {
    {"v", &ModelParams::v},
    {"lambda", &ModelParams::lambda},
    {"p_q", &ModelParams::p_q},
    {"beta", &ModelParams::beta},
    {"gamma_t", &ModelParams::gamma_t},
    {"gamma_q", &ModelParams::gamma_q},
    {"tau", &ModelParams::tau},
    {"theta", &ModelParams::theta},
    {"sigma_v", &ModelParams::sigma_v},
    {"sigma_n", &ModelParams::sigma_n},
    {"eta", &ModelParams::eta},
};

void require_unit(const char* field, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << "must lie in [0, 1], got " << x;
    throw RangeError(field, os.str());
  }
}

}  // namespace

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out{"n"};
    for (const auto& f : kFields) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

double get_param(const ModelParams& p, std::string_view name) {
  if (name == "n") return static_cast<double>(p.n);
  for (const auto& f : kFields)
    if (name == f.name) return p.*(f.member);
  throw ConfigError("unknown parameter '" + std::string(name) + "'");
}

void set_param(ModelParams& p, std::string_view name, double value) {
  if (name == "n") {
    if (!(value >= 1.0) || value != std::floor(value))
      throw RangeError("n", "must be a positive integer");
    p.n = static_cast<std::int64_t>(value);
    return;
  }
  for (const auto& f : kFields) {
    if (name == f.name) {
      p.*(f.member) = value;
      return;
    }
  }
  throw ConfigError("unknown parameter '" + std::string(name) + "'");
}

Index vaccinated_count(std::int64_t n, double v) {
  return static_cast<Index>(std::floor(v * static_cast<double>(n) + 0.5));
}

PopulationSplit split(const ModelParams& p) {
  PopulationSplit s;
  s.n_v = vaccinated_count(p.n, p.v);
  s.n_n = p.n - s.n_v;
  if (s.n_v < 1 || s.n_n < 1) {
    std::ostringstream os;
    os << "both subpopulations must be nonempty (n_v=" << s.n_v << ", n_n=" << s.n_n
       << ")";
    throw SubpopulationTooSmall(os.str());
  }
  return s;
}

void check_ranges(const ModelParams& p) {
  require_unit("v", p.v);
  require_unit("lambda", p.lambda);
  require_unit("p_q", p.p_q);
  require_unit("gamma_t", p.gamma_t);
  require_unit("gamma_q", p.gamma_q);
  require_unit("sigma_v", p.sigma_v);
  require_unit("sigma_n", p.sigma_n);
  require_unit("eta", p.eta);
  if (!(p.beta > 0.0) || !std::isfinite(p.beta))
    throw RangeError("beta", "must be a positive finite rate");
  if (!(p.tau >= 0.0) || !std::isfinite(p.tau))
    throw RangeError("tau", "must be a non-negative finite rate");
  if (!(p.theta >= 0.0 && p.theta < 1.0))
    throw RangeError("theta", "must lie in [0, 1)");
}

ModelParams normalized(const ModelParams& p) {
  check_ranges(p);
  ModelParams out = p;
  out.lambda = (1.0 - p.eta) * p.lambda;
  out.eta = 0.0;
  return out;
}

ModelParams validate(const ModelParams& p) {
  if (p.n < 1) throw RangeError("n", "must be a positive integer");
  ModelParams out = normalized(p);

  if (p.theta > 0.0) {
    const Index n_v = vaccinated_count(p.n, p.v);
    const Index n_n = p.n - n_v;
    if (n_v < 2 || n_n < 2) {
      std::ostringstream os;
      os << "homophily theta=" << p.theta
         << " needs at least 2 members per subpopulation (n_v=" << n_v << ", n_n=" << n_n
         << ")";
      throw SubpopulationTooSmall(os.str());
    }
  }
  return out;
}

std::string describe(const ModelParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << p.n;
  for (const auto& f : kFields) os << ' ' << f.name << '=' << p.*(f.member);
  return os.str();
}

}  // namespace siqs
