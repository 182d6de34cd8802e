#include "siqs/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "siqs/errors.hpp"

namespace siqs {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const auto key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[std::string(key)] = std::string(trim(s.substr(eq + 1)));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return parse_key_values(in);
}

double parse_double(std::string_view key, std::string_view text) {
  return parse_number<double>(key, text);
}

std::int64_t parse_int(std::string_view key, std::string_view text) {
  return parse_number<std::int64_t>(key, text);
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  return parse_number<std::uint64_t>(key, text);
}

void apply_params(ModelParams& p, const KeyValues& kv) {
  const auto& names = param_names();
  for (const auto& [key, value] : kv) {
    if (std::find(names.begin(), names.end(), key) == names.end()) continue;
    if (key == "n") {
      p.n = parse_int(key, value);
      if (p.n < 1) throw ConfigError("n: must be positive");
    } else {
      set_param(p, key, parse_double(key, value));
    }
  }
}

void check_known_keys(const KeyValues& kv, const std::vector<std::string>& extra) {
  const auto& names = param_names();
  for (const auto& [key, value] : kv) {
    if (std::find(names.begin(), names.end(), key) != names.end()) continue;
    if (std::find(extra.begin(), extra.end(), key) != extra.end()) continue;
    throw ConfigError("unknown key '" + key + "'");
  }
}

BackboneSpec parse_backbone(std::string_view text) {
  text = trim(text);
  BackboneSpec spec;
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;

  if (head == "none" && !has_arg) {
    spec.kind = BackboneSpec::Kind::None;
  } else if (head == "complete" && !has_arg) {
    spec.kind = BackboneSpec::Kind::Complete;
  } else if (head == "er" && has_arg) {
    spec.kind = BackboneSpec::Kind::ErdosRenyi;
    spec.p = parse_double("backbone", arg);
    if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw ConfigError("backbone: er probability outside [0, 1]");
  } else if (head == "ba" && has_arg) {
    spec.kind = BackboneSpec::Kind::BarabasiAlbert;
    spec.m = parse_int("backbone", arg);
    if (spec.m < 1) throw ConfigError("backbone: ba needs m >= 1");
  } else if (head == "file" && has_arg && !arg.empty()) {
    spec.kind = BackboneSpec::Kind::File;
    spec.path = std::string(arg);
  } else {
    throw ConfigError("backbone: expected none, complete, er:<p>, ba:<m> or file:<path>, got '" +
                      std::string(text) + "'");
  }
  return spec;
}

std::string to_string(const BackboneSpec& spec) {
  switch (spec.kind) {
    case BackboneSpec::Kind::None:
      return "none";
    case BackboneSpec::Kind::Complete:
      return "complete";
    case BackboneSpec::Kind::ErdosRenyi: {
      std::ostringstream os;
      os.precision(17);
      os << "er:" << spec.p;
      return os.str();
    }
    case BackboneSpec::Kind::BarabasiAlbert:
      return "ba:" + std::to_string(spec.m);
    case BackboneSpec::Kind::File:
      return "file:" + spec.path;
  }
  return "complete";
}

std::shared_ptr<const Backbone> build_backbone(const BackboneSpec& spec, Index n, std::uint64_t seed) {
  switch (spec.kind) {
    case BackboneSpec::Kind::None:
      return nullptr;
    case BackboneSpec::Kind::Complete:
      return std::make_shared<const Backbone>(Backbone::complete(n));
    case BackboneSpec::Kind::ErdosRenyi:
      return std::make_shared<const Backbone>(Backbone::erdos_renyi(n, spec.p, seed));
    case BackboneSpec::Kind::BarabasiAlbert:
      return std::make_shared<const Backbone>(Backbone::barabasi_albert(n, spec.m, seed));
    case BackboneSpec::Kind::File: {
      std::ifstream in(spec.path);
      if (!in) throw ConfigError("cannot open " + spec.path);
      return std::make_shared<const Backbone>(read_edge_list(in, n));
    }
  }
  return nullptr;
}

}  // namespace siqs
