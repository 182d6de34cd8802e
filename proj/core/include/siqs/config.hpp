#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "siqs/netgen.hpp"
#include "siqs/params.hpp"

namespace siqs {

/// Flat `key = value` configuration. Blank lines and `#` comments are
/// skipped; later occurrences of a key win.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

/// Strict numeric parsing; ConfigError on trailing garbage.
double parse_double(std::string_view key, std::string_view text);
std::int64_t parse_int(std::string_view key, std::string_view text);
std::uint64_t parse_u64(std::string_view key, std::string_view text);

/// Assigns every key of `kv` that names a ModelParams field.
void apply_params(ModelParams& p, const KeyValues& kv);

/// Throws ConfigError naming the first key that is neither a parameter name
/// nor listed in `extra`.
void check_known_keys(const KeyValues& kv, const std::vector<std::string>& extra);

struct BackboneSpec {
  enum class Kind { None, Complete, ErdosRenyi, BarabasiAlbert, File };
  Kind kind = Kind::Complete;
  double p = 0.0;
  Index m = 0;
  std::string path;

  bool operator==(const BackboneSpec&) const = default;
};

/// `none`, `complete`, `er:<p>`, `ba:<m>` or `file:<path>`.
BackboneSpec parse_backbone(std::string_view text);
std::string to_string(const BackboneSpec& spec);

/// Builds the backbone for a population of n. `none` gives a null pointer
/// (unconstrained mixing). Random graphs draw from `seed`.
std::shared_ptr<const Backbone> build_backbone(const BackboneSpec& spec, Index n, std::uint64_t seed);

}  // namespace siqs
