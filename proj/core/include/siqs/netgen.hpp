#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "siqs/params.hpp"

namespace siqs {

enum class BackboneKind { Complete, ErdosRenyi, BarabasiAlbert, Imported };

/// Candidates for partner selection: either an explicit sorted list of
/// neighbours or the implicit index range [first, last) with `self` removed.
class NeighborView {
 public:
  static NeighborView explicit_list(std::span<const Index> ids) {
    NeighborView v;
    v.ids_ = ids;
    v.implicit_ = false;
    return v;
  }
  static NeighborView range_without(Index first, Index last, Index self) {
    NeighborView v;
    v.first_ = first;
    v.last_ = last;
    v.self_ = (self >= first && self < last) ? self : -1;
    v.implicit_ = true;
    return v;
  }

  Index size() const {
    if (!implicit_) return static_cast<Index>(ids_.size());
    return (last_ - first_) - (self_ >= 0 ? 1 : 0);
  }
  bool empty() const { return size() == 0; }

  Index operator[](Index i) const {
    if (!implicit_) return ids_[static_cast<std::size_t>(i)];
    const Index k = first_ + i;
    return (self_ >= 0 && k >= self_) ? k + 1 : k;
  }

  std::vector<Index> to_vector() const;

 private:
  std::span<const Index> ids_;
  Index first_ = 0;
  Index last_ = 0;
  Index self_ = -1;
  bool implicit_ = false;
};

/// Time-invariant contact-constraint graph on individuals 0..n-1.
///
/// Complete backbones store no adjacency. Explicit backbones keep sorted
/// neighbour lists in compressed-row form; since vaccinated individuals occupy
/// the low indices, the vaccinated neighbours of any node form a prefix of its
/// list.
class Backbone {
 public:
  static Backbone complete(Index n);
  static Backbone erdos_renyi(Index n, double p, std::uint64_t seed);
  static Backbone barabasi_albert(Index n, Index m, std::uint64_t seed);
  /// Builds an explicit backbone from 0-based undirected edges. Duplicates are
  /// merged; self-loops and out-of-range endpoints throw.
  static Backbone from_edges(Index n, std::span<const std::pair<Index, Index>> edges,
                             BackboneKind kind = BackboneKind::Imported,
                             std::uint64_t seed = 0);

  BackboneKind kind() const { return kind_; }
  Index n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  bool is_complete() const { return kind_ == BackboneKind::Complete; }

  Index degree(Index j) const;
  std::int64_t edge_count() const;
  bool has_edge(Index j, Index k) const;

  NeighborView neighbors(Index j) const;
  /// N_j restricted to group g.
  NeighborView neighbors(Index j, Group g, const PopulationSplit& split) const;

  /// Undirected edges (j, k) with j < k, 0-based, in lexicographic order.
  std::vector<std::pair<Index, Index>> edges() const;

 private:
  BackboneKind kind_ = BackboneKind::Complete;
  Index n_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::int64_t> offsets_;
  std::vector<Index> targets_;
};

std::string to_string(BackboneKind kind);

/// Edge list text: one "j k" pair per line, 1-based, j < k.
void write_edge_list(std::ostream& out, const Backbone& b);
Backbone read_edge_list(std::istream& in, Index n);

}  // namespace siqs
