#include "siqs/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "siqs/errors.hpp"
#include "siqs/rng.hpp"

namespace siqs {

namespace {

using EdgeList = std::vector<std::pair<Index, Index>>;

void require_nodes(Index n, Index minimum, const char* what) {
  if (n < minimum) {
    std::ostringstream os;
    os << what << ": need n >= " << minimum << ", got " << n;
    throw RangeError("n", os.str());
  }
}

}  // namespace

std::vector<Index> NeighborView::to_vector() const {
  std::vector<Index> out(static_cast<std::size_t>(size()));
  for (Index i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = (*this)[i];
  return out;
}

Backbone Backbone::complete(Index n) {
  require_nodes(n, 2, "complete backbone");
  Backbone b;
  b.kind_ = BackboneKind::Complete;
  b.n_ = n;
  return b;
}

Backbone Backbone::from_edges(Index n, std::span<const std::pair<Index, Index>> edges,
                              BackboneKind kind, std::uint64_t seed) {
  require_nodes(n, 1, "backbone");
  std::vector<std::int64_t> degree(static_cast<std::size_t>(n), 0);
  for (const auto& [j, k] : edges) {
    if (j < 0 || k < 0 || j >= n || k >= n)
      throw RangeError("edge", "endpoint out of range");
    if (j == k) throw RangeError("edge", "self-loop");
    ++degree[static_cast<std::size_t>(j)];
    ++degree[static_cast<std::size_t>(k)];
  }

  Backbone b;
  b.kind_ = kind;
  b.n_ = n;
  b.seed_ = seed;
  b.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::partial_sum(degree.begin(), degree.end(), b.offsets_.begin() + 1);
  b.targets_.resize(static_cast<std::size_t>(b.offsets_.back()));

  std::vector<std::int64_t> cursor(b.offsets_.begin(), b.offsets_.end() - 1);
  for (const auto& [j, k] : edges) {
    b.targets_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(j)]++)] = k;
    b.targets_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(k)]++)] = j;
  }

  // Sort each row and squeeze out duplicates.
  std::vector<std::int64_t> new_offsets(b.offsets_.size(), 0);
  std::int64_t write = 0;
  for (Index j = 0; j < n; ++j) {
    auto first = b.targets_.begin() + b.offsets_[static_cast<std::size_t>(j)];
    auto last = b.targets_.begin() + b.offsets_[static_cast<std::size_t>(j) + 1];
    std::sort(first, last);
    last = std::unique(first, last);
    for (auto it = first; it != last; ++it) b.targets_[static_cast<std::size_t>(write++)] = *it;
    new_offsets[static_cast<std::size_t>(j) + 1] = write;
  }
  b.targets_.resize(static_cast<std::size_t>(write));
  b.targets_.shrink_to_fit();
  b.offsets_ = std::move(new_offsets);
  return b;
}

Backbone Backbone::erdos_renyi(Index n, double p, std::uint64_t seed) {
  require_nodes(n, 2, "Erdos-Renyi backbone");
  if (!(p >= 0.0 && p <= 1.0)) throw RangeError("p", "must lie in [0, 1]");

  EdgeList edges;
  if (p >= 1.0) {
    edges.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index j = 0; j < n; ++j)
      for (Index k = j + 1; k < n; ++k) edges.emplace_back(j, k);
  } else if (p > 0.0) {
    // Geometric skipping over the lower-triangular pair sequence
    // (1,0), (2,0), (2,1), (3,0), ... (Batagelj & Brandes).
    Rng rng = make_rng(seed, {0x45525f4752415048ULL});
    const double log_q = std::log1p(-p);
    const auto expected = static_cast<double>(n) * static_cast<double>(n - 1) * 0.5 * p;
    edges.reserve(static_cast<std::size_t>(expected * 1.1) + 16);
    Index row = 1;
    Index col = -1;
    while (row < n) {
      const double r = uniform01(rng);
      col += 1 + static_cast<Index>(std::floor(std::log1p(-r) / log_q));
      while (col >= row && row < n) {
        col -= row;
        ++row;
      }
      if (row < n) edges.emplace_back(col, row);
    }
  }
  return from_edges(n, edges, BackboneKind::ErdosRenyi, seed);
}

Backbone Backbone::barabasi_albert(Index n, Index m, std::uint64_t seed) {
  if (m < 1) throw RangeError("m", "must be at least 1");
  if (m >= n) throw RangeError("m", "must be smaller than n");

  Rng rng = make_rng(seed, {0x42415f4752415048ULL});
  EdgeList edges;
  edges.reserve(static_cast<std::size_t>(m * (m + 1) / 2 + (n - m - 1) * m));

  // Degree-weighted urn: node t appears deg(t) times.
  std::vector<Index> urn;
  urn.reserve(2 * edges.capacity());

  for (Index j = 0; j <= m; ++j) {
    for (Index k = j + 1; k <= m; ++k) {
      edges.emplace_back(j, k);
      urn.push_back(j);
      urn.push_back(k);
    }
  }

  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(m));
  for (Index t = m + 1; t < n; ++t) {
    chosen.clear();
    while (static_cast<Index>(chosen.size()) < m) {
      const Index target = urn[uniform_below(rng, urn.size())];
      if (std::find(chosen.begin(), chosen.end(), target) == chosen.end())
        chosen.push_back(target);
    }
    for (Index target : chosen) {
      edges.emplace_back(target, t);
      urn.push_back(target);
      urn.push_back(t);
    }
  }

  // Arrival order correlates with degree; relabel so that hubs are not tied to
  // the low (vaccinated) index block.
  std::vector<Index> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), Index{0});
  for (Index i = n - 1; i > 0; --i) {
    const auto r = static_cast<Index>(uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
    std::swap(label[static_cast<std::size_t>(i)], label[static_cast<std::size_t>(r)]);
  }
  for (auto& [j, k] : edges) {
    j = label[static_cast<std::size_t>(j)];
    k = label[static_cast<std::size_t>(k)];
  }
  return from_edges(n, edges, BackboneKind::BarabasiAlbert, seed);
}

Index Backbone::degree(Index j) const {
  if (is_complete()) return n_ - 1;
  return offsets_[static_cast<std::size_t>(j) + 1] - offsets_[static_cast<std::size_t>(j)];
}

std::int64_t Backbone::edge_count() const {
  if (is_complete()) return n_ * (n_ - 1) / 2;
  return static_cast<std::int64_t>(targets_.size()) / 2;
}

bool Backbone::has_edge(Index j, Index k) const {
  if (j == k) return false;
  if (is_complete()) return j >= 0 && k >= 0 && j < n_ && k < n_;
  const auto row = neighbors(j).to_vector();
  return std::binary_search(row.begin(), row.end(), k);
}

NeighborView Backbone::neighbors(Index j) const {
  if (is_complete()) return NeighborView::range_without(0, n_, j);
  const auto first = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(j)]);
  const auto last = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(j) + 1]);
  return NeighborView::explicit_list(std::span<const Index>(targets_).subspan(first, last - first));
}

NeighborView Backbone::neighbors(Index j, Group g, const PopulationSplit& split) const {
  const Index lo = split.first(g);
  const Index hi = lo + split.size(g);
  if (is_complete()) return NeighborView::range_without(lo, hi, j);

  const auto first = targets_.begin() + offsets_[static_cast<std::size_t>(j)];
  const auto last = targets_.begin() + offsets_[static_cast<std::size_t>(j) + 1];
  const auto a = std::lower_bound(first, last, lo);
  const auto b = std::lower_bound(a, last, hi);
  return NeighborView::explicit_list(
      std::span<const Index>(&*targets_.begin() + (a - targets_.begin()),
                             static_cast<std::size_t>(b - a)));
}

std::vector<std::pair<Index, Index>> Backbone::edges() const {
  std::vector<std::pair<Index, Index>> out;
  out.reserve(static_cast<std::size_t>(edge_count()));
  for (Index j = 0; j < n_; ++j) {
    const auto row = neighbors(j);
    for (Index i = 0; i < row.size(); ++i)
      if (row[i] > j) out.emplace_back(j, row[i]);
  }
  return out;
}

std::string to_string(BackboneKind kind) {
  switch (kind) {
    case BackboneKind::Complete:
      return "complete";
    case BackboneKind::ErdosRenyi:
      return "erdos_renyi";
    case BackboneKind::BarabasiAlbert:
      return "barabasi_albert";
    case BackboneKind::Imported:
      return "imported";
  }
  return "unknown";
}

void write_edge_list(std::ostream& out, const Backbone& b) {
  for (const auto& [j, k] : b.edges()) out << (j + 1) << ' ' << (k + 1) << '\n';
}

Backbone read_edge_list(std::istream& in, Index n) {
  EdgeList edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    Index j = 0;
    Index k = 0;
    if (!(row >> j >> k)) {
      throw ConfigError("edge list line " + std::to_string(line_no) + ": expected 'j k'");
    }
    if (j < 1 || k < 1 || j > n || k > n) {
      throw ConfigError("edge list line " + std::to_string(line_no) +
                        ": index outside 1.." + std::to_string(n));
    }
    edges.emplace_back(j - 1, k - 1);
  }
  return Backbone::from_edges(n, edges, BackboneKind::Imported, 0);
}

}  // namespace siqs
