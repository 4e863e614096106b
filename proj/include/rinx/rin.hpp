#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rinx/cell_grid.hpp"
#include "rinx/error.hpp"
#include "rinx/parallel.hpp"
#include "rinx/scores.hpp"
#include "rinx/trajectory.hpp"

namespace rinx {

enum class DistanceCriterion { CAlpha, CenterOfMass, MinimumAtomDistance };

inline std::string_view to_string(DistanceCriterion c) {
  switch (c) {
    case DistanceCriterion::CAlpha: return "calpha";
    case DistanceCriterion::CenterOfMass: return "com";
    case DistanceCriterion::MinimumAtomDistance: return "min";
  }
  return "min";
}

inline std::optional<DistanceCriterion> parse_criterion(std::string_view name) {
  if (name == "calpha") return DistanceCriterion::CAlpha;
  if (name == "com") return DistanceCriterion::CenterOfMass;
  if (name == "min") return DistanceCriterion::MinimumAtomDistance;
  return std::nullopt;
}

struct RinConfig {
  DistanceCriterion criterion = DistanceCriterion::MinimumAtomDistance;
  double cutoff = 4.5;  // Å, inclusive
  bool exclude_backbone_neighbors = false;

  void validate() const {
    if (!(cutoff > 0.0) || !std::isfinite(cutoff))
      throw Error(ErrorCode::InvalidConfig, "cutoff must be a positive finite length, got " + std::to_string(cutoff));
  }

  friend bool operator==(const RinConfig&, const RinConfig&) = default;
};

// Range advertised to interactive clients; any positive cut-off is accepted.
inline constexpr double kCutoffSliderMin = 4.0;
inline constexpr double kCutoffSliderMax = 8.5;
inline constexpr double kCutoffSliderStep = 0.1;

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph over residues. Immutable once built; updates return
// new values.
class Rin {
 public:
  Rin() = default;

  // edges: any order, i != j; duplicates and orientation are normalized.
  static Rin from_edges(std::size_t node_count, std::vector<Edge> edges, RinConfig config = {},
                        std::size_t frame_index = 0) {
    for (auto& [i, j] : edges) {
      if (i == j) throw Error(ErrorCode::InvalidPayload, "self-loop on node " + std::to_string(i));
      if (i >= node_count || j >= node_count)
        throw Error(ErrorCode::InvalidPayload, "edge endpoint out of range");
      if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    Rin g;
    g.config_ = config;
    g.frame_index_ = frame_index;
    g.offsets_.assign(node_count + 1, 0);
    for (const auto& [i, j] : edges) {
      ++g.offsets_[i + 1];
      ++g.offsets_[j + 1];
    }
    for (std::size_t v = 0; v < node_count; ++v) g.offsets_[v + 1] += g.offsets_[v];
    g.targets_.resize(2 * edges.size());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    // Sorted edge order fills every list in ascending order: all j < i arrive
    // (as sources) before any j > i (as targets).
    for (const auto& [i, j] : edges) g.targets_[fill[j]++] = i;
    for (const auto& [i, j] : edges) g.targets_[fill[i]++] = j;
    g.edge_count_ = edges.size();
    return g;
  }

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edge_count_; }
  std::span<const NodeId> neighbors(std::size_t v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
  const RinConfig& config() const { return config_; }
  std::size_t frame_index() const { return frame_index_; }

  bool has_edge(NodeId i, NodeId j) const {
    if (i >= node_count() || j >= node_count()) return false;
    const auto n = neighbors(i);
    return std::binary_search(n.begin(), n.end(), j);
  }

  // Lexicographically sorted, i < j.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::size_t i = 0; i < node_count(); ++i)
      for (NodeId j : neighbors(i))
        if (j > i) out.emplace_back(static_cast<NodeId>(i), j);
    return out;
  }

  // Same graph (ignores config and frame).
  friend bool same_edges(const Rin& a, const Rin& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
  }

 private:
  // CSR adjacency: neighbours of v are targets_[offsets_[v] .. offsets_[v+1]).
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::size_t edge_count_ = 0;
  RinConfig config_;
  std::size_t frame_index_ = 0;
};

struct EdgeDelta {
  std::vector<Edge> added;
  std::vector<Edge> removed;

  bool empty() const { return added.empty() && removed.empty(); }
};

inline EdgeDelta edge_difference(const Rin& before, const Rin& after) {
  const auto a = before.edges();
  const auto b = after.edges();
  EdgeDelta d;
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(d.added));
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(d.removed));
  return d;
}

namespace rin_detail {

inline void warn_unknown_element(const std::string& element) {
  static std::mutex m;
  static std::set<std::string> seen;
  std::lock_guard lock(m);
  if (seen.insert(element).second)
    std::clog << "rinx: warning: unknown element '" << element << "', using carbon mass\n";
}

inline Vec3 calpha_position(const Frame& frame, const Topology& top, std::size_t r) {
  const Residue& res = top.residues[r];
  for (std::size_t a : res.atom_indices)
    if (top.atoms[a].name == "CA") return frame.positions[a];
  throw Error(ErrorCode::MissingCAlpha,
              "residue " + res.name + " " + std::to_string(res.seq_number) + " (index " + std::to_string(r) +
                  ") has no CA atom");
}

inline Vec3 center_of_mass(const Frame& frame, const Topology& top, std::size_t r) {
  const Residue& res = top.residues[r];
  Vec3 sum;
  double total = 0.0;
  for (std::size_t a : res.atom_indices) {
    bool known = true;
    const double m = atomic_mass(top.atoms[a].element, &known);
    if (!known) warn_unknown_element(top.atoms[a].element);
    sum += frame.positions[a] * m;
    total += m;
  }
  return sum * (1.0 / total);
}

inline bool sequence_neighbors(const Topology& top, std::size_t i, std::size_t j) {
  const std::size_t gap = i > j ? i - j : j - i;
  return gap == 1 && top.residues[i].chain_id == top.residues[j].chain_id;
}

inline void check_frame(const Frame& frame, const Topology& top) {
  if (frame.positions.size() != top.atoms.size())
    throw Error(ErrorCode::InconsistentTopology, "frame has " + std::to_string(frame.positions.size()) +
                                                     " atoms, topology has " + std::to_string(top.atoms.size()));
}

}  // namespace rin_detail

// One representative point per residue for the CAlpha and CenterOfMass criteria.
inline std::vector<Vec3> representative_points(const Frame& frame, const Topology& top, DistanceCriterion c) {
  std::vector<Vec3> pts(top.residues.size());
  for (std::size_t r = 0; r < pts.size(); ++r)
    pts[r] = c == DistanceCriterion::CAlpha ? rin_detail::calpha_position(frame, top, r)
                                            : rin_detail::center_of_mass(frame, top, r);
  return pts;
}

inline double residue_distance(const Frame& frame, const Topology& top, std::size_t i, std::size_t j,
                               DistanceCriterion criterion) {
  if (i == j) throw Error(ErrorCode::InvalidPayload, "residue_distance requires i != j");
  if (i >= top.residues.size() || j >= top.residues.size())
    throw Error(ErrorCode::InvalidPayload, "residue index out of range");
  switch (criterion) {
    case DistanceCriterion::CAlpha:
      return distance(rin_detail::calpha_position(frame, top, i), rin_detail::calpha_position(frame, top, j));
    case DistanceCriterion::CenterOfMass:
      return distance(rin_detail::center_of_mass(frame, top, i), rin_detail::center_of_mass(frame, top, j));
    case DistanceCriterion::MinimumAtomDistance: {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a : top.residues[i].atom_indices)
        for (std::size_t b : top.residues[j].atom_indices)
          best = std::min(best, distance(frame.positions[a], frame.positions[b]));
      return best;
    }
  }
  return std::numeric_limits<double>::infinity();
}

namespace rin_detail {

// Residue pairs whose criterion distance lies in (lower, upper]. lower < 0
// means no lower bound. Pairs come back sorted and unique.
inline std::vector<Edge> contact_pairs(const Frame& frame, const Topology& top, const RinConfig& config,
                                       double lower) {
  const double upper = config.cutoff;
  const bool atoms = config.criterion == DistanceCriterion::MinimumAtomDistance;
  std::vector<Vec3> reps;
  if (!atoms) reps = representative_points(frame, top, config.criterion);
  const std::span<const Vec3> points = atoms ? std::span<const Vec3>(frame.positions) : std::span<const Vec3>(reps);
  const CellGrid grid(points, upper);

  constexpr std::size_t kBlock = 256;
  const std::size_t ncells = grid.cell_count();
  std::vector<std::vector<Edge>> per_block((ncells + kBlock - 1) / kBlock);
  parallel_blocks(ncells, kBlock, [&](std::size_t begin, std::size_t end, std::size_t b) {
    auto& out = per_block[b];
    grid.for_each_pair_in_cells(begin, end, upper, [&](std::uint32_t p, std::uint32_t q, double d) {
      if (d <= lower) return;
      std::size_t ri = p, rj = q;
      if (atoms) {
        ri = top.atoms[p].residue_index;
        rj = top.atoms[q].residue_index;
        if (ri == rj) return;
        if (ri > rj) std::swap(ri, rj);
      }
      if (config.exclude_backbone_neighbors && sequence_neighbors(top, ri, rj)) return;
      out.emplace_back(static_cast<NodeId>(ri), static_cast<NodeId>(rj));
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  });
  std::vector<Edge> all;
  for (auto& block : per_block) all.insert(all.end(), block.begin(), block.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

}  // namespace rin_detail

// Edge {i, j} iff residue_distance(i, j) <= cutoff (and, optionally, i and j
// are not sequence neighbours of the same chain).
inline Rin build_rin(const Frame& frame, const Topology& top, const RinConfig& config) {
  config.validate();
  rin_detail::check_frame(frame, top);
  return Rin::from_edges(top.residues.size(), rin_detail::contact_pairs(frame, top, config, -1.0), config,
                         frame.index);
}

struct CutoffChange {
  Rin rin;
  EdgeDelta delta;
};

inline CutoffChange apply_cutoff_change(const Rin& rin, const Frame& frame, const Topology& top,
                                        double new_cutoff) {
  RinConfig config = rin.config();
  config.cutoff = new_cutoff;
  config.validate();
  rin_detail::check_frame(frame, top);
  if (rin.node_count() != top.residues.size())
    throw Error(ErrorCode::InconsistentTopology, "graph and residue table differ in size");
  const double old_cutoff = rin.config().cutoff;

  CutoffChange out;
  if (new_cutoff == old_cutoff) {
    out.rin = rin;
    return out;
  }

  std::vector<Edge> edges = rin.edges();
  if (new_cutoff < old_cutoff) {
    // Shrinking: only existing edges can disappear.
    std::vector<char> keep(edges.size(), 1);
    parallel_for(edges.size(), [&](std::size_t e) {
      const auto [i, j] = edges[e];
      keep[e] = residue_distance(frame, top, i, j, config.criterion) <= new_cutoff;
    });
    std::vector<Edge> kept;
    for (std::size_t e = 0; e < edges.size(); ++e)
      (keep[e] ? kept : out.delta.removed).push_back(edges[e]);
    edges = std::move(kept);
  } else {
    // Growing: candidates are pairs with a contact in (old, new]; pairs that
    // already have an edge are filtered out.
    for (const Edge& e : rin_detail::contact_pairs(frame, top, config, old_cutoff))
      if (!rin.has_edge(e.first, e.second)) out.delta.added.push_back(e);
    std::vector<Edge> merged;
    merged.reserve(edges.size() + out.delta.added.size());
    std::merge(edges.begin(), edges.end(), out.delta.added.begin(), out.delta.added.end(),
               std::back_inserter(merged));
    edges = std::move(merged);
  }
  out.rin = Rin::from_edges(top.residues.size(), std::move(edges), config, frame.index);
  return out;
}

inline Rin apply_frame_change(const RinConfig& config, const Topology& top, const Frame& new_frame) {
  return build_rin(new_frame, top, config);
}

// Labels are dense and ordered by each component's smallest node.
inline Partition connected_components(const Rin& rin) {
  const std::size_t n = rin.node_count();
  constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
  Partition p;
  p.labels.assign(n, unset);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (p.labels[s] != unset) continue;
    const std::size_t label = p.community_count++;
    p.labels[s] = label;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (NodeId u : rin.neighbors(v))
        if (p.labels[u] == unset) {
          p.labels[u] = label;
          stack.push_back(u);
        }
    }
  }
  return p;
}

}  // namespace rinx
