#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "rinx/error.hpp"
#include "rinx/rin.hpp"
#include "rinx/scores.hpp"

namespace rinx {

inline void check_partition(const Rin& rin, const Partition& p) {
  if (p.labels.size() != rin.node_count())
    throw Error(ErrorCode::LengthMismatch, "partition covers " + std::to_string(p.labels.size()) +
                                               " nodes, graph has " + std::to_string(rin.node_count()));
}

// Q = sum_c [ e_c/m - gamma (deg_c / 2m)^2 ]; 0 for edgeless graphs.
inline double modularity(const Rin& rin, const Partition& p, double gamma = 1.0) {
  check_partition(rin, p);
  const double m = static_cast<double>(rin.edge_count());
  if (m == 0.0) return 0.0;
  std::size_t k = 0;
  for (std::size_t l : p.labels) k = std::max(k, l + 1);
  std::vector<double> internal(k, 0.0), degree(k, 0.0);
  for (std::size_t v = 0; v < rin.node_count(); ++v) {
    degree[p.labels[v]] += static_cast<double>(rin.degree(v));
    for (NodeId u : rin.neighbors(v))
      if (u > v && p.labels[u] == p.labels[v]) internal[p.labels[v]] += 1.0;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double frac = degree[c] / (2.0 * m);
    q += internal[c] / m - gamma * frac * frac;
  }
  return q;
}

// Mutual information normalized by the larger of the two entropies. Two
// single-community partitions compare as 1.
inline double nmi(const Partition& p, const Partition& q) {
  if (p.labels.size() != q.labels.size())
    throw Error(ErrorCode::LengthMismatch, "partitions differ in length");
  const std::size_t n = p.labels.size();
  if (n == 0) return 1.0;
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> pa, pb;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{p.labels[i], q.labels[i]}] += 1.0;
    pa[p.labels[i]] += 1.0;
    pb[q.labels[i]] += 1.0;
  }
  const double nn = static_cast<double>(n);
  auto entropy = [&](const std::map<std::size_t, double>& counts) {
    double h = 0.0;
    for (const auto& [label, c] : counts) h -= (c / nn) * std::log(c / nn);
    return h;
  };
  const double ha = entropy(pa);
  const double hb = entropy(pb);
  const double denom = std::max(ha, hb);
  if (denom <= 0.0) return 1.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) mi += (c / nn) * std::log(nn * c / (pa[key.first] * pb[key.second]));
  return std::clamp(mi / denom, 0.0, 1.0);
}

namespace community_detail {

// Weighted graph used across coarsening levels. Self-loop weight counts as
// internal edge weight of the node.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> strength;
  double total = 0.0;  // m: sum of edge weights, self loops included

  std::size_t size() const { return adj.size(); }

  static WeightedGraph from_rin(const Rin& rin) {
    WeightedGraph g;
    const std::size_t n = rin.node_count();
    g.adj.resize(n);
    g.self_loop.assign(n, 0.0);
    g.strength.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (NodeId u : rin.neighbors(v)) g.adj[v].emplace_back(u, 1.0);
      g.strength[v] = static_cast<double>(rin.degree(v));
    }
    g.total = static_cast<double>(rin.edge_count());
    return g;
  }

  // Collapses each community into one node; community ids must be dense.
  WeightedGraph aggregate(const std::vector<std::size_t>& community, std::size_t k) const {
    WeightedGraph g;
    g.adj.resize(k);
    g.self_loop.assign(k, 0.0);
    g.strength.assign(k, 0.0);
    g.total = total;
    std::vector<std::map<std::size_t, double>> acc(k);
    for (std::size_t v = 0; v < size(); ++v) {
      const std::size_t cv = community[v];
      g.self_loop[cv] += self_loop[v];
      g.strength[cv] += strength[v];
      for (const auto& [u, w] : adj[v]) {
        const std::size_t cu = community[u];
        if (cu == cv) {
          if (u > v) g.self_loop[cv] += w;
        } else {
          acc[cv][cu] += w;
        }
      }
    }
    for (std::size_t c = 0; c < k; ++c) g.adj[c].assign(acc[c].begin(), acc[c].end());
    return g;
  }
};

inline std::size_t densify(std::vector<std::size_t>& labels) {
  std::vector<std::size_t> map(labels.size(), SIZE_MAX);
  std::size_t next = 0;
  for (auto& l : labels) {
    if (map[l] == SIZE_MAX) map[l] = next++;
    l = map[l];
  }
  return next;
}

// Louvain local moving. Nodes are scanned in ascending id; a node moves only
// for a strictly larger gain, and among equal best gains the smallest
// community id wins. Returns whether any node moved.
inline bool local_moving(const WeightedGraph& g, std::vector<std::size_t>& community, double gamma) {
  const std::size_t n = g.size();
  const double two_m = 2.0 * g.total;
  if (g.total <= 0.0) return false;
  std::vector<double> tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) tot[community[v]] += g.strength[v];
  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  bool any = false;
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t own = community[v];
      const double kv = g.strength[v];
      touched.clear();
      for (const auto& [u, w] : g.adj[v]) {
        const std::size_t cu = community[u];
        if (link[cu] == 0.0) touched.push_back(cu);
        link[cu] += w;
      }
      tot[own] -= kv;
      double best_gain = link[own] - gamma * tot[own] * kv / two_m;
      std::size_t best = own;
      std::sort(touched.begin(), touched.end());
      for (std::size_t c : touched) {
        if (c == own) continue;
        const double gain = link[c] - gamma * tot[c] * kv / two_m;
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      for (std::size_t c : touched) link[c] = 0.0;
      link[own] = 0.0;
      tot[best] += kv;
      if (best != own) {
        community[v] = best;
        moved = true;
        any = true;
      }
    }
    if (!moved) break;
  }
  return any;
}

// Leiden refinement inside each community of `coarse`: start from singletons
// and merge well-connected singletons into well-connected refined subsets,
// choosing among non-negative gains with probability ~ exp(gain / theta).
inline std::vector<std::size_t> refine(const WeightedGraph& g, const std::vector<std::size_t>& coarse,
                                       double gamma, std::mt19937_64& rng, double theta = 0.01) {
  const std::size_t n = g.size();
  const double two_m = 2.0 * g.total;
  std::vector<std::size_t> refined(n);
  std::iota(refined.begin(), refined.end(), 0);
  std::vector<double> ref_tot(g.strength.begin(), g.strength.end());
  std::vector<bool> singleton(n, true);
  std::vector<double> coarse_tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) coarse_tot[coarse[v]] += g.strength[v];

  // ext[r] = weight from refined subset r to the rest of its coarse community.
  std::vector<double> ext(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& [u, w] : g.adj[v])
      if (coarse[u] == coarse[v]) ext[v] += w;

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  std::vector<std::pair<std::size_t, double>> candidates;
  for (std::size_t v = 0; v < n; ++v) {
    if (!singleton[v]) continue;
    const std::size_t c = coarse[v];
    const double kv = g.strength[v];
    if (ext[v] < gamma * kv * (coarse_tot[c] - kv) / two_m) continue;
    touched.clear();
    for (const auto& [u, w] : g.adj[v]) {
      if (coarse[u] != c) continue;
      const std::size_t r = refined[u];
      if (link[r] == 0.0) touched.push_back(r);
      link[r] += w;
    }
    std::sort(touched.begin(), touched.end());
    candidates.clear();
    candidates.emplace_back(refined[v], 0.0);
    for (std::size_t r : touched) {
      if (r == refined[v]) continue;
      if (ext[r] < gamma * ref_tot[r] * (coarse_tot[c] - ref_tot[r]) / two_m) continue;
      const double gain = link[r] - gamma * kv * ref_tot[r] / two_m;
      if (gain >= 0.0) candidates.emplace_back(r, gain);
    }
    double best = 0.0;
    for (const auto& cand : candidates) best = std::max(best, cand.second);
    std::vector<double> weights;
    weights.reserve(candidates.size());
    for (const auto& cand : candidates) weights.push_back(std::exp((cand.second - best) / theta));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const std::size_t target = candidates[pick(rng)].first;
    for (std::size_t r : touched) link[r] = 0.0;
    if (target == refined[v]) continue;

    // Update the external weight of the target subset: edges between v and
    // the target become internal, v's other in-community edges become external.
    double v_to_target = 0.0;
    for (const auto& [u, w] : g.adj[v])
      if (refined[u] == target) v_to_target += w;
    ext[target] += ext[v] - 2.0 * v_to_target;
    ref_tot[target] += kv;
    ref_tot[refined[v]] -= kv;
    refined[v] = target;
    singleton[v] = false;
    singleton[target] = false;
  }
  return refined;
}

}  // namespace community_detail

struct CommunityParams {
  CommunityMethod method = CommunityMethod::PLM;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  int max_levels = 64;
};

// Louvain-style modularity optimisation (PLM), optionally with the Leiden
// refinement phase. Serial and deterministic for a given seed; PLM does not
// consume the seed.
inline Partition community_detect(const Rin& rin, const CommunityParams& params = {}) {
  using namespace community_detail;
  if (!(params.gamma > 0.0)) throw Error(ErrorCode::InvalidConfig, "gamma must be positive");
  const std::size_t n = rin.node_count();
  std::vector<std::size_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0);
  if (rin.edge_count() == 0) return canonical_partition(membership);

  std::mt19937_64 rng(params.seed);
  WeightedGraph g = WeightedGraph::from_rin(rin);
  std::vector<std::size_t> community(n);
  std::iota(community.begin(), community.end(), 0);

  for (int level = 0; level < params.max_levels; ++level) {
    const bool moved = local_moving(g, community, params.gamma);
    std::size_t k = densify(community);
    if (!moved && level > 0) break;
    if (k == g.size()) break;

    std::vector<std::size_t> node_to_aggregate = community;
    std::vector<std::size_t> next_community;
    if (params.method == CommunityMethod::Leiden) {
      node_to_aggregate = refine(g, community, params.gamma, rng);
      const std::size_t kr = densify(node_to_aggregate);
      // Aggregate nodes start in the community of their members.
      next_community.assign(kr, 0);
      for (std::size_t v = 0; v < g.size(); ++v) next_community[node_to_aggregate[v]] = community[v];
      k = kr;
    } else {
      next_community.resize(k);
      std::iota(next_community.begin(), next_community.end(), 0);
    }
    for (auto& m : membership) m = node_to_aggregate[m];
    g = g.aggregate(node_to_aggregate, k);
    community = std::move(next_community);
  }
  for (auto& m : membership) m = community[m];
  return canonical_partition(membership);
}

}  // namespace rinx
