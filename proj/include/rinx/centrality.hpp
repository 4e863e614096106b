#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <vector>

#include "rinx/error.hpp"
#include "rinx/parallel.hpp"
#include "rinx/rin.hpp"
#include "rinx/scores.hpp"

namespace rinx {

inline NodeScores degree_centrality(const Rin& rin) {
  NodeScores s{Measure::Degree, std::vector<double>(rin.node_count()), true};
  for (std::size_t v = 0; v < rin.node_count(); ++v) s.values[v] = static_cast<double>(rin.degree(v));
  return s;
}

namespace centrality_detail {

// Sources are processed in fixed blocks; each block owns a partial sum and
// the blocks are added in order, so the result is independent of the thread
// count.
constexpr std::size_t kSourceBlock = 32;

struct BfsScratch {
  std::vector<std::int32_t> dist;
  std::vector<double> sigma;
  std::vector<double> delta;
  std::vector<NodeId> order;
  // Shortest-path predecessors of w live in pred[base[w] .. pred_end[w]);
  // base[w] is w's CSR offset (predecessors are a subset of neighbours).
  std::vector<NodeId> pred;
  std::vector<std::size_t> base;
  std::vector<std::size_t> pred_end;

  explicit BfsScratch(const Rin& rin)
      : dist(rin.node_count(), -1),
        sigma(rin.node_count(), 0.0),
        delta(rin.node_count(), 0.0),
        order(rin.node_count()),
        pred(2 * rin.edge_count()),
        base(rin.node_count() + 1, 0) {
    for (std::size_t v = 0; v < rin.node_count(); ++v) base[v + 1] = base[v] + rin.degree(v);
    pred_end.assign(base.begin(), base.end() - 1);
  }
};

}  // namespace centrality_detail

// Exact Brandes betweenness on the unweighted undirected graph. Counts each
// unordered (s, t) pair once, endpoints excluded. With normalized, divides
// by (n-1)(n-2)/2.
inline NodeScores betweenness(const Rin& rin, bool normalized = false) {
  using centrality_detail::kSourceBlock;
  const std::size_t n = rin.node_count();
  const std::size_t blocks = (n + kSourceBlock - 1) / kSourceBlock;
  std::vector<std::vector<double>> partial(blocks);
  parallel_blocks(n, kSourceBlock, [&](std::size_t begin, std::size_t end, std::size_t b) {
    centrality_detail::BfsScratch sc(rin);
    std::vector<double> acc(n, 0.0);
    std::int32_t* dist = sc.dist.data();
    double* sigma = sc.sigma.data();
    double* delta = sc.delta.data();
    NodeId* order = sc.order.data();
    NodeId* pred = sc.pred.data();
    std::size_t* pred_end = sc.pred_end.data();
    const std::size_t* base = sc.base.data();
    for (std::size_t s = begin; s < end; ++s) {
      std::size_t tail = 1;
      order[0] = static_cast<NodeId>(s);
      dist[s] = 0;
      sigma[s] = 1.0;
      for (std::size_t head = 0; head < tail; ++head) {
        const NodeId v = order[head];
        const std::int32_t next = dist[v] + 1;
        const double sv = sigma[v];
        for (NodeId w : rin.neighbors(v)) {
          std::int32_t dw = dist[w];
          if (dw < 0) {
            dist[w] = dw = next;
            order[tail++] = w;
          }
          if (dw == next) {
            sigma[w] += sv;
            pred[pred_end[w]++] = v;
          }
        }
      }
      for (std::size_t k = tail; k-- > 1;) {
        const NodeId w = order[k];
        const double coeff = (1.0 + delta[w]) / sigma[w];
        for (std::size_t q = base[w]; q < pred_end[w]; ++q) delta[pred[q]] += sigma[pred[q]] * coeff;
        acc[w] += delta[w];
      }
      for (std::size_t k = 0; k < tail; ++k) {
        const NodeId v = order[k];
        dist[v] = -1;
        sigma[v] = 0.0;
        delta[v] = 0.0;
        pred_end[v] = base[v];
      }
    }
    partial[b] = std::move(acc);
  });
  std::vector<double> values(n, 0.0);
  for (const auto& p : partial)
    for (std::size_t v = 0; v < n; ++v) values[v] += p[v];
  // Each unordered pair was seen from both ends.
  double scale = 0.5;
  if (normalized && n > 2) scale /= static_cast<double>((n - 1) * (n - 2)) / 2.0;
  for (double& v : values) v *= scale;
  return {Measure::Betweenness, std::move(values), true};
}

enum class ClosenessVariant { Harmonic, ComponentRestricted };

// Harmonic: (1/(n-1)) sum 1/d(v,u), unreachable terms are 0.
// ComponentRestricted: ((r-1)/sum d) * ((r-1)/(n-1)) over v's component of
// size r; isolated nodes score 0.
inline NodeScores closeness(const Rin& rin, ClosenessVariant variant = ClosenessVariant::Harmonic) {
  using centrality_detail::kSourceBlock;
  const std::size_t n = rin.node_count();
  std::vector<double> values(n, 0.0);
  if (n < 2) return {Measure::Closeness, std::move(values), true};
  const double denom = static_cast<double>(n - 1);
  parallel_blocks(n, kSourceBlock, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<std::int32_t> dist(n, -1);
    std::vector<NodeId> queue;
    queue.reserve(n);
    for (std::size_t s = begin; s < end; ++s) {
      queue.clear();
      dist[s] = 0;
      queue.push_back(static_cast<NodeId>(s));
      double harmonic = 0.0;
      double total = 0.0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const NodeId v = queue[head];
        if (v != s) {
          harmonic += 1.0 / static_cast<double>(dist[v]);
          total += static_cast<double>(dist[v]);
        }
        for (NodeId w : rin.neighbors(v))
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            queue.push_back(w);
          }
      }
      for (NodeId v : queue) dist[v] = -1;
      if (variant == ClosenessVariant::Harmonic) {
        values[s] = harmonic / denom;
      } else {
        const double reach = static_cast<double>(queue.size() - 1);
        values[s] = total > 0.0 ? (reach / total) * (reach / denom) : 0.0;
      }
    }
  });
  return {Measure::Closeness, std::move(values), true};
}

struct PageRankParams {
  double damping = 0.85;
  double tol = 1e-9;
  bool normalized = false;
  int max_iterations = 200;
};

// Power iteration on the undirected graph (each edge in both directions).
// Isolated nodes spread their mass uniformly. The normalized variant divides
// by the minimum attainable score (1-damping)/n.
inline NodeScores pagerank(const Rin& rin, const PageRankParams& params = {}) {
  if (!(params.damping > 0.0 && params.damping < 1.0))
    throw Error(ErrorCode::InvalidConfig, "damping must lie in (0, 1)");
  if (!(params.tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "tolerance must be positive");
  const std::size_t n = rin.node_count();
  const Measure id = params.normalized ? Measure::PageRankNormalized : Measure::PageRank;
  if (n == 0) return {id, {}, true};
  const double nd = static_cast<double>(n);
  const double teleport = (1.0 - params.damping) / nd;
  std::vector<double> rank(n, 1.0 / nd), next(n), share(n);
  bool converged = false;
  for (int it = 0; it < params.max_iterations; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t deg = rin.degree(v);
      if (deg == 0) {
        dangling += rank[v];
        share[v] = 0.0;
      } else {
        share[v] = rank[v] / static_cast<double>(deg);
      }
    }
    const double base = teleport + params.damping * dangling / nd;
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double in = 0.0;
      for (NodeId u : rin.neighbors(v)) in += share[u];
      next[v] = base + params.damping * in;
      change += std::abs(next[v] - rank[v]);
    }
    rank.swap(next);
    if (change < params.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    std::clog << "rinx: warning: pagerank did not reach tol " << params.tol << " in " << params.max_iterations
              << " iterations\n";
  if (params.normalized)
    for (double& r : rank) r /= teleport;
  return {id, std::move(rank), converged};
}

}  // namespace rinx
