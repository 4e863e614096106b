#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rinx/centrality.hpp"
#include "rinx/community.hpp"
#include "rinx/rin.hpp"
#include "rinx/scores.hpp"

namespace rinx {

struct AnalyticsOptions {
  ClosenessVariant closeness = ClosenessVariant::Harmonic;
  bool normalize_betweenness = false;
  PageRankParams pagerank;
  double gamma = 1.0;
  std::uint64_t seed = 0;
};

inline NodeScores compute_scores(const Rin& rin, Measure m, const AnalyticsOptions& opts = {}) {
  switch (m) {
    case Measure::Degree: return degree_centrality(rin);
    case Measure::Closeness: return closeness(rin, opts.closeness);
    case Measure::Betweenness: return betweenness(rin, opts.normalize_betweenness);
    case Measure::PageRank: {
      PageRankParams p = opts.pagerank;
      p.normalized = false;
      return pagerank(rin, p);
    }
    case Measure::PageRankNormalized: {
      PageRankParams p = opts.pagerank;
      p.normalized = true;
      return pagerank(rin, p);
    }
  }
  return degree_centrality(rin);
}

// Result of whatever the measure selector points at.
struct MeasureResult {
  MeasureSelector selector;
  std::variant<NodeScores, Partition> value;

  bool is_partition() const { return std::holds_alternative<Partition>(value); }
  const NodeScores& scores() const { return std::get<NodeScores>(value); }
  const Partition& partition() const { return std::get<Partition>(value); }

  // Per-node numbers for colouring: scores, or community labels.
  std::vector<double> values() const {
    if (is_partition()) {
      const auto& labels = partition().labels;
      return {labels.begin(), labels.end()};
    }
    return scores().values;
  }
};

inline MeasureResult compute_measure(const Rin& rin, const MeasureSelector& sel, const AnalyticsOptions& opts = {}) {
  if (sel.is_community) {
    CommunityParams cp;
    cp.method = sel.method;
    cp.gamma = opts.gamma;
    cp.seed = opts.seed;
    return {sel, community_detect(rin, cp)};
  }
  return {sel, compute_scores(rin, sel.measure, opts)};
}

inline nlohmann::json measure_to_json(const MeasureResult& r) {
  nlohmann::json doc;
  doc["measure"] = std::string(to_string(r.selector));
  if (r.is_partition()) {
    doc["labels"] = r.partition().labels;
    doc["community_count"] = r.partition().community_count;
  } else {
    doc["values"] = r.scores().values;
    doc["converged"] = r.scores().converged;
  }
  return doc;
}

}  // namespace rinx
