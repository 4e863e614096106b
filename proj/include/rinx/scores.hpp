#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rinx/error.hpp"

namespace rinx {

enum class Measure { Degree, Closeness, Betweenness, PageRank, PageRankNormalized };
enum class CommunityMethod { PLM, Leiden };

struct NodeScores {
  Measure measure = Measure::Degree;
  std::vector<double> values;
  // Set when an iterative measure stopped at its iteration cap.
  bool converged = true;

  std::size_t size() const { return values.size(); }
};

struct Partition {
  std::vector<std::size_t> labels;
  std::size_t community_count = 0;

  std::size_t size() const { return labels.size(); }
};

// Relabels by first occurrence in node order: the first node gets 0, the next
// unseen label gets 1, and so on.
inline Partition canonical_partition(const std::vector<std::size_t>& raw) {
  Partition p;
  p.labels.resize(raw.size());
  std::unordered_map<std::size_t, std::size_t> map;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = map.try_emplace(raw[i], map.size());
    p.labels[i] = it->second;
  }
  p.community_count = map.size();
  return p;
}

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Degree: return "degree";
    case Measure::Closeness: return "closeness";
    case Measure::Betweenness: return "betweenness";
    case Measure::PageRank: return "pagerank";
    case Measure::PageRankNormalized: return "pagerank-norm";
  }
  return "degree";
}

inline std::string_view to_string(CommunityMethod m) { return m == CommunityMethod::PLM ? "plm" : "leiden"; }

// What the measure slider selects: a scalar centrality or a community method.
struct MeasureSelector {
  bool is_community = false;
  Measure measure = Measure::Closeness;
  CommunityMethod method = CommunityMethod::PLM;

  static MeasureSelector scalar(Measure m) { return {false, m, CommunityMethod::PLM}; }
  static MeasureSelector community(CommunityMethod c) { return {true, Measure::Degree, c}; }

  friend bool operator==(const MeasureSelector& a, const MeasureSelector& b) {
    if (a.is_community != b.is_community) return false;
    return a.is_community ? a.method == b.method : a.measure == b.measure;
  }
};

inline std::string_view to_string(const MeasureSelector& s) {
  return s.is_community ? to_string(s.method) : to_string(s.measure);
}

inline std::optional<MeasureSelector> parse_measure(std::string_view name) {
  if (name == "degree") return MeasureSelector::scalar(Measure::Degree);
  if (name == "closeness") return MeasureSelector::scalar(Measure::Closeness);
  if (name == "betweenness") return MeasureSelector::scalar(Measure::Betweenness);
  if (name == "pagerank") return MeasureSelector::scalar(Measure::PageRank);
  if (name == "pagerank-norm") return MeasureSelector::scalar(Measure::PageRankNormalized);
  if (name == "plm") return MeasureSelector::community(CommunityMethod::PLM);
  if (name == "leiden") return MeasureSelector::community(CommunityMethod::Leiden);
  return std::nullopt;
}

inline NodeScores score_delta(const NodeScores& current, const NodeScores& buffer) {
  if (current.values.size() != buffer.values.size())
    throw Error(ErrorCode::LengthMismatch, "score vectors differ in length (" +
                                               std::to_string(current.values.size()) + " vs " +
                                               std::to_string(buffer.values.size()) + ")");
  if (current.measure != buffer.measure)
    throw Error(ErrorCode::MeasureMismatch, std::string(to_string(current.measure)) + " vs " +
                                                std::string(to_string(buffer.measure)));
  NodeScores out{current.measure, std::vector<double>(current.values.size()), true};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = current.values[i] - buffer.values[i];
  return out;
}

}  // namespace rinx
