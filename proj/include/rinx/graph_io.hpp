#pragma once

#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rinx/error.hpp"
#include "rinx/rin.hpp"
#include "rinx/trajectory.hpp"

namespace rinx {

enum class GraphFormat { Json, GraphML };

// Non-negative integer, whether parsed or built in code.
inline bool is_count(const nlohmann::json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

inline nlohmann::json config_to_json(const RinConfig& c) {
  return {{"criterion", std::string(to_string(c.criterion))},
          {"cutoff", c.cutoff},
          {"exclude_backbone", c.exclude_backbone_neighbors}};
}

inline RinConfig config_from_json(const nlohmann::json& doc, const std::string& path = "/config") {
  RinConfig c;
  if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, path + ": expected object");
  if (auto it = doc.find("criterion"); it != doc.end()) {
    if (!it->is_string()) throw Error(ErrorCode::SchemaViolation, path + "/criterion: expected string");
    auto crit = parse_criterion(it->get<std::string>());
    if (!crit) throw Error(ErrorCode::SchemaViolation, path + "/criterion: unknown '" + it->get<std::string>() + "'");
    c.criterion = *crit;
  }
  if (auto it = doc.find("cutoff"); it != doc.end()) {
    if (!it->is_number()) throw Error(ErrorCode::SchemaViolation, path + "/cutoff: expected number");
    c.cutoff = it->get<double>();
  }
  if (auto it = doc.find("exclude_backbone"); it != doc.end()) {
    if (!it->is_boolean()) throw Error(ErrorCode::SchemaViolation, path + "/exclude_backbone: expected boolean");
    c.exclude_backbone_neighbors = it->get<bool>();
  }
  return c;
}

// {"n", "edges": [[i, j], ...] (i < j, lexicographic), "config", "frame"}
inline nlohmann::json graph_to_json(const Rin& rin) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [i, j] : rin.edges()) edges.push_back({i, j});
  return {{"n", rin.node_count()},
          {"edges", std::move(edges)},
          {"config", config_to_json(rin.config())},
          {"frame", rin.frame_index()}};
}

inline Rin graph_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "/: expected object");
  if (!doc.contains("n") || !is_count(doc["n"]))
    throw Error(ErrorCode::SchemaViolation, "/n: expected non-negative integer");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw Error(ErrorCode::SchemaViolation, "/edges: expected array");
  const std::size_t n = doc["n"].get<std::size_t>();
  std::vector<Edge> edges;
  edges.reserve(doc["edges"].size());
  for (std::size_t e = 0; e < doc["edges"].size(); ++e) {
    const auto& pair = doc["edges"][e];
    if (!pair.is_array() || pair.size() != 2 || !is_count(pair[0]) || !is_count(pair[1]))
      throw Error(ErrorCode::SchemaViolation, "/edges/" + std::to_string(e) + ": expected [i, j]");
    const auto i = pair[0].get<std::size_t>();
    const auto j = pair[1].get<std::size_t>();
    if (i >= n || j >= n || i == j)
      throw Error(ErrorCode::SchemaViolation, "/edges/" + std::to_string(e) + ": invalid endpoints");
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  }
  RinConfig config;
  if (doc.contains("config")) config = config_from_json(doc["config"]);
  const std::size_t frame = doc.contains("frame") && is_count(doc["frame"]) ? doc["frame"].get<std::size_t>() : 0;
  return Rin::from_edges(n, std::move(edges), config, frame);
}

inline Rin parse_graph_json(std::string_view text) {
  try {
    return graph_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("/: not valid JSON: ") + e.what());
  }
}

namespace graph_io_detail {
inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}
}  // namespace graph_io_detail

// GraphML with node ids n0..n{n-1}. Residue attributes are written when a
// topology is supplied.
inline std::string graph_to_graphml(const Rin& rin, const Topology* top = nullptr) {
  using graph_io_detail::xml_escape;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" "
         "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
         "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
         "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
      << "  <key id=\"criterion\" for=\"graph\" attr.name=\"criterion\" attr.type=\"string\"/>\n"
      << "  <key id=\"cutoff\" for=\"graph\" attr.name=\"cutoff\" attr.type=\"double\"/>\n"
      << "  <key id=\"frame\" for=\"graph\" attr.name=\"frame\" attr.type=\"int\"/>\n";
  if (top) {
    out << "  <key id=\"residue\" for=\"node\" attr.name=\"residue\" attr.type=\"string\"/>\n"
        << "  <key id=\"chain\" for=\"node\" attr.name=\"chain\" attr.type=\"string\"/>\n"
        << "  <key id=\"seq\" for=\"node\" attr.name=\"seq\" attr.type=\"int\"/>\n";
  }
  out << "  <graph id=\"rin\" edgedefault=\"undirected\">\n"
      << "    <data key=\"criterion\">" << to_string(rin.config().criterion) << "</data>\n"
      << "    <data key=\"cutoff\">" << nlohmann::json(rin.config().cutoff).dump() << "</data>\n"
      << "    <data key=\"frame\">" << rin.frame_index() << "</data>\n";
  for (std::size_t v = 0; v < rin.node_count(); ++v) {
    out << "    <node id=\"n" << v << "\"";
    if (top && v < top->residues.size()) {
      const Residue& r = top->residues[v];
      out << ">\n"
          << "      <data key=\"residue\">" << xml_escape(r.name) << "</data>\n"
          << "      <data key=\"chain\">" << xml_escape(std::string(1, r.chain_id)) << "</data>\n"
          << "      <data key=\"seq\">" << r.seq_number << "</data>\n"
          << "    </node>\n";
    } else {
      out << "/>\n";
    }
  }
  std::size_t e = 0;
  for (const auto& [i, j] : rin.edges())
    out << "    <edge id=\"e" << e++ << "\" source=\"n" << i << "\" target=\"n" << j << "\"/>\n";
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

inline void export_graph(const Rin& rin, GraphFormat format, std::ostream& sink, const Topology* top = nullptr) {
  if (format == GraphFormat::Json)
    sink << graph_to_json(rin).dump() << '\n';
  else
    sink << graph_to_graphml(rin, top);
  if (!sink) throw Error(ErrorCode::IoError, "failed writing graph");
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

}  // namespace rinx
