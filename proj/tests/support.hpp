#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rinx/rinx.hpp"

namespace support {

// One residue per entry, each a list of atom positions. The first atom of a
// residue is named CA.
inline rinx::Trajectory make_trajectory(const std::vector<std::vector<rinx::Vec3>>& residues,
                                        std::size_t frames = 1) {
  rinx::Trajectory t;
  rinx::Frame f;
  for (std::size_t r = 0; r < residues.size(); ++r) {
    rinx::Residue res;
    res.index = r;
    res.name = "ALA";
    res.chain_id = 'A';
    res.seq_number = static_cast<int>(r + 1);
    for (std::size_t k = 0; k < residues[r].size(); ++k) {
      res.atom_indices.push_back(t.topology.atoms.size());
      t.topology.atoms.push_back({static_cast<int>(t.topology.atoms.size() + 1), k == 0 ? "CA" : "C" + std::to_string(k),
                                  "C", r});
      f.positions.push_back(residues[r][k]);
    }
    t.topology.residues.push_back(std::move(res));
  }
  for (std::size_t i = 0; i < frames; ++i) {
    f.index = i;
    t.frames.push_back(f);
  }
  return t;
}

inline rinx::Rin graph(std::size_t n, std::vector<rinx::Edge> edges) {
  return rinx::Rin::from_edges(n, std::move(edges));
}

inline rinx::Rin path_graph(std::size_t n) {
  std::vector<rinx::Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return graph(n, e);
}

inline rinx::Rin cycle_graph(std::size_t n) {
  std::vector<rinx::Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return graph(n, e);
}

inline rinx::Rin complete_graph(std::size_t n) {
  std::vector<rinx::Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return graph(n, e);
}

// Two 4-cliques {0..3}, {4..7} joined by the edge 3-4.
inline rinx::Rin two_cliques() {
  std::vector<rinx::Edge> e;
  for (std::size_t base : {0u, 4u})
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) e.emplace_back(base + i, base + j);
  e.emplace_back(3, 4);
  return graph(8, e);
}

// Synthetic trajectory shared by the heavier tests.
inline std::shared_ptr<const rinx::Trajectory> bundle(std::size_t helices, std::size_t length, std::size_t frames,
                                                      std::uint64_t seed = 7) {
  rinx::HelixBundleSpec spec;
  spec.helices = helices;
  spec.helix_length = length;
  spec.frames = frames;
  spec.seed = seed;
  return std::make_shared<const rinx::Trajectory>(rinx::synthetic_helix_bundle(spec));
}

// A snapshot without the parts that legitimately depend on how the session
// got there: timings, UI toggles and, optionally, the warm-started layout.
inline nlohmann::json path_free(nlohmann::json snap, bool drop_maxent) {
  snap.erase("timing");
  snap.erase("auto_recompute");
  snap.erase("delta_view");
  if (drop_maxent) snap.erase("maxent_layout");
  return snap;
}

}  // namespace support
