#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "rinx/error.hpp"
#include "rinx/trajectory.hpp"

namespace rinx {

// Schema:
//   {"residues": [{"name", "chain", "seq", "atoms": [{"name", "element"[, "serial"]}]}],
//    "frames":   [[[x, y, z], ...], ...]}
// Atoms are numbered in residue order; "serial" is optional and defaults to
// the 1-based atom position.

namespace traj_json_detail {

[[noreturn]] inline void violation(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, path + ": " + what);
}

inline const nlohmann::json& member(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) violation(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) violation(path + "/" + key, "missing");
  return *it;
}

inline std::string string_member(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_string()) violation(path + "/" + key, "expected string");
  return v.get<std::string>();
}

}  // namespace traj_json_detail

inline Trajectory trajectory_from_json(const nlohmann::json& doc, std::string source_path = {}) {
  using namespace traj_json_detail;
  Trajectory traj;
  traj.source_path = std::move(source_path);
  Topology& top = traj.topology;

  const auto& residues = member(doc, "residues", "");
  if (!residues.is_array()) violation("/residues", "expected array");
  if (residues.empty()) violation("/residues", "empty");
  for (std::size_t r = 0; r < residues.size(); ++r) {
    const std::string path = "/residues/" + std::to_string(r);
    const auto& rj = residues[r];
    Residue res;
    res.index = r;
    res.name = string_member(rj, "name", path);
    const std::string chain = string_member(rj, "chain", path);
    if (chain.size() != 1) violation(path + "/chain", "expected single character");
    res.chain_id = chain[0];
    const auto& seq = member(rj, "seq", path);
    if (!seq.is_number_integer()) violation(path + "/seq", "expected integer");
    res.seq_number = seq.get<int>();
    const auto& atoms = member(rj, "atoms", path);
    if (!atoms.is_array() || atoms.empty()) violation(path + "/atoms", "expected non-empty array");
    for (std::size_t a = 0; a < atoms.size(); ++a) {
      const std::string apath = path + "/atoms/" + std::to_string(a);
      Atom atom;
      atom.name = string_member(atoms[a], "name", apath);
      atom.element = string_member(atoms[a], "element", apath);
      atom.residue_index = r;
      atom.serial = static_cast<int>(top.atoms.size() + 1);
      if (auto it = atoms[a].find("serial"); it != atoms[a].end()) {
        if (!it->is_number_integer()) violation(apath + "/serial", "expected integer");
        atom.serial = it->get<int>();
      }
      res.atom_indices.push_back(top.atoms.size());
      top.atoms.push_back(std::move(atom));
    }
    top.residues.push_back(std::move(res));
  }

  const auto& frames = member(doc, "frames", "");
  if (!frames.is_array()) violation("/frames", "expected array");
  if (frames.empty()) violation("/frames", "empty: at least one frame required");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string path = "/frames/" + std::to_string(f);
    const auto& fj = frames[f];
    if (!fj.is_array()) violation(path, "expected array");
    if (fj.size() != top.atoms.size())
      violation(path, "has " + std::to_string(fj.size()) + " coordinates, topology has " +
                          std::to_string(top.atoms.size()) + " atoms");
    Frame frame;
    frame.index = f;
    frame.positions.reserve(fj.size());
    for (std::size_t a = 0; a < fj.size(); ++a) {
      const auto& p = fj[a];
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
        violation(path + "/" + std::to_string(a), "expected [x, y, z]");
      Vec3 v{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      if (!is_finite(v)) violation(path + "/" + std::to_string(a), "non-finite coordinate");
      frame.positions.push_back(v);
    }
    traj.frames.push_back(std::move(frame));
  }
  return traj;
}

inline Trajectory parse_traj_json(std::string_view text, std::string source_path = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("/: not valid JSON: ") + e.what());
  }
  return trajectory_from_json(doc, std::move(source_path));
}

inline nlohmann::json trajectory_to_json(const Trajectory& traj) {
  const Topology& top = traj.topology;
  nlohmann::json residues = nlohmann::json::array();
  for (const Residue& res : top.residues) {
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t a : res.atom_indices) {
      const Atom& atom = top.atoms[a];
      atoms.push_back({{"name", atom.name}, {"element", atom.element}, {"serial", atom.serial}});
    }
    residues.push_back({{"name", res.name},
                        {"chain", std::string(1, res.chain_id)},
                        {"seq", res.seq_number},
                        {"atoms", std::move(atoms)}});
  }
  // Frames are written in residue order, which is also atom order for any
  // topology produced by the loaders.
  nlohmann::json frames = nlohmann::json::array();
  for (const Frame& f : traj.frames) {
    nlohmann::json coords = nlohmann::json::array();
    for (const Residue& res : top.residues)
      for (std::size_t a : res.atom_indices) {
        const Vec3& p = f.positions[a];
        coords.push_back({p.x, p.y, p.z});
      }
    frames.push_back(std::move(coords));
  }
  return {{"residues", std::move(residues)}, {"frames", std::move(frames)}};
}

inline std::string export_traj_json(const Trajectory& traj) { return trajectory_to_json(traj).dump(); }

}  // namespace rinx
