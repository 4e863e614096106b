#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rinx/error.hpp"
#include "rinx/pdb.hpp"
#include "rinx/traj_json.hpp"
#include "rinx/trajectory.hpp"

namespace rinx {

enum class TrajectoryFormat { Pdb, Json };

inline std::optional<TrajectoryFormat> parse_trajectory_format(std::string_view name) {
  if (name == "pdb") return TrajectoryFormat::Pdb;
  if (name == "json") return TrajectoryFormat::Json;
  return std::nullopt;
}

// By extension; anything that is not .json is read as PDB.
inline TrajectoryFormat format_from_path(std::string_view path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? TrajectoryFormat::Json : TrajectoryFormat::Pdb;
}

// Parses and keeps the amino-acid residues, heavy atoms only.
inline Trajectory parse_trajectory(std::string_view text, TrajectoryFormat format, std::string source = {},
                                   SelectionOptions selection = {}) {
  Trajectory raw = format == TrajectoryFormat::Pdb ? parse_pdb(text, source) : parse_traj_json(text, source);
  Trajectory traj = select_protein_residues(raw, selection);
  validate_trajectory(traj);
  return traj;
}

inline Trajectory load_trajectory(const std::string& path, std::optional<TrajectoryFormat> format = std::nullopt,
                                  SelectionOptions selection = {}) {
  return parse_trajectory(read_file(path), format.value_or(format_from_path(path)), path, selection);
}

}  // namespace rinx
