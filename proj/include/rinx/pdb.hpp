#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rinx/error.hpp"
#include "rinx/trajectory.hpp"

namespace rinx {

namespace pdb_detail {

inline std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
  // 1-based inclusive PDB columns, clipped to the line.
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - first + 1);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view field, std::size_t line_no, const char* what) {
  field = trim(field);
  double value = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
    throw Error(ErrorCode::MalformedRecord,
                "line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(field) + "'");
  return value;
}

inline int parse_int(std::string_view field, std::size_t line_no, const char* what, bool allow_blank) {
  field = trim(field);
  if (field.empty() && allow_blank) return 0;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorCode::MalformedRecord,
                "line " + std::to_string(line_no) + ": bad " + what + " '" + std::string(field) + "'");
  return value;
}

struct AtomRecord {
  int serial = 0;
  std::string name;
  std::string element;
  std::string res_name;
  char chain = ' ';
  int res_seq = 0;
  char insertion = ' ';
  Vec3 position;
};

struct ModelBuffer {
  std::vector<AtomRecord> atoms;
  bool open = false;
};

}  // namespace pdb_detail

// Multi-model PDB text to a trajectory. The first model defines the topology;
// later models must repeat its atoms in the same order and only add frames.
inline Trajectory parse_pdb(std::string_view text, std::string source_path = {}) {
  using namespace pdb_detail;
  std::vector<std::vector<AtomRecord>> models;
  ModelBuffer current;
  bool saw_atom = false;

  auto flush = [&] {
    if (current.open || !current.atoms.empty()) models.push_back(std::move(current.atoms));
    current = {};
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view record = trim(columns(line, 1, 6));

    if (record == "MODEL") {
      flush();
      current.open = true;
    } else if (record == "ENDMDL") {
      flush();
    } else if (record == "END") {
      break;
    } else if (record == "ATOM" || record == "HETATM") {
      saw_atom = true;
      if (line.size() < 54)
        throw Error(ErrorCode::MalformedRecord,
                    "line " + std::to_string(line_no) + ": coordinate record shorter than 54 columns");
      const char alt_loc = line[16];
      if (alt_loc != ' ' && alt_loc != 'A') continue;
      AtomRecord rec;
      rec.serial = parse_int(columns(line, 7, 11), line_no, "serial", true);
      const std::string_view padded_name = columns(line, 13, 16);
      rec.name = std::string(trim(padded_name));
      if (rec.name.empty())
        throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": empty atom name");
      rec.res_name = std::string(trim(columns(line, 18, 20)));
      rec.chain = line[21];
      rec.res_seq = parse_int(columns(line, 23, 26), line_no, "residue number", false);
      rec.insertion = line[26];
      rec.position = {parse_real(columns(line, 31, 38), line_no, "x coordinate"),
                      parse_real(columns(line, 39, 46), line_no, "y coordinate"),
                      parse_real(columns(line, 47, 54), line_no, "z coordinate")};
      std::string element(trim(columns(line, 77, 78)));
      for (char& c : element) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      rec.element = element.empty() ? guess_element(padded_name) : element;
      current.atoms.push_back(std::move(rec));
    }
    if (end == text.size()) break;
  }
  flush();

  if (!saw_atom || models.empty() || models.front().empty())
    throw Error(ErrorCode::Empty, "no ATOM records in " + (source_path.empty() ? "input" : source_path));

  Trajectory traj;
  traj.source_path = std::move(source_path);
  Topology& top = traj.topology;
  const auto& first = models.front();
  for (std::size_t a = 0; a < first.size(); ++a) {
    const AtomRecord& rec = first[a];
    const bool new_residue =
        top.residues.empty() || a == 0 || rec.chain != first[a - 1].chain ||
        rec.res_seq != first[a - 1].res_seq || rec.insertion != first[a - 1].insertion ||
        rec.res_name != first[a - 1].res_name;
    if (new_residue) {
      Residue res;
      res.index = top.residues.size();
      res.name = rec.res_name;
      res.chain_id = rec.chain;
      res.seq_number = rec.res_seq;
      top.residues.push_back(std::move(res));
    }
    top.residues.back().atom_indices.push_back(a);
    top.atoms.push_back({rec.serial, rec.name, rec.element, top.residues.back().index});
  }

  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& model = models[m];
    if (model.size() != first.size())
      throw Error(ErrorCode::InconsistentTopology,
                  "model " + std::to_string(m + 1) + " has " + std::to_string(model.size()) +
                      " atoms, first model has " + std::to_string(first.size()));
    Frame frame;
    frame.index = m;
    frame.positions.reserve(model.size());
    for (std::size_t a = 0; a < model.size(); ++a) {
      if (model[a].name != first[a].name || model[a].res_seq != first[a].res_seq ||
          model[a].chain != first[a].chain)
        throw Error(ErrorCode::InconsistentTopology,
                    "model " + std::to_string(m + 1) + " atom " + std::to_string(a) +
                        " does not match the first model");
      frame.positions.push_back(model[a].position);
    }
    traj.frames.push_back(std::move(frame));
  }
  return traj;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Trajectory load_pdb(const std::string& path) { return parse_pdb(read_file(path), path); }

// Multi-model PDB writer; coordinates carry the format's 3 decimals.
inline std::string write_pdb(const Trajectory& traj) {
  const Topology& top = traj.topology;
  std::string out;
  char buf[96];
  const bool multi = traj.frames.size() > 1;
  for (const Frame& f : traj.frames) {
    if (multi) {
      std::snprintf(buf, sizeof buf, "MODEL     %4zu\n", f.index + 1);
      out += buf;
    }
    for (std::size_t a = 0; a < top.atoms.size(); ++a) {
      const Atom& atom = top.atoms[a];
      const Residue& res = top.residues[atom.residue_index];
      std::string name = atom.name;
      if (name.size() < 4 && atom.element.size() == 1) name = " " + name;
      const Vec3& p = f.positions[a];
      std::snprintf(buf, sizeof buf, "%-6s%5d %-4.4s %3.3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f          %2.2s\n",
                    is_standard_amino_acid(res.name) ? "ATOM" : "HETATM", atom.serial % 100000,
                    name.c_str(), res.name.c_str(), res.chain_id, res.seq_number % 10000, p.x, p.y, p.z,
                    1.0, 0.0, atom.element.c_str());
      out += buf;
    }
    if (multi) out += "ENDMDL\n";
  }
  out += "END\n";
  return out;
}

}  // namespace rinx
