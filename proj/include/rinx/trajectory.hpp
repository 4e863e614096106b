#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rinx/error.hpp"
#include "rinx/vec3.hpp"

namespace rinx {

struct Atom {
  int serial = 0;
  std::string name;
  std::string element;
  std::size_t residue_index = 0;
};

struct Residue {
  std::size_t index = 0;
  std::string name;
  char chain_id = ' ';
  int seq_number = 0;
  std::vector<std::size_t> atom_indices;
};

// Coordinates only; the atom and residue tables live on the Trajectory and
// are shared by every frame.
struct Frame {
  std::size_t index = 0;
  std::vector<Vec3> positions;
};

struct Topology {
  std::vector<Atom> atoms;
  std::vector<Residue> residues;

  std::size_t atom_count() const { return atoms.size(); }
  std::size_t residue_count() const { return residues.size(); }
};

struct Trajectory {
  Topology topology;
  std::vector<Frame> frames;
  std::string source_path;

  const std::vector<Residue>& residues() const { return topology.residues; }
  const std::vector<Atom>& atoms() const { return topology.atoms; }
  std::size_t frame_count() const { return frames.size(); }

  const Frame& frame(std::size_t i) const {
    if (i >= frames.size())
      throw Error(ErrorCode::InvalidPayload,
                  "frame " + std::to_string(i) + " out of range (" + std::to_string(frames.size()) +
                      " frames)");
    return frames[i];
  }
};

inline constexpr std::array<std::string_view, 20> kStandardAminoAcids = {
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL"};

inline bool is_standard_amino_acid(std::string_view name) {
  return std::find(kStandardAminoAcids.begin(), kStandardAminoAcids.end(), name) !=
         kStandardAminoAcids.end();
}

inline bool is_hydrogen(const Atom& atom) { return atom.element == "H" || atom.element == "D"; }

// Element from a PDB atom name when columns 77-78 are blank. Names starting in
// column 13 carry a two-letter element (e.g. "FE  "); otherwise the first
// letter is the element, with hydrogens often written with a leading digit.
inline std::string guess_element(std::string_view padded_name) {
  std::string letters;
  for (char c : padded_name)
    if (std::isalpha(static_cast<unsigned char>(c))) letters.push_back(static_cast<char>(std::toupper(c)));
  if (letters.empty()) return "X";
  const bool column13 = !padded_name.empty() && padded_name[0] != ' ' &&
                        !std::isdigit(static_cast<unsigned char>(padded_name[0]));
  if (column13 && padded_name.size() == 4 && letters.size() >= 2 && letters[0] != 'H') {
    static constexpr std::array<std::string_view, 12> two_letter = {
        "FE", "ZN", "MG", "MN", "CA", "CL", "NA", "CU", "CO", "NI", "BR", "SE"};
    const std::string two = letters.substr(0, 2);
    if (std::find(two_letter.begin(), two_letter.end(), two) != two_letter.end()) return two;
  }
  return letters.substr(0, 1);
}

// Standard atomic masses (u). Unknown elements fall back to carbon.
inline double atomic_mass(std::string_view element, bool* known = nullptr) {
  struct Entry {
    std::string_view element;
    double mass;
  };
  static constexpr std::array<Entry, 6> table = {{{"H", 1.008},
                                                  {"D", 2.014},
                                                  {"C", 12.011},
                                                  {"N", 14.007},
                                                  {"O", 15.999},
                                                  {"S", 32.06}}};
  for (const auto& e : table) {
    if (e.element == element) {
      if (known) *known = true;
      return e.mass;
    }
  }
  if (known) *known = false;
  return 12.011;
}

struct SelectionOptions {
  bool include_hydrogens = false;
  // Keep any residue that has a CA atom, not only the 20 standard amino acids.
  bool permissive = false;
};

inline bool has_atom_named(const Topology& top, const Residue& res, std::string_view name) {
  return std::any_of(res.atom_indices.begin(), res.atom_indices.end(),
                     [&](std::size_t a) { return top.atoms[a].name == name; });
}

// Amino-acid residues only, optionally without hydrogens; residue and atom
// indices are re-compacted. Idempotent.
inline Trajectory select_protein_residues(const Trajectory& traj, SelectionOptions opts = {}) {
  const Topology& top = traj.topology;
  Topology out;
  std::vector<std::size_t> kept_atoms;
  for (const Residue& res : top.residues) {
    const bool amino = is_standard_amino_acid(res.name) ||
                       (opts.permissive && has_atom_named(top, res, "CA"));
    if (!amino) continue;
    Residue copy;
    copy.index = out.residues.size();
    copy.name = res.name;
    copy.chain_id = res.chain_id;
    copy.seq_number = res.seq_number;
    for (std::size_t a : res.atom_indices) {
      const Atom& atom = top.atoms[a];
      if (!opts.include_hydrogens && is_hydrogen(atom)) continue;
      Atom kept = atom;
      kept.residue_index = copy.index;
      copy.atom_indices.push_back(out.atoms.size());
      out.atoms.push_back(std::move(kept));
      kept_atoms.push_back(a);
    }
    if (copy.atom_indices.empty()) continue;
    out.residues.push_back(std::move(copy));
  }
  if (out.residues.empty())
    throw Error(ErrorCode::Empty, "no amino-acid residues in " + traj.source_path);

  Trajectory result;
  result.topology = std::move(out);
  result.source_path = traj.source_path;
  result.frames.reserve(traj.frames.size());
  for (const Frame& f : traj.frames) {
    Frame nf;
    nf.index = f.index;
    nf.positions.reserve(kept_atoms.size());
    for (std::size_t a : kept_atoms) nf.positions.push_back(f.positions[a]);
    result.frames.push_back(std::move(nf));
  }
  return result;
}

// Checks the structural invariants shared by every loader.
inline void validate_trajectory(const Trajectory& traj) {
  const Topology& top = traj.topology;
  if (traj.frames.empty()) throw Error(ErrorCode::Empty, "trajectory has no frames");
  if (top.residues.empty()) throw Error(ErrorCode::Empty, "trajectory has no residues");
  std::vector<int> owner(top.atoms.size(), 0);
  for (std::size_t r = 0; r < top.residues.size(); ++r) {
    const Residue& res = top.residues[r];
    if (res.atom_indices.empty())
      throw Error(ErrorCode::InconsistentTopology, "residue " + std::to_string(r) + " has no atoms");
    for (std::size_t k = 0; k < res.atom_indices.size(); ++k) {
      const std::size_t a = res.atom_indices[k];
      if (a >= top.atoms.size() || (k > 0 && a <= res.atom_indices[k - 1]))
        throw Error(ErrorCode::InconsistentTopology,
                    "residue " + std::to_string(r) + " atom indices not strictly increasing");
      if (top.atoms[a].residue_index != r)
        throw Error(ErrorCode::InconsistentTopology, "atom residue back-reference mismatch");
      ++owner[a];
    }
  }
  for (int count : owner)
    if (count != 1) throw Error(ErrorCode::InconsistentTopology, "atom not owned by exactly one residue");
  for (const Frame& f : traj.frames) {
    if (f.positions.size() != top.atoms.size())
      throw Error(ErrorCode::InconsistentTopology,
                  "frame " + std::to_string(f.index) + " atom count mismatch");
    for (const Vec3& p : f.positions)
      if (!is_finite(p)) throw Error(ErrorCode::MalformedRecord, "non-finite coordinate");
  }
}

}  // namespace rinx
