#include <gtest/gtest.h>

#include <cstdio>
#include <string>

#include "rinx/io.hpp"
#include "rinx/pdb.hpp"
#include "rinx/synthetic.hpp"
#include "rinx/traj_json.hpp"
#include "rinx/trajectory.hpp"

using namespace rinx;

namespace {

std::string atom(int serial, const char* name, const char* res, char chain, int seq, double x, double y, double z,
                 const char* element, char alt = ' ', const char* record = "ATOM") {
  char buf[100];
  std::snprintf(buf, sizeof buf, "%-6s%5d %-4s%c%3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f          %2s\n", record,
                serial, name, alt, res, chain, seq, x, y, z, 1.0, 0.0, element);
  return buf;
}

std::string residue(int first_serial, int seq, double dx) {
  return atom(first_serial, " N  ", "GLY", 'A', seq, dx, 0, 0, "N") +
         atom(first_serial + 1, " CA ", "GLY", 'A', seq, dx + 1.4, 0, 0, "C") +
         atom(first_serial + 2, " C  ", "GLY", 'A', seq, dx + 2.0, 1.2, 0, "C");
}

}  // namespace

TEST(Pdb, SingleModelThreeAtoms) {
  const Trajectory t = parse_pdb(residue(1, 1, 0.0));
  EXPECT_EQ(t.frame_count(), 1u);
  EXPECT_EQ(t.residues().size(), 1u);
  EXPECT_EQ(t.atoms().size(), 3u);
  EXPECT_EQ(t.atoms()[1].name, "CA");
  EXPECT_EQ(t.atoms()[1].element, "C");
  EXPECT_DOUBLE_EQ(t.frames[0].positions[1].x, 1.4);
  EXPECT_EQ(t.residues()[0].name, "GLY");
  EXPECT_EQ(t.residues()[0].seq_number, 1);
  EXPECT_EQ(t.residues()[0].chain_id, 'A');
}

TEST(Pdb, FiveModelsShareTopology) {
  std::string text;
  for (int m = 1; m <= 5; ++m) {
    text += "MODEL     " + std::to_string(m) + "\n";
    text += residue(1, 1, m * 0.5) + residue(4, 2, 5.0);
    text += "ENDMDL\n";
  }
  text += "END\n";
  const Trajectory t = parse_pdb(text);
  ASSERT_EQ(t.frame_count(), 5u);
  EXPECT_EQ(t.residues().size(), 2u);
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_EQ(t.frames[f].index, f);
    EXPECT_DOUBLE_EQ(t.frames[f].positions[0].x, (f + 1) * 0.5);
  }
}

TEST(Pdb, ShortModelIsInconsistent) {
  const std::string text = "MODEL 1\n" + residue(1, 1, 0) + "ENDMDL\nMODEL 2\n" +
                           atom(1, " N  ", "GLY", 'A', 1, 0, 0, 0, "N") + atom(2, " CA ", "GLY", 'A', 1, 1, 0, 0, "C") +
                           "ENDMDL\n";
  try {
    parse_pdb(text);
    FAIL() << "expected InconsistentTopology";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentTopology);
  }
}

TEST(Pdb, ReorderedModelIsInconsistent) {
  const std::string text = "MODEL 1\n" + residue(1, 1, 0) + "ENDMDL\nMODEL 2\n" +
                           atom(1, " CA ", "GLY", 'A', 1, 0, 0, 0, "C") + atom(2, " N  ", "GLY", 'A', 1, 1, 0, 0, "N") +
                           atom(3, " C  ", "GLY", 'A', 1, 1, 0, 0, "C") + "ENDMDL\n";
  EXPECT_THROW(parse_pdb(text), Error);
}

TEST(Pdb, NoAtomsIsEmpty) {
  try {
    parse_pdb("HEADER    NOTHING\nEND\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Empty);
  }
}

TEST(Pdb, BadCoordinateIsMalformed) {
  std::string line = atom(1, " CA ", "GLY", 'A', 1, 1, 2, 3, "C");
  line.replace(30, 8, "  1.2x3 ");
  try {
    parse_pdb(line);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedRecord);
  }
}

TEST(Pdb, TruncatedRecordIsMalformed) {
  try {
    parse_pdb("ATOM      1  CA  GLY A   1       1.000   2.000\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedRecord);
  }
}

TEST(Pdb, AltLocKeepsBlankAndA) {
  const std::string text = atom(1, " N  ", "SER", 'A', 1, 0, 0, 0, "N") +
                           atom(2, " CA ", "SER", 'A', 1, 1, 0, 0, "C", 'A') +
                           atom(3, " CA ", "SER", 'A', 1, 9, 9, 9, "C", 'B') +
                           atom(4, " C  ", "SER", 'A', 1, 2, 0, 0, "C");
  const Trajectory t = parse_pdb(text);
  ASSERT_EQ(t.atoms().size(), 3u);
  EXPECT_DOUBLE_EQ(t.frames[0].positions[1].x, 1.0);
}

TEST(Pdb, ElementGuessedWhenColumnsBlank) {
  std::string line = atom(1, " CA ", "GLY", 'A', 1, 1, 2, 3, "  ");
  std::string zn = atom(2, "ZN  ", " ZN", 'B', 2, 4, 5, 6, "  ", ' ', "HETATM");
  const Trajectory t = parse_pdb(line + zn);
  EXPECT_EQ(t.atoms()[0].element, "C");
  EXPECT_EQ(t.atoms()[1].element, "ZN");
}

TEST(Pdb, ResidueBoundaries) {
  const std::string text = atom(1, " CA ", "ALA", 'A', 1, 0, 0, 0, "C") + atom(2, " CA ", "ALA", 'A', 2, 0, 0, 0, "C") +
                           atom(3, " CB ", "ALA", 'A', 2, 0, 0, 0, "C") + atom(4, " CA ", "ALA", 'B', 2, 0, 0, 0, "C");
  const Trajectory t = parse_pdb(text);
  ASSERT_EQ(t.residues().size(), 3u);
  EXPECT_EQ(t.residues()[1].atom_indices.size(), 2u);
  EXPECT_EQ(t.residues()[2].chain_id, 'B');
  EXPECT_NO_THROW(validate_trajectory(t));
}

TEST(Pdb, FrameCountWithoutModelRecords) {
  EXPECT_EQ(parse_pdb(residue(1, 1, 0) + "END\n").frame_count(), 1u);
}

TEST(Pdb, WriterRoundTrip) {
  HelixBundleSpec spec;
  spec.frames = 3;
  const Trajectory t = synthetic_helix_bundle(spec);
  const Trajectory back = parse_pdb(write_pdb(t));
  ASSERT_EQ(back.frame_count(), 3u);
  ASSERT_EQ(back.atoms().size(), t.atoms().size());
  ASSERT_EQ(back.residues().size(), t.residues().size());
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t a = 0; a < t.atoms().size(); ++a)
      EXPECT_NEAR(distance(back.frames[f].positions[a], t.frames[f].positions[a]), 0.0, 1e-3);
}

TEST(TrajJson, RoundTripFromPdb) {
  std::string text;
  for (int m = 1; m <= 2; ++m)
    text += "MODEL " + std::to_string(m) + "\n" + residue(1, 10, m * 0.123) + residue(4, 11, 3.3) + "ENDMDL\n";
  const Trajectory p = parse_pdb(text, "in.pdb");
  const Trajectory j = parse_traj_json(export_traj_json(p));
  ASSERT_EQ(j.frame_count(), p.frame_count());
  ASSERT_EQ(j.residues().size(), p.residues().size());
  for (std::size_t r = 0; r < p.residues().size(); ++r) {
    EXPECT_EQ(j.residues()[r].name, p.residues()[r].name);
    EXPECT_EQ(j.residues()[r].chain_id, p.residues()[r].chain_id);
    EXPECT_EQ(j.residues()[r].seq_number, p.residues()[r].seq_number);
    EXPECT_EQ(j.residues()[r].atom_indices, p.residues()[r].atom_indices);
  }
  for (std::size_t a = 0; a < p.atoms().size(); ++a) {
    EXPECT_EQ(j.atoms()[a].name, p.atoms()[a].name);
    EXPECT_EQ(j.atoms()[a].element, p.atoms()[a].element);
    EXPECT_EQ(j.atoms()[a].serial, p.atoms()[a].serial);
    for (std::size_t f = 0; f < p.frame_count(); ++f)
      EXPECT_LE(distance(j.frames[f].positions[a], p.frames[f].positions[a]), 1e-6);
  }
}

TEST(TrajJson, FramesOfDifferentSizes) {
  const char* doc = R"({"residues":[{"name":"ALA","chain":"A","seq":1,"atoms":[{"name":"CA","element":"C"}]}],
                        "frames":[[[0,0,0]],[[0,0,0],[1,1,1]]]})";
  try {
    parse_traj_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_NE(std::string(e.what()).find("/frames/1"), std::string::npos);
  }
}

TEST(TrajJson, NoFrames) {
  const char* doc = R"({"residues":[{"name":"ALA","chain":"A","seq":1,"atoms":[{"name":"CA","element":"C"}]}],
                        "frames":[]})";
  try {
    parse_traj_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
  }
}

TEST(TrajJson, FieldPathInMessage) {
  const char* doc = R"({"residues":[{"name":"ALA","chain":"A","seq":"x","atoms":[]}],"frames":[]})";
  try {
    parse_traj_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/residues/0/seq"), std::string::npos);
  }
}

TEST(TrajJson, NotJson) { EXPECT_THROW(parse_traj_json("{nope"), Error); }

TEST(Selection, DropsWater) {
  std::string text;
  int serial = 1;
  for (int r = 1; r <= 73; ++r) {
    text += atom(serial++, " N  ", "ALA", 'A', r, r, 0, 0, "N");
    text += atom(serial++, " CA ", "ALA", 'A', r, r, 1, 0, "C");
  }
  for (int w = 0; w < 200; ++w) text += atom(serial++, " O  ", "HOH", 'W', w + 1, w, 5, 5, "O", ' ', "HETATM");
  const Trajectory t = parse_pdb(text);
  ASSERT_EQ(t.residues().size(), 273u);
  const Trajectory p = select_protein_residues(t);
  EXPECT_EQ(p.residues().size(), 73u);
  EXPECT_EQ(p.atoms().size(), 146u);
  EXPECT_NO_THROW(validate_trajectory(p));
}

TEST(Selection, HydrogensDroppedByDefault) {
  const std::string text = atom(1, " N  ", "GLY", 'A', 1, 0, 0, 0, "N") + atom(2, " CA ", "GLY", 'A', 1, 1, 0, 0, "C") +
                           atom(3, " C  ", "GLY", 'A', 1, 2, 0, 0, "C") + atom(4, " O  ", "GLY", 'A', 1, 3, 0, 0, "O") +
                           atom(5, " H  ", "GLY", 'A', 1, 4, 0, 0, "H");
  const Trajectory t = parse_pdb(text);
  EXPECT_EQ(select_protein_residues(t).atoms().size(), 4u);
  EXPECT_EQ(select_protein_residues(t, {.include_hydrogens = true}).atoms().size(), 5u);
}

TEST(Selection, OnlyWaterIsEmpty) {
  const Trajectory t = parse_pdb(atom(1, " O  ", "HOH", 'W', 1, 0, 0, 0, "O", ' ', "HETATM"));
  try {
    select_protein_residues(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Empty);
  }
}

TEST(Selection, Idempotent) {
  std::string text = residue(1, 1, 0) + atom(4, " O  ", "HOH", 'W', 1, 0, 5, 5, "O", ' ', "HETATM") +
                     atom(5, " H1 ", "GLY", 'A', 2, 9, 9, 9, "H") + atom(6, " CA ", "MSE", 'A', 3, 1, 1, 1, "C");
  const Trajectory once = select_protein_residues(parse_pdb(text));
  const Trajectory twice = select_protein_residues(once);
  ASSERT_EQ(once.residues().size(), twice.residues().size());
  ASSERT_EQ(once.atoms().size(), twice.atoms().size());
  for (std::size_t a = 0; a < once.atoms().size(); ++a) EXPECT_EQ(once.atoms()[a].name, twice.atoms()[a].name);
  EXPECT_EQ(once.frames[0].positions, twice.frames[0].positions);
}

TEST(Selection, PermissiveKeepsModifiedResidue) {
  const std::string text = residue(1, 1, 0) + atom(4, " CA ", "MSE", 'A', 2, 1, 1, 1, "C");
  EXPECT_EQ(select_protein_residues(parse_pdb(text)).residues().size(), 1u);
  EXPECT_EQ(select_protein_residues(parse_pdb(text), {.permissive = true}).residues().size(), 2u);
}

TEST(Io, FormatByExtension) {
  EXPECT_EQ(format_from_path("a/b.json"), TrajectoryFormat::Json);
  EXPECT_EQ(format_from_path("a/b.pdb"), TrajectoryFormat::Pdb);
  EXPECT_EQ(parse_trajectory(residue(1, 1, 0), TrajectoryFormat::Pdb).residues().size(), 1u);
}

TEST(Io, MissingFile) {
  try {
    load_trajectory("/nonexistent/x.pdb");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(Masses, KnownAndFallback) {
  bool known = false;
  EXPECT_DOUBLE_EQ(atomic_mass("S", &known), 32.06);
  EXPECT_TRUE(known);
  EXPECT_DOUBLE_EQ(atomic_mass("XX", &known), 12.011);
  EXPECT_FALSE(known);
}
