#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "rinx/trajectory.hpp"
#include "rinx/vec3.hpp"

namespace rinx {

// Parameters for a synthetic helical-bundle protein: straight alpha-helices
// on a snake-ordered grid of parallel axes, alternating direction, joined by
// short linear loops. Each residue has N, CA, C, O and CB atoms.
struct HelixBundleSpec {
  std::size_t helices = 3;
  std::size_t helix_length = 21;
  std::size_t loop_length = 5;
  std::size_t grid_columns = 0;  // 0: as square as possible
  double axis_spacing = 10.0;    // Å between neighbouring helix axes
  std::size_t frames = 1;
  double thermal_sigma = 0.25;   // Å, per-atom noise per frame
  double breathing = 0.4;        // Å, per-frame collective helix displacement
  std::uint64_t seed = 7;
};

namespace synthetic_detail {

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Rng {
  std::uint64_t state;
  double uniform() {
    state = mix(state);
    return (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;
  }
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
};

// Backbone atom offsets from CA in the local (radial, tangential, axial) frame.
struct Offset {
  const char* name;
  const char* element;
  double r, t, z;
  bool from_c;  // relative to C instead of CA
};

inline constexpr std::array<Offset, 5> kAtoms = {{{"N", "N", -0.5, -1.1, -0.8, false},
                                                  {"CA", "C", 0.0, 0.0, 0.0, false},
                                                  {"C", "C", -0.4, 1.2, 0.7, false},
                                                  {"O", "O", -0.2, 0.2, 1.2, true},
                                                  {"CB", "C", 1.3, 0.1, -0.7, false}}};

inline constexpr std::array<const char*, 12> kNames = {"ALA", "LEU", "GLU", "LYS", "VAL", "ILE",
                                                       "ARG", "GLN", "SER", "THR", "MET", "PHE"};

struct Placement {
  Vec3 ca, radial, tangent, axial;
  std::size_t helix;  // helix index, or SIZE_MAX for loop residues
};

}  // namespace synthetic_detail

inline Trajectory synthetic_helix_bundle(const HelixBundleSpec& spec) {
  using namespace synthetic_detail;
  constexpr double kRadius = 2.3;
  constexpr double kRise = 1.5;
  const double kTurn = 100.0 * std::numbers::pi / 180.0;

  const std::size_t cols = spec.grid_columns ? spec.grid_columns
                                             : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.helices))));
  std::vector<Vec3> axes;
  for (std::size_t h = 0; h < spec.helices; ++h) {
    const std::size_t row = h / cols;
    std::size_t col = h % cols;
    if (row % 2 == 1) col = cols - 1 - col;
    axes.push_back({static_cast<double>(col) * spec.axis_spacing, static_cast<double>(row) * spec.axis_spacing, 0.0});
  }

  std::vector<Placement> placements;
  const double height = kRise * static_cast<double>(spec.helix_length - 1);
  for (std::size_t h = 0; h < spec.helices; ++h) {
    const bool up = h % 2 == 0;
    if (h > 0 && spec.loop_length > 0) {
      const Vec3 from = placements.back().ca;
      const double z0 = up ? 0.0 : height;
      const Vec3 to = axes[h] + Vec3{kRadius, 0.0, z0};
      for (std::size_t k = 1; k <= spec.loop_length; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(spec.loop_length + 1);
        Vec3 ca = from * (1.0 - f) + to * f;
        ca.z += (up ? -1.0 : 1.0) * 3.0 * std::sin(std::numbers::pi * f);
        Vec3 dir = to - from;
        const double len = norm(dir);
        const Vec3 tangent = len > 0 ? dir * (1.0 / len) : Vec3{1, 0, 0};
        const Vec3 axial{0, 0, up ? -1.0 : 1.0};
        Vec3 radial{tangent.y * axial.z - tangent.z * axial.y, tangent.z * axial.x - tangent.x * axial.z,
                    tangent.x * axial.y - tangent.y * axial.x};
        const double rl = norm(radial);
        radial = rl > 0 ? radial * (1.0 / rl) : Vec3{0, 1, 0};
        placements.push_back({ca, radial, tangent, axial, SIZE_MAX});
      }
    }
    for (std::size_t k = 0; k < spec.helix_length; ++k) {
      const double phase = kTurn * static_cast<double>(k);
      const Vec3 radial{std::cos(phase), std::sin(phase), 0.0};
      const Vec3 tangent{-std::sin(phase), std::cos(phase), 0.0};
      const double z = up ? kRise * static_cast<double>(k) : height - kRise * static_cast<double>(k);
      const Vec3 axial{0, 0, up ? 1.0 : -1.0};
      placements.push_back({axes[h] + radial * kRadius + Vec3{0, 0, z}, radial, tangent * (up ? 1.0 : -1.0), axial, h});
    }
  }

  Trajectory traj;
  traj.source_path = "synthetic-bundle-" + std::to_string(spec.helices) + "x" + std::to_string(spec.helix_length);
  Topology& top = traj.topology;
  std::vector<Vec3> base;
  for (std::size_t r = 0; r < placements.size(); ++r) {
    const Placement& p = placements[r];
    Residue res;
    res.index = r;
    res.name = kNames[r % kNames.size()];
    res.chain_id = 'A';
    res.seq_number = static_cast<int>(r + 1);
    Vec3 c_pos;
    for (const Offset& o : kAtoms) {
      const Vec3 origin = o.from_c ? c_pos : p.ca;
      const Vec3 pos = origin + p.radial * o.r + p.tangent * o.t + p.axial * o.z;
      if (std::string(o.name) == "C") c_pos = pos;
      res.atom_indices.push_back(top.atoms.size());
      top.atoms.push_back({static_cast<int>(top.atoms.size() + 1), o.name, o.element, r});
      base.push_back(pos);
    }
    top.residues.push_back(std::move(res));
  }

  Rng rng{mix(spec.seed)};
  for (std::size_t f = 0; f < std::max<std::size_t>(1, spec.frames); ++f) {
    Frame frame;
    frame.index = f;
    frame.positions = base;
    if (f > 0) {
      std::vector<Vec3> shift(spec.helices);
      for (auto& s : shift) s = Vec3{rng.normal(), rng.normal(), rng.normal()} * spec.breathing;
      for (std::size_t a = 0; a < base.size(); ++a) {
        const Placement& p = placements[top.atoms[a].residue_index];
        Vec3 noise{rng.normal(), rng.normal(), rng.normal()};
        frame.positions[a] += noise * spec.thermal_sigma;
        if (p.helix != SIZE_MAX) frame.positions[a] += shift[p.helix];
      }
    }
    traj.frames.push_back(std::move(frame));
  }
  return traj;
}

}  // namespace rinx
