#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rinx/cell_grid.hpp"
#include "rinx/error.hpp"
#include "rinx/parallel.hpp"
#include "rinx/rin.hpp"
#include "rinx/trajectory.hpp"
#include "rinx/vec3.hpp"

namespace rinx {

enum class LayoutKind { Protein, MaxentStress };

inline std::string_view to_string(LayoutKind k) { return k == LayoutKind::Protein ? "protein" : "maxent_stress"; }

struct Layout3D {
  std::vector<Vec3> coords;
  LayoutKind kind = LayoutKind::MaxentStress;
  int rounds = 0;
  bool converged = false;
  // The non-edge term was approximated with cell aggregates (large graphs).
  bool approximate_entropy = false;

  std::size_t size() const { return coords.size(); }
};

struct LayoutParams {
  double target_edge_length = 1.0;
  double alpha_init = 1.0;
  double alpha_decay = 0.3;
  double alpha_min = 0.008;
  int max_rounds = 50;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  double q = 0.0;
  // Above this node count the non-edge term uses the cell approximation.
  std::size_t exact_entropy_limit = 2000;

  void validate() const {
    if (!(target_edge_length > 0.0)) throw Error(ErrorCode::InvalidConfig, "target edge length must be positive");
    if (!(alpha_decay > 0.0 && alpha_decay < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha_decay must lie in (0, 1)");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "tol must be positive");
    if (max_rounds < 1) throw Error(ErrorCode::InvalidConfig, "max_rounds must be >= 1");
    if (alpha_init < 0.0 || alpha_min < 0.0) throw Error(ErrorCode::InvalidConfig, "alpha must be non-negative");
    if (q < 0.0) throw Error(ErrorCode::InvalidConfig, "q must be non-negative");
  }
};

// Node i sits at the CA atom of residue i (Å).
inline Layout3D protein_layout(const Frame& frame, const Topology& top) {
  Layout3D out;
  out.kind = LayoutKind::Protein;
  out.converged = true;
  out.coords.reserve(top.residues.size());
  for (std::size_t r = 0; r < top.residues.size(); ++r) out.coords.push_back(rin_detail::calpha_position(frame, top, r));
  return out;
}

namespace layout_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_real(std::uint64_t& state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

inline std::vector<Vec3> random_unit_cube(std::size_t n, std::uint64_t seed) {
  std::vector<Vec3> pts(n);
  std::uint64_t state = seed;
  for (auto& p : pts) {
    p.x = unit_real(state);
    p.y = unit_real(state);
    p.z = unit_real(state);
  }
  return pts;
}

// Non-edge potential for one pair at distance r (q = 0: -ln r).
inline double entropy_potential(double r, double q) { return q == 0.0 ? -std::log(r) : std::pow(r, -q) / q; }

inline double inverse_power(double r, double q) {
  // 1 / r^(q+2)
  return q == 0.0 ? 1.0 / (r * r) : std::pow(r, -(q + 2.0));
}

constexpr double kCoincident = 1e-9;
constexpr double kJitter = 1e-6;

// Separates points closer than kCoincident by nudging the higher-indexed one.
inline void jitter_coincident(std::vector<Vec3>& x, std::uint64_t seed, int round) {
  const std::vector<Vec3> snapshot = x;
  CellGrid grid(snapshot, kCoincident);
  std::vector<char> nudge(x.size(), 0);
  grid.for_each_pair_within(kCoincident, [&](std::uint32_t, std::uint32_t j, double) { nudge[j] = 1; });
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!nudge[j]) continue;
    std::uint64_t state = splitmix64(seed ^ splitmix64(j * 0x100000001b3ULL + static_cast<std::uint64_t>(round)));
    Vec3 dir{unit_real(state) - 0.5, unit_real(state) - 0.5, unit_real(state) - 0.5};
    const double len = norm(dir);
    x[j] += (len > 0 ? dir * (1.0 / len) : Vec3{1, 0, 0}) * kJitter;
  }
}

struct EntropyField {
  std::vector<Vec3> force;      // sum over non-neighbours of (x_i - x_j) / r^(q+2)
  std::vector<double> weight;   // sum over non-neighbours of 1 / r^(q+2)
};

inline EntropyField entropy_exact(const Rin& rin, const std::vector<Vec3>& x, double q) {
  const std::size_t n = x.size();
  EntropyField f{std::vector<Vec3>(n), std::vector<double>(n, 0.0)};
  parallel_for(n, [&](std::size_t i) {
    const auto& nbrs = rin.neighbors(i);
    std::size_t k = 0;
    Vec3 force;
    double weight = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      while (k < nbrs.size() && nbrs[k] < j) ++k;
      if (k < nbrs.size() && nbrs[k] == j) continue;
      const Vec3 diff = x[i] - x[j];
      const double r = std::max(norm(diff), kCoincident);
      const double s = inverse_power(r, q);
      force += diff * s;
      weight += s;
    }
    f.force[i] = force;
    f.weight[i] = weight;
  });
  return f;
}

// Near cells exactly, far cells through their centroid and population; graph
// neighbours are then removed exactly.
inline EntropyField entropy_approx(const Rin& rin, const std::vector<Vec3>& x, double q) {
  const std::size_t n = x.size();
  Vec3 lo = x[0], hi = x[0];
  for (const Vec3& p : x) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double target_cells = std::sqrt(27.0 * static_cast<double>(n));
  const long g = std::max(1L, std::lround(std::cbrt(target_cells)));
  const Vec3 extent = hi - lo;
  auto cell_of = [&](const Vec3& p) {
    auto axis = [&](double v, double l, double e) {
      if (e <= 0) return 0L;
      return std::clamp(static_cast<long>((v - l) / e * static_cast<double>(g)), 0L, g - 1);
    };
    return std::array<long, 3>{axis(p.x, lo.x, extent.x), axis(p.y, lo.y, extent.y), axis(p.z, lo.z, extent.z)};
  };
  const std::size_t ncell = static_cast<std::size_t>(g * g * g);
  auto flat = [&](long a, long b, long c) { return static_cast<std::size_t>((a * g + b) * g + c); };
  std::vector<std::vector<std::uint32_t>> members(ncell);
  std::vector<Vec3> centroid(ncell);
  std::vector<std::array<long, 3>> where(n);
  for (std::size_t i = 0; i < n; ++i) {
    where[i] = cell_of(x[i]);
    const std::size_t c = flat(where[i][0], where[i][1], where[i][2]);
    members[c].push_back(static_cast<std::uint32_t>(i));
    centroid[c] += x[i];
  }
  for (std::size_t c = 0; c < ncell; ++c)
    if (!members[c].empty()) centroid[c] *= 1.0 / static_cast<double>(members[c].size());

  EntropyField f{std::vector<Vec3>(n), std::vector<double>(n, 0.0)};
  parallel_for(n, [&](std::size_t i) {
    Vec3 force;
    double weight = 0.0;
    auto add = [&](const Vec3& diff, double count) {
      const double r = std::max(norm(diff), kCoincident);
      const double s = inverse_power(r, q);
      force += diff * (s * count);
      weight += s * count;
    };
    const auto [ci, cj, ck] = where[i];
    for (long a = 0; a < g; ++a)
      for (long b = 0; b < g; ++b)
        for (long c = 0; c < g; ++c) {
          const auto& m = members[flat(a, b, c)];
          if (m.empty()) continue;
          const bool near = std::abs(a - ci) <= 1 && std::abs(b - cj) <= 1 && std::abs(c - ck) <= 1;
          if (near) {
            for (std::uint32_t j : m)
              if (j != i) add(x[i] - x[j], 1.0);
          } else {
            add(x[i] - centroid[flat(a, b, c)], static_cast<double>(m.size()));
          }
        }
    for (NodeId j : rin.neighbors(i)) {
      const Vec3 diff = x[i] - x[j];
      const double r = std::max(norm(diff), kCoincident);
      const double s = inverse_power(r, q);
      force -= diff * s;
      weight -= s;
    }
    f.force[i] = force;
    f.weight[i] = std::max(weight, 0.0);
  });
  return f;
}

// Preconditioned conjugate gradients for (L + diag(shift)) y = b on one
// coordinate axis. Reductions run serially in node order.
inline void solve_axis(const Rin& rin, double w, const std::vector<double>& shift, const std::vector<double>& b,
                       std::vector<double>& y, int max_iter, double rel_tol) {
  const std::size_t n = b.size();
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = w * static_cast<double>(rin.degree(i)) + shift[i];
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    parallel_for(n, [&](std::size_t i) {
      double acc = diag[i] * v[i];
      for (NodeId j : rin.neighbors(i)) acc -= w * v[j];
      out[i] = acc;
    });
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * c[i];
    return s;
  };
  std::vector<double> r(n), z(n), p(n), ap(n);
  apply(y, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  const double bnorm = std::sqrt(dot(b, b));
  const double stop = rel_tol * std::max(bnorm, 1e-300);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(dot(r, r)) <= stop) break;
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double step = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
}

// Diagonal regularisation relative to the edge weight: keeps the system
// positive definite on disconnected graphs and isolated nodes.
constexpr double kProximal = 1e-3;

// Over-relaxed majorization step; any factor in (0, 2) still decreases the
// quadratic majorant, so stress monotonicity is kept.
constexpr double kRelaxation = 1.5;

}  // namespace layout_detail

// Sum over edges of w (|x_i - x_j| - d)^2 with w = 1/d^2.
inline double stress_term(const Rin& rin, const std::vector<Vec3>& x, double d) {
  const double w = 1.0 / (d * d);
  double s = 0.0;
  for (std::size_t i = 0; i < rin.node_count(); ++i)
    for (NodeId j : rin.neighbors(i))
      if (j > i) {
        const double e = distance(x[i], x[j]) - d;
        s += w * e * e;
      }
  return s;
}

// Full objective at the given alpha; the non-edge term runs over all pairs.
inline double stress_energy(const Rin& rin, const Layout3D& layout, const LayoutParams& params, double alpha) {
  const std::size_t n = rin.node_count();
  if (layout.coords.size() != n)
    throw Error(ErrorCode::LengthMismatch, "layout has " + std::to_string(layout.coords.size()) +
                                               " points, graph has " + std::to_string(n) + " nodes");
  const auto& x = layout.coords;
  double entropy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nbrs = rin.neighbors(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = distance(x[i], x[j]);
      if (r == 0.0)
        throw Error(ErrorCode::CoincidentPoints, "nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      if (std::binary_search(nbrs.begin(), nbrs.end(), static_cast<NodeId>(j))) continue;
      entropy += layout_detail::entropy_potential(r, params.q);
    }
  }
  return stress_term(rin, x, params.target_edge_length) + alpha * entropy;
}

struct RoundObserver {
  virtual ~RoundObserver() = default;
  // Called after every round with the alpha used and the new coordinates.
  virtual void on_round(int round, double alpha, const std::vector<Vec3>& before, const std::vector<Vec3>& after) = 0;
};

// Maxent-stress layout by majorization. Each round solves
//   (L_w + D) X = L_Z Z + (alpha/2) B(Z) + D Z
// where L_w is the edge-weight Laplacian, L_Z Z the stress majorizer
// right-hand side at the current layout Z, B the non-edge gradient and D a
// small proximal diagonal. For alpha = 0 a round never increases the stress.
// Cold runs use alpha_init * alpha_decay^k floored at alpha_min; warm starts
// run at alpha_min throughout.
inline Layout3D maxent_stress_layout(const Rin& rin, const LayoutParams& params,
                                     const std::optional<Layout3D>& warm_start = std::nullopt,
                                     RoundObserver* observer = nullptr) {
  using namespace layout_detail;
  params.validate();
  const std::size_t n = rin.node_count();
  Layout3D out;
  out.kind = LayoutKind::MaxentStress;
  if (n == 0) throw Error(ErrorCode::InvalidPayload, "layout needs at least one node");

  const bool warm = warm_start.has_value();
  std::vector<Vec3> x;
  if (warm) {
    if (warm_start->coords.size() != n)
      throw Error(ErrorCode::LengthMismatch, "warm start has " + std::to_string(warm_start->coords.size()) +
                                                 " points, graph has " + std::to_string(n) + " nodes");
    x = warm_start->coords;
  } else {
    x = random_unit_cube(n, params.seed);
  }
  if (n == 1) {
    out.coords = std::move(x);
    out.converged = true;
    return out;
  }

  const double d = params.target_edge_length;
  const double w = 1.0 / (d * d);
  const bool approximate = n > params.exact_entropy_limit;
  out.approximate_entropy = approximate;
  const int cg_iters = static_cast<int>(std::max<std::size_t>(200, 2 * n));

  std::vector<Vec3> next(n);
  std::vector<double> shift(n), bx(n), by(n), bz(n), yx(n), yy(n), yz(n);
  for (int round = 0; round < params.max_rounds; ++round) {
    const double alpha =
        warm ? params.alpha_min : std::max(params.alpha_min, params.alpha_init * std::pow(params.alpha_decay, round));
    jitter_coincident(x, params.seed, round);

    EntropyField field;
    if (alpha > 0.0) field = approximate ? entropy_approx(rin, x, params.q) : entropy_exact(rin, x, params.q);

    parallel_for(n, [&](std::size_t i) {
      Vec3 rhs;
      for (NodeId j : rin.neighbors(i)) {
        const Vec3 diff = x[i] - x[j];
        const double r = std::max(norm(diff), kCoincident);
        rhs += diff * (w * d / r);
      }
      double s = kProximal * w * (static_cast<double>(rin.degree(i)) + 1.0);
      if (alpha > 0.0) {
        rhs += field.force[i] * (0.5 * alpha);
        s += 0.5 * alpha * field.weight[i];
      }
      rhs += x[i] * s;
      shift[i] = s;
      bx[i] = rhs.x;
      by[i] = rhs.y;
      bz[i] = rhs.z;
      yx[i] = x[i].x;
      yy[i] = x[i].y;
      yz[i] = x[i].z;
    });
    solve_axis(rin, w, shift, bx, yx, cg_iters, 1e-12);
    solve_axis(rin, w, shift, by, yy, cg_iters, 1e-12);
    solve_axis(rin, w, shift, bz, yz, cg_iters, 1e-12);

    Vec3 center;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = x[i] + (Vec3{yx[i], yy[i], yz[i]} - x[i]) * kRelaxation;
      center += next[i];
    }
    center *= 1.0 / static_cast<double>(n);
    double movement = 0.0;
    double spread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      movement += distance(next[i], x[i]);
      const Vec3 c = next[i] - center;
      spread += dot(c, c);
    }
    movement /= static_cast<double>(n);
    const double scale = std::max(d, std::sqrt(spread / static_cast<double>(n)));

    if (observer) observer->on_round(round, alpha, x, next);
    x.swap(next);
    out.rounds = round + 1;
    if (movement / scale < params.tol) {
      out.converged = true;
      break;
    }
  }
  out.coords = std::move(x);
  return out;
}

inline nlohmann::json layout_to_json(const Layout3D& layout, const std::optional<LayoutParams>& params = std::nullopt) {
  nlohmann::json coords = nlohmann::json::array();
  for (const Vec3& p : layout.coords) coords.push_back({p.x, p.y, p.z});
  nlohmann::json doc{{"kind", std::string(to_string(layout.kind))}, {"coords", std::move(coords)}};
  if (layout.kind == LayoutKind::MaxentStress) {
    doc["rounds"] = layout.rounds;
    doc["converged"] = layout.converged;
    doc["approximate_entropy"] = layout.approximate_entropy;
  }
  if (params) {
    doc["params"] = {{"target_edge_length", params->target_edge_length},
                     {"alpha_init", params->alpha_init},
                     {"alpha_decay", params->alpha_decay},
                     {"alpha_min", params->alpha_min},
                     {"max_rounds", params->max_rounds},
                     {"tol", params->tol},
                     {"seed", params->seed},
                     {"q", params->q}};
  }
  return doc;
}

inline Layout3D layout_from_json(const nlohmann::json& doc) {
  Layout3D out;
  if (!doc.is_object() || !doc.contains("coords") || !doc["coords"].is_array())
    throw Error(ErrorCode::SchemaViolation, "/coords: expected array");
  out.kind = doc.value("kind", std::string("maxent_stress")) == "protein" ? LayoutKind::Protein : LayoutKind::MaxentStress;
  for (std::size_t i = 0; i < doc["coords"].size(); ++i) {
    const auto& p = doc["coords"][i];
    if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
      throw Error(ErrorCode::SchemaViolation, "/coords/" + std::to_string(i) + ": expected [x, y, z]");
    out.coords.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  return out;
}

}  // namespace rinx
