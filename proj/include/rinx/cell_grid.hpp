#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rinx/vec3.hpp"

namespace rinx {

// Uniform cell list over a fixed point set. Points are bucketed into cubic
// cells of edge >= cell_size, so every pair closer than cell_size lies in the
// same or an adjacent cell. Exact: candidate pairs are always confirmed with
// rinx::distance().
class CellGrid {
 public:
  CellGrid(std::span<const Vec3> points, double cell_size) : points_(points) {
    if (points.empty()) return;
    lo_ = hi_ = points[0];
    for (const Vec3& p : points) {
      lo_.x = std::min(lo_.x, p.x);
      lo_.y = std::min(lo_.y, p.y);
      lo_.z = std::min(lo_.z, p.z);
      hi_.x = std::max(hi_.x, p.x);
      hi_.y = std::max(hi_.y, p.y);
      hi_.z = std::max(hi_.z, p.z);
    }
    cell_ = std::max(cell_size, 1e-9);
    // Keep the cell count proportional to the point count.
    const double max_cells = 8.0 * static_cast<double>(points.size()) + 64.0;
    for (;;) {
      for (int d = 0; d < 3; ++d) {
        const double extent = d == 0 ? hi_.x - lo_.x : d == 1 ? hi_.y - lo_.y : hi_.z - lo_.z;
        dims_[d] = static_cast<std::size_t>(std::floor(extent / cell_)) + 1;
      }
      if (static_cast<double>(dims_[0]) * dims_[1] * dims_[2] <= max_cells) break;
      cell_ *= 1.5;
    }
    const std::size_t ncells = dims_[0] * dims_[1] * dims_[2];
    start_.assign(ncells + 1, 0);
    cell_of_.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of_[i] = cell_index(points[i]);
      ++start_[cell_of_[i] + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c) start_[c + 1] += start_[c];
    members_.resize(points.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i)
      members_[fill[cell_of_[i]]++] = static_cast<std::uint32_t>(i);
  }

  std::size_t cell_count() const { return start_.empty() ? 0 : start_.size() - 1; }
  double cell_size() const { return cell_; }
  std::array<std::size_t, 3> dims() const { return dims_; }

  std::span<const std::uint32_t> cell_members(std::size_t c) const {
    return {members_.data() + start_[c], members_.data() + start_[c + 1]};
  }

  // Calls fn(i, j, dist) with i < j for every pair at distance <= radius whose
  // lower-indexed cell (half-shell convention) lies in [cell_begin, cell_end).
  // radius must not exceed the construction cell size.
  template <typename Fn>
  void for_each_pair_in_cells(std::size_t cell_begin, std::size_t cell_end, double radius, Fn&& fn) const {
    for (std::size_t c = cell_begin; c < cell_end; ++c) {
      const auto own = cell_members(c);
      if (own.empty()) continue;
      for (std::size_t a = 0; a < own.size(); ++a)
        for (std::size_t b = a + 1; b < own.size(); ++b) emit(own[a], own[b], radius, fn);
      const auto [cx, cy, cz] = unflatten(c);
      for (const auto& off : half_shell()) {
        const long nx = static_cast<long>(cx) + off[0];
        const long ny = static_cast<long>(cy) + off[1];
        const long nz = static_cast<long>(cz) + off[2];
        if (nx < 0 || ny < 0 || nz < 0 || nx >= static_cast<long>(dims_[0]) ||
            ny >= static_cast<long>(dims_[1]) || nz >= static_cast<long>(dims_[2]))
          continue;
        const auto other = cell_members(flatten(nx, ny, nz));
        for (std::uint32_t i : own)
          for (std::uint32_t j : other) emit(i, j, radius, fn);
      }
    }
  }

  template <typename Fn>
  void for_each_pair_within(double radius, Fn&& fn) const {
    for_each_pair_in_cells(0, cell_count(), radius, fn);
  }

  // Calls fn(j, dist) for every stored point within radius of q.
  template <typename Fn>
  void for_each_within(const Vec3& q, double radius, Fn&& fn) const {
    if (points_.empty()) return;
    const long reach = static_cast<long>(std::ceil(radius / cell_));
    const auto [cx, cy, cz] = coords(q);
    for (long dx = -reach; dx <= reach; ++dx)
      for (long dy = -reach; dy <= reach; ++dy)
        for (long dz = -reach; dz <= reach; ++dz) {
          const long nx = cx + dx, ny = cy + dy, nz = cz + dz;
          if (nx < 0 || ny < 0 || nz < 0 || nx >= static_cast<long>(dims_[0]) ||
              ny >= static_cast<long>(dims_[1]) || nz >= static_cast<long>(dims_[2]))
            continue;
          for (std::uint32_t j : cell_members(flatten(nx, ny, nz))) {
            const double d = distance(q, points_[j]);
            if (d <= radius) fn(j, d);
          }
        }
  }

 private:
  template <typename Fn>
  void emit(std::uint32_t i, std::uint32_t j, double radius, Fn& fn) const {
    const double d = distance(points_[i], points_[j]);
    if (d <= radius) {
      if (i < j)
        fn(i, j, d);
      else
        fn(j, i, d);
    }
  }

  static const std::array<std::array<int, 3>, 13>& half_shell() {
    static const std::array<std::array<int, 3>, 13> offsets = [] {
      std::array<std::array<int, 3>, 13> out{};
      std::size_t k = 0;
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            const bool forward = dx > 0 || (dx == 0 && (dy > 0 || (dy == 0 && dz > 0)));
            if (forward) out[k++] = {dx, dy, dz};
          }
      return out;
    }();
    return offsets;
  }

  std::array<long, 3> coords(const Vec3& p) const {
    auto axis = [&](double v, double lo, std::size_t dim) {
      long c = static_cast<long>(std::floor((v - lo) / cell_));
      return std::clamp<long>(c, 0, static_cast<long>(dim) - 1);
    };
    return {axis(p.x, lo_.x, dims_[0]), axis(p.y, lo_.y, dims_[1]), axis(p.z, lo_.z, dims_[2])};
  }

  std::size_t cell_index(const Vec3& p) const {
    const auto [x, y, z] = coords(p);
    return flatten(x, y, z);
  }

  std::size_t flatten(long x, long y, long z) const {
    return (static_cast<std::size_t>(x) * dims_[1] + static_cast<std::size_t>(y)) * dims_[2] +
           static_cast<std::size_t>(z);
  }

  std::array<std::size_t, 3> unflatten(std::size_t c) const {
    const std::size_t z = c % dims_[2];
    const std::size_t y = (c / dims_[2]) % dims_[1];
    return {c / (dims_[1] * dims_[2]), y, z};
  }

  std::span<const Vec3> points_;
  Vec3 lo_, hi_;
  double cell_ = 1.0;
  std::array<std::size_t, 3> dims_{1, 1, 1};
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> members_;
  std::vector<std::size_t> cell_of_;
};

}  // namespace rinx
