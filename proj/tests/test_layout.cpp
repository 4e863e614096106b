#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rinx/layout.hpp"
#include "rinx/parallel.hpp"
#include "support.hpp"

using namespace rinx;

namespace {

struct StressRecorder : RoundObserver {
  const Rin* rin = nullptr;
  double d = 1.0;
  std::vector<double> before, after;
  std::vector<double> alphas;
  void on_round(int, double alpha, const std::vector<Vec3>& b, const std::vector<Vec3>& a) override {
    alphas.push_back(alpha);
    before.push_back(stress_term(*rin, b, d));
    after.push_back(stress_term(*rin, a, d));
  }
};

std::pair<double, double> distance_range(const std::vector<Vec3>& x) {
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      lo = std::min(lo, distance(x[i], x[j]));
      hi = std::max(hi, distance(x[i], x[j]));
    }
  return {lo, hi};
}

struct ThreadGuard {
  ~ThreadGuard() { set_thread_count(0); }
};

}  // namespace

TEST(ProteinLayout, CopiesCAlpha) {
  Trajectory t = support::make_trajectory({{{1, 2, 3}, {9, 9, 9}}, {{4, 5, 6}}}, 2);
  for (auto& p : t.frames[1].positions) p += Vec3{1, -1, 2};
  const Layout3D a = protein_layout(t.frames[0], t.topology);
  const Layout3D b = protein_layout(t.frames[1], t.topology);
  EXPECT_EQ(a.kind, LayoutKind::Protein);
  EXPECT_EQ(a.coords, (std::vector<Vec3>{{1, 2, 3}, {4, 5, 6}}));
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(b.coords[i], a.coords[i] + Vec3(1, -1, 2));
}

TEST(ProteinLayout, MissingCAlpha) {
  Trajectory t = support::make_trajectory({{{1, 2, 3}}});
  t.topology.atoms[0].name = "N";
  EXPECT_THROW(protein_layout(t.frames[0], t.topology), Error);
}

TEST(MaxentStress, SingleNode) {
  LayoutParams p;
  const Layout3D l = maxent_stress_layout(support::graph(1, {}), p);
  ASSERT_EQ(l.size(), 1u);
  EXPECT_EQ(l.coords[0], layout_detail::random_unit_cube(1, p.seed)[0]);
  EXPECT_TRUE(l.converged);
}

TEST(MaxentStress, EmptyGraphRejected) {
  EXPECT_THROW(maxent_stress_layout(support::graph(0, {}), LayoutParams{}), Error);
}

TEST(MaxentStress, K4IsRegularTetrahedron) {
  LayoutParams p;
  p.max_rounds = 500;
  p.tol = 1e-9;
  const Layout3D l = maxent_stress_layout(support::complete_graph(4), p);
  const auto [lo, hi] = distance_range(l.coords);
  EXPECT_LE(hi / lo, 1.05);
}

TEST(MaxentStress, PathEdgesNearTarget) {
  LayoutParams p;
  p.max_rounds = 200;
  const Rin g = support::path_graph(10);
  const Layout3D l = maxent_stress_layout(g, p);
  for (auto [i, j] : g.edges()) {
    const double r = distance(l.coords[i], l.coords[j]);
    EXPECT_GT(r, 0.75);
    EXPECT_LT(r, 1.25);
  }
}

TEST(MaxentStress, StressNonIncreasingAtZeroAlpha) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const std::size_t n = 10 + 7 * k;
    const Rin g = support::graph(n, oracle::random_connected_edges(n, 0.15, rng));
    LayoutParams p;
    p.alpha_init = 0.0;
    p.alpha_min = 0.0;
    p.seed = static_cast<std::uint64_t>(k);
    StressRecorder rec;
    rec.rin = &g;
    maxent_stress_layout(g, p, std::nullopt, &rec);
    ASSERT_FALSE(rec.after.empty());
    for (std::size_t r = 0; r < rec.after.size(); ++r) {
      EXPECT_EQ(rec.alphas[r], 0.0);
      EXPECT_LE(rec.after[r], rec.before[r] + 1e-9) << "round " << r;
    }
  }
}

TEST(MaxentStress, AlphaSchedule) {
  const Rin g = support::path_graph(6);
  LayoutParams p;
  p.tol = 1e-300;
  p.max_rounds = 8;
  StressRecorder rec;
  rec.rin = &g;
  maxent_stress_layout(g, p, std::nullopt, &rec);
  ASSERT_EQ(rec.alphas.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k)
    EXPECT_DOUBLE_EQ(rec.alphas[k], std::max(p.alpha_min, p.alpha_init * std::pow(p.alpha_decay, k)));
  StressRecorder warm;
  warm.rin = &g;
  maxent_stress_layout(g, p, Layout3D{layout_detail::random_unit_cube(6, 3)}, &warm);
  for (double a : warm.alphas) EXPECT_EQ(a, p.alpha_min);
}

TEST(MaxentStress, WarmStartFromSettledLayoutIsCheap) {
  auto traj = support::bundle(3, 21, 1);
  const Rin g = build_rin(traj->frames[0], traj->topology, {});
  LayoutParams p;
  p.max_rounds = 300;
  Layout3D settled = maxent_stress_layout(g, p);
  settled = maxent_stress_layout(g, p, settled);
  const Layout3D again = maxent_stress_layout(g, p, settled);
  EXPECT_TRUE(again.converged);
  EXPECT_LE(again.rounds, 3);
}

TEST(MaxentStress, WarmStartSizeMismatch) {
  EXPECT_THROW(maxent_stress_layout(support::path_graph(3), LayoutParams{}, Layout3D{{{0, 0, 0}}}), Error);
}

TEST(MaxentStress, BitIdenticalAcrossThreadCounts) {
  ThreadGuard guard;
  auto traj = support::bundle(6, 21, 1);
  const Rin g = build_rin(traj->frames[0], traj->topology, {});
  LayoutParams p;
  p.seed = 5;
  set_thread_count(1);
  const Layout3D a = maxent_stress_layout(g, p);
  set_thread_count(3);
  const Layout3D b = maxent_stress_layout(g, p);
  EXPECT_EQ(a.coords, b.coords);
}

TEST(MaxentStress, SeedMatters) {
  const Rin g = support::path_graph(8);
  LayoutParams a, b;
  b.seed = 1;
  EXPECT_NE(maxent_stress_layout(g, a).coords, maxent_stress_layout(g, b).coords);
  EXPECT_EQ(maxent_stress_layout(g, a).coords, maxent_stress_layout(g, a).coords);
}

TEST(MaxentStress, InvalidParams) {
  LayoutParams p;
  p.alpha_decay = 1.0;
  EXPECT_THROW(maxent_stress_layout(support::path_graph(3), p), Error);
}

TEST(StressEnergy, TwoNodeExamples) {
  const Rin g = support::graph(2, {{0, 1}});
  LayoutParams p;
  p.target_edge_length = 2.5;
  EXPECT_EQ(stress_energy(g, Layout3D{{{0, 0, 0}, {2.5, 0, 0}}}, p, 0.0), 0.0);
  EXPECT_NEAR(stress_energy(g, Layout3D{{{0, 0, 0}, {5.0, 0, 0}}}, p, 0.0), 1.0, 1e-15);
}

TEST(StressEnergy, MatchesOracle) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + k % 9;
    const auto e = oracle::random_edges(n, 0.4, rng);
    Layout3D l;
    for (std::size_t i = 0; i < n; ++i) l.coords.push_back({u(rng), u(rng), u(rng)});
    LayoutParams p;
    p.target_edge_length = 0.5 + 0.25 * (k % 4);
    const double alpha = 0.1 * (k % 3);
    EXPECT_NEAR(stress_energy(support::graph(n, e), l, p, alpha),
                oracle::maxent_energy(oracle::dense(n, e), l.coords, p.target_edge_length, alpha), 1e-12);
  }
}

TEST(StressEnergy, Errors) {
  const Rin g = support::path_graph(3);
  EXPECT_THROW(stress_energy(g, Layout3D{{{0, 0, 0}}}, LayoutParams{}, 0.0), Error);
  EXPECT_THROW(stress_energy(g, Layout3D{{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}}}, LayoutParams{}, 0.0), Error);
}

TEST(LayoutJson, RoundTrip) {
  const Layout3D l = maxent_stress_layout(support::path_graph(5), LayoutParams{});
  const Layout3D back = layout_from_json(nlohmann::json::parse(layout_to_json(l, LayoutParams{}).dump()));
  EXPECT_EQ(back.coords, l.coords);
  EXPECT_THROW(layout_from_json(nlohmann::json{{"coords", {{1, 2}}}}), Error);
}
