// Builds a small synthetic protein, opens a session and walks it through a
// few slider changes, printing what a client would see.
#include <cstdio>

#include "rinx/rinx.hpp"

int main() {
  rinx::HelixBundleSpec spec;
  spec.helices = 4;
  spec.frames = 3;
  auto traj = std::make_shared<const rinx::Trajectory>(rinx::synthetic_helix_bundle(spec));

  rinx::RinConfig config;
  config.cutoff = 4.5;
  auto state = rinx::create_session(traj, config, rinx::MeasureSelector::scalar(rinx::Measure::Betweenness));
  std::printf("frame %zu: %zu residues, %zu contacts\n", state.frame_index(), state.rin->node_count(),
              state.rin->edge_count());

  const rinx::UpdateEvent events[] = {
      rinx::UpdateEvent::set_cutoff(6.0),
      rinx::UpdateEvent::set_frame(2),
      rinx::UpdateEvent::toggle_delta(true),
      rinx::UpdateEvent::set_measure(rinx::MeasureSelector::community(rinx::CommunityMethod::PLM)),
  };
  for (const auto& ev : events) {
    auto [next, t] = rinx::handle_event(state, ev);
    state = std::move(next);
    std::printf("%-14s edges %5zu  edge %7.2f ms  layout %7.2f ms  measure %7.2f ms  total %7.2f ms\n",
                std::string(rinx::to_string(ev.kind)).c_str(), state.rin->edge_count(), t.edge_update_ms, t.layout_ms,
                t.measure_ms, t.total_ms);
  }
  const auto& p = state.scores->partition();
  std::printf("%zu communities, modularity %.3f\n", p.community_count, rinx::modularity(*state.rin, p));
}
