#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rinx/analytics.hpp"
#include "rinx/error.hpp"
#include "rinx/graph_io.hpp"
#include "rinx/layout.hpp"
#include "rinx/rin.hpp"
#include "rinx/scores.hpp"
#include "rinx/trajectory.hpp"

namespace rinx {

struct TimingBreakdown {
  double edge_update_ms = 0.0;
  double layout_ms = 0.0;
  double measure_ms = 0.0;
  double total_ms = 0.0;
};

struct SessionOptions {
  AnalyticsOptions analytics;
  LayoutParams layout;
  // Seed the maxent layout from the previous one on frame/cut-off changes.
  bool warm_start = true;
};

// What the sliders currently ask for.
struct ViewParams {
  std::size_t frame = 0;
  RinConfig config;
  MeasureSelector measure;

  friend bool operator==(const ViewParams& a, const ViewParams& b) {
    return a.frame == b.frame && a.config == b.config && a.measure == b.measure;
  }
};

// Immutable once published; events build a new state that shares whatever
// did not change.
struct SessionState {
  std::shared_ptr<const Trajectory> trajectory;
  SessionOptions options;
  // What rin/scores/layouts were computed for.
  ViewParams applied;
  // What the client asked for; differs from applied while on-demand mode
  // holds back work.
  ViewParams requested;
  std::shared_ptr<const Rin> rin;
  std::shared_ptr<const MeasureResult> scores;
  std::shared_ptr<const NodeScores> score_buffer;
  std::shared_ptr<const Layout3D> protein;
  std::shared_ptr<const Layout3D> maxent;
  bool auto_recompute = true;
  bool delta_view = false;
  TimingBreakdown last_timing;

  std::size_t frame_index() const { return applied.frame; }
  const RinConfig& config() const { return applied.config; }
  const MeasureSelector& measure() const { return applied.measure; }
  bool stale() const { return !(applied == requested); }
};

enum class EventKind { SetFrame, SetCutoff, SetCriterion, SetMeasure, ToggleAuto, ToggleDelta, Recompute, GetSnapshot };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::SetFrame: return "set_frame";
    case EventKind::SetCutoff: return "set_cutoff";
    case EventKind::SetCriterion: return "set_criterion";
    case EventKind::SetMeasure: return "set_measure";
    case EventKind::ToggleAuto: return "toggle_auto";
    case EventKind::ToggleDelta: return "toggle_delta";
    case EventKind::Recompute: return "recompute";
    case EventKind::GetSnapshot: return "get_snapshot";
  }
  return "get_snapshot";
}

using EventPayload = std::variant<std::monostate, std::size_t, double, DistanceCriterion, MeasureSelector, bool>;

struct UpdateEvent {
  EventKind kind = EventKind::GetSnapshot;
  // Toggles take an optional bool; without one they flip.
  EventPayload value;

  static UpdateEvent set_frame(std::size_t f) { return {EventKind::SetFrame, f}; }
  static UpdateEvent set_cutoff(double c) { return {EventKind::SetCutoff, c}; }
  static UpdateEvent set_criterion(DistanceCriterion c) { return {EventKind::SetCriterion, c}; }
  static UpdateEvent set_measure(MeasureSelector m) { return {EventKind::SetMeasure, m}; }
  static UpdateEvent toggle_auto(std::optional<bool> on = std::nullopt) {
    return on ? UpdateEvent{EventKind::ToggleAuto, *on} : UpdateEvent{EventKind::ToggleAuto, {}};
  }
  static UpdateEvent toggle_delta(std::optional<bool> on = std::nullopt) {
    return on ? UpdateEvent{EventKind::ToggleDelta, *on} : UpdateEvent{EventKind::ToggleDelta, {}};
  }
  static UpdateEvent recompute() { return {EventKind::Recompute, {}}; }
  static UpdateEvent get_snapshot() { return {EventKind::GetSnapshot, {}}; }
};

// Parses a client message {"type": ..., "value": ...}.
inline UpdateEvent event_from_json(const nlohmann::json& msg) {
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
    throw Error(ErrorCode::InvalidPayload, "message needs a string \"type\"");
  const std::string type = msg["type"].get<std::string>();
  const nlohmann::json value = msg.contains("value") ? msg["value"] : nlohmann::json();
  auto bad = [&](const char* want) {
    return Error(ErrorCode::InvalidPayload, type + ": value must be " + want);
  };
  if (type == "set_frame") {
    if (!is_count(value)) throw bad("a non-negative integer");
    return UpdateEvent::set_frame(value.get<std::size_t>());
  }
  if (type == "set_cutoff") {
    if (!value.is_number()) throw bad("a number");
    return UpdateEvent::set_cutoff(value.get<double>());
  }
  if (type == "set_criterion") {
    if (!value.is_string()) throw bad("\"calpha\", \"com\" or \"min\"");
    auto c = parse_criterion(value.get<std::string>());
    if (!c) throw bad("\"calpha\", \"com\" or \"min\"");
    return UpdateEvent::set_criterion(*c);
  }
  if (type == "set_measure") {
    if (!value.is_string()) throw bad("a measure name");
    auto m = parse_measure(value.get<std::string>());
    if (!m) throw Error(ErrorCode::InvalidPayload, "set_measure: unknown measure '" + value.get<std::string>() + "'");
    return UpdateEvent::set_measure(*m);
  }
  if (type == "toggle_auto" || type == "toggle_delta") {
    std::optional<bool> on;
    if (value.is_boolean())
      on = value.get<bool>();
    else if (!value.is_null())
      throw bad("a boolean or absent");
    return type == "toggle_auto" ? UpdateEvent::toggle_auto(on) : UpdateEvent::toggle_delta(on);
  }
  if (type == "recompute") return UpdateEvent::recompute();
  if (type == "get_snapshot") return UpdateEvent::get_snapshot();
  throw Error(ErrorCode::InvalidPayload, "unknown message type '" + type + "'");
}

namespace session_detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class T>
const T& payload(const UpdateEvent& ev) {
  if (const T* v = std::get_if<T>(&ev.value)) return *v;
  throw Error(ErrorCode::InvalidPayload, std::string(to_string(ev.kind)) + ": missing or mistyped value");
}

inline std::shared_ptr<const Layout3D> make_maxent(const Rin& rin, const SessionOptions& opts,
                                                   const std::shared_ptr<const Layout3D>& previous) {
  std::optional<Layout3D> warm;
  if (opts.warm_start && previous && previous->size() == rin.node_count()) warm = *previous;
  return std::make_shared<const Layout3D>(maxent_stress_layout(rin, opts.layout, warm));
}

inline std::shared_ptr<const MeasureResult> make_scores(const Rin& rin, const MeasureSelector& sel,
                                                        const SessionOptions& opts) {
  return std::make_shared<const MeasureResult>(compute_measure(rin, sel, opts.analytics));
}

// Moves `from` into the result's buffer when the measure stays the same.
inline std::shared_ptr<const NodeScores> buffer_from(const std::shared_ptr<const MeasureResult>& from,
                                                     const MeasureSelector& next) {
  if (!from || from->is_partition() || next.is_community || !(from->selector == next)) return nullptr;
  return std::make_shared<const NodeScores>(from->scores());
}

// Brings `s.applied` up to `s.requested`, doing only the work that changed.
inline TimingBreakdown apply_pending(SessionState& s) {
  TimingBreakdown t;
  const auto t_total = Clock::now();
  const ViewParams& want = s.requested;
  const ViewParams have = s.applied;
  const Trajectory& traj = *s.trajectory;
  const Frame& frame = traj.frame(want.frame);

  bool graph_changed = false;
  bool frame_changed = want.frame != have.frame;
  if (frame_changed || !(want.config == have.config)) {
    const auto t0 = Clock::now();
    const bool only_cutoff = !frame_changed && want.config.criterion == have.config.criterion &&
                             want.config.exclude_backbone_neighbors == have.config.exclude_backbone_neighbors;
    Rin next = only_cutoff ? apply_cutoff_change(*s.rin, frame, traj.topology, want.config.cutoff).rin
                           : build_rin(frame, traj.topology, want.config);
    t.edge_update_ms = ms_since(t0);
    graph_changed = true;
    s.rin = std::make_shared<const Rin>(std::move(next));
  }

  if (graph_changed) {
    const auto t0 = Clock::now();
    // The protein view only moves with the frame.
    if (frame_changed) s.protein = std::make_shared<const Layout3D>(protein_layout(frame, traj.topology));
    s.maxent = make_maxent(*s.rin, s.options, s.maxent);
    t.layout_ms = ms_since(t0);
  }

  if (graph_changed || !(want.measure == have.measure)) {
    const auto t0 = Clock::now();
    auto next = make_scores(*s.rin, want.measure, s.options);
    t.measure_ms = ms_since(t0);
    s.score_buffer = buffer_from(s.scores, want.measure);
    s.scores = std::move(next);
  }

  s.applied = want;
  if (want.measure.is_community) s.delta_view = false;
  t.total_ms = ms_since(t_total);
  t.total_ms = std::max({t.total_ms, t.edge_update_ms, t.layout_ms, t.measure_ms});
  return t;
}

}  // namespace session_detail

inline SessionState create_session(std::shared_ptr<const Trajectory> trajectory, const RinConfig& config,
                                   const MeasureSelector& measure, const SessionOptions& options = {}) {
  using namespace session_detail;
  if (!trajectory) throw Error(ErrorCode::InvalidPayload, "no trajectory");
  if (trajectory->frames.empty()) throw Error(ErrorCode::Empty, "trajectory has no frames");
  config.validate();
  options.layout.validate();
  validate_trajectory(*trajectory);

  SessionState s;
  s.trajectory = std::move(trajectory);
  s.options = options;
  s.applied = s.requested = {0, config, measure};
  const Trajectory& traj = *s.trajectory;
  const Frame& frame = traj.frames.front();

  const auto t_total = Clock::now();
  auto t0 = Clock::now();
  s.rin = std::make_shared<const Rin>(build_rin(frame, traj.topology, config));
  s.last_timing.edge_update_ms = ms_since(t0);
  t0 = Clock::now();
  s.protein = std::make_shared<const Layout3D>(protein_layout(frame, traj.topology));
  s.maxent = std::make_shared<const Layout3D>(maxent_stress_layout(*s.rin, options.layout));
  s.last_timing.layout_ms = ms_since(t0);
  t0 = Clock::now();
  s.scores = make_scores(*s.rin, measure, options);
  s.last_timing.measure_ms = ms_since(t0);
  s.last_timing.total_ms = ms_since(t_total);
  return s;
}

inline SessionState create_session(Trajectory trajectory, const RinConfig& config, const MeasureSelector& measure,
                                   const SessionOptions& options = {}) {
  return create_session(std::make_shared<const Trajectory>(std::move(trajectory)), config, measure, options);
}

struct EventResult {
  SessionState state;
  TimingBreakdown timing;
};

// Pure with respect to `state`: on error the exception propagates and the
// caller still holds the untouched previous state.
inline EventResult handle_event(const SessionState& state, const UpdateEvent& ev) {
  using namespace session_detail;
  SessionState s = state;
  ViewParams& want = s.requested;
  switch (ev.kind) {
    case EventKind::SetFrame: {
      const std::size_t f = payload<std::size_t>(ev);
      if (f >= s.trajectory->frame_count())
        throw Error(ErrorCode::InvalidPayload, "frame " + std::to_string(f) + " out of range (" +
                                                   std::to_string(s.trajectory->frame_count()) + " frames)");
      want.frame = f;
      break;
    }
    case EventKind::SetCutoff: {
      const double c = payload<double>(ev);
      if (!(c > 0.0) || !std::isfinite(c))
        throw Error(ErrorCode::InvalidPayload, "cutoff must be a positive finite length");
      want.config.cutoff = c;
      break;
    }
    case EventKind::SetCriterion: want.config.criterion = payload<DistanceCriterion>(ev); break;
    case EventKind::SetMeasure: {
      want.measure = payload<MeasureSelector>(ev);
      if (want.measure.is_community) s.delta_view = false;
      break;
    }
    case EventKind::ToggleAuto: {
      const bool* on = std::get_if<bool>(&ev.value);
      s.auto_recompute = on ? *on : !s.auto_recompute;
      break;
    }
    case EventKind::ToggleDelta: {
      const bool* on = std::get_if<bool>(&ev.value);
      const bool next = on ? *on : !s.delta_view;
      if (next && (s.applied.measure.is_community || s.requested.measure.is_community))
        throw Error(ErrorCode::InvalidPayload, "delta view needs a scalar measure");
      s.delta_view = next;
      return {std::move(s), {}};
    }
    case EventKind::Recompute: break;
    case EventKind::GetSnapshot: return {std::move(s), {}};
  }

  const bool run = s.auto_recompute || ev.kind == EventKind::Recompute;
  if (!run || !s.stale()) return {std::move(s), {}};
  TimingBreakdown t = apply_pending(s);
  s.last_timing = t;
  return {std::move(s), t};
}

// Blue-to-red spectral palette, stops evenly spaced on [0, 1].
inline constexpr std::array<std::uint32_t, 11> kSpectral = {0x5e4fa2, 0x3288bd, 0x66c2a5, 0xabdda4, 0xe6f598, 0xffffbf,
                                                            0xfee08b, 0xfdae61, 0xf46d43, 0xd53e4f, 0x9e0142};

// Min-max normalization onto [0, 1]; constant input maps to 0.5.
inline std::vector<double> color_positions(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.5);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  return out;
}

inline std::string spectral_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(kSpectral.size() - 1);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(pos), kSpectral.size() - 2);
  const double f = pos - static_cast<double>(k);
  auto channel = [&](int shift) {
    const double a = static_cast<double>((kSpectral[k] >> shift) & 0xff);
    const double b = static_cast<double>((kSpectral[k + 1] >> shift) & 0xff);
    return static_cast<unsigned>(std::lround(a + (b - a) * f));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(16), channel(8), channel(0));
  return buf;
}

// The per-node numbers the snapshot shows: scores, labels, or the change
// against the buffer in delta view.
inline std::vector<double> displayed_scores(const SessionState& s) {
  if (s.delta_view && !s.scores->is_partition()) {
    const NodeScores& now = s.scores->scores();
    return score_delta(now, s.score_buffer ? *s.score_buffer : now).values;
  }
  return s.scores->values();
}

inline nlohmann::json timing_to_json(const TimingBreakdown& t) {
  return {{"edge_update_ms", t.edge_update_ms},
          {"layout_ms", t.layout_ms},
          {"measure_ms", t.measure_ms},
          {"total_ms", t.total_ms}};
}

inline nlohmann::json snapshot(const SessionState& s) {
  using nlohmann::json;
  const Topology& top = s.trajectory->topology;
  json nodes = json::array();
  for (const Residue& r : top.residues)
    nodes.push_back({{"id", r.index}, {"name", r.name}, {"chain", std::string(1, r.chain_id)}, {"seq", r.seq_number}});
  json edges = json::array();
  for (const auto& [i, j] : s.rin->edges()) edges.push_back({i, j});
  auto coords = [](const Layout3D& l) {
    json out = json::array();
    for (const Vec3& p : l.coords) out.push_back({p.x, p.y, p.z});
    return out;
  };
  const std::vector<double> values = displayed_scores(s);
  const std::vector<double> positions = color_positions(values);
  json colors = json::array();
  for (double t : positions) colors.push_back(spectral_color(t));

  json doc;
  doc["type"] = "snapshot";
  doc["frame"] = s.applied.frame;
  doc["frame_count"] = s.trajectory->frame_count();
  doc["config"] = config_to_json(s.applied.config);
  doc["measure"] = std::string(to_string(s.applied.measure));
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["protein_layout"] = coords(*s.protein);
  doc["maxent_layout"] = coords(*s.maxent);
  doc["scores"] = values;
  doc["color_positions"] = positions;
  doc["colors"] = std::move(colors);
  doc["timing"] = timing_to_json(s.last_timing);
  doc["stale"] = s.stale();
  doc["auto_recompute"] = s.auto_recompute;
  doc["delta_view"] = s.delta_view;
  doc["cutoff_slider"] = {{"min", kCutoffSliderMin}, {"max", kCutoffSliderMax}, {"step", kCutoffSliderStep}};
  return doc;
}

inline nlohmann::json error_to_json(ErrorCode code, const std::string& message) {
  return {{"type", "error"}, {"code", std::string(to_string(code))}, {"message", message}};
}

}  // namespace rinx
