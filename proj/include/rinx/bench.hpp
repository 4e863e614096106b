#pragma once

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rinx/error.hpp"
#include "rinx/session.hpp"

namespace rinx {

enum class BenchEvent { MeasureSwitch, CutoffSwitch, FrameSwitch };

inline std::string_view to_string(BenchEvent e) {
  switch (e) {
    case BenchEvent::MeasureSwitch: return "measure_switch";
    case BenchEvent::CutoffSwitch: return "cutoff_switch";
    case BenchEvent::FrameSwitch: return "frame_switch";
  }
  return "measure_switch";
}

struct BenchRecord {
  std::string protein_id;
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  BenchEvent event_kind = BenchEvent::MeasureSwitch;
  double cutoff = 0.0;
  MeasureSelector measure;
  std::size_t frame = 0;
  // Medians over repetitions.
  TimingBreakdown timing;
  int repetitions = 0;
  bool failed = false;
  std::string error;
};

struct BenchConfig {
  std::string protein_id;
  std::vector<double> cutoffs;
  std::vector<MeasureSelector> measures;
  std::vector<std::size_t> frames;
  std::vector<BenchEvent> events = {BenchEvent::MeasureSwitch, BenchEvent::CutoffSwitch, BenchEvent::FrameSwitch};
  int repetitions = 3;
  DistanceCriterion criterion = DistanceCriterion::MinimumAtomDistance;
  // Every layout starts from scratch.
  bool cold = false;
  SessionOptions session;
};

namespace bench_detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// The slider position a cell switches away from.
inline double previous_cutoff(const std::vector<double>& cutoffs, std::size_t k) {
  if (cutoffs.size() > 1) return k > 0 ? cutoffs[k - 1] : cutoffs[1];
  return cutoffs[k] > 0.5 ? cutoffs[k] - 0.5 : cutoffs[k] + 0.5;
}

inline MeasureSelector other_measure(const MeasureSelector& m) {
  const auto degree = MeasureSelector::scalar(Measure::Degree);
  return m == degree ? MeasureSelector::scalar(Measure::Closeness) : degree;
}

}  // namespace bench_detail

// Each cell starts from a session sitting at the neighbouring slider value
// and times the switch event. States are immutable, so every repetition
// replays the same transition from the same starting state.
inline std::vector<BenchRecord> run_benchmark(std::shared_ptr<const Trajectory> traj, const BenchConfig& cfg) {
  using namespace bench_detail;
  if (!traj || traj->frame_count() < 2) throw Error(ErrorCode::InvalidConfig, "benchmark needs at least 2 frames");
  if (cfg.repetitions < 3) throw Error(ErrorCode::InvalidConfig, "benchmark needs at least 3 repetitions");
  if (cfg.cutoffs.empty() || cfg.measures.empty() || cfg.frames.empty())
    throw Error(ErrorCode::InvalidConfig, "cutoffs, measures and frames must be non-empty");

  SessionOptions opts = cfg.session;
  opts.warm_start = !cfg.cold;
  std::vector<BenchRecord> out;

  auto run_cell = [&](BenchEvent kind, std::size_t frame, double cutoff, const MeasureSelector& measure,
                      std::size_t from_frame, double from_cutoff, const MeasureSelector& from_measure,
                      const UpdateEvent& ev) {
    BenchRecord rec;
    rec.protein_id = cfg.protein_id;
    rec.event_kind = kind;
    rec.cutoff = cutoff;
    rec.measure = measure;
    rec.frame = frame;
    try {
      if (frame >= traj->frame_count())
        throw Error(ErrorCode::InvalidPayload, "frame " + std::to_string(frame) + " out of range");
      RinConfig base_config{cfg.criterion, from_cutoff, false};
      SessionState base = create_session(traj, base_config, from_measure, opts);
      if (from_frame != 0) base = handle_event(base, UpdateEvent::set_frame(from_frame)).state;
      std::vector<double> edge, layout, measure_ms, total;
      for (int r = 0; r < cfg.repetitions; ++r) {
        EventResult res = handle_event(base, ev);
        edge.push_back(res.timing.edge_update_ms);
        layout.push_back(res.timing.layout_ms);
        measure_ms.push_back(res.timing.measure_ms);
        total.push_back(res.timing.total_ms);
        rec.n_nodes = res.state.rin->node_count();
        rec.n_edges = res.state.rin->edge_count();
      }
      rec.timing = {median(edge), median(layout), median(measure_ms), median(total)};
      rec.repetitions = cfg.repetitions;
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
      std::clog << "rinx: bench cell " << to_string(kind) << " cutoff " << cutoff << " measure "
                << to_string(measure) << " frame " << frame << " failed: " << e.what() << '\n';
    }
    out.push_back(std::move(rec));
  };

  for (BenchEvent kind : cfg.events) {
    for (std::size_t k = 0; k < cfg.cutoffs.size(); ++k) {
      const double cutoff = cfg.cutoffs[k];
      for (const MeasureSelector& m : cfg.measures) {
        for (std::size_t f : cfg.frames) {
          switch (kind) {
            case BenchEvent::MeasureSwitch:
              run_cell(kind, f, cutoff, m, f, cutoff, other_measure(m), UpdateEvent::set_measure(m));
              break;
            case BenchEvent::CutoffSwitch:
              run_cell(kind, f, cutoff, m, f, previous_cutoff(cfg.cutoffs, k), m, UpdateEvent::set_cutoff(cutoff));
              break;
            case BenchEvent::FrameSwitch:
              run_cell(kind, f, cutoff, m, (f + 1) % traj->frame_count(), cutoff, m, UpdateEvent::set_frame(f));
              break;
          }
        }
      }
    }
  }
  return out;
}

inline constexpr const char* kBenchCsvHeader =
    "protein_id,n_nodes,n_edges,event_kind,cutoff,measure,edge_update_ms,layout_ms,measure_ms,total_ms,repetitions";

// Failed cells keep their row with empty timing fields and 0 repetitions.
inline void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kBenchCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    std::string id = r.protein_id;
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : id) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      id = quoted + "\"";
    }
    out << id << ',' << r.n_nodes << ',' << r.n_edges << ',' << to_string(r.event_kind) << ',' << r.cutoff << ','
        << to_string(r.measure) << ',';
    if (r.failed) {
      out << ",,,,0\n";
      continue;
    }
    std::ostringstream times;
    times << std::fixed << std::setprecision(3) << r.timing.edge_update_ms << ',' << r.timing.layout_ms << ','
          << r.timing.measure_ms << ',' << r.timing.total_ms;
    out << times.str() << ',' << r.repetitions << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing benchmark CSV");
}

}  // namespace rinx
