#include <gtest/gtest.h>

#include <sstream>

#include "rinx/bench.hpp"
#include "support.hpp"

using namespace rinx;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t fields(const std::string& line) { return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1; }

}  // namespace

TEST(Bench, OneRecordPerCellWithMedians) {
  BenchConfig cfg;
  cfg.protein_id = "toy";
  cfg.cutoffs = {4.5, 6.0};
  cfg.measures = {MeasureSelector::scalar(Measure::Degree), MeasureSelector::community(CommunityMethod::PLM)};
  cfg.frames = {0, 1};
  const auto records = run_benchmark(support::bundle(2, 10, 2), cfg);
  ASSERT_EQ(records.size(), 3u * 2u * 2u * 2u);
  for (const auto& r : records) {
    EXPECT_FALSE(r.failed) << r.error;
    EXPECT_EQ(r.repetitions, 3);
    EXPECT_EQ(r.n_nodes, 2u * 10u + 5u);
    EXPECT_GE(r.timing.total_ms, r.timing.layout_ms);
    if (r.event_kind == BenchEvent::MeasureSwitch) {
      EXPECT_EQ(r.timing.layout_ms, 0.0);
      EXPECT_EQ(r.timing.edge_update_ms, 0.0);
      EXPECT_GT(r.timing.measure_ms, 0.0);
    } else {
      EXPECT_GT(r.timing.layout_ms, 0.0);
    }
  }
}

TEST(Bench, CsvShape) {
  BenchConfig cfg;
  cfg.protein_id = "a,b";
  cfg.cutoffs = {5.0};
  cfg.measures = {MeasureSelector::scalar(Measure::Closeness)};
  cfg.frames = {1, 7};
  cfg.events = {BenchEvent::FrameSwitch};
  const auto records = run_benchmark(support::bundle(2, 10, 2), cfg);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_FALSE(records[0].failed);
  EXPECT_TRUE(records[1].failed);
  std::ostringstream out;
  write_bench_csv(records, out);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "protein_id,n_nodes,n_edges,event_kind,cutoff,measure,edge_update_ms,layout_ms,measure_ms,total_ms,repetitions");
  EXPECT_EQ(lines[1].rfind("\"a,b\",", 0), 0u);
  EXPECT_EQ(fields(lines[1]), 12u);  // the quoted id holds one comma
  EXPECT_NE(lines[1].find(",frame_switch,5,closeness,"), std::string::npos);
  EXPECT_EQ(lines[1].substr(lines[1].size() - 2), ",3");
  EXPECT_EQ(lines[2].substr(lines[2].size() - 6), ",,,,,0");
}

TEST(Bench, RejectsBadConfig) {
  BenchConfig cfg;
  cfg.cutoffs = {5.0};
  cfg.measures = {MeasureSelector::scalar(Measure::Degree)};
  cfg.frames = {0};
  EXPECT_THROW(run_benchmark(support::bundle(2, 10, 1), cfg), Error);
  cfg.repetitions = 2;
  EXPECT_THROW(run_benchmark(support::bundle(2, 10, 2), cfg), Error);
}
