#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rinx/rinx.hpp"
#include "rinx/server.hpp"

namespace {

using namespace rinx;

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, path + ": not valid JSON: " + e.what());
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "not a number: '" + item + "'");
    }
  }
  return out;
}

std::vector<std::size_t> parse_frames(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "not a frame index: '" + item + "'");
    }
  }
  return out;
}

std::vector<MeasureSelector> parse_measures(const std::string& text) {
  std::vector<MeasureSelector> out;
  for (const auto& item : split_list(text)) {
    auto m = parse_measure(item);
    if (!m) throw Error(ErrorCode::InvalidConfig, "unknown measure '" + item + "'");
    out.push_back(*m);
  }
  return out;
}

std::optional<TrajectoryFormat> format_option(const std::string& name) {
  if (name.empty()) return std::nullopt;
  auto f = parse_trajectory_format(name);
  if (!f) throw Error(ErrorCode::InvalidConfig, "format must be pdb or json");
  return f;
}

struct BuildArgs {
  std::string input, format, criterion = "min", out, graph_format;
  double cutoff = 4.5;
  std::size_t frame = 0;
  bool exclude_backbone = false;
};

int run_build(const BuildArgs& a) {
  const Trajectory traj = load_trajectory(a.input, format_option(a.format));
  auto criterion = parse_criterion(a.criterion);
  if (!criterion) throw Error(ErrorCode::InvalidConfig, "criterion must be calpha, com or min");
  RinConfig config{*criterion, a.cutoff, a.exclude_backbone};
  const Rin rin = build_rin(traj.frame(a.frame), traj.topology, config);
  const bool graphml = a.graph_format == "graphml" || (a.graph_format.empty() && ends_with(a.out, ".graphml"));
  std::ostringstream out;
  export_graph(rin, graphml ? GraphFormat::GraphML : GraphFormat::Json, out, &traj.topology);
  write_output(a.out, out.str());
  std::clog << "rin: " << rin.node_count() << " nodes, " << rin.edge_count() << " edges\n";
  return 0;
}

struct AnalyzeArgs {
  std::string graph, measure, out, closeness = "harmonic";
  double gamma = 1.0;
  std::uint64_t seed = 0;
};

int run_analyze(const AnalyzeArgs& a) {
  const Rin rin = graph_from_json(read_json_file(a.graph));
  auto sel = parse_measure(a.measure);
  if (!sel) throw Error(ErrorCode::InvalidConfig, "unknown measure '" + a.measure + "'");
  AnalyticsOptions opts;
  opts.gamma = a.gamma;
  opts.seed = a.seed;
  if (a.closeness == "component")
    opts.closeness = ClosenessVariant::ComponentRestricted;
  else if (a.closeness != "harmonic")
    throw Error(ErrorCode::InvalidConfig, "closeness variant must be harmonic or component");
  const MeasureResult r = compute_measure(rin, *sel, opts);
  nlohmann::json doc = measure_to_json(r);
  if (r.is_partition()) doc["modularity"] = modularity(rin, r.partition(), a.gamma);
  write_output(a.out, doc.dump() + "\n");
  return 0;
}

struct LayoutArgs {
  std::string graph, warm, out;
  std::uint64_t seed = 0;
};

int run_layout(const LayoutArgs& a) {
  const Rin rin = graph_from_json(read_json_file(a.graph));
  LayoutParams params;
  params.seed = a.seed;
  std::optional<Layout3D> warm;
  if (!a.warm.empty()) warm = layout_from_json(read_json_file(a.warm));
  const Layout3D layout = maxent_stress_layout(rin, params, warm);
  write_output(a.out, layout_to_json(layout, params).dump() + "\n");
  std::clog << "rin: layout " << (layout.converged ? "converged" : "stopped") << " after " << layout.rounds
            << " rounds\n";
  return 0;
}

struct ServeArgs {
  std::string address = "127.0.0.1", data, static_dir, dump;
  unsigned short port = 8080;
  bool cold = false;
};

int run_serve(const ServeArgs& a) {
  ServerOptions opts;
  opts.address = a.address;
  opts.port = a.port;
  opts.data_dir = a.data;
  opts.static_dir = a.static_dir;
  opts.dump_dir = a.dump;
  opts.session.warm_start = !a.cold;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Server server(opts);
  const unsigned short port = server.start();
  std::clog << "rin: serving on http://" << a.address << ":" << port << "\n";
  int sig = 0;
  sigwait(&signals, &sig);
  std::clog << "rin: shutting down\n";
  server.stop();
  return 0;
}

struct BenchArgs {
  std::string input, format, cutoffs = "4.5,8.5", measures = "degree,closeness,betweenness,pagerank,plm",
                             frames = "0,1", out = "-", criterion = "min", protein_id, events;
  int reps = 3;
  bool cold = false;
};

int run_bench(const BenchArgs& a) {
  auto traj = std::make_shared<const Trajectory>(load_trajectory(a.input, format_option(a.format)));
  BenchConfig cfg;
  cfg.protein_id = a.protein_id.empty() ? a.input : a.protein_id;
  cfg.cutoffs = parse_doubles(a.cutoffs);
  cfg.measures = parse_measures(a.measures);
  cfg.frames = parse_frames(a.frames);
  cfg.repetitions = a.reps;
  cfg.cold = a.cold;
  auto criterion = parse_criterion(a.criterion);
  if (!criterion) throw Error(ErrorCode::InvalidConfig, "criterion must be calpha, com or min");
  cfg.criterion = *criterion;
  if (!a.events.empty()) {
    cfg.events.clear();
    for (const auto& e : split_list(a.events)) {
      if (e == "measure") cfg.events.push_back(BenchEvent::MeasureSwitch);
      else if (e == "cutoff") cfg.events.push_back(BenchEvent::CutoffSwitch);
      else if (e == "frame") cfg.events.push_back(BenchEvent::FrameSwitch);
      else throw Error(ErrorCode::InvalidConfig, "event must be measure, cutoff or frame");
    }
  }
  const auto records = run_benchmark(traj, cfg);
  std::ostringstream csv;
  write_bench_csv(records, csv);
  write_output(a.out, csv.str());
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.failed;
  return failed ? 2 : 0;
}

struct SynthArgs {
  std::size_t helices = 3, length = 21, loop = 5, frames = 1;
  std::uint64_t seed = 7;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  HelixBundleSpec spec;
  spec.helices = a.helices;
  spec.helix_length = a.length;
  spec.loop_length = a.loop;
  spec.frames = a.frames;
  spec.seed = a.seed;
  const Trajectory traj = synthetic_helix_bundle(spec);
  write_output(a.out, ends_with(a.out, ".json") ? export_traj_json(traj) + "\n" : write_pdb(traj));
  std::clog << "rin: " << traj.topology.residues.size() << " residues, " << traj.frame_count() << " frames\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residue interaction network builder, analytics and session server"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: all cores)");

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build a RIN from one trajectory frame");
  b->add_option("--input", build.input, "PDB or trajectory JSON")->required()->check(CLI::ExistingFile);
  b->add_option("--format", build.format, "pdb|json (default: by extension)")->check(CLI::IsMember({"pdb", "json"}));
  b->add_option("--criterion", build.criterion, "calpha|com|min")->check(CLI::IsMember({"calpha", "com", "min"}));
  b->add_option("--cutoff", build.cutoff, "Cut-off in Å (inclusive)");
  b->add_option("--frame", build.frame, "Frame index");
  b->add_flag("--exclude-backbone", build.exclude_backbone, "Drop edges between sequence neighbours");
  b->add_option("--graph-format", build.graph_format, "json|graphml (default: by extension)")
      ->check(CLI::IsMember({"json", "graphml"}));
  b->add_option("--out", build.out, "Output file, - for stdout")->required();

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Compute a centrality or community measure");
  an->add_option("--graph", analyze.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  an->add_option("--measure", analyze.measure, "degree|closeness|betweenness|pagerank|pagerank-norm|plm|leiden")
      ->required();
  an->add_option("--gamma", analyze.gamma, "Modularity resolution");
  an->add_option("--seed", analyze.seed, "Seed for Leiden refinement");
  an->add_option("--closeness", analyze.closeness, "harmonic|component");
  an->add_option("--out", analyze.out, "Output file, - for stdout")->required();

  LayoutArgs layout;
  auto* l = app.add_subcommand("layout", "Maxent-stress 3D layout of a graph");
  l->add_option("--graph", layout.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
  l->add_option("--seed", layout.seed, "Initialization seed");
  l->add_option("--warm", layout.warm, "Layout JSON to start from")->check(CLI::ExistingFile);
  l->add_option("--out", layout.out, "Output file, - for stdout")->required();

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Run the session server");
  s->add_option("--port", serve.port, "TCP port");
  s->add_option("--address", serve.address, "Bind address");
  s->add_option("--data", serve.data, "Directory for server-side trajectory paths");
  s->add_option("--static", serve.static_dir, "Directory of static assets");
  s->add_option("--dump", serve.dump, "Write session snapshots here on shutdown");
  s->add_flag("--cold", serve.cold, "Never warm-start layouts");

  BenchArgs bench;
  auto* be = app.add_subcommand("bench", "Time measure, cut-off and frame switches");
  be->add_option("--input", bench.input, "PDB or trajectory JSON")->required()->check(CLI::ExistingFile);
  be->add_option("--format", bench.format, "pdb|json (default: by extension)")->check(CLI::IsMember({"pdb", "json"}));
  be->add_option("--cutoffs", bench.cutoffs, "Comma-separated cut-offs in Å");
  be->add_option("--measures", bench.measures, "Comma-separated measures");
  be->add_option("--frames", bench.frames, "Comma-separated frame indices");
  be->add_option("--events", bench.events, "Comma-separated subset of measure,cutoff,frame");
  be->add_option("--criterion", bench.criterion, "calpha|com|min")->check(CLI::IsMember({"calpha", "com", "min"}));
  be->add_option("--protein-id", bench.protein_id, "protein_id column (default: input path)");
  be->add_option("--reps", bench.reps, "Repetitions per cell (>= 3)");
  be->add_option("--out", bench.out, "CSV file, - for stdout");
  be->add_flag("--cold", bench.cold, "Start every layout from scratch");

  SynthArgs synth;
  auto* sy = app.add_subcommand("synth", "Write a synthetic helix-bundle trajectory");
  sy->add_option("--helices", synth.helices, "Number of helices");
  sy->add_option("--length", synth.length, "Residues per helix");
  sy->add_option("--loop", synth.loop, "Residues per connecting loop");
  sy->add_option("--frames", synth.frames, "Number of frames");
  sy->add_option("--seed", synth.seed, "Noise seed");
  sy->add_option("--out", synth.out, "Output .pdb or .json")->required();

  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);
  try {
    if (*b) return run_build(build);
    if (*an) return run_analyze(analyze);
    if (*l) return run_layout(layout);
    if (*s) return run_serve(serve);
    if (*be) return run_bench(bench);
    if (*sy) return run_synth(synth);
  } catch (const std::exception& e) {
    std::cerr << "rin: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
