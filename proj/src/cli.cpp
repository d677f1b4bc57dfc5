/*
 * Copyright 2026 The gcnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gcnsim/cli.hpp"

#include "gcnsim/config_io.hpp"
#include "gcnsim/error.hpp"
#include "gcnsim/graph_io.hpp"
#include "gcnsim/model_zoo.hpp"
#include "gcnsim/report.hpp"
#include "gcnsim/simulator.hpp"
#include "gcnsim/sweep.hpp"
#include "gcnsim/synthetic.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

namespace gcnsim {

namespace {

namespace fs = std::filesystem;

// A referenced input that does not exist is a usage error, not an I/O one.
class MissingInput : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct Inputs {
  std::string graph;
  std::size_t vertices = 0;
  std::string features;
  std::size_t feature_len = 0;  // 0: the container's width, else 16
  bool undirected = false;
  std::string model = "gcn";
  std::string system;
  std::string base = "full";
  uint64_t seed = 1;
  std::string out = "out";
  std::map<std::string, std::string> overrides;  // schema key -> value
};

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

void require_file(const std::string& path) {
  if (!fs::exists(path)) throw MissingInput("no such file: " + path);
}

void add_inputs(CLI::App* cmd, Inputs& in, bool with_system) {
  cmd->add_option("--graph", in.graph, "graph: .hyg container or edge list")->required();
  cmd->add_option("--vertices", in.vertices, "vertex count (edge-list graphs)");
  cmd->add_option("--features", in.features, "feature file (.csv or raw float64)");
  cmd->add_option("--feature-len", in.feature_len, "feature width (default 16 for edge lists)");
  cmd->add_flag("--undirected", in.undirected, "store each edge-list edge in both directions");
  cmd->add_option("--model", in.model, "model config file or preset (gcn, gsc, gin, dfp)")
      ->capture_default_str();
  cmd->add_option("--seed", in.seed, "sampling seed")->capture_default_str();
  cmd->add_option("-o,--out", in.out, "output directory")->capture_default_str();
  if (!with_system) return;
  cmd->add_option("--system", in.system, "system config file");
  cmd->add_option("--base", in.base, "defaults the system config starts from")
      ->check(CLI::IsMember({"full", "desk"}))
      ->capture_default_str();
  for (const auto& field : system_config_schema()) {
    const std::string name = "--" + dashed(field.key);
    const std::string key = field.key;
    if (field.is_flag) {
      cmd->add_flag_callback(name, [&in, key] { in.overrides[key] = "true"; }, "enable: " + field.help)
          ->group("System");
      cmd->add_flag_callback("--no-" + dashed(field.key), [&in, key] { in.overrides[key] = "false"; },
                             "disable: " + field.help)
          ->group("System");
    } else {
      cmd->add_option_function<std::string>(
             name, [&in, key](const std::string& v) { in.overrides[key] = v; }, field.help)
          ->group("System");
    }
  }
}

CscGraph load_graph(const Inputs& in) {
  require_file(in.graph);
  CscGraph g;
  if (fs::path(in.graph).extension() == ".hyg") {
    g = read_container(fs::path(in.graph));
  } else {
    if (in.vertices == 0) throw ConfigError("--vertices is required for edge-list graphs");
    g = load_edge_list(fs::path(in.graph), in.vertices, in.undirected);
    g.features = random_features(in.vertices, in.feature_len ? in.feature_len : 16, 0);
  }
  if (!in.features.empty()) {
    require_file(in.features);
    const std::size_t len = in.feature_len ? in.feature_len : g.feature_len();
    g = load_features(fs::path(in.features), std::move(g), len);
  }
  g.validate();
  return g;
}

ModelConfig load_model(const Inputs& in, std::size_t input_len) {
  if (!fs::exists(in.model) && in.model.find_first_of("./") == std::string::npos) {
    return model_preset(in.model, input_len);
  }
  require_file(in.model);
  return load_model_config(fs::path(in.model), input_len);
}

SystemConfig load_system(const Inputs& in) {
  SystemConfig sys = in.base == "desk" ? SystemConfig::desk_scale() : SystemConfig::full_scale();
  if (!in.system.empty()) {
    require_file(in.system);
    sys = load_system_config(fs::path(in.system), sys);
  }
  for (const auto& [key, value] : in.overrides) apply_system_setting(sys, key, value);
  sys.validate();
  return sys;
}

void print_summary(std::ostream& out, const SimReport& r) {
  const LatencySummary lat = r.latency();
  out << "cycles " << r.total_cycles << ", DRAM bytes " << r.dram.total_bytes()
      << ", utilization " << r.utilization() << ", row hit rate " << r.hit_rate()
      << ", eliminated " << r.eliminated_ratio() << ", mean vertex latency " << lat.mean
      << ", energy " << r.energy.total() << " pJ\n";
}

int cmd_run(const Inputs& in, bool trace, std::ostream& out) {
  const CscGraph g = load_graph(in);
  const ModelConfig model = load_model(in, g.feature_len());
  const SystemConfig sys = load_system(in);
  ExperimentOptions opts;
  opts.seed = in.seed;
  opts.record_trace = trace;
  const SimResult res = run_experiment(g, model, sys, opts);
  write_report_dir(in.out, res.report, res.trace);
  print_summary(out, res.report);
  out << "wrote " << (fs::path(in.out) / "report.json").string() << '\n';
  return kExitOk;
}

int cmd_ablate(const Inputs& in, const std::string& toggle, std::ostream& out) {
  const CscGraph g = load_graph(in);
  const ModelConfig model = load_model(in, g.feature_len());
  const SystemConfig base = load_system(in);
  std::vector<std::string> toggles{toggle};
  if (toggle == "all") toggles = {"sparsity_elimination", "pipeline", "coordination"};
  fs::create_directories(in.out);
  std::ofstream csv(fs::path(in.out) / "ablation.csv");
  if (!csv) throw IoError("cannot write " + (fs::path(in.out) / "ablation.csv").string());
  csv << "toggle,cycles_on,cycles_off,speedup,dram_on,dram_off,utilization_on,utilization_off,"
         "hit_rate_on,hit_rate_off,mean_latency_on,mean_latency_off,energy_on,energy_off\n";
  for (const auto& t : toggles) {
    SystemConfig on = base;
    SystemConfig off = base;
    if (t == "pipeline") {
      if (on.pipeline_mode == PipelineMode::None) on.pipeline_mode = PipelineMode::Latency;
      off.pipeline_mode = PipelineMode::None;
    } else {
      apply_system_setting(on, t, "true");
      apply_system_setting(off, t, "false");
    }
    ExperimentOptions opts;
    opts.seed = in.seed;
    const SimReport r_on = run_experiment(g, model, on, opts).report;
    const SimReport r_off = run_experiment(g, model, off, opts).report;
    write_report_dir(fs::path(in.out) / t / "on", r_on);
    write_report_dir(fs::path(in.out) / t / "off", r_off);
    const double speedup =
        r_on.total_cycles ? static_cast<double>(r_off.total_cycles) / r_on.total_cycles : 0.0;
    csv << t << ',' << r_on.total_cycles << ',' << r_off.total_cycles << ',' << speedup << ','
        << r_on.dram.total_bytes() << ',' << r_off.dram.total_bytes() << ',' << r_on.utilization()
        << ',' << r_off.utilization() << ',' << r_on.hit_rate() << ',' << r_off.hit_rate() << ','
        << r_on.latency().mean << ',' << r_off.latency().mean << ',' << r_on.energy.total() << ','
        << r_off.energy.total() << '\n';
    out << t << ": speedup " << speedup << ", DRAM bytes " << r_on.dram.total_bytes() << " vs "
        << r_off.dram.total_bytes() << ", utilization " << r_on.utilization() << " vs "
        << r_off.utilization() << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const Inputs& in, const std::string& param, const std::vector<double>& values,
              std::size_t threads, std::ostream& out, std::ostream& err) {
  const CscGraph g = load_graph(in);
  const ModelConfig model = load_model(in, g.feature_len());
  const SystemConfig sys = load_system(in);
  ExperimentOptions opts;
  opts.seed = in.seed;
  const SweepResult res = sweep(g, model, sys, parse_sweep_parameter(param), values, opts, threads);
  fs::create_directories(in.out);
  {
    std::ofstream csv(fs::path(in.out) / "sweep.csv");
    if (!csv) throw IoError("cannot write " + (fs::path(in.out) / "sweep.csv").string());
    write_sweep_csv(csv, res);
  }
  {
    std::ofstream warn(fs::path(in.out) / "warnings.txt");
    for (const auto& w : res.warnings) {
      warn << w << '\n';
      err << "warning: " << w << '\n';
    }
  }
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    write_report_dir(fs::path(in.out) / ("point_" + std::to_string(i)), res.points[i].report);
  }
  write_sweep_csv(out, res);
  return kExitOk;
}

std::vector<std::pair<std::string, FeatureMatrix>> golden_outputs(const ReferenceRun& ref) {
  std::vector<std::pair<std::string, FeatureMatrix>> files;
  for (std::size_t l = 0; l < ref.layer_outputs.size(); ++l) {
    files.emplace_back("layer_" + std::to_string(l) + ".hyg", ref.layer_outputs[l]);
  }
  if (ref.pool) {
    files.emplace_back("pool_features.hyg", ref.pool->features);
    files.emplace_back("pool_adjacency.hyg", ref.pool->adjacency);
  }
  return files;
}

int cmd_golden(const Inputs& in, std::ostream& out) {
  const CscGraph g = load_graph(in);
  const ModelConfig model = load_model(in, g.feature_len());
  const ReferenceRun ref = run_reference(g, model, in.seed);
  const fs::path dir = fs::path(in.out) / "golden";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, m] : golden_outputs(ref)) {
    write_matrix(dir / name, m);
    out << "wrote " << (dir / name).string() << '\n';
  }
  return kExitOk;
}

int cmd_validate(const Inputs& in, std::string golden, std::ostream& out, std::ostream& err) {
  const CscGraph g = load_graph(in);
  const ModelConfig model = load_model(in, g.feature_len());
  const SystemConfig sys = load_system(in);
  if (golden.empty()) golden = (fs::path(in.out) / "golden").string();
  if (!fs::is_directory(golden)) throw MissingInput("no such golden directory: " + golden);
  ExperimentOptions opts;
  opts.seed = in.seed;
  opts.check_oracle = false;
  const SimResult res = run_experiment(g, model, sys, opts);

  ReferenceRun sim;
  sim.layer_outputs.assign(res.layer_outputs.begin(),
                           res.layer_outputs.begin() + static_cast<std::ptrdiff_t>(model.layers.size()));
  if (res.adjacency) sim.pool = DiffPoolResult{{}, {}, res.output, *res.adjacency};
  for (const auto& [name, m] : golden_outputs(sim)) {
    const fs::path path = fs::path(golden) / name;
    require_file(path.string());
    const FeatureMatrix expected = read_matrix(path);
    if (expected.rows() != m.rows() || expected.cols() != m.cols()) {
      err << name << ": shape " << m.rows() << "x" << m.cols() << " differs from golden "
          << expected.rows() << "x" << expected.cols() << '\n';
      return kExitMismatch;
    }
    if (auto at = first_mismatch(m, expected)) {
      err << name << ": first mismatch at vertex " << at->first << ", element " << at->second << '\n';
      return kExitMismatch;
    }
    out << name << ": match\n";
  }
  return kExitOk;
}

struct GenSpec {
  std::size_t vertices = 256;
  std::string edge_model = "er";
  double p = 0.05;
  double alpha = 2.1;
  double mean_degree = 8.0;
  std::size_t feature_len = 16;
  uint64_t seed = 1;
  std::string out = "data";
};

int cmd_gen(const GenSpec& spec, std::ostream& out) {
  CscGraph g = spec.edge_model == "er" ? erdos_renyi(spec.vertices, spec.p, spec.seed)
                                       : power_law(spec.vertices, spec.alpha, spec.mean_degree, spec.seed);
  g.features = random_features(spec.vertices, spec.feature_len, spec.seed);
  const fs::path dir(spec.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    std::ofstream edges(dir / "edges.txt");
    if (!edges) throw IoError("cannot write " + (dir / "edges.txt").string());
    write_edge_list(edges, g);
  }
  {
    std::ofstream feats(dir / "features.csv");
    if (!feats) throw IoError("cannot write " + (dir / "features.csv").string());
    write_features_csv(feats, g.features);
  }
  write_container(dir / "graph.hyg", g);
  out << "wrote " << g.num_vertices << " vertices, " << g.num_edges() << " edges to " << dir.string()
      << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-level simulator of a two-engine GCN inference accelerator", "gcnsim"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand help for every subcommand");

  Inputs in;
  bool trace = false;
  auto* run = app.add_subcommand("run", "simulate one experiment and write its report");
  add_inputs(run, in, true);
  run->add_flag("--trace", trace, "also write the DRAM request trace");

  std::string toggle = "all";
  auto* ablate = app.add_subcommand("ablate", "paired on/off runs of an optimization");
  add_inputs(ablate, in, true);
  ablate->add_option("--toggle", toggle, "optimization to ablate")
      ->check(CLI::IsMember({"all", "sparsity_elimination", "pipeline", "coordination"}))
      ->capture_default_str();

  std::string param;
  std::vector<double> values;
  std::size_t threads = 0;
  auto* sw = app.add_subcommand("sweep", "one experiment per parameter value");
  add_inputs(sw, in, true);
  sw->add_option("--param", param, "sampling_factor, agg_buffer_capacity or module_granularity")
      ->required();
  sw->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sw->add_option("--threads", threads, "worker threads (default: HYGCN_SIM_THREADS or all cores)");

  auto* golden = app.add_subcommand("golden", "write reference per-layer outputs to OUT/golden");
  add_inputs(golden, in, false);

  std::string golden_dir;
  auto* validate = app.add_subcommand("validate", "simulate and compare against golden outputs");
  add_inputs(validate, in, true);
  validate->add_option("--golden", golden_dir, "golden directory (default OUT/golden)");

  GenSpec gen_spec;
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--vertices", gen_spec.vertices, "vertex count")->capture_default_str();
  gen->add_option("--edge-model", gen_spec.edge_model, "er or power-law")
      ->check(CLI::IsMember({"er", "power-law"}))
      ->capture_default_str();
  gen->add_option("--p", gen_spec.p, "edge probability (er)")->capture_default_str();
  gen->add_option("--alpha", gen_spec.alpha, "degree exponent (power-law)")->capture_default_str();
  gen->add_option("--mean-degree", gen_spec.mean_degree, "mean degree (power-law)")
      ->capture_default_str();
  gen->add_option("--feature-len", gen_spec.feature_len, "feature width")->capture_default_str();
  gen->add_option("--seed", gen_spec.seed, "generator seed")->capture_default_str();
  gen->add_option("-o,--out", gen_spec.out, "output directory")->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(in, trace, out);
    if (*ablate) return cmd_ablate(in, toggle, out);
    if (*sw) return cmd_sweep(in, param, values, threads, out, err);
    if (*golden) return cmd_golden(in, out);
    if (*validate) return cmd_validate(in, golden_dir, out, err);
    if (*gen) return cmd_gen(gen_spec, out);
  } catch (const OracleMismatch& e) {
    err << "oracle mismatch: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace gcnsim
