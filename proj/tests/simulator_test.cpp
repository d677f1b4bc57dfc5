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

#include "gcnsim/config_io.hpp"
#include "gcnsim/error.hpp"
#include "gcnsim/report.hpp"
#include "gcnsim/simulator.hpp"
#include "gcnsim/sweep.hpp"
#include "test_util.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gcnsim {
namespace {

using testing::random_graph;

TEST(Simulator, EveryToggleCombinationPassesTheOracle) {
  const CscGraph g = random_graph(160, 0.04, 32, 31);
  for (const char* name : {"gcn", "gsc", "gin", "dfp"}) {
    const ModelConfig m = model_preset(name, 32);
    for (int mask = 0; mask < 12; ++mask) {
      SystemConfig sys = SystemConfig::desk_scale();
      sys.sparsity_elimination_enabled = mask & 1;
      sys.coordination_enabled = mask & 2;
      sys.pipeline_mode = static_cast<PipelineMode>(mask >> 2);
      EXPECT_NO_THROW(run_experiment(g, m, sys, {7})) << name << " mask " << mask;
    }
  }
}

TEST(Simulator, ReportsAreDeterministic) {
  const CscGraph g = random_graph(128, 0.05, 32, 2);
  const ModelConfig m = graphsage_model(32, 32, 2, 5);
  ExperimentOptions opt;
  opt.seed = 11;
  opt.record_trace = true;
  const auto a = run_experiment(g, m, SystemConfig::desk_scale(), opt);
  const auto b = run_experiment(g, m, SystemConfig::desk_scale(), opt);
  EXPECT_EQ(report_json(a.report), report_json(b.report));
  ASSERT_EQ(a.trace.size(), b.trace.size());
  std::ostringstream ta, tb;
  write_trace_csv(ta, a.trace);
  write_trace_csv(tb, b.trace);
  EXPECT_EQ(ta.str(), tb.str());
}

TEST(Simulator, RatiosAndTotals) {
  const CscGraph g = random_graph(200, 0.03, 64, 4);
  const auto r = run_experiment(g, gcn_model(64), SystemConfig::desk_scale()).report;
  for (double ratio : {r.utilization(), r.hit_rate(), r.eliminated_ratio(), r.residual_sparsity()}) {
    EXPECT_GE(ratio, 0.0);
    EXPECT_LE(ratio, 1.0);
  }
  EXPECT_DOUBLE_EQ(r.eliminated_ratio() + r.residual_sparsity(), 1.0);
  uint64_t channel_bytes = 0;
  for (const auto& ch : r.dram.channels) channel_bytes += ch.bytes;
  EXPECT_EQ(channel_bytes, r.dram.total_bytes());
  double parts = 0;
  for (std::size_t i = 0; i < kNumEnergyComponents; ++i) {
    parts += r.energy.get(static_cast<EnergyComponent>(i));
  }
  EXPECT_DOUBLE_EQ(parts, r.energy.total());
  EXPECT_DOUBLE_EQ(r.energy.get(EnergyComponent::Dram), r.dram.total_bytes() * 56.0);
  EXPECT_EQ(r.vertex_latencies.size(), 2u * 200);
  EXPECT_GE(r.total_cycles, r.dram.last_completion);
}

TEST(Simulator, ConfigEchoReproducesTheRun) {
  const CscGraph g = random_graph(96, 0.05, 16, 8);
  SystemConfig sys = SystemConfig::desk_scale();
  sys.pipeline_mode = PipelineMode::Energy;
  sys.modules_per_group = 2;
  const auto first = run_experiment(g, gin_model(16, 32), sys, {5});
  const auto echo = nlohmann::ordered_json::parse(report_json(first.report));
  std::ostringstream model_text, sys_text;
  for (const auto& [k, v] : echo["model"].items()) model_text << k << " = " << v.get<std::string>() << '\n';
  for (const auto& [k, v] : echo["system"].items()) sys_text << k << " = " << v.get<std::string>() << '\n';
  std::istringstream model_in(model_text.str()), sys_in(sys_text.str());
  const ModelConfig model = parse_model_config(model_in, 16);
  const SystemConfig replay_sys = parse_system_config(sys_in);
  const auto replay = run_experiment(g, model, replay_sys, {echo["seed"].get<uint64_t>()});
  EXPECT_EQ(report_json(first.report), report_json(replay.report));
}

TEST(Report, LatencySummaryUsesNearestRank) {
  std::vector<uint64_t> l(100);
  for (uint64_t i = 0; i < 100; ++i) l[i] = 100 - i;
  const LatencySummary s = summarize_latencies(l);
  EXPECT_EQ(s.count, 100u);
  EXPECT_EQ(s.p50, 50u);
  EXPECT_EQ(s.p99, 99u);
  EXPECT_EQ(s.max, 100u);
  EXPECT_DOUBLE_EQ(s.mean, 50.5);
  EXPECT_EQ(summarize_latencies({}).count, 0u);
}

TEST(Report, DirectoryLayout) {
  const CscGraph g = random_graph(64, 0.05, 16, 1);
  ExperimentOptions opt;
  opt.record_trace = true;
  const auto r = run_experiment(g, gcn_model(16, 16), SystemConfig::desk_scale(), opt);
  const auto dir = std::filesystem::temp_directory_path() / "gcnsim_report_test";
  std::filesystem::remove_all(dir);
  write_report_dir(dir, r.report, r.trace);
  for (const char* f : {"report.json", "traffic.csv", "latency_hist.csv", "trace.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "report.json");
  const auto j = nlohmann::ordered_json::parse(in);
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["total_cycles"].get<uint64_t>(), r.report.total_cycles);
  EXPECT_EQ(j["dram"]["total_bytes"].get<uint64_t>(), r.report.dram.total_bytes());
  std::ifstream hist(dir / "latency_hist.csv");
  std::string line;
  uint64_t count = 0;
  std::getline(hist, line);
  while (std::getline(hist, line)) count += std::stoull(line.substr(line.rfind(',') + 1));
  EXPECT_EQ(count, r.report.vertex_latencies.size());
  std::filesystem::remove_all(dir);
}

TEST(Sweep, InvalidValuesBecomeWarnings) {
  const CscGraph g = random_graph(64, 0.05, 16, 1);
  const auto result = sweep(g, gcn_model(16, 16), SystemConfig::desk_scale(),
                            SweepParameter::ModuleGranularity, {1, 3, 2, 0}, {}, 2);
  ASSERT_EQ(result.points.size(), 2u);
  EXPECT_EQ(result.points[0].value, 1.0);
  EXPECT_EQ(result.points[1].value, 2.0);
  EXPECT_EQ(result.warnings.size(), 2u);
  std::ostringstream csv;
  write_sweep_csv(csv, result);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_THROW(parse_sweep_parameter("clock"), ConfigError);
}

TEST(Sweep, ParallelMatchesSerial) {
  const CscGraph g = random_graph(96, 0.05, 16, 3);
  const std::vector<double> values{1, 2, 4, 8};
  const auto serial = sweep(g, gcn_model(16, 16), SystemConfig::desk_scale(),
                            SweepParameter::SamplingFactor, values, {}, 1);
  const auto parallel = sweep(g, gcn_model(16, 16), SystemConfig::desk_scale(),
                              SweepParameter::SamplingFactor, values, {}, 4);
  ASSERT_EQ(serial.points.size(), parallel.points.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    EXPECT_EQ(report_json(serial.points[i].report), report_json(parallel.points[i].report));
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    EXPECT_GE(serial.points[i].report.eliminated_ratio(),
              serial.points[i - 1].report.eliminated_ratio());
  }
}

}  // namespace
}  // namespace gcnsim
