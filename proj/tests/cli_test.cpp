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
#include "gcnsim/config.hpp"
#include "gcnsim/graph_io.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gcnsim {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gcnsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path gen(std::size_t n, double p, uint64_t seed, const std::string& name = "data") {
    const auto out = dir_ / name;
    const auto r = cli({"gen", "--vertices", std::to_string(n), "--p", std::to_string(p),
                        "--feature-len", "16", "--seed", std::to_string(seed), "-o", out.string()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return out;
  }

  fs::path dir_;
};

TEST_F(CliTest, RunWritesAReport) {
  const auto data = gen(64, 0.05, 1);
  std::ofstream(dir_ / "gcn.cfg") << "preset = gcn\nhidden = 16\n";
  std::ofstream(dir_ / "desk.cfg") << "input_buffer_bytes = 32768\n";
  const auto out = dir_ / "out";
  const auto r = cli({"run", "--graph", (data / "graph.hyg").string(), "--model",
                      (dir_ / "gcn.cfg").string(), "--system", (dir_ / "desk.cfg").string(),
                      "--seed", "7", "-o", out.string(), "--trace"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"report.json", "traffic.csv", "latency_hist.csv", "trace.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto j = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["system"]["input_buffer_bytes"], "32768");
  EXPECT_EQ(j["graph"]["num_vertices"], 64);
}

TEST_F(CliTest, MissingFileIsAUsageError) {
  const auto missing = (dir_ / "nope.hyg").string();
  const auto r = cli({"run", "--graph", missing, "--model", "gcn", "-o", (dir_ / "o").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find(missing), std::string::npos);
  const auto m = cli({"run", "--graph", missing, "--model", (dir_ / "m.cfg").string()});
  EXPECT_EQ(m.code, kExitUsage);
}

TEST_F(CliTest, OverridesAreEchoed) {
  const auto data = gen(48, 0.05, 2);
  const auto out = dir_ / "out";
  const auto r = cli({"run", "--graph", (data / "graph.hyg").string(), "--model", "gcn",
                      "--pipeline", "none", "--no-coordination", "--modules-per-group", "2",
                      "-o", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(j["system"]["pipeline"], "none");
  EXPECT_EQ(j["system"]["coordination"], "false");
  EXPECT_EQ(j["system"]["modules_per_group"], "2");
  EXPECT_GT(j["dram"]["intermediate_bytes"].get<uint64_t>(), 0u);
}

TEST_F(CliTest, BadValuesAreUsageErrors) {
  const auto data = gen(16, 0.1, 3);
  const auto graph = (data / "graph.hyg").string();
  EXPECT_EQ(cli({"run", "--graph", graph, "--model", "gcn", "--modules-per-group", "3"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"run", "--graph", graph, "--model", "resnet"}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"run", "--graph", graph, "--model", "gcn", "--simd-cores", "many"}).code,
            kExitUsage);
}

TEST_F(CliTest, GoldenThenValidate) {
  const auto data = gen(10, 0.2, 4);
  const auto graph = (data / "graph.hyg").string();
  const auto out = dir_ / "out";
  for (const char* model : {"gcn", "dfp"}) {
    ASSERT_EQ(cli({"golden", "--graph", graph, "--model", model, "-o", out.string()}).code, kExitOk);
    const auto v = cli({"validate", "--graph", graph, "--model", model, "-o", out.string()});
    EXPECT_EQ(v.code, kExitOk) << model << ": " << v.err;
  }
  ASSERT_EQ(cli({"golden", "--graph", graph, "--model", "gcn", "-o", out.string()}).code, kExitOk);
  const auto other = cli({"validate", "--graph", graph, "--model", "gin", "-o", out.string()});
  EXPECT_EQ(other.code, kExitMismatch);
}

TEST_F(CliTest, GoldensDependOnSeedOnlyWithSampling) {
  const auto data = gen(128, 0.2, 5);
  const auto graph = (data / "graph.hyg").string();
  auto golden = [&](const std::string& model, const std::string& seed) {
    const auto out = dir_ / (model + seed);
    EXPECT_EQ(cli({"golden", "--graph", graph, "--model", model, "--seed", seed, "-o",
                   out.string()}).code,
              kExitOk);
    return slurp(out / "golden" / "layer_1.hyg");
  };
  std::ofstream(dir_ / "gsc.cfg") << "preset = gsc\nhidden = 16\nsamples = 3\n";
  const auto gsc = (dir_ / "gsc.cfg").string();
  EXPECT_NE(golden(gsc, "1"), golden(gsc, "2"));
  EXPECT_EQ(golden("gcn", "1"), golden("gcn", "2"));
}

TEST_F(CliTest, GenIsDeterministic) {
  const auto a = gen(256, 0.05, 1, "a");
  const auto b = gen(256, 0.05, 1, "b");
  for (const char* f : {"edges.txt", "features.csv", "graph.hyg"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto c = gen(256, 0.05, 2, "c");
  EXPECT_NE(slurp(a / "edges.txt"), slurp(c / "edges.txt"));
}

TEST_F(CliTest, GenPowerLawHasAHeavyTail) {
  const auto out = dir_ / "pl";
  ASSERT_EQ(cli({"gen", "--vertices", "1024", "--edge-model", "power-law", "--alpha", "2.1",
                 "--seed", "1", "-o", out.string()}).code,
            kExitOk);
  const CscGraph g = read_container(out / "graph.hyg");
  std::size_t max_degree = 0;
  for (VertexId v = 0; v < g.num_vertices; ++v) max_degree = std::max(max_degree, degree(g, v));
  const double mean = static_cast<double>(g.num_edges()) / g.num_vertices;
  EXPECT_GT(static_cast<double>(max_degree), 10 * mean);
}

TEST_F(CliTest, GenWithZeroProbabilityIsEmpty) {
  const auto data = gen(32, 0.0, 1);
  const CscGraph g = read_container(data / "graph.hyg");
  EXPECT_EQ(g.num_edges(), 0u);
  std::istringstream edges(slurp(data / "edges.txt"));
  EXPECT_EQ(load_edge_list(edges, 32).num_edges(), 0u);
}

TEST_F(CliTest, EdgeListInputs) {
  const auto data = gen(40, 0.1, 6);
  const auto out = dir_ / "out";
  const auto r = cli({"run", "--graph", (data / "edges.txt").string(), "--vertices", "40",
                      "--features", (data / "features.csv").string(), "--model", "gin", "-o",
                      out.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST_F(CliTest, AblateAndSweepWriteTables) {
  const auto data = gen(64, 0.05, 7);
  const auto graph = (data / "graph.hyg").string();
  const auto out = dir_ / "out";
  ASSERT_EQ(cli({"ablate", "--graph", graph, "--model", "gcn", "--toggle", "all", "-o",
                 out.string()}).code,
            kExitOk);
  EXPECT_TRUE(fs::exists(out / "ablation.csv"));
  const auto s = cli({"sweep", "--graph", graph, "--model", "gcn", "--param", "module_granularity",
                      "--values", "1,2,3,8", "--threads", "2", "-o", out.string()});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(s.err.find("warning: "), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "warnings.txt"));
}

TEST_F(CliTest, HelpListsEverySchemaKey) {
  const auto r = cli({"run", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (const auto& field : system_config_schema()) {
    std::string flag = "--" + field.key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
  }
}

}  // namespace
}  // namespace gcnsim
