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

#include "gcnsim/report.hpp"

#include "gcnsim/config_io.hpp"
#include "gcnsim/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gcnsim {

namespace {

using Json = nlohmann::ordered_json;

double ratio(uint64_t num, uint64_t den) {
  if (den == 0) return 0.0;
  return std::clamp(static_cast<double>(num) / static_cast<double>(den), 0.0, 1.0);
}

Json echo(const std::vector<KeyValue>& kvs) {
  Json out = Json::object();
  for (const auto& kv : kvs) out[kv.key] = kv.value;
  return out;
}

Json system_echo(const SystemConfig& sys) {
  std::stringstream ss;
  write_system_config(ss, sys);
  return echo(parse_key_values(ss));
}

Json model_echo(const ModelConfig& model) {
  std::stringstream ss;
  write_model_config(ss, model);
  return echo(parse_key_values(ss));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

LatencySummary summarize_latencies(std::vector<uint64_t> latencies) {
  LatencySummary s;
  if (latencies.empty()) return s;
  std::sort(latencies.begin(), latencies.end());
  s.count = latencies.size();
  long double sum = 0;
  for (uint64_t l : latencies) sum += l;
  s.mean = static_cast<double>(sum / latencies.size());
  auto rank = [&](double p) {
    const auto r = static_cast<std::size_t>(std::ceil(p * static_cast<double>(latencies.size())));
    return latencies[std::clamp<std::size_t>(r, 1, latencies.size()) - 1];
  };
  s.p50 = rank(0.50);
  s.p99 = rank(0.99);
  s.max = latencies.back();
  return s;
}

double SimReport::utilization() const {
  return total_cycles ? gcnsim::utilization(dram, total_cycles, sys) : 0.0;
}

double SimReport::eliminated_ratio() const { return ratio(agg.eliminated_rows(), agg.rows_grid); }

double SimReport::residual_sparsity() const {
  return agg.rows_grid ? ratio(std::min(agg.rows_loaded, agg.rows_grid), agg.rows_grid) : 1.0;
}

std::string report_json(const SimReport& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["seed"] = r.seed;
  j["model"] = model_echo(r.model);
  j["system"] = system_echo(r.sys);
  j["graph"] = {{"num_vertices", r.num_vertices},
                {"num_edges", r.num_edges},
                {"feature_len", r.feature_len}};
  j["total_cycles"] = r.total_cycles;

  j["aggregation"] = {{"compute_cycles", r.agg.compute_cycles},
                      {"stall_edge_wait", r.agg.stall_edge_wait},
                      {"stall_feature_wait", r.agg.stall_feature_wait},
                      {"stall_output_backpressure", r.agg.stall_output_backpressure},
                      {"element_ops", r.agg.element_ops},
                      {"shards", r.agg.shards},
                      {"rows_loaded", r.agg.rows_loaded},
                      {"rows_grid", r.agg.rows_grid},
                      {"eliminated_ratio", r.eliminated_ratio()},
                      {"residual_sparsity", r.residual_sparsity()}};
  j["combination"] = {{"busy_cycles", r.comb.busy_cycles},
                      {"passes", r.comb.passes},
                      {"macs", r.comb.macs},
                      {"weight_buffer_reads", r.comb.weight_buffer_reads},
                      {"vertices", r.comb.vertices}};

  Json by_class = Json::object();
  for (std::size_t c = 0; c < kNumRequestClasses; ++c) {
    by_class[std::string(to_string(static_cast<RequestClass>(c)))] = r.dram.bytes_by_class[c];
  }
  j["dram"] = {{"total_bytes", r.dram.total_bytes()},
               {"bytes_by_class", by_class},
               {"intermediate_bytes", r.dram.intermediate_bytes},
               {"requests", r.dram.requests},
               {"accesses", r.dram.accesses},
               {"row_hits", r.dram.hits},
               {"row_hit_rate", r.hit_rate()},
               {"bandwidth_utilization", r.utilization()}};

  Json energy = Json::object();
  for (std::size_t c = 0; c < kNumEnergyComponents; ++c) {
    const auto comp = static_cast<EnergyComponent>(c);
    energy[std::string(to_string(comp))] = r.energy.get(comp);
  }
  energy["total"] = r.energy.total();
  j["energy_pj"] = energy;

  const LatencySummary lat = r.latency();
  j["vertex_latency"] = {
      {"count", lat.count}, {"mean", lat.mean}, {"p50", lat.p50}, {"p99", lat.p99}, {"max", lat.max}};

  Json phases = Json::array();
  for (const auto& p : r.phases) phases.push_back({{"name", p.name}, {"start", p.start}, {"end", p.end}});
  j["phases"] = phases;
  return j.dump(2) + "\n";
}

void write_traffic_csv(std::ostream& out, const SimReport& r) {
  out << "class,bytes\n";
  for (std::size_t c = 0; c < kNumRequestClasses; ++c) {
    out << to_string(static_cast<RequestClass>(c)) << ',' << r.dram.bytes_by_class[c] << '\n';
  }
  out << "intermediate," << r.dram.intermediate_bytes << '\n';
  out << "total," << r.dram.total_bytes() << '\n';
  for (std::size_t ch = 0; ch < r.dram.channels.size(); ++ch) {
    out << "channel" << ch << ',' << r.dram.channels[ch].bytes << '\n';
  }
}

void write_latency_hist_csv(std::ostream& out, const SimReport& r) {
  out << "bucket_lo,bucket_hi,count\n";
  std::vector<uint64_t> counts;
  for (uint64_t l : r.vertex_latencies) {
    const auto b = static_cast<std::size_t>(l == 0 ? 0 : std::bit_width(l));
    if (counts.size() <= b) counts.resize(b + 1, 0);
    ++counts[b];
  }
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const uint64_t lo = b == 0 ? 0 : uint64_t{1} << (b - 1);
    const uint64_t hi = b == 0 ? 0 : (uint64_t{1} << b) - 1;
    out << lo << ',' << hi << ',' << counts[b] << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "cycle,class,address,channel,bank,row,column,hit\n";
  for (const auto& t : trace) {
    out << t.cycle << ',' << to_string(t.cls) << ',' << t.address << ',' << t.location.channel << ','
        << t.location.bank << ',' << t.location.row << ',' << t.location.column << ','
        << (t.hit ? 1 : 0) << '\n';
  }
}

void write_report_dir(const std::filesystem::path& dir, const SimReport& report,
                      const std::vector<TraceRecord>& trace) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "report.json");
    out << report_json(report);
  }
  {
    auto out = open_out(dir / "traffic.csv");
    write_traffic_csv(out, report);
  }
  {
    auto out = open_out(dir / "latency_hist.csv");
    write_latency_hist_csv(out, report);
  }
  if (!trace.empty()) {
    auto out = open_out(dir / "trace.csv");
    write_trace_csv(out, trace);
  }
}

}  // namespace gcnsim
