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

#include "gcnsim/simulator.hpp"

#include "gcnsim/agg_engine.hpp"
#include "gcnsim/comb_engine.hpp"
#include "gcnsim/coordinator.hpp"
#include "gcnsim/error.hpp"
#include "gcnsim/model_zoo.hpp"
#include "gcnsim/partition.hpp"
#include "gcnsim/pipeline.hpp"
#include "gcnsim/sampling.hpp"

#include <algorithm>
#include <string>

namespace gcnsim {

namespace {

constexpr uint64_t kScratchRegion = 0x2'0000'0000;
constexpr uint64_t kRegionAlign = 64 * 1024;

// Where an aggregation result goes once an interval is final.
enum class Sink {
  Fused,         // straight into the combination engine
  Intermediate,  // spilled to DRAM for a later combination phase
  Final,         // the layer output itself
};

struct AggJob {
  std::string name;
  const CscGraph* graph = nullptr;
  const CscGraph* degree_graph = nullptr;
  const SampleSet* sample = nullptr;
  LayerConfig layer;
  const FeatureMatrix* input = nullptr;
  uint64_t input_base = 0;
  const Mlp* mlp = nullptr;
  uint64_t output_base = 0;
  Sink sink = Sink::Final;
};

struct AggOutcome {
  FeatureMatrix result;              // combined output (Fused) or a_v
  std::vector<uint64_t> finalized;   // per vertex
  std::size_t interval_width = 1;
};

struct BatchTiming {
  uint64_t edges_done = 0;
  uint64_t end = 0;
};

class Simulator {
 public:
  Simulator(const SystemConfig& sys, bool trace) : sys_(sys), pool_(sys), dram_(sys, &report_.energy) {
    dram_.enable_trace(trace);
  }

  AggOutcome aggregate_layer(const AggJob& job);
  FeatureMatrix combine_phase(const std::string& name, const FeatureMatrix& in, uint64_t in_base,
                              bool intermediate_in, const Mlp& mlp, Activation activation,
                              uint64_t out_base, std::size_t chunk_vertices,
                              const std::vector<uint64_t>* finalized);
  FeatureMatrix softmax_phase(const FeatureMatrix& logits, uint64_t in_base, uint64_t out_base);
  FeatureMatrix pooled_product(const FeatureMatrix& c, uint64_t c_base, const FeatureMatrix& z,
                               uint64_t z_base, const FeatureMatrix& ac, uint64_t ac_base,
                               uint64_t out_base);

  uint64_t alloc(uint64_t bytes) {
    const uint64_t at = scratch_;
    scratch_ += (bytes + kRegionAlign - 1) / kRegionAlign * kRegionAlign + kRegionAlign;
    return at;
  }

  SimReport& report() { return report_; }
  const DramModel& dram() const { return dram_; }
  uint64_t now() const { return now_; }

 private:
  BatchTiming issue_batch(const std::vector<std::vector<MemoryRequest>>& groups,
                          std::vector<MemoryRequest> phase_b, uint64_t t);
  std::vector<MemoryRequest> take_ready(uint64_t t);
  void queue_rows(std::vector<VertexId> vertices, uint64_t base, uint64_t row_bytes, uint64_t ready,
                  RequestClass cls, bool intermediate, std::vector<MemoryRequest>& into);
  std::vector<MemoryRequest> weight_requests(const Mlp& mlp) const;
  uint64_t flush_pending(uint64_t t);
  void charge(EnergyComponent c, double bytes_or_ops, double pj) {
    report_.energy.charge(c, bytes_or_ops * pj);
  }

  SystemConfig sys_;
  SimdPool pool_;
  SimReport report_;
  DramModel dram_;
  uint64_t now_ = 0;
  uint64_t batch_id_ = 0;
  uint64_t seq_ = 0;
  uint64_t scratch_ = kScratchRegion;
  std::vector<MemoryRequest> pending_;  // issue_cycle = earliest issue
};

std::size_t weight_bytes(const Mlp& mlp) {
  std::size_t bytes = 0;
  for (const auto& l : mlp.layers) bytes += (l.in_len() * l.out_len() + l.out_len()) * 4;
  return bytes;
}

BatchTiming Simulator::issue_batch(const std::vector<std::vector<MemoryRequest>>& groups,
                                   std::vector<MemoryRequest> phase_b, uint64_t t) {
  const uint64_t id = batch_id_++;
  // Without coordination the engines' streams reach the controller
  // interleaved, one request from each in turn.
  std::vector<MemoryRequest> phase_a;
  std::size_t longest = 0;
  for (const auto& g : groups) longest = std::max(longest, g.size());
  for (std::size_t i = 0; i < longest; ++i) {
    for (const auto& g : groups) {
      if (i < g.size()) phase_a.push_back(g[i]);
    }
  }
  BatchTiming bt{t, t};
  const bool coord = sys_.coordination_enabled;
  for (auto& r : phase_a) {
    r.issue_cycle = t;
    r.batch_id = id;
    r.seq = seq_++;
  }
  for (const auto& r : coordinate_requests(std::move(phase_a), coord)) {
    const uint64_t done = dram_.service(r, t);
    bt.end = std::max(bt.end, done);
    if (r.cls == RequestClass::Edge) bt.edges_done = std::max(bt.edges_done, done);
  }
  for (auto& r : phase_b) {
    r.issue_cycle = bt.edges_done;
    r.batch_id = id;
    r.seq = seq_++;
  }
  for (const auto& r : coordinate_requests(std::move(phase_b), coord)) {
    bt.end = std::max(bt.end, dram_.service(r, bt.edges_done));
  }
  return bt;
}

std::vector<MemoryRequest> Simulator::take_ready(uint64_t t) {
  std::vector<MemoryRequest> ready;
  auto keep = std::stable_partition(pending_.begin(), pending_.end(),
                                    [t](const MemoryRequest& r) { return r.issue_cycle > t; });
  ready.assign(keep, pending_.end());
  pending_.erase(keep, pending_.end());
  return ready;
}

void Simulator::queue_rows(std::vector<VertexId> vertices, uint64_t base, uint64_t row_bytes,
                           uint64_t ready, RequestClass cls, bool intermediate,
                           std::vector<MemoryRequest>& into) {
  std::sort(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < vertices.size();) {
    std::size_t j = i + 1;
    while (j < vertices.size() && vertices[j] == vertices[j - 1] + 1) ++j;
    MemoryRequest r;
    r.cls = cls;
    r.address = base + uint64_t{vertices[i]} * row_bytes;
    r.size = (j - i) * row_bytes;
    r.issue_cycle = ready;
    r.intermediate = intermediate;
    into.push_back(r);
    i = j;
  }
}

std::vector<MemoryRequest> Simulator::weight_requests(const Mlp& mlp) const {
  std::vector<MemoryRequest> out;
  uint64_t at = kWeightRegion;
  for (const auto& l : mlp.layers) {
    MemoryRequest r;
    r.cls = RequestClass::Weight;
    r.address = at;
    r.size = (l.in_len() * l.out_len() + l.out_len()) * 4;
    at += (r.size + kRegionAlign - 1) / kRegionAlign * kRegionAlign;
    out.push_back(r);
  }
  return out;
}

uint64_t Simulator::flush_pending(uint64_t t) {
  while (!pending_.empty()) {
    uint64_t earliest = pending_.front().issue_cycle;
    for (const auto& r : pending_) earliest = std::min(earliest, r.issue_cycle);
    t = std::max(t, earliest);
    auto ready = take_ready(t);
    std::vector<std::vector<MemoryRequest>> groups(kNumRequestClasses);
    for (auto& r : ready) groups[static_cast<std::size_t>(r.cls)].push_back(r);
    t = std::max(t, issue_batch(groups, {}, t).end);
  }
  return t;
}

AggOutcome Simulator::aggregate_layer(const AggJob& job) {
  const CscGraph& g = *job.graph;
  const SampleSet& sample = *job.sample;
  const FeatureMatrix& x = *job.input;
  const LayerConfig& layer = job.layer;
  const std::size_t n = g.num_vertices;
  const std::size_t f = static_cast<std::size_t>(x.cols());
  const uint64_t row_bytes = uint64_t{f} * 4;
  const bool weighted = layer.aggregate == AggregateFn::WeightedAdd;
  const std::size_t edge_bytes = sys_.edge_record_bytes + (weighted ? sys_.coefficient_bytes : 0);
  const uint64_t layer_start = now_;

  // Plan on the sampled edges plus the implicit self edges: v's own row has
  // to reach the input buffer like any neighbor's.
  std::vector<Edge> planned;
  planned.reserve(sample.num_edges() + n);
  for (VertexId v = 0; v < n; ++v) {
    for (VertexId u : sample.neighbors(v)) planned.emplace_back(u, v);
    if (layer.include_self) planned.emplace_back(v, v);
  }
  const CscGraph planning = build_csc(n, std::move(planned));
  const bool elim = sys_.sparsity_elimination_enabled;
  const PartitionPlan plan = build_plan(planning, sys_, f, f, elim, edge_bytes);
  report_.agg.rows_grid +=
      elim ? build_plan(planning, sys_, f, f, false, edge_bytes).rows_loaded() : plan.rows_loaded();

  std::vector<Fixed32> self_coef(n, Fixed32{1});
  std::vector<std::size_t> norm_deg;
  if (weighted) {
    norm_deg.resize(n);
    for (VertexId v = 0; v < n; ++v) norm_deg[v] = normalized_degree(*job.degree_graph, v, layer.augment_degree);
    for (VertexId v = 0; v < n; ++v) self_coef[v] = gcn_coefficient(norm_deg[v], norm_deg[v]);
  } else if (layer.aggregate == AggregateFn::Add && layer.epsilon != 0.0) {
    std::fill(self_coef.begin(), self_coef.end(), Fixed32::from_double(1.0 + layer.epsilon));
  }
  const bool scaled_self = weighted || (layer.aggregate == AggregateFn::Add && layer.epsilon != 0.0);

  // Steps: one per shard; an interval without shards still gets one empty
  // step so its vertices are finalized in order.
  struct Step {
    std::size_t interval;
    std::optional<EffectualShard> shard;
    std::vector<Edge> work;  // (source, target), self terms included
    ShardRequests requests;
    bool first = false;
    bool last = false;
  };
  std::vector<Step> steps;
  for (std::size_t i = 0; i < plan.intervals.size(); ++i) {
    const std::size_t begin = steps.size();
    for (const auto& shard : plan.shards[i]) {
      if (shard.edge_count > plan.edge_capacity || shard.rows() > plan.window_height) {
        throw SimulationError("shard exceeds the edge or input buffer");
      }
      Step st{i, shard, {}, {}, false, false};
      for (VertexId v = shard.target.start; v < shard.target.end; ++v) {
        const auto nb = sample.neighbors(v);
        auto it = std::lower_bound(nb.begin(), nb.end(), shard.row_start);
        bool self_done = !layer.include_self || v < shard.row_start || v > shard.row_end;
        for (; it != nb.end() && *it <= shard.row_end; ++it) {
          if (!self_done && v < *it) {
            st.work.emplace_back(v, v);
            self_done = true;
          }
          st.work.emplace_back(*it, v);
        }
        if (!self_done) st.work.emplace_back(v, v);
      }
      st.requests = shard_requests(g, st.work, shard, f, job.input_base, edge_bytes);
      steps.push_back(std::move(st));
    }
    if (steps.size() == begin) steps.push_back(Step{i, std::nullopt, {}, {}, false, false});
    steps[begin].first = true;
    steps.back().last = true;
  }

  // The step after which each vertex is final.
  std::vector<std::vector<VertexId>> finalize_at(steps.size());
  {
    std::vector<std::size_t> last(n, SIZE_MAX);
    std::vector<std::size_t> interval_last(plan.intervals.size(), 0);
    for (std::size_t s = 0; s < steps.size(); ++s) {
      interval_last[steps[s].interval] = s;
      for (const auto& [u, v] : steps[s].work) last[v] = s;
    }
    for (VertexId v = 0; v < n; ++v) {
      const std::size_t s = last[v] != SIZE_MAX ? last[v] : interval_last[v / plan.interval_width];
      finalize_at[s].push_back(v);
    }
  }

  const bool fused = job.sink == Sink::Fused;
  const Mlp* mlp = job.mlp;
  const std::vector<MlpShape> shapes = mlp ? mlp->shapes() : std::vector<MlpShape>{};
  const std::size_t out_len = fused ? mlp->out_len() : f;
  const bool energy_mode = sys_.pipeline_mode == PipelineMode::Energy;
  CombEngine comb(set_granularity(sys_, energy_mode ? sys_.systolic_modules : sys_.modules_per_group));
  PipelineSequencer sequencer(fused ? sys_.pipeline_mode : PipelineMode::None,
                              comb.granularity().batch_vertices());
  const bool resident = !fused || weight_bytes(*mlp) <= sys_.weight_buffer_bytes / 2;

  AggBufferImage image(plan.interval_width, f);
  AggOutcome outcome;
  outcome.interval_width = plan.interval_width;
  outcome.result = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(out_len));
  outcome.finalized.assign(n, 0);
  FeatureMatrix agg_rows;  // a_v for non-fused sinks
  if (!fused) agg_rows = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  std::vector<int> chunk_of(plan.intervals.size(), -1);
  std::vector<uint64_t> release_at(plan.intervals.size(), 0);

  auto run_batches = [&](const std::vector<CombBatch>& batches) {
    for (const auto& batch : batches) {
      const CombPass pass = comb.dispatch(batch.vertices.size(), batch.ready, shapes);
      FeatureMatrix in(static_cast<Eigen::Index>(batch.vertices.size()), static_cast<Eigen::Index>(f));
      for (std::size_t r = 0; r < batch.vertices.size(); ++r) {
        const VertexId v = batch.vertices[r];
        in.row(r) = image.read(chunk_of[v / plan.interval_width], v, pass.start);
      }
      const FeatureMatrix out = comb.compute(in, *mlp, layer.activation);
      for (std::size_t r = 0; r < batch.vertices.size(); ++r) {
        const VertexId v = batch.vertices[r];
        outcome.result.row(v) = out.row(r);
        report_.vertex_latencies.push_back(pass.end - outcome.finalized[v]);
        auto& rel = release_at[v / plan.interval_width];
        rel = std::max(rel, pass.end);
      }
      queue_rows(batch.vertices, job.output_base, uint64_t{out_len} * 4, pass.end, RequestClass::Output,
                 false, pending_);
      if (!resident) {
        for (auto r : weight_requests(*mlp)) {
          r.issue_cycle = pass.start;
          pending_.push_back(r);
          charge(EnergyComponent::WeightBuf, static_cast<double>(r.size), sys_.pj_per_weight_buffer_byte);
        }
      }
      charge(EnergyComponent::AggBuf, static_cast<double>(in.size()) * 4, sys_.pj_per_agg_buffer_byte);
      charge(EnergyComponent::OutputBuf, static_cast<double>(out.size()) * 4, sys_.pj_per_output_buffer_byte);
    }
  };

  auto charge_fetch = [&](const ShardRequests& r) {
    for (const auto& e : r.edges) {
      report_.agg.edge_bytes += e.size;
      charge(EnergyComponent::EdgeBuf, 2.0 * static_cast<double>(e.size), sys_.pj_per_edge_buffer_byte);
    }
    for (const auto& in : r.inputs) {
      report_.agg.input_bytes += in.size;
      charge(EnergyComponent::InputBuf, static_cast<double>(in.size), sys_.pj_per_input_buffer_byte);
    }
  };

  // Prologue: first shard's edges and features, plus resident weights.
  uint64_t t = now_;
  {
    std::vector<std::vector<MemoryRequest>> groups;
    std::vector<MemoryRequest> inputs;
    if (!steps.empty() && steps[0].shard) {
      groups.push_back(steps[0].requests.edges);
      inputs = steps[0].requests.inputs;
      charge_fetch(steps[0].requests);
    }
    if (fused && resident) {
      groups.push_back(weight_requests(*mlp));
      charge(EnergyComponent::WeightBuf, static_cast<double>(weight_bytes(*mlp)), sys_.pj_per_weight_buffer_byte);
    }
    t = issue_batch(groups, std::move(inputs), t).end;
  }

  const uint64_t fin_cost = finalize_cycles(layer.aggregate, f, pool_);
  for (std::size_t s = 0; s < steps.size(); ++s) {
    Step& st = steps[s];
    const std::size_t i = st.interval;
    const uint64_t step_start = t;
    uint64_t compute_start = step_start;
    if (st.first) {
      if (i >= 2) {
        compute_start = std::max(compute_start, release_at[i - 2]);
        report_.agg.stall_output_backpressure += compute_start - step_start;
        image.release(chunk_of[i - 2]);
      }
      chunk_of[i] = image.begin_fill(plan.intervals[i], layer.aggregate);
    }
    const int chunk = chunk_of[i];

    uint64_t compute_end = compute_start;
    if (st.shard) {
      const AggTask task = schedule_shard(st.work, f, pool_, false, sys_.vertex_concentrated);
      for (const auto& [u, v] : st.work) {
        std::optional<Fixed32> coef;
        if (u == v && scaled_self) {
          coef = self_coef[v];
        } else if (weighted) {
          coef = gcn_coefficient(norm_deg[v], norm_deg[u]);
        }
        image.apply(chunk, v, x.row(u).data(), coef);
      }
      compute_end += task.cycles;
      report_.agg.compute_cycles += task.cycles;
      report_.agg.element_ops += task.element_ops;
      report_.agg.shards += 1;
      report_.agg.rows_loaded += st.shard->rows();
      charge(EnergyComponent::SimdCompute, static_cast<double>(task.element_ops), sys_.pj_per_simd_op);
      charge(EnergyComponent::AggBuf, 8.0 * static_cast<double>(task.element_ops), sys_.pj_per_agg_buffer_byte);
      charge(EnergyComponent::InputBuf, 4.0 * static_cast<double>(task.element_ops), sys_.pj_per_input_buffer_byte);
    }
    for (VertexId v : finalize_at[s]) {
      compute_end += fin_cost;
      report_.agg.compute_cycles += fin_cost;
      const FixedRow a = image.finalize(chunk, v, compute_end);
      outcome.finalized[v] = compute_end;
      if (!fused) agg_rows.row(v) = a;
      run_batches(sequencer.on_finalized(v, compute_end));
    }
    if (st.last) {
      image.begin_drain(chunk);
      const Interval& iv = plan.intervals[i];
      release_at[i] = compute_end;
      if (fused) {
        run_batches(sequencer.on_interval_end(compute_end));
      } else {
        std::vector<VertexId> vs(iv.size());
        for (std::size_t k = 0; k < iv.size(); ++k) vs[k] = iv.start + static_cast<VertexId>(k);
        queue_rows(std::move(vs), job.output_base, row_bytes, compute_end, RequestClass::Output,
                   job.sink == Sink::Intermediate, pending_);
        charge(EnergyComponent::OutputBuf, static_cast<double>(iv.size() * row_bytes), sys_.pj_per_output_buffer_byte);
      }
    }

    // Memory side of the step: next shard's fetches plus ready writes.
    std::vector<std::vector<MemoryRequest>> groups;
    std::vector<MemoryRequest> inputs;
    if (s + 1 < steps.size() && steps[s + 1].shard) {
      groups.push_back(steps[s + 1].requests.edges);
      inputs = steps[s + 1].requests.inputs;
      charge_fetch(steps[s + 1].requests);
    }
    {
      auto ready = take_ready(step_start);
      std::vector<MemoryRequest> outputs, weights;
      for (auto& r : ready) (r.cls == RequestClass::Weight ? weights : outputs).push_back(r);
      groups.push_back(std::move(outputs));
      groups.push_back(std::move(weights));
    }
    const BatchTiming bt = issue_batch(groups, std::move(inputs), step_start);
    if (bt.end > compute_end) {
      const uint64_t edge_wait = std::min(bt.end, std::max(bt.edges_done, compute_end)) - compute_end;
      report_.agg.stall_edge_wait += edge_wait;
      report_.agg.stall_feature_wait += bt.end - compute_end - edge_wait;
    }
    t = std::max(compute_end, bt.end);
  }

  t = std::max(t, comb.all_idle_at());
  now_ = flush_pending(t);
  report_.comb += comb.stats();
  charge(EnergyComponent::SystolicCompute, static_cast<double>(comb.stats().macs), sys_.pj_per_mac);
  charge(EnergyComponent::WeightBuf, 4.0 * static_cast<double>(comb.stats().weight_buffer_reads),
         sys_.pj_per_weight_buffer_byte);
  report_.phases.push_back({job.name, layer_start, now_});
  if (!fused) outcome.result = std::move(agg_rows);
  return outcome;
}

FeatureMatrix Simulator::combine_phase(const std::string& name, const FeatureMatrix& in,
                                       uint64_t in_base, bool intermediate_in, const Mlp& mlp,
                                       Activation activation, uint64_t out_base,
                                       std::size_t chunk_vertices,
                                       const std::vector<uint64_t>* finalized) {
  const uint64_t phase_start = now_;
  const std::size_t n = static_cast<std::size_t>(in.rows());
  const uint64_t in_row = static_cast<uint64_t>(in.cols()) * 4;
  const uint64_t out_row = uint64_t{mlp.out_len()} * 4;
  const auto shapes = mlp.shapes();
  CombEngine comb(set_granularity(sys_, sys_.modules_per_group));
  const std::size_t batch = comb.granularity().batch_vertices();
  const bool resident = weight_bytes(mlp) <= sys_.weight_buffer_bytes / 2;
  chunk_vertices = std::max<std::size_t>(1, chunk_vertices);
  const std::size_t chunks = (n + chunk_vertices - 1) / chunk_vertices;
  FeatureMatrix out(in.rows(), static_cast<Eigen::Index>(mlp.out_len()));

  auto reads = [&](std::size_t j) {
    std::vector<MemoryRequest> rs;
    const std::size_t lo = j * chunk_vertices;
    const std::size_t hi = std::min(n, lo + chunk_vertices);
    for (std::size_t v = lo; v < hi; ++v) {
      MemoryRequest r;
      r.cls = RequestClass::Input;
      r.address = in_base + v * in_row;
      r.size = in_row;
      r.intermediate = intermediate_in;
      rs.push_back(r);
    }
    charge(EnergyComponent::InputBuf, static_cast<double>((hi - lo) * in_row), sys_.pj_per_input_buffer_byte);
    return rs;
  };

  uint64_t t = now_;
  {
    std::vector<std::vector<MemoryRequest>> groups;
    if (chunks > 0) groups.push_back(reads(0));
    if (resident) {
      groups.push_back(weight_requests(mlp));
      charge(EnergyComponent::WeightBuf, static_cast<double>(weight_bytes(mlp)), sys_.pj_per_weight_buffer_byte);
    }
    t = issue_batch(groups, {}, t).end;
  }
  for (std::size_t j = 0; j < chunks; ++j) {
    const uint64_t step_start = t;
    uint64_t compute_end = step_start;
    const std::size_t lo = j * chunk_vertices;
    const std::size_t hi = std::min(n, lo + chunk_vertices);
    for (std::size_t b0 = lo; b0 < hi; b0 += batch) {
      const std::size_t b1 = std::min(hi, b0 + batch);
      const CombPass pass = comb.dispatch(b1 - b0, step_start, shapes);
      const FeatureMatrix y = comb.compute(in.middleRows(b0, b1 - b0), mlp, activation);
      out.middleRows(b0, b1 - b0) = y;
      std::vector<VertexId> vs;
      for (std::size_t v = b0; v < b1; ++v) {
        vs.push_back(static_cast<VertexId>(v));
        if (finalized) report_.vertex_latencies.push_back(pass.end - (*finalized)[v]);
      }
      queue_rows(std::move(vs), out_base, out_row, pass.end, RequestClass::Output, false, pending_);
      if (!resident) {
        for (auto r : weight_requests(mlp)) {
          r.issue_cycle = pass.start;
          pending_.push_back(r);
          charge(EnergyComponent::WeightBuf, static_cast<double>(r.size), sys_.pj_per_weight_buffer_byte);
        }
      }
      charge(EnergyComponent::OutputBuf, static_cast<double>((b1 - b0) * out_row), sys_.pj_per_output_buffer_byte);
      compute_end = std::max(compute_end, pass.end);
    }
    std::vector<std::vector<MemoryRequest>> groups;
    if (j + 1 < chunks) groups.push_back(reads(j + 1));
    groups.push_back(take_ready(step_start));
    t = std::max(compute_end, issue_batch(groups, {}, step_start).end);
  }
  now_ = flush_pending(std::max(t, comb.all_idle_at()));
  report_.comb += comb.stats();
  charge(EnergyComponent::SystolicCompute, static_cast<double>(comb.stats().macs), sys_.pj_per_mac);
  charge(EnergyComponent::WeightBuf, 4.0 * static_cast<double>(comb.stats().weight_buffer_reads),
         sys_.pj_per_weight_buffer_byte);
  report_.phases.push_back({name, phase_start, now_});
  return out;
}

FeatureMatrix Simulator::softmax_phase(const FeatureMatrix& logits, uint64_t in_base, uint64_t out_base) {
  const uint64_t start = now_;
  const uint64_t bytes = static_cast<uint64_t>(logits.size()) * 4;
  MemoryRequest rd;
  rd.cls = RequestClass::Input;
  rd.address = in_base;
  rd.size = bytes;
  uint64_t t = bytes ? issue_batch({{rd}}, {}, now_).end : now_;
  // max, subtract + exp, sum, divide: four element ops per logit.
  const uint64_t ops = 4 * static_cast<uint64_t>(logits.size());
  t += (ops + pool_.total_lanes() - 1) / pool_.total_lanes();
  report_.agg.compute_cycles += (ops + pool_.total_lanes() - 1) / pool_.total_lanes();
  charge(EnergyComponent::SimdCompute, static_cast<double>(ops), sys_.pj_per_simd_op);
  MemoryRequest wr = rd;
  wr.cls = RequestClass::Output;
  wr.address = out_base;
  if (bytes) t = issue_batch({{wr}}, {}, t).end;
  now_ = t;
  report_.phases.push_back({"softmax", start, now_});
  return softmax_rows(logits);
}

FeatureMatrix Simulator::pooled_product(const FeatureMatrix& c, uint64_t c_base,
                                        const FeatureMatrix& z, uint64_t z_base,
                                        const FeatureMatrix& ac, uint64_t ac_base,
                                        uint64_t out_base) {
  const uint64_t start = now_;
  const std::size_t n = static_cast<std::size_t>(c.rows());
  const std::size_t k = static_cast<std::size_t>(c.cols());
  FeatureMatrix b(z.rows(), z.cols() + ac.cols());
  b << z, ac;
  const std::size_t w = static_cast<std::size_t>(b.cols());
  CombEngine comb(set_granularity(sys_, sys_.systolic_modules));
  std::vector<MemoryRequest> reads(3);
  const uint64_t bases[3] = {c_base, z_base, ac_base};
  const Eigen::Index sizes[3] = {c.size(), z.size(), ac.size()};
  double read_bytes = 0;
  for (int i = 0; i < 3; ++i) {
    reads[i].cls = RequestClass::Input;
    reads[i].address = bases[i];
    reads[i].size = static_cast<uint64_t>(sizes[i]) * 4;
    read_bytes += static_cast<double>(reads[i].size);
  }
  uint64_t t = issue_batch({reads}, {}, now_).end;
  charge(EnergyComponent::InputBuf, read_bytes, sys_.pj_per_input_buffer_byte);
  const std::vector<MlpShape> shape{{n, w}};
  uint64_t end = t;
  for (std::size_t r0 = 0; r0 < k; r0 += comb.granularity().batch_vertices()) {
    const std::size_t rows = std::min(comb.granularity().batch_vertices(), k - r0);
    end = std::max(end, comb.dispatch(rows, t, shape).end);
  }
  const FeatureMatrix out = comb.compute_tn(c, b);
  MemoryRequest wr;
  wr.cls = RequestClass::Output;
  wr.address = out_base;
  wr.size = static_cast<uint64_t>(out.size()) * 4;
  pending_.push_back({wr.cls, wr.address, wr.size, end, 0, 0, false});
  charge(EnergyComponent::OutputBuf, static_cast<double>(wr.size), sys_.pj_per_output_buffer_byte);
  now_ = flush_pending(end);
  report_.comb += comb.stats();
  charge(EnergyComponent::SystolicCompute, static_cast<double>(comb.stats().macs), sys_.pj_per_mac);
  charge(EnergyComponent::WeightBuf, 4.0 * static_cast<double>(comb.stats().weight_buffer_reads),
         sys_.pj_per_weight_buffer_byte);
  report_.phases.push_back({"pool_product", start, now_});
  return out;
}

void check_equal(const FeatureMatrix& sim, const FeatureMatrix& ref, const std::string& what) {
  if (sim.rows() != ref.rows() || sim.cols() != ref.cols()) {
    throw OracleMismatch(what + ": simulator produced " + std::to_string(sim.rows()) + "x" +
                         std::to_string(sim.cols()) + ", reference " + std::to_string(ref.rows()) +
                         "x" + std::to_string(ref.cols()));
  }
  if (auto at = first_mismatch(sim, ref)) {
    const auto [v, e] = *at;
    throw OracleMismatch(what + ": first mismatch at vertex " + std::to_string(v) + ", element " +
                         std::to_string(e) + " (simulator raw " + std::to_string(sim(v, e).raw()) +
                         ", reference raw " + std::to_string(ref(v, e).raw()) + ")");
  }
}

}  // namespace

SimResult run_experiment(const CscGraph& graph, const ModelConfig& model, const SystemConfig& sys,
                         const ExperimentOptions& options) {
  sys.validate();
  graph.validate();
  model.validate(graph.feature_len());
  const ModelWeights weights = make_weights(model);
  const std::size_t n = graph.num_vertices;

  Simulator sim(sys, options.record_trace);
  SimResult result;
  FeatureMatrix h = graph.features;
  uint64_t h_base = kFeatureRegion[0];

  auto agg_job = [&](const std::string& name, const LayerConfig& layer, const SampleSet& sample,
                     const FeatureMatrix& input, uint64_t in_base, const Mlp* mlp, Sink sink,
                     uint64_t out_base) {
    AggJob job;
    job.name = name;
    job.graph = &graph;
    job.degree_graph = &graph;
    job.sample = &sample;
    job.layer = layer;
    job.input = &input;
    job.input_base = in_base;
    job.mlp = mlp;
    job.sink = sink;
    job.output_base = out_base;
    return job;
  };

  // One aggregate-first layer in the configured pipeline mode.
  auto run_agg_first = [&](const std::string& name, const LayerConfig& layer, const Mlp& mlp,
                           const SampleSet& sample, const FeatureMatrix& input, uint64_t in_base,
                           uint64_t out_base) {
    if (sys.pipeline_mode != PipelineMode::None) {
      return sim.aggregate_layer(agg_job(name, layer, sample, input, in_base, &mlp, Sink::Fused, out_base))
          .result;
    }
    const uint64_t spill = kIntermediateRegion;
    AggOutcome a = sim.aggregate_layer(
        agg_job(name + ".agg", layer, sample, input, in_base, nullptr, Sink::Intermediate, spill));
    return sim.combine_phase(name + ".comb", a.result, spill, true, mlp, layer.activation, out_base,
                             a.interval_width, &a.finalized);
  };

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const LayerConfig& layer = model.layers[l];
    const SampleSet s = sample(graph, layer.sampling, layer_seed(options.seed, l));
    const uint64_t out_base = kFeatureRegion[(l + 1) % 2];
    const std::string name = "layer" + std::to_string(l);
    if (layer.order == LayerOrder::AggregateFirst) {
      h = run_agg_first(name, layer, weights.layers[l], s, h, h_base, out_base);
    } else {
      const uint64_t mid = sim.alloc(uint64_t{n} * layer.output_len() * 4);
      const std::size_t chunk = plan_dimensions(sys, layer.output_len(), layer.output_len()).interval_width;
      FeatureMatrix y = sim.combine_phase(name + ".comb", h, h_base, false, weights.layers[l],
                                          layer.activation, mid, chunk, nullptr);
      h = sim.aggregate_layer(agg_job(name + ".agg", layer, s, y, mid, nullptr, Sink::Final, out_base)).result;
    }
    h_base = out_base;
    result.layer_outputs.push_back(h);
  }

  if (model.pool) {
    const std::size_t base = model.layers.size();
    const auto& pc = *model.pool;
    const SampleSet ps = sample(graph, pc.pool.sampling, layer_seed(options.seed, base));
    const SampleSet es = sample(graph, pc.embedding.sampling, layer_seed(options.seed, base + 1));
    const uint64_t logits_base = sim.alloc(uint64_t{n} * pc.pool.output_len() * 4);
    const uint64_t z_base = sim.alloc(uint64_t{n} * pc.embedding.output_len() * 4);
    FeatureMatrix logits = run_agg_first("pool", pc.pool, *weights.pool, ps, h, h_base, logits_base);
    FeatureMatrix z = run_agg_first("embedding", pc.embedding, *weights.embedding, es, h, h_base, z_base);
    const uint64_t c_base = sim.alloc(static_cast<uint64_t>(logits.size()) * 4);
    FeatureMatrix c = sim.softmax_phase(logits, logits_base, c_base);

    // A C: sums of C over out-neighbors, i.e. aggregation on the transpose.
    const CscGraph t = transpose(graph);
    const SampleSet all = sample(t, SamplingPolicy::none(), 0);
    LayerConfig sum;
    sum.aggregate = AggregateFn::Add;
    sum.include_self = false;
    sum.mlp = {{c.cols() > 0 ? static_cast<std::size_t>(c.cols()) : 1, 1}};
    const uint64_t ac_base = sim.alloc(static_cast<uint64_t>(c.size()) * 4);
    AggJob job = agg_job("assign_adjacency", sum, all, c, c_base, nullptr, Sink::Final, ac_base);
    job.graph = &t;
    FeatureMatrix ac = sim.aggregate_layer(job).result;

    const uint64_t out_base = sim.alloc(uint64_t(c.cols()) * (z.cols() + ac.cols()) * 4);
    FeatureMatrix prod = sim.pooled_product(c, c_base, z, z_base, ac, ac_base, out_base);
    result.output = prod.leftCols(z.cols());
    result.adjacency = prod.rightCols(c.cols());
    result.layer_outputs.push_back(result.output);
  } else {
    result.output = h;
  }

  if (options.check_oracle) {
    const ReferenceRun ref = run_reference(graph, model, weights, options.seed);
    for (std::size_t l = 0; l < ref.layer_outputs.size(); ++l) {
      check_equal(result.layer_outputs[l], ref.layer_outputs[l], "layer " + std::to_string(l));
    }
    if (ref.pool) {
      check_equal(result.output, ref.pool->features, "pooled features");
      check_equal(*result.adjacency, ref.pool->adjacency, "pooled adjacency");
    }
  }

  SimReport& rep = sim.report();
  rep.model = model;
  rep.seed = options.seed;
  rep.sys = sys;
  rep.num_vertices = n;
  rep.num_edges = graph.num_edges();
  rep.feature_len = graph.feature_len();
  rep.total_cycles = sim.now();
  rep.dram = sim.dram().stats();
  result.report = rep;
  result.trace = sim.dram().trace();
  return result;
}

}  // namespace gcnsim
