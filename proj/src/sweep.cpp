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

#include "gcnsim/sweep.hpp"

#include "gcnsim/error.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace gcnsim {

namespace {

std::size_t integral(double value, const char* what) {
  if (!(value >= 1.0) || value != std::floor(value) || value > 1e15) {
    throw ConfigError(std::string(what) + " must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::SamplingFactor:
      return "sampling_factor";
    case SweepParameter::AggBufferCapacity:
      return "agg_buffer_capacity";
    case SweepParameter::ModuleGranularity:
      return "module_granularity";
  }
  return "?";
}

SweepParameter parse_sweep_parameter(std::string_view s) {
  for (auto p : {SweepParameter::SamplingFactor, SweepParameter::AggBufferCapacity,
                 SweepParameter::ModuleGranularity}) {
    if (s == to_string(p)) return p;
  }
  throw ConfigError("unknown sweep parameter '" + std::string(s) +
                    "' (expected sampling_factor, agg_buffer_capacity or module_granularity)");
}

void apply_sweep_value(SweepParameter p, double value, ModelConfig& model, SystemConfig& sys) {
  switch (p) {
    case SweepParameter::SamplingFactor: {
      const SamplingPolicy policy = SamplingPolicy::fraction(value);
      for (auto& l : model.layers) l.sampling = policy;
      if (model.pool) {
        model.pool->pool.sampling = policy;
        model.pool->embedding.sampling = policy;
      }
      break;
    }
    case SweepParameter::AggBufferCapacity:
      sys.agg_buffer_bytes = integral(value, "aggregation buffer capacity");
      break;
    case SweepParameter::ModuleGranularity:
      sys.modules_per_group = integral(value, "module granularity");
      break;
  }
  sys.validate();
}

std::size_t sweep_threads() {
  if (const char* env = std::getenv("HYGCN_SIM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const CscGraph& graph, const ModelConfig& model, const SystemConfig& sys,
                  SweepParameter parameter, const std::vector<double>& values,
                  const ExperimentOptions& options, std::size_t threads) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  SweepResult result;
  result.parameter = parameter;

  struct Job {
    double value;
    ModelConfig model;
    SystemConfig sys;
  };
  std::vector<Job> jobs;
  for (double v : values) {
    Job job{v, model, sys};
    try {
      apply_sweep_value(parameter, v, job.model, job.sys);
      job.model.validate(graph.feature_len());
    } catch (const ConfigError& e) {
      std::ostringstream msg;
      msg << to_string(parameter) << " = " << v << " skipped: " << e.what();
      result.warnings.push_back(msg.str());
      continue;
    }
    jobs.push_back(std::move(job));
  }

  std::vector<std::optional<SimReport>> reports(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        reports[i] = run_experiment(graph, jobs[i].model, jobs[i].sys, options).report;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(jobs.size(), threads ? threads : sweep_threads());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    result.points.push_back({jobs[i].value, std::move(*reports[i])});
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  const auto precision = out.precision(15);
  out << to_string(result.parameter)
      << ",total_cycles,dram_bytes,input_bytes,eliminated_ratio,residual_sparsity,"
         "mean_vertex_latency,weight_buffer_reads,weight_energy_pj,bandwidth_utilization,"
         "row_hit_rate\n";
  for (const auto& p : result.points) {
    const SimReport& r = p.report;
    out << p.value << ',' << r.total_cycles << ',' << r.dram.total_bytes() << ','
        << r.dram.bytes(RequestClass::Input) << ',' << r.eliminated_ratio() << ','
        << r.residual_sparsity() << ',' << r.latency().mean << ',' << r.comb.weight_buffer_reads
        << ',' << r.energy.get(EnergyComponent::WeightBuf) << ',' << r.utilization() << ','
        << r.hit_rate() << '\n';
  }
  out.precision(precision);
}

}  // namespace gcnsim
