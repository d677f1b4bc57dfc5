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

#include "gcnsim/memory.hpp"

#include "gcnsim/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace gcnsim {

namespace {

constexpr std::array<std::string_view, kNumEnergyComponents> kComponentNames{
    "dram", "edge_buf", "input_buf", "weight_buf", "output_buf", "agg_buf", "simd_compute",
    "systolic_compute"};

}  // namespace

std::string_view to_string(EnergyComponent c) { return kComponentNames[static_cast<std::size_t>(c)]; }

void EnergyLedger::charge(EnergyComponent c, double picojoules) {
  if (!(picojoules >= 0.0)) throw ConfigError("energy charges must be non-negative");
  pj_[static_cast<std::size_t>(c)] += picojoules;
}

void EnergyLedger::charge(std::string_view component, double picojoules) {
  for (std::size_t i = 0; i < kNumEnergyComponents; ++i) {
    if (kComponentNames[i] == component) {
      charge(static_cast<EnergyComponent>(i), picojoules);
      return;
    }
  }
  throw ConfigError("unknown energy component '" + std::string(component) + "'");
}

double EnergyLedger::total() const { return std::accumulate(pj_.begin(), pj_.end(), 0.0); }

uint64_t DramStats::total_bytes() const {
  return std::accumulate(bytes_by_class.begin(), bytes_by_class.end(), uint64_t{0});
}

DramModel::DramModel(const SystemConfig& sys, EnergyLedger* ledger)
    : sys_(sys),
      ledger_(ledger),
      banks_(sys.dram_channels * sys.dram_banks),
      channel_free_(sys.dram_channels, 0) {
  remap_address(0, sys_);  // validates the geometry
  stats_.channels.resize(sys.dram_channels);
}

const BankState& DramModel::bank(uint64_t channel, uint64_t bank) const {
  return banks_.at(channel * sys_.dram_banks + bank);
}

uint64_t DramModel::service(const MemoryRequest& req, uint64_t arrival) {
  ++stats_.requests;
  stats_.bytes_by_class[static_cast<std::size_t>(req.cls)] += req.size;
  if (req.intermediate) stats_.intermediate_bytes += req.size;
  if (ledger_) ledger_->charge(EnergyComponent::Dram, static_cast<double>(req.size) * 8.0 * sys_.pj_per_dram_bit);

  uint64_t done = arrival;
  uint64_t addr = req.address;
  uint64_t remaining = req.size;
  while (remaining > 0) {
    const uint64_t piece = std::min(remaining, sys_.row_buffer_bytes - addr % sys_.row_buffer_bytes);
    const DramAddress loc = remap_address(addr, sys_);
    BankState& b = banks_[loc.channel * sys_.dram_banks + loc.bank];
    uint64_t& free = channel_free_[loc.channel];
    const bool hit = b.open_row == loc.row;
    const uint64_t start = hit ? std::max(arrival + sys_.row_hit_cycles, free)
                               : std::max(arrival, free) + sys_.row_miss_cycles;
    const uint64_t transfer = (piece + sys_.channel_bytes_per_cycle - 1) / sys_.channel_bytes_per_cycle;
    free = start + transfer;
    b.open_row = loc.row;
    b.busy_until = free;

    auto& ch = stats_.channels[loc.channel];
    ch.bytes += piece;
    ch.busy_cycles += transfer;
    ++ch.accesses;
    ++stats_.accesses;
    if (hit) {
      ++ch.hits;
      ++stats_.hits;
    }
    if (tracing_) trace_.push_back({start, req.cls, addr, loc, hit});
    done = std::max(done, free);
    addr += piece;
    remaining -= piece;
  }
  stats_.last_completion = std::max(stats_.last_completion, done);
  return done;
}

uint64_t DramModel::service_all(const std::vector<MemoryRequest>& ordered, uint64_t not_before) {
  uint64_t done = not_before;
  for (const auto& req : ordered) done = std::max(done, service(req, std::max(req.issue_cycle, not_before)));
  return done;
}

double utilization(const DramStats& stats, uint64_t window, const SystemConfig& sys) {
  if (window == 0) throw ConfigError("utilization over a zero-cycle window");
  const double u = static_cast<double>(stats.total_bytes()) /
                   (static_cast<double>(sys.peak_bytes_per_cycle()) * static_cast<double>(window));
  return std::min(1.0, u);
}

}  // namespace gcnsim
