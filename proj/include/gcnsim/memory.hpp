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

#pragma once

#include "gcnsim/config.hpp"
#include "gcnsim/coordinator.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gcnsim {

enum class EnergyComponent {
  Dram,
  EdgeBuf,
  InputBuf,
  WeightBuf,
  OutputBuf,
  AggBuf,
  SimdCompute,
  SystolicCompute
};
inline constexpr std::size_t kNumEnergyComponents = 8;

std::string_view to_string(EnergyComponent c);

/// Picojoules per component. Entries only ever grow.
class EnergyLedger {
 public:
  /// Throws ConfigError on a negative amount.
  void charge(EnergyComponent c, double picojoules);
  /// Throws ConfigError on an unknown component name.
  void charge(std::string_view component, double picojoules);

  double get(EnergyComponent c) const { return pj_[static_cast<std::size_t>(c)]; }
  double total() const;

 private:
  std::array<double, kNumEnergyComponents> pj_{};
};

struct BankState {
  std::optional<uint64_t> open_row;
  uint64_t busy_until = 0;
};

struct ChannelStats {
  uint64_t bytes = 0;
  uint64_t busy_cycles = 0;  // data-transfer cycles
  uint64_t accesses = 0;
  uint64_t hits = 0;
};

struct DramStats {
  std::array<uint64_t, kNumRequestClasses> bytes_by_class{};
  uint64_t intermediate_bytes = 0;
  uint64_t requests = 0;
  uint64_t accesses = 0;  // row-buffer-sized pieces
  uint64_t hits = 0;
  uint64_t last_completion = 0;
  std::vector<ChannelStats> channels;

  uint64_t total_bytes() const;
  uint64_t bytes(RequestClass cls) const { return bytes_by_class[static_cast<std::size_t>(cls)]; }
  double hit_rate() const { return accesses ? static_cast<double>(hits) / accesses : 0.0; }
};

struct TraceRecord {
  uint64_t cycle;
  RequestClass cls;
  uint64_t address;
  DramAddress location;
  bool hit;
};

/// Open-row DRAM with in-order service per channel. A request is split at
/// row-buffer boundaries; each piece goes to its channel:
///   hit:  data starts at max(arrival + hit latency, channel free)
///   miss: data starts at max(arrival, channel free) + miss latency
/// and occupies the channel for ceil(bytes / bandwidth) cycles.
class DramModel {
 public:
  explicit DramModel(const SystemConfig& sys, EnergyLedger* ledger = nullptr);

  /// Services one request arriving at `arrival`; returns its completion.
  uint64_t service(const MemoryRequest& req, uint64_t arrival);
  /// Services requests in the given order, each arriving at its issue_cycle.
  /// Returns the last completion (or `not_before` when empty).
  uint64_t service_all(const std::vector<MemoryRequest>& ordered, uint64_t not_before = 0);

  const DramStats& stats() const { return stats_; }
  const BankState& bank(uint64_t channel, uint64_t bank) const;
  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  SystemConfig sys_;
  EnergyLedger* ledger_;
  std::vector<BankState> banks_;
  std::vector<uint64_t> channel_free_;
  DramStats stats_;
  bool tracing_ = false;
  std::vector<TraceRecord> trace_;
};

/// bytes / (peak bytes per cycle x window). Throws ConfigError on a zero
/// window.
double utilization(const DramStats& stats, uint64_t window, const SystemConfig& sys);

}  // namespace gcnsim
