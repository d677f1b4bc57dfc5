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

#include "gcnsim/coordinator.hpp"
#include "gcnsim/error.hpp"
#include "gcnsim/memory.hpp"
#include "test_util.hpp"
#include "traces.hpp"

#include <gtest/gtest.h>

#include <map>
#include <tuple>

namespace gcnsim {
namespace {

MemoryRequest req(RequestClass cls, uint64_t address, uint64_t batch = 0, uint64_t seq = 0) {
  MemoryRequest r;
  r.cls = cls;
  r.address = address;
  r.size = 64;
  r.batch_id = batch;
  r.seq = seq;
  return r;
}

std::vector<uint64_t> addresses(const std::vector<MemoryRequest>& reqs) {
  std::vector<uint64_t> out;
  for (const auto& r : reqs) out.push_back(r.address);
  return out;
}

TEST(Coordinate, PriorityOrderWithinABatch) {
  const std::vector<MemoryRequest> batch{req(RequestClass::Output, 4, 0, 0),
                                         req(RequestClass::Weight, 3, 0, 1),
                                         req(RequestClass::Input, 2, 0, 2),
                                         req(RequestClass::Edge, 1, 0, 3)};
  EXPECT_EQ(addresses(coordinate_requests(batch, true)), (std::vector<uint64_t>{1, 2, 3, 4}));
  EXPECT_EQ(addresses(coordinate_requests(batch, false)), (std::vector<uint64_t>{4, 3, 2, 1}));
}

TEST(Coordinate, BatchesKeepTheirOrder) {
  const std::vector<MemoryRequest> reqs{req(RequestClass::Output, 10, 0, 0),
                                        req(RequestClass::Edge, 20, 1, 1)};
  EXPECT_EQ(addresses(coordinate_requests(reqs, true)), (std::vector<uint64_t>{10, 20}));
}

TEST(Coordinate, AddressBreaksTies) {
  const std::vector<MemoryRequest> reqs{req(RequestClass::Input, 300, 0, 0),
                                        req(RequestClass::Input, 100, 0, 1),
                                        req(RequestClass::Input, 200, 0, 2)};
  EXPECT_EQ(addresses(coordinate_requests(reqs, true)), (std::vector<uint64_t>{100, 200, 300}));
}

TEST(Coordinate, ImprovesRowHitsOnInterleavedTraces) {
  auto rng = testing::rng_for(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto trace = testing::interleaved_trace(rng);
    DramModel on(SystemConfig{});
    DramModel off(SystemConfig{});
    on.service_all(coordinate_requests(trace, true));
    off.service_all(coordinate_requests(trace, false));
    EXPECT_GE(on.stats().hit_rate(), off.stats().hit_rate()) << "trial " << trial;
  }
}

TEST(Remap, Examples) {
  const SystemConfig sys;
  EXPECT_EQ(remap_address(0, sys), (DramAddress{0, 0, 0, 0}));
  EXPECT_EQ(remap_address(2048, sys), (DramAddress{1, 0, 0, 0}));
  EXPECT_EQ(remap_address(16384, sys), (DramAddress{0, 1, 0, 0}));
  EXPECT_EQ(remap_address(65536 + 5, sys), (DramAddress{0, 0, 1, 5}));
  SystemConfig bad;
  bad.dram_banks = 3;
  EXPECT_THROW(remap_address(0, bad), ConfigError);
}

TEST(Remap, IsABijection) {
  SystemConfig sys;
  sys.dram_channels = 4;
  sys.dram_banks = 2;
  sys.row_buffer_bytes = 16;
  std::map<std::tuple<uint64_t, uint64_t, uint64_t, uint64_t>, uint64_t> seen;
  for (uint64_t addr = 0; addr < 4 * 2 * 16 * 8; ++addr) {
    const auto d = remap_address(addr, sys);
    ASSERT_LT(d.channel, 4u);
    ASSERT_LT(d.bank, 2u);
    ASSERT_LT(d.column, 16u);
    ASSERT_TRUE(seen.emplace(std::tuple(d.channel, d.bank, d.row, d.column), addr).second);
    const uint64_t back =
        ((d.row * 2 + d.bank) * 4 + d.channel) * sys.row_buffer_bytes + d.column;
    ASSERT_EQ(back, addr);
  }
}

TEST(AggBuffer, PingPongExclusion) {
  AggBufferImage buf(4, 2);
  const int a = buf.begin_fill({0, 4}, AggregateFn::Add);
  EXPECT_THROW(buf.begin_fill({4, 8}, AggregateFn::Add), SimulationError);
  const FixedRow x = testing::row_of({1, 2});
  buf.apply(a, 1, x.data(), std::nullopt);
  buf.apply(a, 1, x.data(), std::nullopt);
  EXPECT_THROW(buf.read(a, 1, 10), SimulationError);
  EXPECT_EQ(buf.finalize(a, 1, 10), testing::row_of({2, 4}));
  EXPECT_THROW(buf.read(a, 1, 9), SimulationError);
  EXPECT_EQ(buf.read(a, 1, 10), testing::row_of({2, 4}));
  buf.begin_drain(a);
  const int b = buf.begin_fill({4, 8}, AggregateFn::Max);
  EXPECT_NE(a, b);
  buf.begin_drain(b);
  EXPECT_THROW(buf.begin_fill({8, 12}, AggregateFn::Add), SimulationError);
  buf.release(a);
  EXPECT_EQ(buf.state(a), AggBufferImage::ChunkState::Idle);
  EXPECT_THROW(buf.begin_fill({0, 5}, AggregateFn::Add), SimulationError);
}

TEST(AggBuffer, CoefficientsScaleTerms) {
  AggBufferImage buf(2, 1);
  const int c = buf.begin_fill({0, 2}, AggregateFn::WeightedAdd);
  const FixedRow x = testing::row_of({3});
  buf.apply(c, 0, x.data(), Fixed32::from_double(0.5));
  buf.apply(c, 0, x.data(), Fixed32::from_double(0.25));
  EXPECT_EQ(buf.finalize(c, 0, 0), testing::row_of({2.25}));
}

}  // namespace
}  // namespace gcnsim
