// Copyright 2026 The KernelForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <map>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "kf/sim/sim.hpp"
#include "kf/support/error.hpp"
#include "sim_util.hpp"
#include "test_kernels.hpp"

namespace kf::sim {
namespace {

using rt::ArgValue;
using rt::LaunchRecord;
using rt::NdRange;
using rt::RuntimeError;

constexpr const char* kVadd =
    "kernel void vadd(global const int* a, global const int* b, global int* c) {"
    " int i = get_global_id(0); c[i] = a[i] + b[i]; }";

std::vector<std::uint32_t> iota(std::uint32_t n, std::uint32_t from = 0) {
  std::vector<std::uint32_t> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = from + i;
  return v;
}

struct Vadd {
  rt::DeviceState dev;
  std::vector<LaunchRecord> roots;
  explicit Vadd(std::uint32_t n, std::uint32_t local) {
    const int a = dev.create_buffer("a", n);
    const int b = dev.create_buffer("b", n);
    const int c = dev.create_buffer("c", n);
    dev.initialize(a, iota(n));
    dev.initialize(b, std::vector<std::uint32_t>(n, 1));
    roots.push_back({"vadd", NdRange::linear(n, local),
                     {ArgValue::buffer(a), ArgValue::buffer(b), ArgValue::buffer(c)}});
  }
};

RuntimeError::Kind fault_kind(const netlist::Netlist& net, rt::DeviceState& dev, std::vector<LaunchRecord> roots,
                              std::string* message = nullptr, SimConfig cfg = {}) {
  try {
    run_ndrange(net, dev, std::move(roots), cfg);
  } catch (const RuntimeError& e) {
    if (message != nullptr) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "run did not fail";
  return RuntimeError::Kind::kPrecondition;
}

TEST(Sim, VectorAdd) {
  const auto net = testing::build_netlist(kVadd);
  Vadd v(8, 4);
  const auto r = run_ndrange(net, v.dev, v.roots);
  EXPECT_EQ(r.buffers[2].words, iota(8, 1));
  EXPECT_EQ(r.child_launches, 0u);
}

TEST(Sim, ThroughputSlopeIsOnePerItem) {
  const auto net = testing::build_netlist(kVadd);
  std::map<std::uint32_t, std::uint64_t> cycles;
  for (std::uint32_t n : {16u, 32u, 64u, 128u}) {
    Vadd v(n, n);
    cycles[n] = run_ndrange(net, v.dev, v.roots).cycles;
  }
  for (std::uint32_t n : {16u, 32u, 64u}) EXPECT_EQ(cycles[2 * n] - cycles[n], n);
}

TEST(Sim, ExitAfterDepthPlusHandshake) {
  // Single block: load (1) + multiply (3) + store (1) gives depth 5.
  const auto net = testing::build_netlist(
      "kernel void k(global int* a) { int i = get_global_id(0); a[i] = a[i] * 7; }");
  ASSERT_EQ(net.modules[0].schedule.blocks.size(), 1u);
  const int depth = net.modules[0].schedule.blocks[0].depth;
  EXPECT_EQ(depth, 5);
  rt::DeviceState dev;
  const int a = dev.create_buffer("a", 1);
  dev.initialize(a, {6});
  const auto r = run_ndrange(net, dev, {{"k", NdRange::linear(1, 1), {ArgValue::buffer(a)}}}, {.trace = true});
  EXPECT_EQ(r.buffers[0].words[0], 42u);
  EXPECT_NE(r.trace.find("0,k,launch,group=0 items=1\n"), std::string::npos) << r.trace;
  EXPECT_NE(r.trace.find("4,k.b0,enter,item=0 from=dispatch\n"), std::string::npos) << r.trace;
  EXPECT_NE(r.trace.find(fmt::format("{},k.b0,retire,item=0\n", 4 + depth)), std::string::npos) << r.trace;
  EXPECT_NE(r.trace.find(fmt::format("{},k,complete,group=0\n", 4 + depth + 4)), std::string::npos) << r.trace;
  EXPECT_EQ(r.cycles, static_cast<std::uint64_t>(4 + depth + 4 + 1));
}

TEST(Sim, IdleStepOnlyCountsCycles) {
  const auto net = testing::build_netlist(kVadd);
  Vadd v(4, 4);
  Simulator s(net, v.dev, v.roots);
  s.run();
  ASSERT_TRUE(s.done());
  const auto before = s.snapshot();
  const auto c = s.cycle();
  EXPECT_FALSE(s.step());
  EXPECT_EQ(s.cycle(), c + 1);
  auto after = s.snapshot();
  EXPECT_EQ(before.substr(before.find('\n')), after.substr(after.find('\n')));
}

TEST(Sim, StepAndRunToCycleAgree) {
  const auto net = testing::build_netlist(testing::kSmallKernels[6]);
  auto setup = [](rt::DeviceState& dev) {
    dev.create_buffer("a", 16);
    return std::vector<LaunchRecord>{{"k", NdRange::linear(16, 8), {ArgValue::buffer(0)}}};
  };
  for (std::uint64_t n : {1u, 7u, 30u, 61u, 200u}) {
    rt::DeviceState d1;
    rt::DeviceState d2;
    Simulator a(net, d1, setup(d1));
    Simulator b(net, d2, setup(d2));
    for (std::uint64_t i = 0; i < n; ++i) a.step();
    b.run_until(n);
    EXPECT_EQ(a.snapshot(), b.snapshot()) << n;
  }
}

TEST(Sim, Deterministic) {
  for (const char* k : {kVadd, testing::kSmallKernels[3], testing::kSmallKernels[4]}) {
    const auto net = testing::build_netlist(k);
    RunResult r[2];
    for (auto& x : r) {
      rt::DeviceState dev;
      for (const auto& p : net.modules[0].schedule.design.params) dev.create_buffer(p.name, 64);
      std::vector<ArgValue> args;
      for (std::size_t i = 0; i < net.modules[0].schedule.design.params.size(); ++i) {
        args.push_back(ArgValue::buffer(static_cast<int>(i)));
        dev.initialize(static_cast<int>(i), iota(64, 3));
      }
      x = run_ndrange(net, dev, {{net.modules[0].kernel(), NdRange::linear(8, 4), args}}, {.trace = true});
    }
    EXPECT_EQ(r[0].cycles, r[1].cycles);
    EXPECT_EQ(r[0].trace, r[1].trace);
    for (std::size_t i = 0; i < r[0].buffers.size(); ++i) EXPECT_EQ(r[0].buffers[i].words, r[1].buffers[i].words);
  }
}

TEST(Sim, ReduceGivesEveryItemTheSum) {
  const auto net = testing::build_netlist(testing::kSmallKernels[4]);
  rt::DeviceState dev;
  dev.create_buffer("o", 32);
  const auto r = run_ndrange(net, dev, {{"k", NdRange::linear(32, 16), {ArgValue::buffer(0)}}});
  EXPECT_EQ(r.buffers[0].words, std::vector<std::uint32_t>(32, 120));
}

TEST(Sim, BroadcastSelectsItem) {
  const auto net = testing::build_netlist(testing::kSmallKernels[5]);
  rt::DeviceState dev;
  dev.create_buffer("o", 8);
  const auto r = run_ndrange(net, dev, {{"k", NdRange::linear(8, 4), {ArgValue::buffer(0)}}});
  EXPECT_EQ(r.buffers[0].words, std::vector<std::uint32_t>(8, 6));
}

TEST(Sim, BroadcastSourceOutsideGroupFaults) {
  const auto net = testing::build_netlist(
      "kernel void k(global int* o) { o[get_global_id(0)] = work_group_broadcast(1, 9); }");
  rt::DeviceState dev;
  dev.create_buffer("o", 8);
  EXPECT_EQ(fault_kind(net, dev, {{"k", NdRange::linear(8, 4), {ArgValue::buffer(0)}}}),
            RuntimeError::Kind::kBounds);
}

constexpr const char* kPipePair =
    "kernel void producer(write_only pipe int p) { for (int i = 0; i < 8; i++) { write_pipe(p, i * i); } }\n"
    "kernel void consumer(read_only pipe int p, global int* o) { int s = 0;"
    " for (int i = 0; i < 8; i++) { s = s + read_pipe(p); } o[0] = s; }";

TEST(Sim, PipePairSums) {
  const auto net = testing::build_netlist(kPipePair);
  for (int depth : {1, 2, 4, 8}) {
    rt::DeviceState dev;
    const int p = dev.create_pipe(32, depth, "p");
    const int o = dev.create_buffer("o", 1);
    Simulator s(net, dev,
                {{"producer", NdRange::linear(1, 1), {ArgValue::pipe(p)}},
                 {"consumer", NdRange::linear(1, 1), {ArgValue::pipe(p), ArgValue::buffer(o)}}});
    int max_occ = 0;
    s.set_observer([&](const Simulator& x) { max_occ = std::max(max_occ, x.device().pipes[0].occupancy()); });
    const auto r = s.run();
    EXPECT_EQ(r.buffers[0].words[0], 140u) << depth;
    EXPECT_TRUE(r.pipes[0].contents.empty());
    EXPECT_LE(max_occ, depth);
  }
}

TEST(Sim, SimultaneousReadAndWriteKeepOccupancy) {
  const auto net = testing::build_netlist(
      "kernel void producer(write_only pipe int p) { write_pipe(p, 1); write_pipe(p, 2); write_pipe(p, 3); }\n"
      "kernel void consumer(read_only pipe int p, global int* o) {"
      " int s = read_pipe(p); s = s * 10 + read_pipe(p); s = s * 10 + read_pipe(p); o[0] = s; }");
  rt::DeviceState dev;
  const int p = dev.create_pipe(32, 4, "p");
  const int o = dev.create_buffer("o", 1);
  Simulator s(net, dev,
              {{"producer", NdRange::linear(1, 1), {ArgValue::pipe(p)}},
               {"consumer", NdRange::linear(1, 1), {ArgValue::pipe(p), ArgValue::buffer(o)}}},
              {.trace = true});
  std::vector<int> occ{0};
  s.set_observer([&](const Simulator& x) { occ.push_back(x.device().pipes[0].occupancy()); });
  EXPECT_EQ(s.run().buffers[0].words[0], 123u);
  // Cycles with both a read and a write.
  std::map<std::uint64_t, int> ops;
  std::istringstream in{std::string(s.trace())};
  for (std::string line; std::getline(in, line);) {
    const auto c = std::stoull(line.substr(0, line.find(',')));
    if (line.find(",pipe_read,") != std::string::npos) ops[c] |= 1;
    if (line.find(",pipe_write,") != std::string::npos) ops[c] |= 2;
  }
  int both = 0;
  for (const auto& [c, mask] : ops) {
    if (mask != 3) continue;
    ++both;
    EXPECT_EQ(occ[c + 1], occ[c]) << "cycle " << c;
  }
  EXPECT_GT(both, 0);
}

TEST(Sim, ConsumerlessPipeDeadlockNamesPipe) {
  const auto net = testing::build_netlist(testing::kSmallKernels[7]);
  rt::DeviceState dev;
  dev.create_pipe(32, 4, "squares");
  std::string msg;
  EXPECT_EQ(fault_kind(net, dev, {{"k", NdRange::linear(1, 1), {ArgValue::pipe(0)}}}, &msg),
            RuntimeError::Kind::kDeadlock);
  EXPECT_NE(msg.find("watchdog"), std::string::npos) << msg;
  EXPECT_NE(msg.find("write to full pipe 'squares'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("squares=4/4"), std::string::npos) << msg;
}

TEST(Sim, PipeResidueAfterGrid) {
  const auto net = testing::build_netlist(
      "kernel void k(write_only pipe int p) { write_pipe(p, 77); }");
  rt::DeviceState dev;
  dev.create_pipe(32, 4, "p");
  const auto r = run_ndrange(net, dev, {{"k", NdRange::linear(1, 1), {ArgValue::pipe(0)}}});
  EXPECT_EQ(r.pipes[0].contents, std::vector<std::uint32_t>{77});
}

TEST(Sim, WatchdogStopsLongRun) {
  const auto net = testing::build_netlist(kVadd);
  Vadd v(64, 64);
  std::string msg;
  EXPECT_EQ(fault_kind(net, v.dev, v.roots, &msg, {.max_cycles = 20}), RuntimeError::Kind::kWatchdog);
  EXPECT_NE(msg.find("max_cycles 20"), std::string::npos);
}

TEST(Sim, EnqueueCountsChildren) {
  const auto net = testing::build_netlist(
      "kernel void child(global int* o, int g) { o[g] = o[g] + 1; }\n"
      "kernel void parent(queue_t q, global int* o) { if (get_local_id(0) == 0) {"
      " enqueue_kernel(q, 1, 1, \"child\", o, get_group_id(0)); } }");
  for (std::uint32_t g : {1u, 4u, 16u}) {
    rt::DeviceState dev;
    dev.create_buffer("o", g);
    const auto r = run_ndrange(net, dev, {{"parent", NdRange::linear(4 * g, 4), {ArgValue::queue(), ArgValue::buffer(0)}}});
    EXPECT_EQ(r.child_launches, g);
    EXPECT_EQ(r.buffers[0].words, std::vector<std::uint32_t>(g, 1));
  }
}

TEST(Sim, OutOfBoundsNamesBufferAndStream) {
  const auto net = testing::build_netlist(kVadd);
  Vadd v(8, 4);
  v.roots[0].nd = NdRange::linear(12, 4);
  std::string msg;
  EXPECT_EQ(fault_kind(net, v.dev, v.roots, &msg), RuntimeError::Kind::kBounds);
  EXPECT_NE(msg.find("buffer 'a' index 8"), std::string::npos) << msg;
  EXPECT_NE(msg.find("stream s"), std::string::npos) << msg;
}

TEST(Sim, DivergentBarrierFaults) {
  const auto net = testing::build_netlist(
      "kernel void k(global int* o) { if (get_local_id(0) < 2) { barrier(); } o[get_global_id(0)] = 1; }");
  rt::DeviceState dev;
  dev.create_buffer("o", 4);
  EXPECT_EQ(fault_kind(net, dev, {{"k", NdRange::linear(4, 4), {ArgValue::buffer(0)}}}),
            RuntimeError::Kind::kDivergence);
}

TEST(Sim, LaunchOnMappedBufferIsOwnershipError) {
  const auto net = testing::build_netlist(kVadd);
  Vadd v(4, 4);
  v.dev.svm_map(1);
  EXPECT_EQ(fault_kind(net, v.dev, v.roots), RuntimeError::Kind::kOwnership);
}

TEST(Sim, CoLaunchMayNotShareWrittenBuffers) {
  const auto net = testing::build_netlist(kVadd);
  Vadd v(4, 4);
  auto roots = v.roots;
  roots.push_back(v.roots[0]);
  EXPECT_EQ(fault_kind(net, v.dev, roots), RuntimeError::Kind::kPrecondition);
}

TEST(Sim, CensusConservedEveryCycle) {
  for (const char* k : {testing::kSmallKernels[3], testing::kSmallKernels[6], testing::kSmallKernels[2]}) {
    const auto net = testing::build_netlist(k);
    rt::DeviceState dev;
    const auto& params = net.modules[0].schedule.design.params;
    std::vector<ArgValue> args;
    for (std::size_t i = 0; i < params.size(); ++i) {
      dev.initialize(dev.create_buffer(params[i].name, 128), iota(16));
      args.push_back(ArgValue::buffer(static_cast<int>(i)));
    }
    Simulator s(net, dev, {{"k", NdRange::linear(16, 8), args}});
    s.set_observer([&](const Simulator& x) {
      const Census c = x.census();
      EXPECT_EQ(c.admitted - c.retired, c.in_pipeline + c.in_links + c.at_sync);
    });
    s.run();
    EXPECT_EQ(s.census().retired, 16u);
  }
}

TEST(Sim, InjectedFaultChangesResult) {
  auto net = testing::build_netlist(kVadd);
  EXPECT_TRUE(inject_fault(net, "swap-add-sub"));
  Vadd v(4, 4);
  const auto r = run_ndrange(net, v.dev, v.roots);
  EXPECT_EQ(r.buffers[2].words, (std::vector<std::uint32_t>{0xffffffffu, 0, 1, 2}));
  EXPECT_THROW(inject_fault(net, "melt"), ConfigError);
}

TEST(Sim, LoopAndDiamondKernels) {
  const auto loop = testing::build_netlist(testing::kSmallKernels[3]);
  rt::DeviceState dev;
  dev.initialize(dev.create_buffer("a", 32), iota(32));
  dev.create_buffer("o", 4);
  auto r = run_ndrange(loop, dev, {{"k", NdRange::linear(4, 2), {ArgValue::buffer(0), ArgValue::buffer(1)}}});
  EXPECT_EQ(r.buffers[1].words, (std::vector<std::uint32_t>{28, 92, 156, 220}));

  const auto diamond = testing::build_netlist(testing::kSmallKernels[2]);
  rt::DeviceState d2;
  d2.initialize(d2.create_buffer("a", 8), iota(8));
  r = run_ndrange(diamond, d2, {{"k", NdRange::linear(8, 8), {ArgValue::buffer(0)}}});
  EXPECT_EQ(r.buffers[0].words,
            (std::vector<std::uint32_t>{0, 0xffffffffu, 0xfffffffeu, 0xfffffffdu, 8, 10, 12, 14}));
}

}  // namespace
}  // namespace kf::sim
