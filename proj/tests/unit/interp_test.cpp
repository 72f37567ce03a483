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

#include <bit>
#include <optional>
#include <random>

#include <gtest/gtest.h>

#include "kf/frontend/typecheck.hpp"
#include "kf/interp/interp.hpp"
#include "kf/sim/sim.hpp"
#include "sim_util.hpp"
#include "test_kernels.hpp"

namespace kf::interp {
namespace {

using rt::ArgValue;
using rt::LaunchRecord;
using rt::NdRange;
using rt::RuntimeError;

Program parse(const std::string& text) {
  auto r = compile_source(SourceUnit("t.mcl", text));
  EXPECT_TRUE(r.program.has_value()) << (r.diags.empty() ? "" : r.diags[0].message);
  return r.program ? std::move(*r.program) : Program{};
}

RuntimeError::Kind fault_kind(const std::string& text, rt::DeviceState& dev, std::vector<LaunchRecord> roots,
                              std::string* message = nullptr, InterpConfig cfg = {}) {
  const Program p = parse(text);
  try {
    interpret(p, dev, std::move(roots), cfg);
  } catch (const RuntimeError& e) {
    if (message != nullptr) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "run did not fail";
  return RuntimeError::Kind::kPrecondition;
}

TEST(Interp, VectorAdd) {
  const Program p = parse(testing::kSmallKernels[0]);
  rt::DeviceState dev;
  for (const char* n : {"a", "b", "c"}) dev.create_buffer(n, 8);
  dev.initialize(0, {1, 2, 3, 4, 5, 6, 7, 8});
  dev.initialize(1, std::vector<std::uint32_t>(8, 10));
  const auto r = interpret(p, dev, {{"k", NdRange::linear(8, 4), {ArgValue::buffer(0), ArgValue::buffer(1), ArgValue::buffer(2)}}});
  EXPECT_EQ(r.buffers[2].words, (std::vector<std::uint32_t>{11, 12, 13, 14, 15, 16, 17, 18}));
}

TEST(Interp, ReduceAndBroadcast) {
  rt::DeviceState dev;
  dev.create_buffer("o", 32);
  auto r = interpret(parse(testing::kSmallKernels[4]), dev, {{"k", NdRange::linear(32, 16), {ArgValue::buffer(0)}}});
  EXPECT_EQ(r.buffers[0].words, std::vector<std::uint32_t>(32, 120));
  rt::DeviceState d2;
  d2.create_buffer("o", 8);
  r = interpret(parse(testing::kSmallKernels[5]), d2, {{"k", NdRange::linear(8, 4), {ArgValue::buffer(0)}}});
  EXPECT_EQ(r.buffers[0].words, std::vector<std::uint32_t>(8, 6));
}

TEST(Interp, SyncsSplitRegions) {
  const Program p = parse(
      "kernel void k(global int* o) { int x = work_group_reduce_add(1); barrier();"
      " o[get_global_id(0)] = x + work_group_reduce_max(get_local_id(0)); }");
  rt::DeviceState dev;
  dev.create_buffer("o", 8);
  const auto r = interpret(p, dev, {{"k", NdRange::linear(8, 4), {ArgValue::buffer(0)}}});
  EXPECT_EQ(r.buffers[0].words, std::vector<std::uint32_t>(8, 7));
  std::size_t regions = 0;
  std::uint32_t max_region = 0;
  for (const auto& e : r.events) {
    if (e.kind != Event::Kind::kRegion) continue;
    ++regions;
    max_region = std::max(max_region, e.region);
  }
  // Three syncs give four regions per group, each entered by every item.
  EXPECT_EQ(max_region, 3u);
  EXPECT_EQ(regions, 2u * 4u * 4u);
}

TEST(Interp, EventLogFormat) {
  const Program p = parse("kernel void k(global int* o) { o[0] = 1; }");
  rt::DeviceState dev;
  dev.create_buffer("o", 1);
  const auto r = interpret(p, dev, {{"k", NdRange::linear(1, 1), {ArgValue::buffer(0)}}});
  EXPECT_EQ(format_events(r.events), "0,k,0,0,0,region,\n0,k,0,0,0,finish,\n");
}

TEST(Interp, PipeResidueAndPair) {
  rt::DeviceState dev;
  dev.create_pipe(32, 16, "p");
  auto r = interpret(parse(testing::kSmallKernels[7]), dev, {{"k", NdRange::linear(1, 1), {ArgValue::pipe(0)}}});
  ASSERT_EQ(r.pipes.size(), 1u);
  EXPECT_EQ(r.pipes[0].contents, (std::vector<std::uint32_t>{0, 1, 4, 9, 16, 25, 36, 49}));

  const Program pair = parse(
      "kernel void producer(write_only pipe int p) { for (int i = 0; i < 8; i++) { write_pipe(p, i * i); } }\n"
      "kernel void consumer(read_only pipe int p, global int* o) { int s = 0;"
      " for (int i = 0; i < 8; i++) { s = s + read_pipe(p); } o[0] = s; }");
  for (int depth : {1, 2, 4, 8}) {
    rt::DeviceState d;
    d.create_pipe(32, depth, "p");
    d.create_buffer("o", 1);
    r = interpret(pair, d,
                  {{"producer", NdRange::linear(1, 1), {ArgValue::pipe(0)}},
                   {"consumer", NdRange::linear(1, 1), {ArgValue::pipe(0), ArgValue::buffer(0)}}});
    EXPECT_EQ(r.buffers[0].words[0], 140u) << depth;
    EXPECT_TRUE(r.pipes[0].contents.empty());
  }
}

TEST(Interp, DeadlockNamesPipe) {
  rt::DeviceState dev;
  dev.create_pipe(32, 4, "squares");
  std::string msg;
  EXPECT_EQ(fault_kind(testing::kSmallKernels[7], dev, {{"k", NdRange::linear(1, 1), {ArgValue::pipe(0)}}}, &msg),
            RuntimeError::Kind::kDeadlock);
  EXPECT_NE(msg.find("write to full pipe 'squares'"), std::string::npos) << msg;
}

TEST(Interp, Faults) {
  rt::DeviceState dev;
  dev.create_buffer("o", 4);
  EXPECT_EQ(fault_kind("kernel void k(global int* o) { if (get_local_id(0) < 2) { barrier(); } o[0] = 1; }", dev,
                       {{"k", NdRange::linear(4, 4), {ArgValue::buffer(0)}}}),
            RuntimeError::Kind::kDivergence);
  std::string msg;
  EXPECT_EQ(fault_kind("kernel void k(global int* o) { o[get_global_id(0)] = 1; }", dev,
                       {{"k", NdRange::linear(8, 4), {ArgValue::buffer(0)}}}, &msg),
            RuntimeError::Kind::kBounds);
  EXPECT_NE(msg.find("buffer 'o' index 4"), std::string::npos) << msg;
  EXPECT_EQ(fault_kind("kernel void k(global int* o) { o[0] = work_group_broadcast(1, 4); }", dev,
                       {{"k", NdRange::linear(4, 4), {ArgValue::buffer(0)}}}),
            RuntimeError::Kind::kBounds);
  EXPECT_EQ(fault_kind("kernel void k(global int* o) { while (true) { } }", dev,
                       {{"k", NdRange::linear(1, 1), {ArgValue::buffer(0)}}}, nullptr, {.max_steps = 10'000}),
            RuntimeError::Kind::kWatchdog);
}

TEST(Interp, EnqueueRunsChildrenAfterParent) {
  const Program p = parse(
      "kernel void child(global int* o, int g) { o[g] = o[g] + 1; }\n"
      "kernel void parent(queue_t q, global int* o) { if (get_local_id(0) == 0) {"
      " enqueue_kernel(q, 1, 1, \"child\", o, get_group_id(0)); } }");
  for (std::uint32_t g : {1u, 4u, 16u}) {
    rt::DeviceState dev;
    dev.create_buffer("o", g);
    const auto r = interpret(p, dev, {{"parent", NdRange::linear(4 * g, 4), {ArgValue::queue(), ArgValue::buffer(0)}}});
    EXPECT_EQ(r.child_launches, g);
    EXPECT_EQ(r.buffers[0].words, std::vector<std::uint32_t>(g, 1));
  }
}

constexpr const char* kEdges =
    "kernel void k(global int* o, global uint* u, int zero, float big) {"
      " int m = (int)0x80000000u;"
      " o[0] = m / -1; o[1] = m % -1; o[2] = 7 / zero; o[3] = 7 % zero;"
      " o[4] = (int)big; o[5] = (int)(0.0f - big); o[6] = (int)(big / 0.0f - big / 0.0f);"
      " u[0] = (uint)(0.0f - 3.5f); u[1] = (uint)big; u[2] = (uint)(zero + 2 > 0); u[3] = 5u / (uint)zero; }";

TEST(Interp, ArithmeticEdgeCases) {
  const Program p = parse(kEdges);
  rt::DeviceState dev;
  dev.create_buffer("o", 7);
  dev.create_buffer("u", 4);
  const auto r = interpret(p, dev,
                           {{"k", NdRange::linear(1, 1),
                             {ArgValue::buffer(0), ArgValue::buffer(1), ArgValue::scalar(0),
                              ArgValue::scalar(std::bit_cast<std::uint32_t>(1e20f))}}});
  EXPECT_EQ(r.buffers[0].words,
            (std::vector<std::uint32_t>{0x80000000u, 0, 0, 0, 0x7fffffffu, 0x80000000u, 0}));
  EXPECT_EQ(r.buffers[1].words, (std::vector<std::uint32_t>{0, 0xffffffffu, 1, 0}));

  rt::DeviceState d2;
  d2.create_buffer("o", 7);
  d2.create_buffer("u", 4);
  const auto s = sim::run_ndrange(testing::build_netlist(kEdges), d2,
                                  {{"k", NdRange::linear(1, 1),
                                    {ArgValue::buffer(0), ArgValue::buffer(1), ArgValue::scalar(0),
                                     ArgValue::scalar(std::bit_cast<std::uint32_t>(1e20f))}}});
  EXPECT_EQ(s.buffers[0].words, r.buffers[0].words);
  EXPECT_EQ(s.buffers[1].words, r.buffers[1].words);
}

// Runs a kernel through the interpreter and the compiled simulator over the
// same random inputs.
void expect_same(const std::string& text, NdRange nd, std::uint32_t seed) {
  const Program p = parse(text);
  const auto net = testing::build_netlist(text);
  const KernelDecl& k = p.kernels.back();
  std::mt19937 rng(seed);
  rt::DeviceState dev;
  std::vector<ArgValue> args;
  for (const auto& prm : k.params) {
    switch (prm.kind) {
      case ParamKind::kGlobalBuffer: {
        const int b = dev.create_buffer(prm.name, 64);
        std::vector<std::uint32_t> w(64);
        for (auto& x : w) {
          const auto v = static_cast<std::int32_t>(rng() % 21) - 5;
          x = prm.elem == Type::kF32 ? std::bit_cast<std::uint32_t>(static_cast<float>(v) * 0.75f)
                                     : static_cast<std::uint32_t>(v);
        }
        dev.initialize(b, w);
        args.push_back(ArgValue::buffer(b));
        break;
      }
      case ParamKind::kPipe: args.push_back(ArgValue::pipe(dev.create_pipe(32, 16))); break;
      case ParamKind::kDeviceQueue: args.push_back(ArgValue::queue()); break;
      case ParamKind::kScalar:
        args.push_back(ArgValue::scalar(prm.elem == Type::kF32 ? std::bit_cast<std::uint32_t>(2.5f) : 5u));
        break;
    }
  }
  rt::DeviceState d2 = dev;
  std::optional<RuntimeError::Kind> fa;
  std::optional<RuntimeError::Kind> fb;
  InterpResult a;
  sim::RunResult b;
  try {
    a = interpret(p, dev, {{k.name, nd, args}});
  } catch (const RuntimeError& e) {
    fa = e.kind();
  }
  try {
    b = sim::run_ndrange(net, d2, {{k.name, nd, args}});
  } catch (const RuntimeError& e) {
    fb = e.kind();
  }
  // Data-dependent syncs may diverge; both must then report the same fault.
  ASSERT_EQ(fa, fb) << text << " seed " << seed;
  if (fa) return;
  ASSERT_EQ(a.buffers.size(), b.buffers.size());
  for (std::size_t i = 0; i < a.buffers.size(); ++i) EXPECT_EQ(a.buffers[i].words, b.buffers[i].words) << text;
  EXPECT_EQ(a.pipes, b.pipes) << text;
  EXPECT_EQ(a.child_launches, b.child_launches);
}

TEST(Interp, MatchesSimulatorOnSmallKernels) {
  for (std::size_t i = 0; i < std::size(testing::kSmallKernels); ++i) {
    if (i == 8) continue;  // reads a pipe nothing writes
    // Kernel 6 reads across items, so keep it to one group.
    const NdRange nd = i == 6 ? NdRange::linear(8, 8) : i == 7 ? NdRange::linear(1, 1) : NdRange::linear(8, 4);
    for (std::uint32_t seed = 0; seed < 4; ++seed) expect_same(testing::kSmallKernels[i], nd, seed);
  }
}

}  // namespace
}  // namespace kf::interp
