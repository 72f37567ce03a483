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

#include <algorithm>
#include <map>
#include <string>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "kf/frontend/typecheck.hpp"
#include "kf/ir/build.hpp"
#include "kf/ir/cse.hpp"
#include "kf/ir/dominance.hpp"
#include "kf/ir/dump.hpp"
#include "kf/ir/ssa.hpp"

namespace kf::ir {
namespace {

Function lower(const std::string& text, bool ssa = true, std::string kernel = "") {
  auto r = compile_source(SourceUnit("t.mcl", text));
  EXPECT_TRUE(r.program.has_value());
  if (!r.program) return {};
  const KernelDecl* k =
      kernel.empty() ? &r.program->kernels.back() : r.program->find_kernel(kernel);
  Function f = build_cfg(*r.program, *k);
  if (ssa) to_ssa(f);
  return f;
}

std::size_t count_phis(const Function& f) {
  std::size_t n = 0;
  for (const auto& b : f.blocks) n += b.phis.size();
  return n;
}

std::size_t census(const Function& f, Opcode op, BinOp bin = BinOp::kAdd) {
  std::size_t n = 0;
  for (const auto& b : f.blocks) {
    for (const auto& in : b.instrs) {
      if (in.op == op && (op != Opcode::kBinop || in.bin == bin)) ++n;
    }
  }
  return n;
}

bool has_kind(const std::vector<SsaViolation>& v, const std::string& kind) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.kind == kind; });
}

std::string kinds(const std::vector<SsaViolation>& v) {
  std::string s;
  for (const auto& x : v) s += x.kind + ": " + x.message + "\n";
  return s;
}

// Independent CFG checker: edge count and back edges found by a DFS colouring.
struct CfgFacts {
  std::size_t edges = 0;
  std::vector<std::pair<BlockId, BlockId>> back_edges;
};

CfgFacts cfg_facts(const Function& f) {
  CfgFacts facts;
  std::vector<int> colour(f.blocks.size(), 0);
  auto visit = [&](auto&& self, BlockId b) -> void {
    colour[b] = 1;
    for (BlockId s : f.blocks[b].successors()) {
      ++facts.edges;
      if (colour[s] == 1) facts.back_edges.emplace_back(b, s);
      if (colour[s] == 0) self(self, s);
    }
    colour[b] = 2;
  };
  visit(visit, f.entry);
  return facts;
}

constexpr const char* kVadd =
    "kernel void vadd(global const int* a, global const int* b, global int* c) {\n"
    "  int i = get_global_id(0);\n"
    "  c[i] = a[i] + b[i];\n"
    "}\n";

TEST(BuildCfg, StraightLineIsOneBlock) {
  Function f = lower(kVadd, false);
  ASSERT_EQ(f.blocks.size(), 1u);
  EXPECT_EQ(f.blocks[0].term.kind, TermKind::kRet);
}

TEST(BuildCfg, DiamondHasFourBlocks) {
  Function f = lower(
      "kernel void d(global int* a) { int i = get_global_id(0); int x = 0;"
      " if (i < 4) { x = 1; } else { x = 2; } a[i] = x; }",
      false);
  ASSERT_EQ(f.blocks.size(), 4u);
  const auto facts = cfg_facts(f);
  EXPECT_EQ(facts.edges, 4u);
  EXPECT_TRUE(facts.back_edges.empty());
  EXPECT_EQ(f.predecessors()[3].size(), 2u);
}

TEST(BuildCfg, ForLoopHasBackEdge) {
  Function f = lower(
      "kernel void l(global int* a) { int s = 0;"
      " for (int j = 0; j < 8; j++) { s = s + a[j]; } a[0] = s; }",
      false);
  ASSERT_EQ(f.blocks.size(), 4u);
  const auto facts = cfg_facts(f);
  // entry->header, header->body, header->exit, body->header
  EXPECT_EQ(facts.edges, 4u);
  ASSERT_EQ(facts.back_edges.size(), 1u);
  const auto [from, to] = facts.back_edges[0];
  EXPECT_EQ(f.blocks[to].term.kind, TermKind::kCondBr);
  EXPECT_EQ(f.blocks[from].term.kind, TermKind::kBr);
}

TEST(BuildCfg, SyncEndsBlock) {
  Function f = lower(
      "kernel void r(global int* o) { int v = work_group_reduce_add(get_local_id(0));"
      " o[get_global_id(0)] = v; }",
      true);
  ASSERT_EQ(f.blocks.size(), 2u);
  EXPECT_TRUE(f.blocks[0].ends_in_sync());
  EXPECT_TRUE(verify_ssa(f).empty()) << kinds(verify_ssa(f));
}

TEST(BuildCfg, EmptyKernel) {
  Function f = lower("kernel void e() { }");
  ASSERT_EQ(f.blocks.size(), 1u);
  EXPECT_TRUE(f.blocks[0].instrs.empty());
  EXPECT_TRUE(verify_ssa(f).empty());
}

TEST(ToSsa, DiamondJoinHasOnePhi) {
  Function f = lower(
      "kernel void d(global int* a) { int i = get_global_id(0); int x = 0;"
      " if (i < 4) { x = 1; } else { x = 2; } a[i] = x; }");
  EXPECT_EQ(count_phis(f), 1u);
  EXPECT_EQ(f.blocks[3].phis.size(), 1u);
  EXPECT_EQ(f.blocks[3].phis[0].incoming.size(), 2u);
  EXPECT_TRUE(verify_ssa(f).empty()) << kinds(verify_ssa(f));
}

TEST(ToSsa, LoopAccumulatorHeaderPhi) {
  Function f = lower(
      "kernel void l(global int* a) { int s = 0;"
      " for (int j = 0; j < 8; j++) { s = s + a[j]; } a[0] = s; }");
  // Header carries phis for s and j.
  const BlockId header = 1;
  EXPECT_EQ(f.blocks[header].phis.size(), 2u);
  EXPECT_EQ(count_phis(f), 2u);
  for (const auto& phi : f.blocks[header].phis) EXPECT_EQ(phi.incoming.size(), 2u);
  EXPECT_TRUE(verify_ssa(f).empty()) << kinds(verify_ssa(f));
}

TEST(ToSsa, SingleAssignmentNeedsNoPhi) {
  Function f = lower(
      "kernel void d(global int* a) { int i = get_global_id(0);"
      " if (i < 4) { a[i] = i; } else { a[i] = i + 1; } a[0] = i; }");
  EXPECT_EQ(count_phis(f), 0u);
  EXPECT_EQ(census(f, Opcode::kVarLoad) + census(f, Opcode::kVarStore), 0u);
  EXPECT_TRUE(verify_ssa(f).empty());
}

TEST(ToSsa, ShortCircuitWithLoadUsesControlFlow) {
  Function f = lower(
      "kernel void s(global int* a) { int i = get_global_id(0);"
      " if (i < 4 && a[i] > 0) { a[i] = 0; } }");
  EXPECT_GE(f.blocks.size(), 4u);
  EXPECT_TRUE(verify_ssa(f).empty()) << kinds(verify_ssa(f));
  Function g = lower(
      "kernel void s(global int* a) { int i = get_global_id(0);"
      " if (i < 4 && i > 0) { a[i] = 0; } }");
  EXPECT_EQ(g.blocks.size(), 3u);
  EXPECT_EQ(census(g, Opcode::kSelect), 1u);
}

TEST(VerifySsa, UseBeforeDefIsDominanceViolation) {
  Function f = lower(kVadd);
  ASSERT_TRUE(verify_ssa(f).empty());
  auto& ins = f.blocks[0].instrs;
  // Move the store to the front so it reads values defined later.
  auto it = std::find_if(ins.begin(), ins.end(),
                         [](const Instr& i) { return i.op == Opcode::kStoreStream; });
  ASSERT_NE(it, ins.end());
  Instr st = *it;
  ins.erase(it);
  ins.insert(ins.begin(), st);
  EXPECT_TRUE(has_kind(verify_ssa(f), "dominance"));
}

TEST(VerifySsa, UnmergedPairIsMaximalityViolation) {
  Function f = lower(kVadd);
  BasicBlock tail;
  tail.id = 1;
  tail.term.kind = TermKind::kRet;
  f.blocks[0].term = {TermKind::kBr, kNoValue, 1};
  f.blocks.push_back(tail);
  EXPECT_TRUE(has_kind(verify_ssa(f), "maximality"));
  merge_blocks(f);
  EXPECT_TRUE(verify_ssa(f).empty());
}

TEST(VerifySsa, ReportsOtherViolations) {
  Function f = lower(kVadd);
  f.blocks[0].term = {};
  EXPECT_TRUE(has_kind(verify_ssa(f), "terminator"));

  Function g = lower(kVadd);
  g.blocks[0].instrs[1].result = g.blocks[0].instrs[0].result;
  EXPECT_TRUE(has_kind(verify_ssa(g), "definition"));

  Function h = lower(
      "kernel void d(global int* a) { int i = get_global_id(0); int x = 0;"
      " if (i < 4) { x = 1; } else { x = 2; } a[i] = x; }");
  h.blocks[3].phis[0].incoming.pop_back();
  EXPECT_TRUE(has_kind(verify_ssa(h), "phi"));

  Function p = lower(kVadd, false);
  EXPECT_TRUE(has_kind(verify_ssa(p), "pre-ssa"));
}

TEST(Cse, DuplicateMultiplyMerged) {
  Function f = lower(
      "kernel void m(global int* a, global int* c) {"
      " int i = get_global_id(0); int x = a[i]; int y = a[i + 1];"
      " c[i] = x * y + x * y; }");
  EXPECT_EQ(census(f, Opcode::kBinop, BinOp::kMul), 2u);
  run_cse(f);
  EXPECT_EQ(census(f, Opcode::kBinop, BinOp::kMul), 1u);
  EXPECT_TRUE(verify_ssa(f).empty()) << kinds(verify_ssa(f));
}

TEST(Cse, RepeatedLoadsMergeUntilAStore) {
  Function f = lower(
      "kernel void m(global const int* a, global const int* b, global int* c) {"
      " int i = get_global_id(0); c[i] = (a[i] * b[i]) + (a[i] * b[i]); }");
  EXPECT_EQ(census(f, Opcode::kLoadStream), 4u);
  run_cse(f);
  EXPECT_EQ(census(f, Opcode::kLoadStream), 2u);
  EXPECT_EQ(census(f, Opcode::kBinop, BinOp::kMul), 1u);

  Function g = lower(
      "kernel void m(global int* a) {"
      " int i = get_global_id(0); int x = a[i]; a[i] = 5; a[i + 1] = a[i] + x; }");
  run_cse(g);
  EXPECT_EQ(census(g, Opcode::kLoadStream), 2u);
}

TEST(Cse, PipeReadsAreKept) {
  Function f = lower(
      "kernel void p(read_only pipe int q, global int* o) {"
      " int a = read_pipe(q); int b = read_pipe(q); o[0] = a + b; }");
  run_cse(f);
  EXPECT_EQ(census(f, Opcode::kPipeRead), 2u);
}

TEST(Cse, NestedSumCensus) {
  Function f = lower(
      "kernel void n(global int* o, int x, int y) { o[0] = (x + y) + (x + y); }");
  // Oracle: count distinct (op, operands) keys by hand-written hashing.
  const std::size_t before = census(f, Opcode::kBinop, BinOp::kAdd);
  EXPECT_EQ(before, 3u);
  run_cse(f);
  EXPECT_EQ(census(f, Opcode::kBinop, BinOp::kAdd), 2u);
  EXPECT_EQ(census(f, Opcode::kArg), 2u);
  EXPECT_TRUE(verify_ssa(f).empty());
}

TEST(Cse, Idempotent) {
  const char* src =
      "kernel void k(global int* o, int x, int y) { int i = get_global_id(0);"
      " int s = 0; for (int j = 0; j < 4; j++) { s = s + (x * y) + (x * y) + i; }"
      " if (s > 3 || i == get_global_id(0)) { o[i] = s * 2 + s * 2; } }";
  Function f = lower(src);
  run_cse(f);
  Function once = f;
  EXPECT_EQ(run_cse(f), 0u);
  EXPECT_TRUE(structurally_equal(f, once));
  EXPECT_TRUE(verify_ssa(f).empty()) << kinds(verify_ssa(f));
  // No duplicate pure keys remain in any block.
  for (const auto& b : f.blocks) {
    std::map<std::string, int> keys;
    for (const auto& in : b.instrs) {
      if (!is_pure(in.op)) continue;
      std::string key = fmt::format("{}:{}:{}:{}:{}:{}", static_cast<int>(in.op),
                                    static_cast<int>(in.type), static_cast<int>(in.bin),
                                    static_cast<int>(in.cast), in.imm, in.param);
      for (const auto& o : in.operands) key += fmt::format(",{}", o.id);
      EXPECT_EQ(++keys[key], 1) << key;
    }
  }
}

TEST(Dominance, DiamondFrontier) {
  Function f = lower(
      "kernel void d(global int* a) { int i = get_global_id(0);"
      " if (i < 4) { a[i] = 1; } else { a[i] = 2; } a[0] = 0; }");
  DominatorTree dt(f);
  EXPECT_EQ(dt.idom(3), 0u);
  EXPECT_TRUE(dt.dominates(0, 3));
  EXPECT_FALSE(dt.dominates(1, 3));
  const auto df = dt.frontiers(f);
  EXPECT_EQ(df[1], std::vector<BlockId>{3});
  EXPECT_EQ(df[2], std::vector<BlockId>{3});
  EXPECT_TRUE(df[0].empty());
}

TEST(Dump, Format) {
  Function f = lower(kVadd);
  const std::string text = dump(f);
  EXPECT_EQ(text,
            "func vadd(global const int* a, global const int* b, global int* c)\n"
            "b0:\n"
            "  %0 = get_global_id 0\n"
            "  %1 = load i32 a[%0]\n"
            "  %2 = load i32 b[%0]\n"
            "  %3 = add i32 %1, %2\n"
            "  store i32 c[%0], %3\n"
            "  ret\n");
  EXPECT_EQ(text, dump(lower(kVadd)));
}

}  // namespace
}  // namespace kf::ir
