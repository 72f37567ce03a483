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
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "kf/dfg/arith.hpp"
#include "kf/dfg/dfg.hpp"
#include "kf/frontend/typecheck.hpp"
#include "kf/ir/build.hpp"
#include "kf/ir/cse.hpp"
#include "kf/ir/ssa.hpp"
#include "test_kernels.hpp"

namespace kf::dfg {
namespace {

using testing::design;
using testing::to_ir;

std::map<std::string, int> census(const KernelDesign& d) {
  std::map<std::string, int> c;
  for (const auto& g : d.blocks) {
    for (const auto& n : g.nodes) {
      std::string key(node_kind_name(n.kind));
      if (n.kind == NodeKind::kArith) key = std::string(arith_op_name(n.arith));
      ++c[key];
    }
  }
  return c;
}

// Independent liveness oracle: v is live into B if some path from B reaches a
// use of v before any definition of v.
bool live_oracle(const ir::Function& f, ir::ValueId v, ir::BlockId start) {
  auto defines = [&](const ir::BasicBlock& b) {
    for (const auto& p : b.phis) {
      if (p.result == v) return true;
    }
    for (const auto& i : b.instrs) {
      if (i.result == v) return true;
    }
    return false;
  };
  auto uses = [&](const ir::BasicBlock& b) {
    for (const auto& i : b.instrs) {
      for (const auto& o : i.operands) {
        if (o.is_value() && o.id == v) return true;
      }
    }
    return b.term.cond == v;
  };
  std::set<ir::BlockId> seen;
  std::vector<ir::BlockId> work{start};
  while (!work.empty()) {
    const ir::BlockId x = work.back();
    work.pop_back();
    if (!seen.insert(x).second) continue;
    const auto& b = f.blocks[x];
    if (defines(b)) continue;
    if (uses(b)) return true;
    for (ir::BlockId s : b.successors()) {
      for (const auto& p : f.blocks[s].phis) {
        for (auto [from, in] : p.incoming) {
          if (from == x && in == v) return true;
        }
      }
      work.push_back(s);
    }
  }
  return false;
}

TEST(Lower, VaddLikeCensus) {
  KernelDesign d = design(
      "kernel void k(global const int* b, global int* a) {"
      " a[get_global_id(0)] = b[get_global_id(0)] + 1; }");
  ASSERT_EQ(d.blocks.size(), 1u);
  const auto c = census(d);
  EXPECT_EQ(c, (std::map<std::string, int>{
                   {"load", 1}, {"store", 1}, {"add", 1}, {"const", 1}, {"idgen", 1}}));
  EXPECT_TRUE(verify_design(d).empty());
}

TEST(Lower, BarrierSplitsBlocks) {
  KernelDesign d = design(
      "kernel void k(global int* a) { a[get_global_id(0)] = 1; barrier();"
      " a[get_global_id(0) + 1] = 2; }");
  ASSERT_EQ(d.blocks.size(), 2u);
  EXPECT_NE(d.blocks[0].sync_node, kNoNode);
  EXPECT_EQ(d.blocks[1].sync_node, kNoNode);
  EXPECT_EQ(d.control_edges, (std::vector<std::pair<ir::BlockId, ir::BlockId>>{{0, 1}}));
}

TEST(Lower, EmptyKernel) {
  KernelDesign d = design("kernel void k() { }");
  ASSERT_EQ(d.blocks.size(), 1u);
  EXPECT_TRUE(d.blocks[0].nodes.empty());
}

TEST(Lower, InvariantsOnCorpusLikeKernels) {
  for (const char* src : testing::kSmallKernels) {
    SCOPED_TRACE(src);
    const ir::Function f = to_ir(src);
    const KernelDesign d = lower_function(f);
    const auto v = verify_design(d);
    EXPECT_TRUE(v.empty()) << (v.empty() ? "" : v[0].message);
    ASSERT_EQ(d.blocks.size(), f.blocks.size());
    std::size_t edges = 0;
    for (const auto& b : f.blocks) {
      const auto& g = d.blocks[b.id];
      EXPECT_EQ(g.nodes.size(), b.instrs.size() + b.phis.size() - g.folded);
      edges += b.successors().size();
      // Sync is the last node in its block.
      for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::kSync) { EXPECT_EQ(n.id, g.sync_node); }
      }
    }
    EXPECT_EQ(d.control_edges.size(), edges);
    // Liveness against the path oracle.
    const Liveness live = compute_liveness(f);
    for (const auto& b : f.blocks) {
      std::set<ir::ValueId> got(live.live_in[b.id].begin(), live.live_in[b.id].end());
      for (ir::ValueId v = 0; v < f.value_types.size(); ++v) {
        EXPECT_EQ(got.count(v) == 1, live_oracle(f, v, b.id)) << "b" << b.id << " %" << v;
      }
    }
  }
}

TEST(Lower, FoldsConstantArithmetic) {
  KernelDesign d = design("kernel void k(global int* a) { a[0] = (1 + 2) * 3 - 4; }");
  const auto c = census(d);
  EXPECT_EQ(c.count("add") + c.count("mul") + c.count("sub"), 0u);
  EXPECT_EQ(c.at("const"), 2);  // index 0 and the folded value 5
  bool found = false;
  for (const auto& n : d.blocks[0].nodes) found |= n.kind == NodeKind::kConst && n.value == 5;
  EXPECT_TRUE(found);
}

TEST(Lower, MemoryAndChannelOrdering) {
  KernelDesign d = design(
      "kernel void k(global int* a, global int* b, read_only pipe int p, write_only pipe int q) {"
      " int x = a[0]; b[0] = x; int y = a[1]; write_pipe(q, read_pipe(p)); write_pipe(q, 1); }");
  const auto& g = d.blocks[0];
  auto has_edge = [&](NodeKind from, NodeKind to) {
    for (const auto& e : g.edges) {
      if (g.nodes[e.from].kind == from && g.nodes[e.to].kind == to) return true;
    }
    return false;
  };
  EXPECT_TRUE(has_edge(NodeKind::kStreamLoad, NodeKind::kStreamStore));
  EXPECT_TRUE(has_edge(NodeKind::kStreamStore, NodeKind::kStreamLoad));
  EXPECT_TRUE(has_edge(NodeKind::kPipeRead, NodeKind::kPipeWrite));
  EXPECT_TRUE(has_edge(NodeKind::kPipeWrite, NodeKind::kPipeWrite));
  EXPECT_EQ(d.pipe_ports, (std::vector<int>{2, 3}));
}

TEST(Lower, WidthVerifierRejectsBoolIntoArithmetic) {
  KernelDesign d = design(
      "kernel void k(global int* a) { int i = get_global_id(0); a[i] = i + 1; }");
  ASSERT_TRUE(verify_design(d).empty());
  auto& g = d.blocks[0];
  for (auto& n : g.nodes) {
    if (n.kind == NodeKind::kIdGen) n.out_width = 1;
  }
  const auto v = verify_design(d);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v[0].message.find("width mismatch"), std::string::npos);
}

TEST(Lower, VerifierRejectsCycle) {
  KernelDesign d = design("kernel void k(global int* a) { a[0] = a[1] + 1; }");
  auto& g = d.blocks[0];
  g.edges.push_back({static_cast<NodeId>(g.nodes.size() - 1), 0, -1});
  bool cycle = false;
  for (const auto& v : verify_design(d)) cycle |= v.message == "graph has a cycle";
  EXPECT_TRUE(cycle);
}

TEST(MapBuiltin, Examples) {
  ir::Instr barrier;
  barrier.op = ir::Opcode::kBarrier;
  HwNode n = map_builtin(barrier);
  EXPECT_EQ(n.kind, NodeKind::kSync);
  EXPECT_EQ(n.sync, SyncKind::kBarrier);
  EXPECT_TRUE(n.in_widths.empty());
  EXPECT_EQ(n.out_width, 0);

  ir::Instr red;
  red.op = ir::Opcode::kWgFunc;
  red.wg = ir::WgOp::kReduceAdd;
  red.type = Type::kI32;
  red.result = 3;
  n = map_builtin(red);
  EXPECT_EQ(n.sync, SyncKind::kReduce);
  EXPECT_EQ(n.in_widths.size(), 1u);
  EXPECT_EQ(n.out_width, 32);

  KernelDesign d = design(
      "kernel void child(int x) { }"
      "kernel void k(queue_t q, int x) { enqueue_kernel(q, 8, 4, \"child\", x); }");
  const HwNode* enq = nullptr;
  for (const auto& m : d.blocks[0].nodes) {
    if (m.kind == NodeKind::kEnqueue) enq = &m;
  }
  ASSERT_NE(enq, nullptr);
  EXPECT_EQ(enq->callee, "child");
  EXPECT_EQ(enq->in_widths.size(), 3u);
  EXPECT_EQ(enq->inputs.size(), 3u);
  EXPECT_EQ(d.queue_ports, (std::vector<int>{0}));
}

IndexClass store_index(const std::string& expr, const std::string& prelude = "") {
  KernelDesign d = design("kernel void k(global int* a, global int* b, int n) { " + prelude +
                          " a[" + expr + "] = 0; }");
  for (const auto& s : d.streams) {
    if (s.is_write) return s.index;
  }
  ADD_FAILURE() << "no store";
  return {};
}

TEST(ClassifyIndex, Examples) {
  IndexClass c = store_index("get_global_id(0)");
  EXPECT_EQ(index_class_text(c), "static 0 + 1*gid0");
  c = store_index("2*get_global_id(0) + 5");
  EXPECT_EQ(index_class_text(c), "static 5 + 2*gid0");
  EXPECT_FALSE(store_index("b[get_global_id(0)]").is_static);
  EXPECT_FALSE(store_index("get_global_id(0) * get_global_id(0)").is_static);
  EXPECT_FALSE(store_index("n * get_global_id(0)").is_static);
  EXPECT_FALSE(store_index("get_global_id(0) / 2").is_static);
  EXPECT_FALSE(store_index("get_global_size(0)").is_static);
}

TEST(ClassifyIndex, LoopCounters) {
  KernelDesign d = design(
      "kernel void k(global int* a, int n) {"
      " for (int j = 0; j < 8; j++) { a[2 * j + 1] = 0; }"
      " for (int j = 0; j < n; j++) { a[j] = 1; } }");
  ASSERT_EQ(d.streams.size(), 2u);
  EXPECT_TRUE(d.streams[0].index.is_static);
  ASSERT_EQ(d.streams[0].index.terms.size(), 1u);
  EXPECT_EQ(d.streams[0].index.terms[0].kind, AffineTerm::Kind::kLoopCounter);
  EXPECT_EQ(d.streams[0].index.terms[0].coeff, 2);
  EXPECT_EQ(d.streams[0].index.constant, 1);
  EXPECT_FALSE(d.streams[1].index.is_static);
}

TEST(ClassifyIndex, RandomAffineExpressionsRecoverCoefficients) {
  std::mt19937 rng(1234);
  const char* names[] = {"get_global_id", "get_local_id", "get_group_id"};
  const AffineTerm::Kind kinds[] = {AffineTerm::Kind::kGlobalId, AffineTerm::Kind::kLocalId,
                                    AffineTerm::Kind::kGroupId};
  for (int iter = 0; iter < 1000; ++iter) {
    std::map<std::pair<int, int>, std::int64_t> expect;
    std::int64_t constant = 0;
    std::string expr;
    const int nterms = 1 + static_cast<int>(rng() % 5);
    for (int t = 0; t < nterms; ++t) {
      const int which = static_cast<int>(rng() % 3);
      const int dim = static_cast<int>(rng() % 3);
      const int coeff = static_cast<int>(rng() % 19) - 9;
      const std::string id = fmt::format("{}({})", names[which], dim);
      std::string term;
      switch (rng() % 3) {
        case 0: term = fmt::format("{} * {}", coeff, id); break;
        case 1: term = fmt::format("{} * ({})", id, coeff); break;
        default: term = fmt::format("({} + {}) * {}", id, id, coeff); break;
      }
      const std::int64_t scale = term.front() == '(' ? 2 : 1;
      expect[{which, dim}] += coeff * scale;
      if (t && rng() % 2) {
        expr += " - " + term;
        expect[{which, dim}] -= 2 * coeff * scale;
      } else {
        expr += (t ? " + " : "") + term;
      }
      if (rng() % 2) {
        const int k = static_cast<int>(rng() % 100);
        expr += fmt::format(" + {}", k);
        constant += k;
      }
    }
    IndexClass got = store_index(expr);
    ASSERT_TRUE(got.is_static) << expr;
    std::map<std::pair<int, int>, std::int64_t> actual;
    for (const auto& t : got.terms) {
      int which = 0;
      while (kinds[which] != t.kind) ++which;
      actual[{which, static_cast<int>(t.which)}] = t.coeff;
    }
    std::erase_if(expect, [](const auto& kv) { return kv.second == 0; });
    EXPECT_EQ(actual, expect) << expr;
    EXPECT_EQ(got.constant, constant) << expr;
  }
}

TEST(ClassifyIndex, LoadedValueIsDynamic) {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 100; ++iter) {
    const int k = static_cast<int>(rng() % 10);
    const std::string expr =
        fmt::format("{} * get_global_id(0) + b[get_local_id({})] + {}", k, rng() % 3, rng() % 50);
    EXPECT_FALSE(store_index(expr).is_static) << expr;
  }
}

TEST(Arith, IntegerEdgeCases) {
  using ir::BinOp;
  EXPECT_EQ(eval_binop(BinOp::kDiv, Type::kI32, 7, 0), 0u);
  EXPECT_EQ(eval_binop(BinOp::kRem, Type::kU32, 7, 0), 0u);
  EXPECT_EQ(eval_binop(BinOp::kDiv, Type::kI32, 0x80000000u, 0xffffffffu), 0x80000000u);
  EXPECT_EQ(eval_binop(BinOp::kRem, Type::kI32, 0x80000000u, 0xffffffffu), 0u);
  EXPECT_EQ(eval_binop(BinOp::kDiv, Type::kI32, static_cast<std::uint32_t>(-7), 2),
            static_cast<std::uint32_t>(-3));
  EXPECT_EQ(eval_binop(BinOp::kLt, Type::kI32, 0xffffffffu, 0), 1u);
  EXPECT_EQ(eval_binop(BinOp::kLt, Type::kU32, 0xffffffffu, 0), 0u);
  EXPECT_EQ(eval_cast(ir::CastOp::kFToI, 0x7fc00000u), 0u);         // NaN
  EXPECT_EQ(eval_cast(ir::CastOp::kFToI, 0x4f800000u), 0x7fffffffu);  // 2^32
  EXPECT_EQ(eval_cast(ir::CastOp::kFToU, 0xbf800000u), 0u);          // -1.0
}

TEST(Dump, Deterministic) {
  for (const char* src : testing::kSmallKernels) {
    EXPECT_EQ(dump_design(design(src)), dump_design(design(src)));
  }
  const std::string text = dump_design(design(
      "kernel void k(global const int* b, global int* a) {"
      " a[get_global_id(0)] = b[get_global_id(0)] + 1; }"));
  EXPECT_NE(text.find("stream s0 b read static 0 + 1*gid0"), std::string::npos) << text;
  EXPECT_NE(text.find("stream s1 a write static 0 + 1*gid0"), std::string::npos) << text;
}

}  // namespace
}  // namespace kf::dfg
