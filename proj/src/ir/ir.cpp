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

#include "kf/ir/ir.hpp"

#include <algorithm>
#include <tuple>

namespace kf::ir {

std::string_view opcode_name(Opcode op) {
  switch (op) {
    case Opcode::kConst: return "const";
    case Opcode::kArg: return "arg";
    case Opcode::kBinop: return "binop";
    case Opcode::kCast: return "cast";
    case Opcode::kSelect: return "select";
    case Opcode::kLoadStream: return "load_stream";
    case Opcode::kStoreStream: return "store_stream";
    case Opcode::kBuiltinCall: return "builtin_call";
    case Opcode::kPipeRead: return "pipe_read";
    case Opcode::kPipeWrite: return "pipe_write";
    case Opcode::kEnqueue: return "enqueue";
    case Opcode::kBarrier: return "barrier";
    case Opcode::kWgFunc: return "wg_func";
    case Opcode::kVarLoad: return "var_load";
    case Opcode::kVarStore: return "var_store";
  }
  return "?";
}

std::string_view binop_name(BinOp op) {
  switch (op) {
    case BinOp::kAdd: return "add";
    case BinOp::kSub: return "sub";
    case BinOp::kMul: return "mul";
    case BinOp::kDiv: return "div";
    case BinOp::kRem: return "rem";
    case BinOp::kLt: return "lt";
    case BinOp::kLe: return "le";
    case BinOp::kGt: return "gt";
    case BinOp::kGe: return "ge";
    case BinOp::kEq: return "eq";
    case BinOp::kNe: return "ne";
    case BinOp::kAnd: return "and";
    case BinOp::kOr: return "or";
    case BinOp::kXor: return "xor";
    case BinOp::kNeg: return "neg";
  }
  return "?";
}

std::string_view castop_name(CastOp op) {
  switch (op) {
    case CastOp::kIToF: return "itof";
    case CastOp::kUToF: return "utof";
    case CastOp::kFToI: return "ftoi";
    case CastOp::kFToU: return "ftou";
    case CastOp::kBitcast: return "bitcast";
    case CastOp::kBoolToInt: return "btoi";
  }
  return "?";
}

std::string_view wgop_name(WgOp op) {
  switch (op) {
    case WgOp::kBroadcast: return "broadcast";
    case WgOp::kReduceAdd: return "reduce_add";
    case WgOp::kReduceMin: return "reduce_min";
    case WgOp::kReduceMax: return "reduce_max";
  }
  return "?";
}

bool is_compare(BinOp op) {
  switch (op) {
    case BinOp::kLt:
    case BinOp::kLe:
    case BinOp::kGt:
    case BinOp::kGe:
    case BinOp::kEq:
    case BinOp::kNe:
      return true;
    default:
      return false;
  }
}

bool is_pure(Opcode op) {
  switch (op) {
    case Opcode::kConst:
    case Opcode::kArg:
    case Opcode::kBinop:
    case Opcode::kCast:
    case Opcode::kSelect:
    case Opcode::kBuiltinCall:
      return true;
    default:
      return false;
  }
}

std::vector<BlockId> BasicBlock::successors() const {
  switch (term.kind) {
    case TermKind::kBr: return {term.target};
    case TermKind::kCondBr: return {term.target, term.false_target};
    default: return {};
  }
}

bool BasicBlock::ends_in_sync() const {
  if (instrs.empty()) return false;
  const Opcode op = instrs.back().op;
  return op == Opcode::kBarrier || op == Opcode::kWgFunc;
}

std::vector<std::vector<BlockId>> Function::predecessors() const {
  std::vector<std::vector<BlockId>> preds(blocks.size());
  for (const auto& b : blocks) {
    for (BlockId s : b.successors()) {
      if (s < preds.size()) preds[s].push_back(b.id);
    }
  }
  return preds;
}

std::size_t Function::instruction_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.instrs.size();
  return n;
}

namespace {

auto instr_key(const Instr& i) {
  return std::tie(i.result, i.op, i.type, i.operand_type, i.bin, i.cast, i.wg, i.query,
                  i.imm, i.param, i.callee, i.operands);
}

}  // namespace

bool structurally_equal(const Function& a, const Function& b) {
  if (a.name != b.name || a.entry != b.entry || a.blocks.size() != b.blocks.size())
    return false;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const BasicBlock& x = a.blocks[i];
    const BasicBlock& y = b.blocks[i];
    if (x.id != y.id || x.phis.size() != y.phis.size() ||
        x.instrs.size() != y.instrs.size())
      return false;
    for (std::size_t p = 0; p < x.phis.size(); ++p) {
      if (x.phis[p].result != y.phis[p].result || x.phis[p].type != y.phis[p].type ||
          x.phis[p].incoming != y.phis[p].incoming)
        return false;
    }
    for (std::size_t k = 0; k < x.instrs.size(); ++k) {
      if (instr_key(x.instrs[k]) != instr_key(y.instrs[k])) return false;
    }
    if (x.term.kind != y.term.kind || x.term.cond != y.term.cond ||
        x.term.target != y.term.target || x.term.false_target != y.term.false_target)
      return false;
  }
  return true;
}

void compact_values(Function& f) {
  std::vector<ValueId> remap(f.value_types.size(), kNoValue);
  std::vector<Type> types;
  auto define = [&](ValueId& v) {
    if (v == kNoValue || v >= remap.size()) return;
    remap[v] = static_cast<ValueId>(types.size());
    types.push_back(f.value_types[v]);
    v = remap[v];
  };
  auto use = [&](auto& v) {
    if (v < remap.size() && remap[v] != kNoValue) v = remap[v];
  };
  for (auto& b : f.blocks) {
    for (auto& phi : b.phis) define(phi.result);
    for (auto& in : b.instrs) define(in.result);
  }
  for (auto& b : f.blocks) {
    for (auto& phi : b.phis) {
      for (auto& [p, v] : phi.incoming) use(v);
    }
    for (auto& in : b.instrs) {
      for (auto& o : in.operands) {
        if (o.is_value()) use(o.id);
      }
    }
    if (b.term.cond != kNoValue) use(b.term.cond);
  }
  f.value_types = std::move(types);
}

std::vector<BlockId> reverse_post_order(const Function& f) {
  std::vector<BlockId> post;
  if (f.blocks.empty()) return post;
  std::vector<char> seen(f.blocks.size(), 0);
  // Iterative DFS: (block, next successor index).
  std::vector<std::pair<BlockId, std::size_t>> stack{{f.entry, 0}};
  seen[f.entry] = 1;
  while (!stack.empty()) {
    auto& [b, next] = stack.back();
    // Visiting the false successor first puts the true successor earlier in
    // the reverse post-order.
    auto succs = f.blocks[b].successors();
    std::reverse(succs.begin(), succs.end());
    if (next < succs.size()) {
      const BlockId s = succs[next++];
      if (s < f.blocks.size() && !seen[s]) {
        seen[s] = 1;
        stack.emplace_back(s, 0);
      }
    } else {
      post.push_back(b);
      stack.pop_back();
    }
  }
  return {post.rbegin(), post.rend()};
}

}  // namespace kf::ir
