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

#include "kf/ir/cse.hpp"

#include <map>
#include <tuple>

namespace kf::ir {

std::size_t run_cse(Function& f) {
  std::vector<ValueId> repl(f.value_types.size(), kNoValue);
  auto resolve = [&](ValueId v) {
    while (v < repl.size() && repl[v] != kNoValue) v = repl[v];
    return v;
  };
  using Key = std::tuple<Opcode, Type, Type, BinOp, CastOp, Builtin, std::uint32_t, int,
                         std::vector<Operand>>;
  std::size_t removed = 0;
  // Blocks in RPO so that cross-block operands are already canonical.
  for (BlockId id : reverse_post_order(f)) {
    BasicBlock& b = f.blocks[id];
    std::map<Key, ValueId> seen;
    // Loads merge only while no store has intervened; parameters may alias.
    std::uint32_t store_epoch = 0;
    std::vector<Instr> kept;
    kept.reserve(b.instrs.size());
    for (auto& in : b.instrs) {
      for (auto& o : in.operands) {
        if (o.is_value()) o.id = resolve(o.id);
      }
      if (in.op == Opcode::kStoreStream) ++store_epoch;
      const bool mergeable_load = in.op == Opcode::kLoadStream;
      if ((!is_pure(in.op) && !mergeable_load) || in.result == kNoValue) {
        kept.push_back(std::move(in));
        continue;
      }
      Key key{in.op,    in.type,  in.operand_type,
              in.op == Opcode::kBinop ? in.bin : BinOp::kAdd,
              in.op == Opcode::kCast ? in.cast : CastOp::kBitcast,
              in.query, mergeable_load ? store_epoch : in.imm, in.param,
              in.operands};
      auto [it, inserted] = seen.emplace(std::move(key), in.result);
      if (inserted) {
        kept.push_back(std::move(in));
      } else {
        repl[in.result] = it->second;
        ++removed;
      }
    }
    b.instrs = std::move(kept);
  }
  if (removed == 0) return 0;
  for (auto& b : f.blocks) {
    for (auto& phi : b.phis) {
      for (auto& [p, v] : phi.incoming) v = resolve(v);
    }
    for (auto& in : b.instrs) {
      for (auto& o : in.operands) {
        if (o.is_value()) o.id = resolve(o.id);
      }
    }
    if (b.term.cond != kNoValue) b.term.cond = resolve(b.term.cond);
  }
  compact_values(f);
  return removed;
}

}  // namespace kf::ir
