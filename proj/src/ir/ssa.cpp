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

#include "kf/ir/ssa.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "kf/ir/dominance.hpp"

namespace kf::ir {
namespace {

class Renamer {
 public:
  Renamer(Function& f, const DominatorTree& dt, std::vector<ValueId> zeros)
      : f_(f), dt_(dt), zeros_(std::move(zeros)), stacks_(f.var_types.size()),
        repl_(f.value_types.size(), kNoValue) {}

  void run() { rename(f_.entry); }

  ValueId resolve(ValueId v) const {
    while (v != kNoValue && v < repl_.size() && repl_[v] != kNoValue) v = repl_[v];
    return v;
  }

 private:
  ValueId top(int var) const {
    const auto& s = stacks_[static_cast<std::size_t>(var)];
    return s.empty() ? zeros_[static_cast<std::size_t>(var)] : s.back();
  }

  void rename(BlockId b) {
    std::vector<int> pushed;
    BasicBlock& bb = f_.blocks[b];
    for (const auto& phi : bb.phis) {
      stacks_[static_cast<std::size_t>(phi.var)].push_back(phi.result);
      pushed.push_back(phi.var);
    }
    for (auto& in : bb.instrs) {
      for (auto& o : in.operands) {
        if (o.is_value()) o.id = resolve(o.id);
      }
      if (in.op == Opcode::kVarLoad) {
        repl_[in.result] = top(in.param);
      } else if (in.op == Opcode::kVarStore) {
        stacks_[static_cast<std::size_t>(in.param)].push_back(in.operands[0].id);
        pushed.push_back(in.param);
      }
    }
    if (bb.term.cond != kNoValue) bb.term.cond = resolve(bb.term.cond);
    for (BlockId s : bb.successors()) {
      for (auto& phi : f_.blocks[s].phis) phi.incoming.emplace_back(b, top(phi.var));
    }
    for (BlockId c : dt_.children(b)) rename(c);
    for (int v : pushed) stacks_[static_cast<std::size_t>(v)].pop_back();
  }

  Function& f_;
  const DominatorTree& dt_;
  std::vector<ValueId> zeros_;
  std::vector<std::vector<ValueId>> stacks_;
  std::vector<ValueId> repl_;
};

void remove_dead(Function& f, const std::vector<ValueId>& zeros) {
  std::vector<char> live(f.value_types.size(), 0);
  std::vector<const Phi*> phi_of(f.value_types.size(), nullptr);
  for (const auto& b : f.blocks) {
    for (const auto& phi : b.phis) phi_of[phi.result] = &phi;
  }
  std::vector<ValueId> work;
  auto mark = [&](ValueId v) {
    if (v != kNoValue && !live[v]) {
      live[v] = 1;
      work.push_back(v);
    }
  };
  for (const auto& b : f.blocks) {
    for (const auto& in : b.instrs) {
      for (const auto& o : in.operands) {
        if (o.is_value()) mark(o.id);
      }
    }
    mark(b.term.cond);
  }
  while (!work.empty()) {
    const ValueId v = work.back();
    work.pop_back();
    if (const Phi* p = phi_of[v]) {
      for (auto [blk, in] : p->incoming) mark(in);
    }
  }
  std::vector<char> is_zero(f.value_types.size(), 0);
  for (ValueId z : zeros) is_zero[z] = 1;
  for (auto& b : f.blocks) {
    std::erase_if(b.phis, [&](const Phi& p) { return !live[p.result]; });
    std::erase_if(b.instrs, [&](const Instr& in) {
      return in.result != kNoValue && is_zero[in.result] && !live[in.result];
    });
  }
}

}  // namespace

void to_ssa(Function& f) {
  if (f.in_ssa || f.blocks.empty()) return;
  const DominatorTree dt(f);
  const auto df = dt.frontiers(f);
  const std::size_t nvars = f.var_types.size();

  // Phi placement on the iterated dominance frontier of each variable's stores.
  std::vector<std::vector<BlockId>> defsites(nvars);
  for (const auto& b : f.blocks) {
    for (const auto& in : b.instrs) {
      if (in.op == Opcode::kVarStore) {
        auto& d = defsites[static_cast<std::size_t>(in.param)];
        if (d.empty() || d.back() != b.id) d.push_back(b.id);
      }
    }
  }
  for (std::size_t v = 0; v < nvars; ++v) {
    std::vector<char> has_phi(f.blocks.size(), 0);
    std::vector<char> queued(f.blocks.size(), 0);
    std::vector<BlockId> work = defsites[v];
    for (BlockId b : work) queued[b] = 1;
    while (!work.empty()) {
      const BlockId b = work.back();
      work.pop_back();
      for (BlockId y : df[b]) {
        if (has_phi[y]) continue;
        has_phi[y] = 1;
        Phi phi;
        phi.var = static_cast<int>(v);
        phi.type = f.var_types[v];
        phi.result = f.new_value(phi.type);
        f.blocks[y].phis.push_back(std::move(phi));
        if (!queued[y]) {
          queued[y] = 1;
          work.push_back(y);
        }
      }
    }
  }

  // A variable read before any store sees zero.
  std::vector<ValueId> zeros(nvars, kNoValue);
  std::vector<Instr> prologue;
  for (std::size_t v = 0; v < nvars; ++v) {
    if (defsites[v].empty()) continue;
    Instr z;
    z.op = Opcode::kConst;
    z.type = f.var_types[v];
    z.result = f.new_value(z.type);
    zeros[v] = z.result;
    prologue.push_back(std::move(z));
  }
  auto& entry = f.blocks[f.entry].instrs;
  entry.insert(entry.begin(), prologue.begin(), prologue.end());

  Renamer r(f, dt, zeros);
  r.run();
  for (auto& b : f.blocks) {
    std::erase_if(b.instrs, [](const Instr& in) {
      return in.op == Opcode::kVarLoad || in.op == Opcode::kVarStore;
    });
    for (auto& phi : b.phis) {
      for (auto& [p, v] : phi.incoming) v = r.resolve(v);
    }
  }
  std::vector<ValueId> used_zeros;
  for (ValueId z : zeros) {
    if (z != kNoValue) used_zeros.push_back(z);
  }
  remove_dead(f, used_zeros);
  compact_values(f);
  f.in_ssa = true;
}

std::vector<SsaViolation> verify_ssa(const Function& f) {
  std::vector<SsaViolation> out;
  auto report = [&](std::string kind, BlockId b, ValueId v, std::string msg) {
    out.push_back({std::move(kind), b, v, std::move(msg)});
  };
  if (f.blocks.empty()) {
    report("entry", kNoBlock, kNoValue, "function has no blocks");
    return out;
  }
  const DominatorTree dt(f);
  const auto preds = f.predecessors();
  const std::size_t nvals = f.value_types.size();
  std::vector<BlockId> def_block(nvals, kNoBlock);
  std::vector<int> def_pos(nvals, -1);  // -1 for phis

  for (const auto& b : f.blocks) {
    if (!dt.reachable(b.id)) report("unreachable", b.id, kNoValue, fmt::format("b{} is unreachable", b.id));
    auto define = [&](ValueId v, int pos) {
      if (v >= nvals) {
        report("definition", b.id, v, fmt::format("%{} has no type", v));
        return;
      }
      if (def_block[v] != kNoBlock) {
        report("definition", b.id, v, fmt::format("%{} is defined more than once", v));
        return;
      }
      def_block[v] = b.id;
      def_pos[v] = pos;
    };
    for (const auto& phi : b.phis) define(phi.result, -1);
    for (std::size_t i = 0; i < b.instrs.size(); ++i) {
      const Instr& in = b.instrs[i];
      if (in.op == Opcode::kVarLoad || in.op == Opcode::kVarStore)
        report("pre-ssa", b.id, in.result, fmt::format("variable access in b{}", b.id));
      if (in.result != kNoValue) define(in.result, static_cast<int>(i));
    }
  }
  if (!preds[f.entry].empty())
    report("entry", f.entry, kNoValue, "entry block has predecessors");

  auto check_use = [&](ValueId v, BlockId b, int pos, const char* what) {
    if (v >= nvals || def_block[v] == kNoBlock) {
      report("definition", b, v, fmt::format("%{} used by {} in b{} is never defined", v, what, b));
      return;
    }
    const BlockId d = def_block[v];
    const bool ok = d == b ? def_pos[v] < pos : dt.dominates(d, b);
    if (!ok)
      report("dominance", b, v,
             fmt::format("%{} defined in b{} does not dominate its use in b{}", v, d, b));
  };

  for (const auto& b : f.blocks) {
    const int end = static_cast<int>(b.instrs.size());
    for (const auto& phi : b.phis) {
      std::vector<BlockId> from;
      for (auto [p, v] : phi.incoming) {
        from.push_back(p);
        if (v >= nvals || def_block[v] == kNoBlock) {
          report("definition", b.id, v, fmt::format("phi %{} reads undefined %{}", phi.result, v));
        } else if (p < f.blocks.size() && !dt.dominates(def_block[v], p)) {
          report("dominance", b.id, v,
                 fmt::format("phi %{}: %{} does not dominate predecessor b{}", phi.result, v, p));
        }
      }
      std::vector<BlockId> expect = preds[b.id];
      std::sort(from.begin(), from.end());
      std::sort(expect.begin(), expect.end());
      if (from != expect)
        report("phi", b.id, phi.result,
               fmt::format("phi %{} incoming blocks do not match predecessors of b{}",
                           phi.result, b.id));
    }
    for (int i = 0; i < end; ++i) {
      for (const auto& o : b.instrs[static_cast<std::size_t>(i)].operands) {
        if (o.is_value()) check_use(o.id, b.id, i, "instruction");
      }
    }
    switch (b.term.kind) {
      case TermKind::kNone:
        report("terminator", b.id, kNoValue, fmt::format("b{} has no terminator", b.id));
        break;
      case TermKind::kCondBr:
        if (b.term.cond == kNoValue)
          report("terminator", b.id, kNoValue, fmt::format("condbr in b{} has no condition", b.id));
        else
          check_use(b.term.cond, b.id, end, "terminator");
        [[fallthrough]];
      case TermKind::kBr:
        for (BlockId s : b.successors()) {
          if (s >= f.blocks.size())
            report("terminator", b.id, kNoValue, fmt::format("b{} branches to missing b{}", b.id, s));
        }
        break;
      case TermKind::kRet:
        break;
    }
    // Maximal blocks: an unconditional edge into a single-predecessor block
    // must be a sync boundary.
    if (b.term.kind == TermKind::kBr && !b.ends_in_sync()) {
      const BlockId s = b.term.target;
      if (s < f.blocks.size() && s != f.entry && s != b.id && preds[s].size() == 1)
        report("maximality", b.id, kNoValue,
               fmt::format("b{} and b{} could be merged", b.id, s));
    }
  }
  return out;
}

}  // namespace kf::ir
