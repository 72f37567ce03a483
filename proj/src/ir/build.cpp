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

#include "kf/ir/build.hpp"

#include <bit>
#include <cassert>

namespace kf::ir {
namespace {

class Builder {
 public:
  Builder(const Program& prog, const KernelDecl& kernel) : prog_(prog), kernel_(kernel) {
    f_.name = kernel.name;
    f_.params = kernel.params;
    for (const auto& s : kernel.symbols) f_.var_types.push_back(s.type);
    f_.entry = new_block();
    cur_ = f_.entry;
  }

  Function build() {
    lower_list(kernel_.body);
    terminate({TermKind::kRet});
    return std::move(f_);
  }

 private:
  BlockId new_block() {
    BasicBlock b;
    b.id = static_cast<BlockId>(f_.blocks.size());
    f_.blocks.push_back(std::move(b));
    return f_.blocks.back().id;
  }

  void terminate(Terminator t) {
    auto& term = f_.blocks[cur_].term;
    if (term.kind == TermKind::kNone) term = t;
  }

  void branch(BlockId to) { terminate({TermKind::kBr, kNoValue, to}); }

  void emit(Instr i) { f_.blocks[cur_].instrs.push_back(std::move(i)); }

  ValueId emit_value(Instr i, Type t) {
    i.type = t;
    i.result = f_.new_value(t);
    const ValueId v = i.result;
    emit(std::move(i));
    return v;
  }

  ValueId constant(Type t, std::uint32_t bits) {
    Instr i;
    i.op = Opcode::kConst;
    i.imm = bits;
    return emit_value(std::move(i), t);
  }

  ValueId binop(BinOp op, Type t, std::vector<ValueId> ops, Type operand_type,
                SourceLocation loc) {
    Instr i;
    i.op = Opcode::kBinop;
    i.bin = op;
    i.operand_type = operand_type;
    i.loc = loc;
    for (ValueId v : ops) i.operands.push_back(Operand::value(v));
    return emit_value(std::move(i), t);
  }

  int param_of(int symbol) const {
    return kernel_.symbols[static_cast<std::size_t>(symbol)].param;
  }

  void store_var(int var, ValueId v) {
    Instr i;
    i.op = Opcode::kVarStore;
    i.param = var;
    i.type = f_.var_types[static_cast<std::size_t>(var)];
    i.operands.push_back(Operand::value(v));
    emit(std::move(i));
  }

  ValueId load_var(int var) {
    Instr i;
    i.op = Opcode::kVarLoad;
    i.param = var;
    return emit_value(std::move(i), f_.var_types[static_cast<std::size_t>(var)]);
  }

  int new_temp(Type t) {
    f_.var_types.push_back(t);
    return static_cast<int>(f_.var_types.size() - 1);
  }

  // Starts a fresh block after a synchronization point.
  void split_after_sync() {
    const BlockId next = new_block();
    branch(next);
    cur_ = next;
  }

  static bool speculatable(const Expr& e) {
    if (e.kind == ExprKind::kIndex) return false;
    if (e.kind == ExprKind::kCall && !is_id_builtin(e.builtin)) return false;
    for (const auto& o : e.operands) {
      if (!speculatable(*o)) return false;
    }
    return true;
  }

  ValueId lower_logical(const Expr& e) {
    const bool is_and = e.binary_op == BinaryOp::kLogicalAnd;
    const ValueId a = lower_expr(*e.operands[0]);
    if (speculatable(*e.operands[1])) {
      const ValueId b = lower_expr(*e.operands[1]);
      Instr s;
      s.op = Opcode::kSelect;
      s.loc = e.loc;
      const ValueId k = constant(Type::kBool, is_and ? 0 : 1);
      // a && b == a ? b : false;  a || b == a ? true : b
      s.operands = {Operand::value(a), Operand::value(is_and ? b : k),
                    Operand::value(is_and ? k : b)};
      return emit_value(std::move(s), Type::kBool);
    }
    const int tmp = new_temp(Type::kBool);
    store_var(tmp, a);
    const BlockId rhs = new_block();
    const BlockId join = new_block();
    terminate({TermKind::kCondBr, a, is_and ? rhs : join, is_and ? join : rhs});
    cur_ = rhs;
    store_var(tmp, lower_expr(*e.operands[1]));
    branch(join);
    cur_ = join;
    return load_var(tmp);
  }

  ValueId lower_cast(const Expr& e) {
    const Expr& src = *e.operands[0];
    const ValueId v = lower_expr(src);
    const Type from = src.type;
    const Type to = e.cast_type;
    if (from == to) return v;
    if (to == Type::kBool) return binop(BinOp::kNe, Type::kBool, {v, constant(from, 0)}, from, e.loc);
    Instr i;
    i.op = Opcode::kCast;
    i.operand_type = from;
    i.loc = e.loc;
    i.operands.push_back(Operand::value(v));
    if (from == Type::kBool) {
      i.cast = CastOp::kBoolToInt;
    } else if (to == Type::kF32) {
      i.cast = from == Type::kI32 ? CastOp::kIToF : CastOp::kUToF;
    } else if (from == Type::kF32) {
      i.cast = to == Type::kI32 ? CastOp::kFToI : CastOp::kFToU;
    } else {
      i.cast = CastOp::kBitcast;
    }
    return emit_value(std::move(i), to);
  }

  ValueId lower_call(const Expr& e) {
    switch (builtin_info(e.builtin).cls) {
      case BuiltinClass::kIdQuery: {
        Instr i;
        i.op = Opcode::kBuiltinCall;
        i.query = e.builtin;
        i.imm = e.operands[0]->int_value;
        i.loc = e.loc;
        return emit_value(std::move(i), Type::kI32);
      }
      case BuiltinClass::kBarrier: {
        Instr i;
        i.op = Opcode::kBarrier;
        i.loc = e.loc;
        emit(std::move(i));
        split_after_sync();
        return kNoValue;
      }
      case BuiltinClass::kWorkGroup: {
        Instr i;
        i.op = Opcode::kWgFunc;
        i.loc = e.loc;
        switch (e.builtin) {
          case Builtin::kWgBroadcast: i.wg = WgOp::kBroadcast; break;
          case Builtin::kWgReduceAdd: i.wg = WgOp::kReduceAdd; break;
          case Builtin::kWgReduceMin: i.wg = WgOp::kReduceMin; break;
          default: i.wg = WgOp::kReduceMax; break;
        }
        for (const auto& o : e.operands) i.operands.push_back(Operand::value(lower_expr(*o)));
        const ValueId v = emit_value(std::move(i), e.type);
        split_after_sync();
        return v;
      }
      case BuiltinClass::kPipe: {
        Instr i;
        i.param = param_of(e.operands[0]->symbol);
        i.loc = e.loc;
        if (e.builtin == Builtin::kReadPipe) {
          i.op = Opcode::kPipeRead;
          return emit_value(std::move(i), e.type);
        }
        i.op = Opcode::kPipeWrite;
        i.operands.push_back(Operand::value(lower_expr(*e.operands[1])));
        i.type = e.operands[1]->type;
        emit(std::move(i));
        return kNoValue;
      }
      case BuiltinClass::kEnqueue: {
        Instr i;
        i.op = Opcode::kEnqueue;
        i.param = param_of(e.operands[0]->symbol);
        i.callee = e.operands[3]->text;
        i.loc = e.loc;
        i.operands.push_back(Operand::value(lower_expr(*e.operands[1])));
        i.operands.push_back(Operand::value(lower_expr(*e.operands[2])));
        const KernelDecl& child = prog_.kernels[static_cast<std::size_t>(e.callee_kernel)];
        for (std::size_t a = 0; a < child.params.size(); ++a) {
          const Expr& arg = *e.operands[4 + a];
          if (child.params[a].kind == ParamKind::kScalar) {
            i.operands.push_back(Operand::value(lower_expr(arg)));
          } else {
            i.operands.push_back(Operand::param(param_of(arg.symbol)));
          }
        }
        emit(std::move(i));
        return kNoValue;
      }
    }
    return kNoValue;
  }

  ValueId lower_expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::kIntLit:
        return constant(e.type, e.int_value);
      case ExprKind::kFloatLit:
        return constant(Type::kF32, std::bit_cast<std::uint32_t>(e.float_value));
      case ExprKind::kBoolLit:
        return constant(Type::kBool, e.bool_value ? 1 : 0);
      case ExprKind::kStringLit:
        return kNoValue;
      case ExprKind::kVar: {
        const int p = param_of(e.symbol);
        if (p >= 0) {
          Instr i;
          i.op = Opcode::kArg;
          i.param = p;
          return emit_value(std::move(i), e.type);
        }
        return load_var(e.symbol);
      }
      case ExprKind::kIndex: {
        const ValueId idx = lower_expr(*e.operands[0]);
        Instr i;
        i.op = Opcode::kLoadStream;
        i.param = param_of(e.symbol);
        i.loc = e.loc;
        i.operands.push_back(Operand::value(idx));
        return emit_value(std::move(i), e.type);
      }
      case ExprKind::kUnary: {
        const ValueId v = lower_expr(*e.operands[0]);
        if (e.unary_op == UnaryOp::kNot) {
          return binop(BinOp::kXor, Type::kBool, {v, constant(Type::kBool, 1)}, Type::kBool,
                       e.loc);
        }
        if (e.type == Type::kF32) return binop(BinOp::kNeg, e.type, {v}, e.type, e.loc);
        return binop(BinOp::kSub, e.type, {constant(e.type, 0), v}, e.type, e.loc);
      }
      case ExprKind::kCast:
        return lower_cast(e);
      case ExprKind::kBinary: {
        if (e.binary_op == BinaryOp::kLogicalAnd || e.binary_op == BinaryOp::kLogicalOr) {
          return lower_logical(e);
        }
        const ValueId a = lower_expr(*e.operands[0]);
        const ValueId b = lower_expr(*e.operands[1]);
        BinOp op = BinOp::kAdd;
        switch (e.binary_op) {
          case BinaryOp::kAdd: op = BinOp::kAdd; break;
          case BinaryOp::kSub: op = BinOp::kSub; break;
          case BinaryOp::kMul: op = BinOp::kMul; break;
          case BinaryOp::kDiv: op = BinOp::kDiv; break;
          case BinaryOp::kRem: op = BinOp::kRem; break;
          case BinaryOp::kLt: op = BinOp::kLt; break;
          case BinaryOp::kLe: op = BinOp::kLe; break;
          case BinaryOp::kGt: op = BinOp::kGt; break;
          case BinaryOp::kGe: op = BinOp::kGe; break;
          case BinaryOp::kEq: op = BinOp::kEq; break;
          case BinaryOp::kNe: op = BinOp::kNe; break;
          default: break;
        }
        return binop(op, e.type, {a, b}, e.operands[0]->type, e.loc);
      }
      case ExprKind::kCall:
        return lower_call(e);
    }
    return kNoValue;
  }

  void lower_list(const StmtList& stmts) {
    for (const auto& s : stmts) lower_stmt(*s);
  }

  void lower_stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::kDecl: {
        const ValueId v = s.value ? lower_expr(*s.value) : constant(s.decl_type, 0);
        store_var(s.symbol, v);
        break;
      }
      case StmtKind::kAssign: {
        const Expr& t = *s.target;
        if (t.kind == ExprKind::kVar) {
          store_var(t.symbol, lower_expr(*s.value));
          break;
        }
        // The index is evaluated before the stored value.
        const ValueId idx = lower_expr(*t.operands[0]);
        const ValueId v = lower_expr(*s.value);
        Instr i;
        i.op = Opcode::kStoreStream;
        i.param = param_of(t.symbol);
        i.type = t.type;
        i.loc = t.loc;
        i.operands = {Operand::value(idx), Operand::value(v)};
        emit(std::move(i));
        break;
      }
      case StmtKind::kExpr:
        lower_expr(*s.value);
        break;
      case StmtKind::kBlock:
        lower_list(s.body);
        break;
      case StmtKind::kIf: {
        const ValueId c = lower_expr(*s.cond);
        const BlockId then_b = new_block();
        const BlockId else_b = s.has_else ? new_block() : kNoBlock;
        const BlockId join = new_block();
        terminate({TermKind::kCondBr, c, then_b, s.has_else ? else_b : join});
        cur_ = then_b;
        lower_list(s.body);
        branch(join);
        if (s.has_else) {
          cur_ = else_b;
          lower_list(s.else_body);
          branch(join);
        }
        cur_ = join;
        break;
      }
      case StmtKind::kWhile:
      case StmtKind::kFor: {
        if (s.init) lower_stmt(*s.init);
        const BlockId header = new_block();
        branch(header);
        cur_ = header;
        const BlockId body = new_block();
        const BlockId exit = new_block();
        if (s.cond) {
          const ValueId c = lower_expr(*s.cond);
          terminate({TermKind::kCondBr, c, body, exit});
        } else {
          branch(body);
        }
        cur_ = body;
        lower_list(s.body);
        if (s.step) lower_stmt(*s.step);
        branch(header);
        cur_ = exit;
        break;
      }
    }
  }

  const Program& prog_;
  const KernelDecl& kernel_;
  Function f_;
  BlockId cur_ = 0;
};

void renumber(Function& f) {
  const auto rpo = reverse_post_order(f);
  std::vector<BlockId> remap(f.blocks.size(), kNoBlock);
  for (std::size_t i = 0; i < rpo.size(); ++i) remap[rpo[i]] = static_cast<BlockId>(i);
  std::vector<BasicBlock> out;
  out.reserve(rpo.size());
  for (BlockId old : rpo) {
    BasicBlock b = std::move(f.blocks[old]);
    b.id = remap[old];
    if (b.term.target != kNoBlock) b.term.target = remap[b.term.target];
    if (b.term.false_target != kNoBlock) b.term.false_target = remap[b.term.false_target];
    for (auto& phi : b.phis) {
      std::vector<std::pair<BlockId, ValueId>> kept;
      for (auto [p, v] : phi.incoming) {
        if (remap[p] != kNoBlock) kept.emplace_back(remap[p], v);
      }
      phi.incoming = std::move(kept);
    }
    out.push_back(std::move(b));
  }
  f.blocks = std::move(out);
  f.entry = 0;
}

}  // namespace

void merge_blocks(Function& f) {
  bool changed = true;
  std::vector<char> dead(f.blocks.size(), 0);
  while (changed) {
    changed = false;
    const auto preds = f.predecessors();
    for (auto& a : f.blocks) {
      if (dead[a.id] || a.term.kind != TermKind::kBr || a.ends_in_sync()) continue;
      const BlockId b = a.term.target;
      if (b == a.id || b == f.entry || preds[b].size() != 1) continue;
      BasicBlock& bb = f.blocks[b];
      assert(bb.phis.empty());
      for (auto& i : bb.instrs) a.instrs.push_back(std::move(i));
      a.term = bb.term;
      bb.instrs.clear();
      bb.term = {};
      dead[b] = 1;
      changed = true;
      break;
    }
  }
  renumber(f);
}

Function build_cfg(const Program& prog, const KernelDecl& kernel) {
  Function f = Builder(prog, kernel).build();
  merge_blocks(f);
  return f;
}

}  // namespace kf::ir
