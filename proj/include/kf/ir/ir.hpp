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

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "kf/frontend/ast.hpp"

namespace kf::ir {

using ValueId = std::uint32_t;
using BlockId = std::uint32_t;

inline constexpr ValueId kNoValue = std::numeric_limits<ValueId>::max();
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();

enum class Opcode : std::uint8_t {
  kConst,
  kArg,          // scalar kernel argument
  kBinop,
  kCast,
  kSelect,
  kLoadStream,
  kStoreStream,
  kBuiltinCall,  // id/size queries
  kPipeRead,
  kPipeWrite,
  kEnqueue,
  kBarrier,
  kWgFunc,
  kVarLoad,      // pre-SSA only
  kVarStore,     // pre-SSA only
};

enum class BinOp : std::uint8_t {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kRem,
  kLt,
  kLe,
  kGt,
  kGe,
  kEq,
  kNe,
  kAnd,
  kOr,
  kXor,
  kNeg,  // unary f32 negation
};

enum class CastOp : std::uint8_t { kIToF, kUToF, kFToI, kFToU, kBitcast, kBoolToInt };

enum class WgOp : std::uint8_t { kBroadcast, kReduceAdd, kReduceMin, kReduceMax };

std::string_view opcode_name(Opcode op);
std::string_view binop_name(BinOp op);
std::string_view castop_name(CastOp op);
std::string_view wgop_name(WgOp op);
bool is_compare(BinOp op);

// Pure instructions may be merged by CSE and reordered by scheduling.
bool is_pure(Opcode op);

struct Operand {
  enum class Kind : std::uint8_t { kValue, kParam };
  Kind kind = Kind::kValue;
  // ValueId for kValue, kernel parameter index for kParam (enqueue handles).
  std::uint32_t id = kNoValue;

  static Operand value(ValueId v) { return {Kind::kValue, v}; }
  static Operand param(int p) { return {Kind::kParam, static_cast<std::uint32_t>(p)}; }
  bool is_value() const { return kind == Kind::kValue; }

  friend bool operator==(const Operand&, const Operand&) = default;
  friend auto operator<=>(const Operand&, const Operand&) = default;
};

struct Instr {
  ValueId result = kNoValue;
  Opcode op = Opcode::kConst;
  // Result type; for stores and pipe writes, the stored element type.
  Type type = Type::kVoid;
  // Operand type of comparisons and source type of casts.
  Type operand_type = Type::kVoid;
  BinOp bin = BinOp::kAdd;
  CastOp cast = CastOp::kBitcast;
  WgOp wg = WgOp::kReduceAdd;
  Builtin query = Builtin::kNone;
  // kConst: raw bit pattern; kBuiltinCall: dimension.
  std::uint32_t imm = 0;
  // Buffer/pipe/queue/scalar parameter index, or variable index for kVar*.
  int param = -1;
  // kEnqueue: child kernel.
  std::string callee;
  // kEnqueue: [gsize, lsize, args...]; args may be parameter handles.
  std::vector<Operand> operands;
  SourceLocation loc;
};

struct Phi {
  ValueId result = kNoValue;
  Type type = Type::kVoid;
  int var = -1;
  std::vector<std::pair<BlockId, ValueId>> incoming;
};

enum class TermKind : std::uint8_t { kNone, kBr, kCondBr, kRet };

struct Terminator {
  TermKind kind = TermKind::kNone;
  ValueId cond = kNoValue;
  BlockId target = kNoBlock;        // kBr target, kCondBr true target
  BlockId false_target = kNoBlock;  // kCondBr false target
};

struct BasicBlock {
  BlockId id = 0;
  std::vector<Phi> phis;
  std::vector<Instr> instrs;
  Terminator term;

  std::vector<BlockId> successors() const;
  // True when the block was split after a barrier or work-group function.
  bool ends_in_sync() const;
};

struct Function {
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<BasicBlock> blocks;
  BlockId entry = 0;
  // Indexed by ValueId.
  std::vector<Type> value_types;
  // Mutable variables of the pre-SSA form, indexed by variable id.
  std::vector<Type> var_types;
  bool in_ssa = false;

  ValueId new_value(Type t) {
    value_types.push_back(t);
    return static_cast<ValueId>(value_types.size() - 1);
  }

  std::vector<std::vector<BlockId>> predecessors() const;
  std::size_t instruction_count() const;
};

// Structural equality: blocks, phis, instructions and terminators.
bool structurally_equal(const Function& a, const Function& b);

// Renumbers values densely in order of definition (blocks in order, phis
// before instructions). Operands referring to undefined values are kept.
void compact_values(Function& f);

// Blocks in reverse post-order from the entry (true successor first).
std::vector<BlockId> reverse_post_order(const Function& f);

}  // namespace kf::ir
