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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kf/frontend/builtins.hpp"
#include "kf/frontend/source.hpp"

namespace kf {

// Scalar types of MiniCL. All non-bool values are 32 bits wide.
enum class Type : std::uint8_t { kVoid, kBool, kI32, kU32, kF32 };

// Source spelling: "void", "bool", "int", "uint", "float".
std::string_view type_spelling(Type t);
// IR spelling: "void", "bool", "i32", "u32", "f32".
std::string_view type_name(Type t);

enum class ExprKind : std::uint8_t {
  kIntLit,
  kFloatLit,
  kBoolLit,
  kStringLit,
  kVar,
  kIndex,
  kUnary,
  kBinary,
  kCast,
  kCall,
};

enum class UnaryOp : std::uint8_t { kNeg, kNot };

enum class BinaryOp : std::uint8_t {
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
  kLogicalAnd,
  kLogicalOr,
};

std::string_view binary_op_spelling(BinaryOp op);
bool is_comparison(BinaryOp op);

struct Expr {
  ExprKind kind = ExprKind::kIntLit;
  SourceLocation loc;

  // Literal payloads. `int_value` holds the raw 32-bit pattern.
  std::uint32_t int_value = 0;
  bool unsigned_suffix = false;
  float float_value = 0.0f;
  bool bool_value = false;
  // Variable/buffer name, callee name, or string literal contents.
  std::string text;

  UnaryOp unary_op = UnaryOp::kNeg;
  BinaryOp binary_op = BinaryOp::kAdd;
  Type cast_type = Type::kI32;

  // kIndex: [index]; kUnary/kCast: [operand]; kBinary: [lhs, rhs];
  // kCall: arguments.
  std::vector<std::unique_ptr<Expr>> operands;

  // Filled by the type checker.
  Type type = Type::kVoid;
  int symbol = -1;
  Builtin builtin = Builtin::kNone;
  // For enqueue_kernel: index of the child kernel in the program.
  int callee_kernel = -1;
};

using ExprPtr = std::unique_ptr<Expr>;

enum class StmtKind : std::uint8_t {
  kDecl,
  kAssign,
  kIf,
  kFor,
  kWhile,
  kExpr,
  kBlock,
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using StmtList = std::vector<StmtPtr>;

struct Stmt {
  StmtKind kind = StmtKind::kExpr;
  SourceLocation loc;

  // kDecl
  Type decl_type = Type::kI32;
  std::string name;
  int symbol = -1;

  // kAssign: `target` is a kVar or kIndex expression.
  ExprPtr target;
  // kDecl initializer (optional), kAssign value, kExpr expression.
  ExprPtr value;
  // kIf/kWhile condition; kFor condition (optional).
  ExprPtr cond;
  // kFor init/step (optional).
  StmtPtr init;
  StmtPtr step;

  // kIf then-branch, loop body, or nested block.
  StmtList body;
  bool has_else = false;
  StmtList else_body;
};

enum class ParamKind : std::uint8_t {
  kGlobalBuffer,
  kPipe,
  kDeviceQueue,
  kScalar,
};

enum class PipeDir : std::uint8_t { kRead, kWrite };

struct ParamDecl {
  std::string name;
  ParamKind kind = ParamKind::kScalar;
  // Element type for buffers and pipes, value type for scalars.
  Type elem = Type::kI32;
  bool is_const = false;
  PipeDir dir = PipeDir::kRead;
  SourceLocation loc;
};

struct Symbol {
  std::string name;
  Type type = Type::kVoid;
  // Index into KernelDecl::params, or -1 for locals.
  int param = -1;
};

struct KernelDecl {
  std::string name;
  std::vector<ParamDecl> params;
  StmtList body;
  SourceLocation loc;

  // Filled by the type checker; symbol i < params.size() is param i.
  std::vector<Symbol> symbols;
};

struct Program {
  std::vector<KernelDecl> kernels;

  const KernelDecl* find_kernel(std::string_view name) const;
  int kernel_index(std::string_view name) const;
};

// Structural equality ignoring source locations and type annotations.
bool structurally_equal(const Program& a, const Program& b);
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);

}  // namespace kf
