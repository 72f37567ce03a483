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

#include "kf/frontend/ast.hpp"

#include <bit>

namespace kf {

std::string_view type_spelling(Type t) {
  switch (t) {
    case Type::kVoid: return "void";
    case Type::kBool: return "bool";
    case Type::kI32: return "int";
    case Type::kU32: return "uint";
    case Type::kF32: return "float";
  }
  return "?";
}

std::string_view type_name(Type t) {
  switch (t) {
    case Type::kVoid: return "void";
    case Type::kBool: return "bool";
    case Type::kI32: return "i32";
    case Type::kU32: return "u32";
    case Type::kF32: return "f32";
  }
  return "?";
}

std::string_view binary_op_spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kMul: return "*";
    case BinaryOp::kDiv: return "/";
    case BinaryOp::kRem: return "%";
    case BinaryOp::kLt: return "<";
    case BinaryOp::kLe: return "<=";
    case BinaryOp::kGt: return ">";
    case BinaryOp::kGe: return ">=";
    case BinaryOp::kEq: return "==";
    case BinaryOp::kNe: return "!=";
    case BinaryOp::kLogicalAnd: return "&&";
    case BinaryOp::kLogicalOr: return "||";
  }
  return "?";
}

bool is_comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::kLt:
    case BinaryOp::kLe:
    case BinaryOp::kGt:
    case BinaryOp::kGe:
    case BinaryOp::kEq:
    case BinaryOp::kNe:
      return true;
    default:
      return false;
  }
}

const KernelDecl* Program::find_kernel(std::string_view name) const {
  const int i = kernel_index(name);
  return i < 0 ? nullptr : &kernels[static_cast<std::size_t>(i)];
}

int Program::kernel_index(std::string_view name) const {
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    if (kernels[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

template <typename T>
bool ptr_equal(const std::unique_ptr<T>& a, const std::unique_ptr<T>& b) {
  if (!a || !b) return !a && !b;
  return structurally_equal(*a, *b);
}

bool list_equal(const StmtList& a, const StmtList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!structurally_equal(*a[i], *b[i])) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.operands.size() != b.operands.size()) return false;
  switch (a.kind) {
    case ExprKind::kIntLit:
      if (a.int_value != b.int_value || a.unsigned_suffix != b.unsigned_suffix)
        return false;
      break;
    case ExprKind::kFloatLit:
      if (std::bit_cast<std::uint32_t>(a.float_value) !=
          std::bit_cast<std::uint32_t>(b.float_value))
        return false;
      break;
    case ExprKind::kBoolLit:
      if (a.bool_value != b.bool_value) return false;
      break;
    case ExprKind::kStringLit:
    case ExprKind::kVar:
    case ExprKind::kIndex:
    case ExprKind::kCall:
      if (a.text != b.text) return false;
      break;
    case ExprKind::kUnary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case ExprKind::kBinary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case ExprKind::kCast:
      if (a.cast_type != b.cast_type) return false;
      break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    if (!structurally_equal(*a.operands[i], *b.operands[i])) return false;
  }
  return true;
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == StmtKind::kDecl &&
      (a.decl_type != b.decl_type || a.name != b.name))
    return false;
  return ptr_equal(a.target, b.target) && ptr_equal(a.value, b.value) &&
         ptr_equal(a.cond, b.cond) && ptr_equal(a.init, b.init) &&
         ptr_equal(a.step, b.step) && list_equal(a.body, b.body) &&
         a.has_else == b.has_else && list_equal(a.else_body, b.else_body);
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.kernels.size() != b.kernels.size()) return false;
  for (std::size_t k = 0; k < a.kernels.size(); ++k) {
    const KernelDecl& ka = a.kernels[k];
    const KernelDecl& kb = b.kernels[k];
    if (ka.name != kb.name || ka.params.size() != kb.params.size()) return false;
    for (std::size_t p = 0; p < ka.params.size(); ++p) {
      const ParamDecl& pa = ka.params[p];
      const ParamDecl& pb = kb.params[p];
      if (pa.name != pb.name || pa.kind != pb.kind || pa.elem != pb.elem ||
          pa.is_const != pb.is_const || pa.dir != pb.dir)
        return false;
    }
    if (!list_equal(ka.body, kb.body)) return false;
  }
  return true;
}

}  // namespace kf
