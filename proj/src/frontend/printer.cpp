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

#include "kf/frontend/printer.hpp"

#include <charconv>

#include <fmt/format.h>

namespace kf {
namespace {

int binary_precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::kLogicalOr: return 1;
    case BinaryOp::kLogicalAnd: return 2;
    case BinaryOp::kEq:
    case BinaryOp::kNe: return 3;
    case BinaryOp::kLt:
    case BinaryOp::kLe:
    case BinaryOp::kGt:
    case BinaryOp::kGe: return 4;
    case BinaryOp::kAdd:
    case BinaryOp::kSub: return 5;
    case BinaryOp::kMul:
    case BinaryOp::kDiv:
    case BinaryOp::kRem: return 6;
  }
  return 0;
}

std::string float_literal(float v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s + "f";
}

void print_expr(const Expr& e, std::string& out);

void print_operand(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print_expr(e, out);
  if (wrap) out += ')';
}

void print_expr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::kIntLit:
      out += std::to_string(e.int_value);
      if (e.unsigned_suffix) out += 'u';
      break;
    case ExprKind::kFloatLit:
      out += float_literal(e.float_value);
      break;
    case ExprKind::kBoolLit:
      out += e.bool_value ? "true" : "false";
      break;
    case ExprKind::kStringLit:
      out += '"';
      out += e.text;
      out += '"';
      break;
    case ExprKind::kVar:
      out += e.text;
      break;
    case ExprKind::kIndex:
      out += e.text;
      out += '[';
      print_expr(*e.operands[0], out);
      out += ']';
      break;
    case ExprKind::kCall:
      out += e.text;
      out += '(';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out += ", ";
        print_expr(*e.operands[i], out);
      }
      out += ')';
      break;
    case ExprKind::kUnary: {
      out += e.unary_op == UnaryOp::kNeg ? '-' : '!';
      const auto k = e.operands[0]->kind;
      print_operand(*e.operands[0],
                    k == ExprKind::kUnary || k == ExprKind::kBinary ||
                        k == ExprKind::kCast,
                    out);
      break;
    }
    case ExprKind::kCast: {
      out += '(';
      out += type_spelling(e.cast_type);
      out += ')';
      const auto k = e.operands[0]->kind;
      print_operand(*e.operands[0],
                    k == ExprKind::kUnary || k == ExprKind::kBinary ||
                        k == ExprKind::kCast,
                    out);
      break;
    }
    case ExprKind::kBinary: {
      const int prec = binary_precedence(e.binary_op);
      const Expr& l = *e.operands[0];
      const Expr& r = *e.operands[1];
      print_operand(l, l.kind == ExprKind::kBinary && binary_precedence(l.binary_op) < prec, out);
      out += ' ';
      out += binary_op_spelling(e.binary_op);
      out += ' ';
      print_operand(r, r.kind == ExprKind::kBinary && binary_precedence(r.binary_op) <= prec, out);
      break;
    }
  }
}

class StmtPrinter {
 public:
  explicit StmtPrinter(std::string& out) : out_(out) {}

  void list(const StmtList& stmts, int depth) {
    for (const auto& s : stmts) stmt(*s, depth);
  }

  void stmt(const Stmt& s, int depth) {
    indent(depth);
    switch (s.kind) {
      case StmtKind::kIf:
        out_ += "if (";
        print_expr(*s.cond, out_);
        out_ += ") {\n";
        list(s.body, depth + 1);
        indent(depth);
        out_ += '}';
        if (s.has_else) {
          out_ += " else {\n";
          list(s.else_body, depth + 1);
          indent(depth);
          out_ += '}';
        }
        out_ += '\n';
        break;
      case StmtKind::kFor:
        out_ += "for (";
        if (s.init) simple(*s.init);
        out_ += ';';
        if (s.cond) {
          out_ += ' ';
          print_expr(*s.cond, out_);
        }
        out_ += ';';
        if (s.step) {
          out_ += ' ';
          simple(*s.step);
        }
        out_ += ") {\n";
        list(s.body, depth + 1);
        indent(depth);
        out_ += "}\n";
        break;
      case StmtKind::kWhile:
        out_ += "while (";
        print_expr(*s.cond, out_);
        out_ += ") {\n";
        list(s.body, depth + 1);
        indent(depth);
        out_ += "}\n";
        break;
      case StmtKind::kBlock:
        out_ += "{\n";
        list(s.body, depth + 1);
        indent(depth);
        out_ += "}\n";
        break;
      default:
        simple(s);
        out_ += ";\n";
        break;
    }
  }

 private:
  void simple(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::kDecl:
        out_ += type_spelling(s.decl_type);
        out_ += ' ';
        out_ += s.name;
        if (s.value) {
          out_ += " = ";
          print_expr(*s.value, out_);
        }
        break;
      case StmtKind::kAssign:
        print_expr(*s.target, out_);
        out_ += " = ";
        print_expr(*s.value, out_);
        break;
      case StmtKind::kExpr:
        print_expr(*s.value, out_);
        break;
      default:
        break;
    }
  }

  void indent(int depth) { out_.append(static_cast<std::size_t>(depth) * 2, ' '); }

  std::string& out_;
};

}  // namespace

std::string param_text(const ParamDecl& p) {
  switch (p.kind) {
    case ParamKind::kGlobalBuffer:
      return fmt::format("global {}{}* {}", p.is_const ? "const " : "",
                         type_spelling(p.elem), p.name);
    case ParamKind::kPipe:
      return fmt::format("{} pipe {} {}",
                         p.dir == PipeDir::kRead ? "read_only" : "write_only",
                         type_spelling(p.elem), p.name);
    case ParamKind::kDeviceQueue:
      return fmt::format("queue_t {}", p.name);
    case ParamKind::kScalar:
      return fmt::format("{} {}", type_spelling(p.elem), p.name);
  }
  return {};
}

std::string pretty_print(const Expr& e) {
  std::string out;
  print_expr(e, out);
  return out;
}

std::string pretty_print(const Program& prog) {
  std::string out;
  for (std::size_t k = 0; k < prog.kernels.size(); ++k) {
    const KernelDecl& kd = prog.kernels[k];
    if (k) out += '\n';
    out += "kernel void ";
    out += kd.name;
    out += '(';
    for (std::size_t i = 0; i < kd.params.size(); ++i) {
      if (i) out += ", ";
      out += param_text(kd.params[i]);
    }
    out += ") {\n";
    StmtPrinter(out).list(kd.body, 1);
    out += "}\n";
  }
  return out;
}

}  // namespace kf
