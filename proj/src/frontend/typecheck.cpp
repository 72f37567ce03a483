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

#include "kf/frontend/typecheck.hpp"

#include <map>
#include <set>

#include <fmt/format.h>

#include "kf/frontend/parser.hpp"

namespace kf {
namespace {

bool is_numeric(Type t) {
  return t == Type::kI32 || t == Type::kU32 || t == Type::kF32;
}
bool is_integer(Type t) { return t == Type::kI32 || t == Type::kU32; }

class Checker {
 public:
  explicit Checker(Program& prog) : prog_(prog) {}

  Diagnostics run() {
    std::set<std::string> names;
    for (auto& k : prog_.kernels) {
      if (!names.insert(k.name).second) {
        error(k.loc, fmt::format("duplicate kernel name '{}'", k.name));
      }
    }
    for (auto& k : prog_.kernels) check_kernel(k);
    return std::move(diags_);
  }

 private:
  void error(SourceLocation loc, std::string msg) {
    diags_.push_back({Severity::kError, std::move(msg), loc});
  }
  void warning(SourceLocation loc, std::string msg) {
    diags_.push_back({Severity::kWarning, std::move(msg), loc});
  }

  void check_kernel(KernelDecl& k) {
    kernel_ = &k;
    k.symbols.clear();
    scopes_.clear();
    scopes_.emplace_back();
    divergence_ = 0;
    for (std::size_t i = 0; i < k.params.size(); ++i) {
      const ParamDecl& p = k.params[i];
      if (scopes_.back().count(p.name)) {
        error(p.loc, fmt::format("duplicate parameter name '{}'", p.name));
        continue;
      }
      k.symbols.push_back({p.name, p.kind == ParamKind::kScalar ? p.elem : Type::kVoid,
                           static_cast<int>(i)});
      scopes_.back()[p.name] = static_cast<int>(k.symbols.size() - 1);
    }
    // Symbols must be indexable by param position even after a duplicate.
    while (k.symbols.size() < k.params.size()) {
      const auto i = k.symbols.size();
      k.symbols.push_back({k.params[i].name, Type::kVoid, static_cast<int>(i)});
    }
    check_list(k.body);
    kernel_ = nullptr;
  }

  void check_list(StmtList& stmts) {
    scopes_.emplace_back();
    for (auto& s : stmts) check_stmt(*s);
    scopes_.pop_back();
  }

  int lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return -1;
  }

  const ParamDecl* param_of(int symbol) const {
    if (symbol < 0) return nullptr;
    const int p = kernel_->symbols[static_cast<std::size_t>(symbol)].param;
    return p < 0 ? nullptr : &kernel_->params[static_cast<std::size_t>(p)];
  }

  // An unsuffixed integer literal adopts `want` when `want` is uint.
  void coerce(Expr& e, Type want) {
    if (e.kind == ExprKind::kIntLit && !e.unsigned_suffix && e.type == Type::kI32 &&
        want == Type::kU32) {
      e.type = Type::kU32;
    }
  }

  void expect_type(Expr& e, Type want, std::string_view what) {
    coerce(e, want);
    if (e.type != want && e.type != Type::kVoid) {
      error(e.loc, fmt::format("type mismatch: {} expects {} but got {}", what,
                               type_name(want), type_name(e.type)));
    } else if (e.type == Type::kVoid && want != Type::kVoid) {
      error(e.loc, fmt::format("{} expects {} but expression has no value", what,
                               type_name(want)));
    }
  }

  void declare(Stmt& s) {
    if (scopes_.back().count(s.name)) {
      error(s.loc, fmt::format("redeclaration of '{}'", s.name));
      return;
    }
    kernel_->symbols.push_back({s.name, s.decl_type, -1});
    s.symbol = static_cast<int>(kernel_->symbols.size() - 1);
    scopes_.back()[s.name] = s.symbol;
  }

  void check_stmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::kDecl:
        if (s.value) {
          check_expr(*s.value);
          expect_type(*s.value, s.decl_type,
                      fmt::format("initializer of '{}'", s.name));
        }
        declare(s);
        break;
      case StmtKind::kAssign:
        check_assign(s);
        break;
      case StmtKind::kExpr:
        check_expr(*s.value);
        break;
      case StmtKind::kBlock:
        check_list(s.body);
        break;
      case StmtKind::kIf: {
        check_expr(*s.cond);
        expect_type(*s.cond, Type::kBool, "if condition");
        const bool divergent = !is_uniform(*s.cond, -1);
        divergence_ += divergent;
        check_list(s.body);
        if (s.has_else) check_list(s.else_body);
        divergence_ -= divergent;
        break;
      }
      case StmtKind::kWhile: {
        check_expr(*s.cond);
        expect_type(*s.cond, Type::kBool, "while condition");
        const bool divergent = !is_uniform(*s.cond, -1);
        divergence_ += divergent;
        check_list(s.body);
        divergence_ -= divergent;
        break;
      }
      case StmtKind::kFor: {
        scopes_.emplace_back();
        int induction = -1;
        if (s.init) {
          check_stmt(*s.init);
          if (s.init->kind == StmtKind::kDecl) induction = s.init->symbol;
        }
        if (s.cond) {
          check_expr(*s.cond);
          expect_type(*s.cond, Type::kBool, "for condition");
        }
        if (s.step) check_stmt(*s.step);
        const bool divergent = s.cond && !is_uniform(*s.cond, induction);
        divergence_ += divergent;
        check_list(s.body);
        divergence_ -= divergent;
        scopes_.pop_back();
        break;
      }
    }
  }

  void check_assign(Stmt& s) {
    Expr& t = *s.target;
    check_expr(*s.value);
    if (t.kind == ExprKind::kVar) {
      t.symbol = lookup(t.text);
      if (t.symbol < 0) {
        error(t.loc, fmt::format("undeclared identifier '{}'", t.text));
        return;
      }
      if (param_of(t.symbol)) {
        error(t.loc, fmt::format("cannot assign to kernel parameter '{}'", t.text));
        return;
      }
      t.type = kernel_->symbols[static_cast<std::size_t>(t.symbol)].type;
      expect_type(*s.value, t.type, fmt::format("assignment to '{}'", t.text));
      return;
    }
    check_expr(t);
    const ParamDecl* p = param_of(t.symbol);
    if (p && p->is_const) {
      error(t.loc, fmt::format("cannot store to const buffer '{}'", t.text));
    }
    if (t.type != Type::kVoid) {
      expect_type(*s.value, t.type, fmt::format("store to '{}'", t.text));
    }
  }

  // Conservative syntactic uniformity across the work-items of a group.
  bool is_uniform(const Expr& e, int induction) const {
    switch (e.kind) {
      case ExprKind::kIntLit:
      case ExprKind::kFloatLit:
      case ExprKind::kBoolLit:
        return true;
      case ExprKind::kVar: {
        if (e.symbol == induction && e.symbol >= 0) return true;
        const ParamDecl* p = param_of(e.symbol);
        return p && p->kind == ParamKind::kScalar;
      }
      case ExprKind::kUnary:
      case ExprKind::kBinary:
      case ExprKind::kCast:
        for (const auto& o : e.operands) {
          if (!is_uniform(*o, induction)) return false;
        }
        return true;
      case ExprKind::kCall:
        return e.builtin == Builtin::kGroupId || e.builtin == Builtin::kGlobalSize ||
               e.builtin == Builtin::kLocalSize || e.builtin == Builtin::kWgBroadcast ||
               e.builtin == Builtin::kWgReduceAdd || e.builtin == Builtin::kWgReduceMin ||
               e.builtin == Builtin::kWgReduceMax;
      default:
        return false;
    }
  }

  void check_expr(Expr& e) {
    e.type = Type::kVoid;
    switch (e.kind) {
      case ExprKind::kIntLit:
        e.type = e.unsigned_suffix ? Type::kU32 : Type::kI32;
        return;
      case ExprKind::kFloatLit:
        e.type = Type::kF32;
        return;
      case ExprKind::kBoolLit:
        e.type = Type::kBool;
        return;
      case ExprKind::kStringLit:
        error(e.loc, "string literal is only allowed as the kernel name of enqueue_kernel");
        return;
      case ExprKind::kVar: {
        e.symbol = lookup(e.text);
        if (e.symbol < 0) {
          error(e.loc, fmt::format("undeclared identifier '{}'", e.text));
          return;
        }
        if (const ParamDecl* p = param_of(e.symbol); p && p->kind != ParamKind::kScalar) {
          error(e.loc, fmt::format("'{}' is an opaque handle and cannot be used as a value",
                                   e.text));
          return;
        }
        e.type = kernel_->symbols[static_cast<std::size_t>(e.symbol)].type;
        return;
      }
      case ExprKind::kIndex: {
        Expr& idx = *e.operands[0];
        check_expr(idx);
        e.symbol = lookup(e.text);
        const ParamDecl* p = param_of(e.symbol);
        if (e.symbol < 0) {
          error(e.loc, fmt::format("undeclared identifier '{}'", e.text));
          return;
        }
        if (!p || p->kind != ParamKind::kGlobalBuffer) {
          error(e.loc, fmt::format("'{}' is not a global buffer", e.text));
          return;
        }
        if (!is_integer(idx.type)) {
          error(idx.loc, fmt::format("buffer index must be int or uint, got {}",
                                     type_name(idx.type)));
        }
        e.type = p->elem;
        return;
      }
      case ExprKind::kUnary: {
        Expr& o = *e.operands[0];
        check_expr(o);
        if (o.type == Type::kVoid) return;
        if (e.unary_op == UnaryOp::kNot) {
          if (o.type != Type::kBool) {
            error(e.loc, fmt::format("operator ! expects bool, got {}", type_name(o.type)));
            return;
          }
        } else if (!is_numeric(o.type)) {
          error(e.loc, fmt::format("unary - expects a number, got {}", type_name(o.type)));
          return;
        }
        e.type = o.type;
        return;
      }
      case ExprKind::kCast: {
        Expr& o = *e.operands[0];
        check_expr(o);
        if (o.type == Type::kVoid) return;
        if (o.type == Type::kBool && e.cast_type == Type::kF32) {
          error(e.loc, "cannot cast bool to float");
          return;
        }
        e.type = e.cast_type;
        return;
      }
      case ExprKind::kBinary:
        check_binary(e);
        return;
      case ExprKind::kCall:
        check_call(e);
        return;
    }
  }

  void check_binary(Expr& e) {
    Expr& l = *e.operands[0];
    Expr& r = *e.operands[1];
    check_expr(l);
    check_expr(r);
    if (l.type == Type::kVoid || r.type == Type::kVoid) return;
    coerce(l, r.type);
    coerce(r, l.type);
    const auto spelling = binary_op_spelling(e.binary_op);
    if (e.binary_op == BinaryOp::kLogicalAnd || e.binary_op == BinaryOp::kLogicalOr) {
      if (l.type != Type::kBool || r.type != Type::kBool) {
        error(e.loc, fmt::format("type mismatch: operator {} expects bool operands, got {} "
                                 "and {}",
                                 spelling, type_name(l.type), type_name(r.type)));
        return;
      }
      e.type = Type::kBool;
      return;
    }
    if (l.type != r.type) {
      error(e.loc, fmt::format("type mismatch: {} vs {} in operator {}", type_name(l.type),
                               type_name(r.type), spelling));
      return;
    }
    if (is_comparison(e.binary_op)) {
      const bool eq = e.binary_op == BinaryOp::kEq || e.binary_op == BinaryOp::kNe;
      if (!is_numeric(l.type) && !(eq && l.type == Type::kBool)) {
        error(e.loc, fmt::format("operator {} is not defined for {}", spelling,
                                 type_name(l.type)));
        return;
      }
      e.type = Type::kBool;
      return;
    }
    if (!is_numeric(l.type) || (e.binary_op == BinaryOp::kRem && l.type == Type::kF32)) {
      error(e.loc, fmt::format("operator {} is not defined for {}", spelling,
                               type_name(l.type)));
      return;
    }
    e.type = l.type;
  }

  const ParamDecl* handle_arg(Expr& a, ParamKind kind, std::string_view what) {
    if (a.kind != ExprKind::kVar) {
      error(a.loc, fmt::format("{} must name a kernel parameter", what));
      return nullptr;
    }
    a.symbol = lookup(a.text);
    const ParamDecl* p = param_of(a.symbol);
    if (a.symbol < 0) {
      error(a.loc, fmt::format("undeclared identifier '{}'", a.text));
      return nullptr;
    }
    if (!p || p->kind != kind) {
      error(a.loc, fmt::format("{} must name a kernel parameter of the right kind, "
                               "'{}' is not one",
                               what, a.text));
      return nullptr;
    }
    return p;
  }

  void check_call(Expr& e) {
    const BuiltinInfo* info = find_builtin(e.text);
    if (!info) {
      error(e.loc, fmt::format("unknown function '{}'", e.text));
      for (auto& a : e.operands) {
        if (a->kind != ExprKind::kStringLit) check_expr(*a);
      }
      return;
    }
    e.builtin = info->id;
    const int argc = static_cast<int>(e.operands.size());
    if (info->variadic ? argc < info->arity : argc != info->arity) {
      error(e.loc, fmt::format("wrong number of arguments to {}: expected {}{}, got {}",
                               info->name, info->variadic ? "at least " : "",
                               info->arity, argc));
      return;
    }
    if (is_sync_builtin(info->id) && divergence_ > 0) {
      warning(e.loc, fmt::format("{} under divergent control flow; every work-item of "
                                 "the group must reach it",
                                 info->name));
    }
    switch (info->cls) {
      case BuiltinClass::kIdQuery: {
        Expr& d = *e.operands[0];
        if (d.kind != ExprKind::kIntLit || d.int_value > 2) {
          error(d.loc, fmt::format("{} expects a literal dimension 0, 1 or 2", info->name));
          return;
        }
        d.type = Type::kU32;
        e.type = Type::kI32;
        return;
      }
      case BuiltinClass::kBarrier:
        e.type = Type::kVoid;
        return;
      case BuiltinClass::kWorkGroup: {
        Expr& v = *e.operands[0];
        check_expr(v);
        if (!is_numeric(v.type)) {
          if (v.type != Type::kVoid) {
            error(v.loc, fmt::format("type mismatch: {} expects int, uint or float, got {}",
                                     info->name, type_name(v.type)));
          }
          return;
        }
        if (info->id == Builtin::kWgBroadcast) {
          Expr& src = *e.operands[1];
          check_expr(src);
          if (!is_integer(src.type)) {
            error(src.loc, "work_group_broadcast source id must be int or uint");
            return;
          }
        }
        e.type = v.type;
        return;
      }
      case BuiltinClass::kPipe: {
        const ParamDecl* p = handle_arg(*e.operands[0], ParamKind::kPipe,
                                        fmt::format("first argument of {}", info->name));
        if (!p) return;
        if (info->id == Builtin::kReadPipe) {
          if (p->dir != PipeDir::kRead) {
            error(e.loc, fmt::format("pipe direction violation: read_pipe on write_only "
                                     "pipe '{}'",
                                     p->name));
            return;
          }
          e.type = p->elem;
          return;
        }
        Expr& v = *e.operands[1];
        check_expr(v);
        if (p->dir != PipeDir::kWrite) {
          error(e.loc, fmt::format("pipe direction violation: write_pipe on read_only "
                                   "pipe '{}'",
                                   p->name));
          return;
        }
        expect_type(v, p->elem, "write_pipe value");
        e.type = Type::kVoid;
        return;
      }
      case BuiltinClass::kEnqueue:
        check_enqueue(e);
        return;
    }
  }

  void check_enqueue(Expr& e) {
    handle_arg(*e.operands[0], ParamKind::kDeviceQueue, "first argument of enqueue_kernel");
    for (int i = 1; i <= 2; ++i) {
      Expr& sz = *e.operands[static_cast<std::size_t>(i)];
      check_expr(sz);
      if (!is_integer(sz.type)) {
        error(sz.loc, "enqueue_kernel sizes must be int or uint");
      }
    }
    Expr& name = *e.operands[3];
    if (name.kind != ExprKind::kStringLit) {
      error(name.loc, "enqueue_kernel expects the child kernel name as a string literal");
      return;
    }
    e.callee_kernel = prog_.kernel_index(name.text);
    if (e.callee_kernel < 0) {
      error(name.loc, fmt::format("enqueue_kernel names unknown kernel '{}'", name.text));
      return;
    }
    const KernelDecl& child = prog_.kernels[static_cast<std::size_t>(e.callee_kernel)];
    const std::size_t nargs = e.operands.size() - 4;
    if (nargs != child.params.size()) {
      error(e.loc, fmt::format("wrong number of arguments for kernel '{}': expected {}, "
                               "got {}",
                               child.name, child.params.size(), nargs));
      return;
    }
    for (std::size_t i = 0; i < nargs; ++i) {
      Expr& a = *e.operands[4 + i];
      const ParamDecl& cp = child.params[i];
      const std::string what = fmt::format("argument '{}' of kernel '{}'", cp.name, child.name);
      if (cp.kind == ParamKind::kScalar) {
        check_expr(a);
        expect_type(a, cp.elem, what);
        continue;
      }
      const ParamDecl* pp = handle_arg(a, cp.kind, what);
      if (!pp) continue;
      if (pp->elem != cp.elem || (cp.kind == ParamKind::kPipe && pp->dir != cp.dir) ||
          (cp.kind == ParamKind::kGlobalBuffer && pp->is_const && !cp.is_const)) {
        error(a.loc, fmt::format("{} is incompatible with parameter '{}'", what, pp->name));
      }
    }
    e.type = Type::kVoid;
  }

  Program& prog_;
  KernelDecl* kernel_ = nullptr;
  std::vector<std::map<std::string, int>> scopes_;
  int divergence_ = 0;
  Diagnostics diags_;
};

}  // namespace

Diagnostics typecheck(Program& prog) { return Checker(prog).run(); }

FrontendResult compile_source(const SourceUnit& src) {
  FrontendResult out;
  ParseResult parsed = parse(src);
  out.diags = std::move(parsed.diags);
  if (!parsed.program) return out;
  Diagnostics tc = typecheck(*parsed.program);
  out.diags.insert(out.diags.end(), tc.begin(), tc.end());
  if (!has_errors(out.diags)) out.program = std::move(parsed.program);
  return out;
}

}  // namespace kf
