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

#include "kf/frontend/parser.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "kf/frontend/lexer.hpp"

namespace kf {
namespace {

const std::set<std::string_view> kKeywords = {
    "kernel",     "__kernel",  "void",       "int",          "uint",
    "float",      "bool",      "global",     "__global",     "const",
    "read_only",  "__read_only", "write_only", "__write_only", "pipe",
    "queue_t",    "if",        "else",       "for",          "while",
    "true",       "false",
};

struct ParseError {
  Diagnostic diag;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program parse_program() {
    Program prog;
    while (!at_eof()) prog.kernels.push_back(parse_kernel());
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_eof() const { return peek().kind == TokenKind::kEof; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kPunct && t.text == p;
  }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kIdent && t.text == w;
  }

  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  [[noreturn]] void error_at(const Token& t, std::string msg) const {
    throw ParseError{{Severity::kError, std::move(msg), t.loc}};
  }

  [[noreturn]] void unexpected(std::string_view wanted) const {
    const Token& t = peek();
    if (t.kind == TokenKind::kEof) {
      error_at(t, fmt::format("unexpected end of input, expected {}", wanted));
    }
    error_at(t, fmt::format("unexpected token '{}', expected {}", t.text, wanted));
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) unexpected(fmt::format("'{}'", p));
    take();
  }

  void expect_word(std::string_view w) {
    if (!is_word(w)) unexpected(fmt::format("'{}'", w));
    take();
  }

  std::string expect_ident() {
    const Token& t = peek();
    if (t.kind != TokenKind::kIdent || kKeywords.count(t.text)) {
      unexpected("identifier");
    }
    return take().text;
  }

  std::optional<Type> peek_type(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    if (t.kind != TokenKind::kIdent) return std::nullopt;
    if (t.text == "int") return Type::kI32;
    if (t.text == "uint") return Type::kU32;
    if (t.text == "float") return Type::kF32;
    if (t.text == "bool") return Type::kBool;
    return std::nullopt;
  }

  Type expect_type() {
    auto t = peek_type();
    if (!t) unexpected("type name");
    take();
    return *t;
  }

  KernelDecl parse_kernel() {
    KernelDecl k;
    k.loc = peek().loc;
    if (is_word("kernel") || is_word("__kernel")) {
      take();
    } else {
      unexpected("'kernel'");
    }
    expect_word("void");
    k.name = expect_ident();
    expect_punct("(");
    if (!is_punct(")")) {
      k.params.push_back(parse_param());
      while (is_punct(",")) {
        take();
        k.params.push_back(parse_param());
      }
    }
    expect_punct(")");
    k.body = parse_braced_block();
    return k;
  }

  ParamDecl parse_param() {
    ParamDecl p;
    p.loc = peek().loc;
    bool saw_const = false;
    if (is_word("const")) {
      take();
      saw_const = true;
    }
    if (is_word("global") || is_word("__global")) {
      take();
      if (is_word("const")) {
        take();
        saw_const = true;
      }
      p.kind = ParamKind::kGlobalBuffer;
      p.is_const = saw_const;
      p.elem = expect_type();
      if (p.elem == Type::kBool) {
        error_at(toks_[pos_ - 1], "buffers of bool are not supported");
      }
      expect_punct("*");
      p.name = expect_ident();
      return p;
    }
    if (saw_const) unexpected("'global'");
    if (is_word("read_only") || is_word("__read_only") || is_word("write_only") ||
        is_word("__write_only")) {
      const std::string q = take().text;
      p.kind = ParamKind::kPipe;
      p.dir = (q == "read_only" || q == "__read_only") ? PipeDir::kRead
                                                       : PipeDir::kWrite;
      expect_word("pipe");
      p.elem = expect_type();
      if (p.elem == Type::kBool) {
        error_at(toks_[pos_ - 1], "pipes of bool are not supported");
      }
      p.name = expect_ident();
      return p;
    }
    if (is_word("pipe")) {
      error_at(peek(), "pipe parameter needs a read_only or write_only qualifier");
    }
    if (is_word("queue_t")) {
      take();
      p.kind = ParamKind::kDeviceQueue;
      p.elem = Type::kVoid;
      p.name = expect_ident();
      return p;
    }
    p.kind = ParamKind::kScalar;
    p.elem = expect_type();
    if (p.elem == Type::kBool) {
      error_at(toks_[pos_ - 1], "bool kernel arguments are not supported");
    }
    if (is_punct("*")) {
      error_at(peek(), "pointer parameters must be declared 'global'");
    }
    p.name = expect_ident();
    return p;
  }

  StmtList parse_braced_block() {
    expect_punct("{");
    StmtList out;
    while (!is_punct("}")) {
      if (at_eof()) unexpected("'}'");
      if (auto s = parse_stmt()) out.push_back(std::move(s));
    }
    take();
    return out;
  }

  // A branch or loop body: a braced block's statements, or one statement.
  StmtList parse_body() {
    if (is_punct("{")) return parse_braced_block();
    StmtList out;
    if (auto s = parse_stmt()) out.push_back(std::move(s));
    return out;
  }

  StmtPtr parse_stmt() {
    const Token& t = peek();
    if (is_punct(";")) {
      take();
      return nullptr;
    }
    if (is_punct("{")) {
      auto s = std::make_unique<Stmt>();
      s->kind = StmtKind::kBlock;
      s->loc = t.loc;
      s->body = parse_braced_block();
      return s;
    }
    if (is_word("if")) return parse_if();
    if (is_word("for")) return parse_for();
    if (is_word("while")) {
      auto s = std::make_unique<Stmt>();
      s->kind = StmtKind::kWhile;
      s->loc = take().loc;
      expect_punct("(");
      s->cond = parse_expr();
      expect_punct(")");
      s->body = parse_body();
      return s;
    }
    StmtPtr s = parse_simple(/*allow_decl=*/true);
    expect_punct(";");
    return s;
  }

  StmtPtr parse_if() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::kIf;
    s->loc = take().loc;
    expect_punct("(");
    s->cond = parse_expr();
    expect_punct(")");
    s->body = parse_body();
    if (is_word("else")) {
      take();
      s->has_else = true;
      s->else_body = parse_body();
    }
    return s;
  }

  StmtPtr parse_for() {
    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::kFor;
    s->loc = take().loc;
    expect_punct("(");
    if (!is_punct(";")) s->init = parse_simple(/*allow_decl=*/true);
    expect_punct(";");
    if (!is_punct(";")) s->cond = parse_expr();
    expect_punct(";");
    if (!is_punct(")")) s->step = parse_simple(/*allow_decl=*/false);
    expect_punct(")");
    s->body = parse_body();
    return s;
  }

  // Declaration, assignment, increment, or expression statement (no ';').
  StmtPtr parse_simple(bool allow_decl) {
    const Token start = peek();
    if (auto ty = peek_type()) {
      if (!allow_decl) unexpected("assignment");
      auto s = std::make_unique<Stmt>();
      s->kind = StmtKind::kDecl;
      s->loc = start.loc;
      take();
      s->decl_type = *ty;
      s->name = expect_ident();
      if (is_punct("=")) {
        take();
        s->value = parse_expr();
      }
      return s;
    }

    ExprPtr lhs = parse_unary();
    const Token op = peek();
    auto make_assign = [&](ExprPtr target, ExprPtr value) {
      if (target->kind != ExprKind::kVar && target->kind != ExprKind::kIndex) {
        error_at(op, "left-hand side of assignment is not assignable");
      }
      auto s = std::make_unique<Stmt>();
      s->kind = StmtKind::kAssign;
      s->loc = start.loc;
      s->target = std::move(target);
      s->value = std::move(value);
      return s;
    };

    if (op.kind == TokenKind::kPunct && op.text == "=") {
      take();
      return make_assign(std::move(lhs), parse_expr());
    }
    if (op.kind == TokenKind::kPunct &&
        (op.text == "+=" || op.text == "-=" || op.text == "*=" ||
         op.text == "/=" || op.text == "%=" || op.text == "++" ||
         op.text == "--")) {
      take();
      BinaryOp bop = BinaryOp::kAdd;
      switch (op.text[0]) {
        case '+': bop = BinaryOp::kAdd; break;
        case '-': bop = BinaryOp::kSub; break;
        case '*': bop = BinaryOp::kMul; break;
        case '/': bop = BinaryOp::kDiv; break;
        case '%': bop = BinaryOp::kRem; break;
      }
      ExprPtr rhs;
      if (op.text == "++" || op.text == "--") {
        rhs = std::make_unique<Expr>();
        rhs->kind = ExprKind::kIntLit;
        rhs->loc = op.loc;
        rhs->int_value = 1;
      } else {
        rhs = parse_expr();
      }
      if (lhs->kind == ExprKind::kIndex && has_call(*lhs)) {
        error_at(op, "compound assignment to a buffer element whose index "
                     "contains a call");
      }
      if (lhs->kind != ExprKind::kVar && lhs->kind != ExprKind::kIndex) {
        error_at(op, "left-hand side of assignment is not assignable");
      }
      // `x op= e` is stored as `x = x op e`.
      auto sum = std::make_unique<Expr>();
      sum->kind = ExprKind::kBinary;
      sum->loc = op.loc;
      sum->binary_op = bop;
      sum->operands.push_back(clone(*lhs));
      sum->operands.push_back(std::move(rhs));
      return make_assign(std::move(lhs), std::move(sum));
    }

    auto s = std::make_unique<Stmt>();
    s->kind = StmtKind::kExpr;
    s->loc = start.loc;
    s->value = parse_binary_rest(std::move(lhs), 0);
    if (s->value->kind != ExprKind::kCall) {
      error_at(start, "expression statement must be a function call");
    }
    return s;
  }

  static bool has_call(const Expr& e) {
    if (e.kind == ExprKind::kCall && !e.text.starts_with("get_")) return true;
    for (const auto& o : e.operands) {
      if (has_call(*o)) return true;
    }
    return false;
  }

  static ExprPtr clone(const Expr& e) {
    auto c = std::make_unique<Expr>();
    c->kind = e.kind;
    c->loc = e.loc;
    c->int_value = e.int_value;
    c->unsigned_suffix = e.unsigned_suffix;
    c->float_value = e.float_value;
    c->bool_value = e.bool_value;
    c->text = e.text;
    c->unary_op = e.unary_op;
    c->binary_op = e.binary_op;
    c->cast_type = e.cast_type;
    for (const auto& o : e.operands) c->operands.push_back(clone(*o));
    return c;
  }

  static int precedence(const Token& t, BinaryOp& op) {
    if (t.kind != TokenKind::kPunct) return -1;
    static const std::pair<std::string_view, std::pair<BinaryOp, int>> table[] = {
        {"||", {BinaryOp::kLogicalOr, 1}}, {"&&", {BinaryOp::kLogicalAnd, 2}},
        {"==", {BinaryOp::kEq, 3}},        {"!=", {BinaryOp::kNe, 3}},
        {"<", {BinaryOp::kLt, 4}},         {"<=", {BinaryOp::kLe, 4}},
        {">", {BinaryOp::kGt, 4}},         {">=", {BinaryOp::kGe, 4}},
        {"+", {BinaryOp::kAdd, 5}},        {"-", {BinaryOp::kSub, 5}},
        {"*", {BinaryOp::kMul, 6}},        {"/", {BinaryOp::kDiv, 6}},
        {"%", {BinaryOp::kRem, 6}},
    };
    for (const auto& [sp, info] : table) {
      if (t.text == sp) {
        op = info.first;
        return info.second;
      }
    }
    return -1;
  }

  ExprPtr parse_expr() { return parse_binary_rest(parse_unary(), 0); }

  // Precedence climbing; all binary operators are left-associative.
  ExprPtr parse_binary_rest(ExprPtr lhs, int min_prec) {
    while (true) {
      BinaryOp op{};
      const Token t = peek();
      const int prec = precedence(t, op);
      if (prec < 0 || prec < min_prec) return lhs;
      take();
      ExprPtr rhs = parse_unary();
      while (true) {
        BinaryOp next{};
        const int next_prec = precedence(peek(), next);
        if (next_prec <= prec) break;
        rhs = parse_binary_rest(std::move(rhs), prec + 1);
      }
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::kBinary;
      e->loc = t.loc;
      e->binary_op = op;
      e->operands.push_back(std::move(lhs));
      e->operands.push_back(std::move(rhs));
      lhs = std::move(e);
    }
  }

  ExprPtr parse_unary() {
    const Token t = peek();
    if (is_punct("-") || is_punct("!")) {
      take();
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::kUnary;
      e->loc = t.loc;
      e->unary_op = t.text == "-" ? UnaryOp::kNeg : UnaryOp::kNot;
      e->operands.push_back(parse_unary());
      return e;
    }
    if (is_punct("(") && peek_type(1) && is_punct(")", 2)) {
      take();
      const Type ty = *peek_type();
      take();
      take();
      if (ty == Type::kBool) error_at(t, "cast to bool is not supported");
      auto e = std::make_unique<Expr>();
      e->kind = ExprKind::kCast;
      e->loc = t.loc;
      e->cast_type = ty;
      e->operands.push_back(parse_unary());
      return e;
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token t = peek();
    auto e = std::make_unique<Expr>();
    e->loc = t.loc;
    switch (t.kind) {
      case TokenKind::kInt: {
        take();
        e->kind = ExprKind::kIntLit;
        std::string_view txt = t.text;
        if (txt.ends_with('u') || txt.ends_with('U')) {
          e->unsigned_suffix = true;
          txt.remove_suffix(1);
        }
        int base = 10;
        if (txt.starts_with("0x") || txt.starts_with("0X")) {
          base = 16;
          txt.remove_prefix(2);
        }
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(txt.data(), txt.data() + txt.size(), v, base);
        const std::uint64_t limit = e->unsigned_suffix ? 0xFFFFFFFFull : 0x7FFFFFFFull;
        if (ec != std::errc() || ptr != txt.data() + txt.size() || v > limit) {
          error_at(t, fmt::format("integer literal '{}' out of range", t.text));
        }
        e->int_value = static_cast<std::uint32_t>(v);
        return e;
      }
      case TokenKind::kFloat: {
        take();
        e->kind = ExprKind::kFloatLit;
        std::string_view txt = t.text;
        if (txt.ends_with('f') || txt.ends_with('F')) txt.remove_suffix(1);
        float v = 0;
        auto [ptr, ec] = std::from_chars(txt.data(), txt.data() + txt.size(), v);
        if (ec != std::errc() || ptr != txt.data() + txt.size() || !std::isfinite(v)) {
          error_at(t, fmt::format("invalid float literal '{}'", t.text));
        }
        e->float_value = v;
        return e;
      }
      case TokenKind::kString:
        take();
        e->kind = ExprKind::kStringLit;
        e->text = t.text;
        return e;
      case TokenKind::kIdent: {
        if (t.text == "true" || t.text == "false") {
          take();
          e->kind = ExprKind::kBoolLit;
          e->bool_value = t.text == "true";
          return e;
        }
        e->text = expect_ident();
        if (is_punct("(")) {
          take();
          e->kind = ExprKind::kCall;
          if (!is_punct(")")) {
            e->operands.push_back(parse_expr());
            while (is_punct(",")) {
              take();
              e->operands.push_back(parse_expr());
            }
          }
          expect_punct(")");
          return e;
        }
        if (is_punct("[")) {
          take();
          e->kind = ExprKind::kIndex;
          e->operands.push_back(parse_expr());
          expect_punct("]");
          return e;
        }
        e->kind = ExprKind::kVar;
        return e;
      }
      case TokenKind::kPunct:
        if (t.text == "(") {
          take();
          ExprPtr inner = parse_expr();
          expect_punct(")");
          return inner;
        }
        break;
      case TokenKind::kEof:
        break;
    }
    unexpected("expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse(const SourceUnit& src) {
  ParseResult result;
  std::vector<Token> toks = tokenize(src, result.diags);
  if (has_errors(result.diags)) return result;
  try {
    Parser p(std::move(toks));
    result.program = p.parse_program();
  } catch (const ParseError& e) {
    result.diags.push_back(e.diag);
  }
  return result;
}

}  // namespace kf
