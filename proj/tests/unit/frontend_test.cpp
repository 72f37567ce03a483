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

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "kf/frontend/parser.hpp"
#include "kf/frontend/printer.hpp"
#include "kf/frontend/typecheck.hpp"

namespace kf {
namespace {

ParseResult parse_text(std::string text) {
  return parse(SourceUnit("t.mcl", std::move(text)));
}

FrontendResult check_text(std::string text) {
  return compile_source(SourceUnit("t.mcl", std::move(text)));
}

std::string first_error(const Diagnostics& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::kError) return d.message;
  }
  return {};
}

TEST(SourceUnit, LocationsCoverEveryOffset) {
  SourceUnit src("x", "ab\ncd\n\ne");
  EXPECT_EQ(src.location_of(0), (SourceLocation{1, 1}));
  EXPECT_EQ(src.location_of(2), (SourceLocation{1, 3}));
  EXPECT_EQ(src.location_of(3), (SourceLocation{2, 1}));
  EXPECT_EQ(src.location_of(7), (SourceLocation{4, 1}));
  EXPECT_EQ(src.location_of(100), (SourceLocation{4, 2}));
}

TEST(Parse, MinimalKernel) {
  auto r = parse_text("kernel void f(global int* a){ a[get_global_id(0)] = 0; }");
  ASSERT_TRUE(r.ok()) << first_error(r.diags);
  ASSERT_EQ(r.program->kernels.size(), 1u);
  const KernelDecl& k = r.program->kernels[0];
  EXPECT_EQ(k.name, "f");
  ASSERT_EQ(k.params.size(), 1u);
  EXPECT_EQ(k.params[0].kind, ParamKind::kGlobalBuffer);
  ASSERT_EQ(k.body.size(), 1u);
  EXPECT_EQ(k.body[0]->kind, StmtKind::kAssign);
  EXPECT_EQ(k.body[0]->target->kind, ExprKind::kIndex);
}

TEST(Parse, EmptyProgram) {
  auto r = parse_text("");
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r.program->kernels.empty());
  EXPECT_EQ(pretty_print(*r.program), "");
}

TEST(Parse, SyntaxErrorNamesToken) {
  auto r = parse_text("kernel void f({");
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diags.size(), 1u);
  EXPECT_EQ(r.diags[0].location.line, 1);
  EXPECT_EQ(r.diags[0].location.column, 15);
  EXPECT_NE(r.diags[0].message.find("'{'"), std::string::npos) << r.diags[0].message;
}

TEST(Parse, LexicalErrorHasLocation) {
  auto r = parse_text("kernel void f() {\n  int x = 1 @ 2;\n}");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diags[0].location, (SourceLocation{2, 13}));
  EXPECT_NE(r.diags[0].message.find("'@'"), std::string::npos);
}

TEST(Parse, InvalidUtf8IsDiagnosed) {
  auto r = parse_text("// \xff\n");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.diags[0].message.find("UTF-8"), std::string::npos);
}

TEST(Parse, AllParamKinds) {
  auto r = parse_text(
      "kernel void k(global const float* a, read_only pipe int p, "
      "write_only pipe uint q, queue_t dq, float s) {}");
  ASSERT_TRUE(r.ok()) << first_error(r.diags);
  const auto& ps = r.program->kernels[0].params;
  ASSERT_EQ(ps.size(), 5u);
  EXPECT_TRUE(ps[0].is_const);
  EXPECT_EQ(ps[1].kind, ParamKind::kPipe);
  EXPECT_EQ(ps[1].dir, PipeDir::kRead);
  EXPECT_EQ(ps[2].dir, PipeDir::kWrite);
  EXPECT_EQ(ps[3].kind, ParamKind::kDeviceQueue);
  EXPECT_EQ(ps[4].kind, ParamKind::kScalar);
}

TEST(Parse, PrecedenceAndAssociativity) {
  auto r = parse_text("kernel void k(global int* a) { a[0] = 1 - 2 - 3 * 4 + 5; }");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(pretty_print(*r.program->kernels[0].body[0]->value), "1 - 2 - 3 * 4 + 5");
  auto r2 = parse_text("kernel void k(global int* a) { a[0] = 1 - (2 - 3); }");
  ASSERT_TRUE(r2.ok());
  EXPECT_EQ(pretty_print(*r2.program->kernels[0].body[0]->value), "1 - (2 - 3)");
}

TEST(Parse, CompoundAssignmentDesugars) {
  auto r = parse_text("kernel void k() { int i = 0; i += 2; i++; }");
  ASSERT_TRUE(r.ok());
  EXPECT_NE(pretty_print(*r.program).find("i = i + 2;"), std::string::npos);
  EXPECT_NE(pretty_print(*r.program).find("i = i + 1;"), std::string::npos);
}

TEST(PrettyPrint, NestedControlFlowRoundTrips) {
  const char* src =
      "kernel void k(global int* a, int n) {\n"
      "  int s = 0;\n"
      "  for (int i = 0; i < n; i++) {\n"
      "    if (a[i] > 0 && !(i == 3)) { s = s + a[i]; } else { while (s > 10) s = s - 1; }\n"
      "  }\n"
      "  a[0] = -(-s) * (int)(float)s;\n"
      "}\n";
  auto r = parse_text(src);
  ASSERT_TRUE(r.ok()) << first_error(r.diags);
  const std::string printed = pretty_print(*r.program);
  EXPECT_NE(printed.find("      while (s > 10) {\n"), std::string::npos) << printed;
  auto r2 = parse_text(printed);
  ASSERT_TRUE(r2.ok()) << printed;
  EXPECT_TRUE(structurally_equal(*r.program, *r2.program));
  EXPECT_EQ(pretty_print(*r2.program), printed);
}

TEST(PrettyPrint, FloatLiteralsRoundTripBitExactly) {
  auto r = parse_text("kernel void k(global float* a) { a[0] = 0.1f + 1e-10 + 3.0 + 16777217.0; }");
  ASSERT_TRUE(r.ok());
  auto r2 = parse_text(pretty_print(*r.program));
  ASSERT_TRUE(r2.ok()) << pretty_print(*r.program);
  EXPECT_TRUE(structurally_equal(*r.program, *r2.program));
}

// Random syntax trees: printing then parsing reproduces the tree.
class AstGen {
 public:
  explicit AstGen(unsigned seed) : rng_(seed) {}

  Program program() {
    Program p;
    const int nk = pick(0, 3);
    for (int k = 0; k < nk; ++k) {
      KernelDecl kd;
      kd.name = "k" + std::to_string(k);
      const int np = pick(0, 4);
      for (int i = 0; i < np; ++i) {
        ParamDecl pd;
        pd.name = "p" + std::to_string(i);
        pd.kind = static_cast<ParamKind>(pick(0, 3));
        pd.elem = pd.kind == ParamKind::kDeviceQueue ? Type::kVoid
                                                     : static_cast<Type>(pick(2, 4));
        pd.is_const = pd.kind == ParamKind::kGlobalBuffer && pick(0, 1);
        pd.dir = pd.kind == ParamKind::kPipe ? static_cast<PipeDir>(pick(0, 1)) : PipeDir::kRead;
        kd.params.push_back(pd);
      }
      kd.body = stmts(3);
      p.kernels.push_back(std::move(kd));
    }
    return p;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::string name() { return std::string(1, static_cast<char>('a' + pick(0, 5))); }

  ExprPtr expr(int depth) {
    auto e = std::make_unique<Expr>();
    const int choice = depth <= 0 ? pick(0, 4) : pick(0, 9);
    switch (choice) {
      case 0:
        e->kind = ExprKind::kIntLit;
        e->unsigned_suffix = pick(0, 1);
        e->int_value = static_cast<std::uint32_t>(pick(0, 1 << 30));
        break;
      case 1:
        e->kind = ExprKind::kFloatLit;
        e->float_value = std::uniform_real_distribution<float>(0.0f, 1e6f)(rng_);
        break;
      case 2:
        e->kind = ExprKind::kBoolLit;
        e->bool_value = pick(0, 1);
        break;
      case 3:
      case 4:
        e->kind = ExprKind::kVar;
        e->text = name();
        break;
      case 5:
        e->kind = ExprKind::kIndex;
        e->text = name();
        e->operands.push_back(expr(depth - 1));
        break;
      case 6:
        e->kind = ExprKind::kUnary;
        e->unary_op = static_cast<UnaryOp>(pick(0, 1));
        e->operands.push_back(expr(depth - 1));
        break;
      case 7:
        e->kind = ExprKind::kCast;
        e->cast_type = static_cast<Type>(pick(2, 4));
        e->operands.push_back(expr(depth - 1));
        break;
      case 8:
        e->kind = ExprKind::kCall;
        e->text = "f" + name();
        for (int i = pick(0, 3); i > 0; --i) e->operands.push_back(expr(depth - 1));
        break;
      default:
        e->kind = ExprKind::kBinary;
        e->binary_op = static_cast<BinaryOp>(pick(0, 12));
        e->operands.push_back(expr(depth - 1));
        e->operands.push_back(expr(depth - 1));
        break;
    }
    return e;
  }

  StmtPtr simple(bool allow_decl) {
    auto s = std::make_unique<Stmt>();
    const int c = pick(allow_decl ? 0 : 1, 2);
    if (c == 0) {
      s->kind = StmtKind::kDecl;
      s->decl_type = static_cast<Type>(pick(1, 4));
      s->name = name();
      if (pick(0, 1)) s->value = expr(2);
    } else if (c == 1) {
      s->kind = StmtKind::kAssign;
      s->target = std::make_unique<Expr>();
      s->target->kind = pick(0, 1) ? ExprKind::kVar : ExprKind::kIndex;
      s->target->text = name();
      if (s->target->kind == ExprKind::kIndex) s->target->operands.push_back(expr(1));
      s->value = expr(3);
    } else {
      s->kind = StmtKind::kExpr;
      s->value = std::make_unique<Expr>();
      s->value->kind = ExprKind::kCall;
      s->value->text = "g" + name();
      s->value->operands.push_back(expr(2));
    }
    return s;
  }

  StmtList stmts(int depth) {
    StmtList out;
    for (int i = pick(0, 4); i > 0; --i) {
      const int c = depth <= 0 ? 0 : pick(0, 5);
      if (c <= 1) {
        out.push_back(simple(true));
        continue;
      }
      auto s = std::make_unique<Stmt>();
      switch (c) {
        case 2:
          s->kind = StmtKind::kIf;
          s->cond = expr(2);
          s->body = stmts(depth - 1);
          s->has_else = pick(0, 1);
          if (s->has_else) s->else_body = stmts(depth - 1);
          break;
        case 3:
          s->kind = StmtKind::kFor;
          if (pick(0, 1)) s->init = simple(true);
          if (pick(0, 1)) s->cond = expr(2);
          if (pick(0, 1)) s->step = simple(false);
          s->body = stmts(depth - 1);
          break;
        case 4:
          s->kind = StmtKind::kWhile;
          s->cond = expr(2);
          s->body = stmts(depth - 1);
          break;
        default:
          s->kind = StmtKind::kBlock;
          s->body = stmts(depth - 1);
          break;
      }
      out.push_back(std::move(s));
    }
    return out;
  }

  std::mt19937 rng_;
};

TEST(PrettyPrint, RandomTreesRoundTrip) {
  for (unsigned seed = 0; seed < 500; ++seed) {
    Program p = AstGen(seed).program();
    const std::string text = pretty_print(p);
    auto r = parse_text(text);
    ASSERT_TRUE(r.ok()) << "seed " << seed << ": " << first_error(r.diags) << "\n" << text;
    ASSERT_TRUE(structurally_equal(p, *r.program)) << "seed " << seed << "\n" << text;
  }
}

TEST(Parse, DeterministicDiagnostics) {
  const std::string bad = "kernel void f(global int* a) { a[0] = ; }";
  auto r1 = parse_text(bad);
  auto r2 = parse_text(bad);
  ASSERT_EQ(r1.diags.size(), r2.diags.size());
  EXPECT_EQ(r1.diags[0].message, r2.diags[0].message);
  EXPECT_EQ(r1.diags[0].location, r2.diags[0].location);
}

TEST(Typecheck, MismatchF32VsI32) {
  auto r = check_text("kernel void k() { float x = 1.0f; int y = x + 2; }");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(first_error(r.diags).find("type mismatch: f32 vs i32"), std::string::npos)
      << first_error(r.diags);
}

TEST(Typecheck, IntLiteralToFloatIsMismatch) {
  auto r = check_text("kernel void k() { float x = 1; }");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(first_error(r.diags).find("type mismatch"), std::string::npos);
}

TEST(Typecheck, ReduceResultType) {
  auto r = check_text(
      "kernel void k(global int* o) { int v = 3; o[0] = work_group_reduce_add(v); }");
  ASSERT_TRUE(r.ok()) << first_error(r.diags);
  const Expr& call = *r.program->kernels[0].body[1]->value;
  EXPECT_EQ(call.builtin, Builtin::kWgReduceAdd);
  EXPECT_EQ(call.type, Type::kI32);
}

TEST(Typecheck, PipeDirectionViolation) {
  auto r = check_text("kernel void k(read_only pipe int p) { write_pipe(p, 1); }");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(first_error(r.diags).find("pipe direction violation"), std::string::npos);
  auto r2 = check_text("kernel void k(write_only pipe int p) { int x = read_pipe(p); }");
  ASSERT_FALSE(r2.ok());
  EXPECT_NE(first_error(r2.diags).find("pipe direction violation"), std::string::npos);
}

TEST(Typecheck, UndeclaredIdentifier) {
  auto r = check_text("kernel void k(global int* a) { a[0] = zz; }");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(first_error(r.diags).find("undeclared identifier 'zz'"), std::string::npos);
  EXPECT_EQ(r.diags[0].location, (SourceLocation{1, 39}));
}

TEST(Typecheck, WrongBuiltinArity) {
  auto r = check_text("kernel void k(global int* a) { a[0] = get_global_id(); }");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(first_error(r.diags).find("wrong number of arguments"), std::string::npos);
}

TEST(Typecheck, DimensionMustBeLiteral) {
  auto r = check_text("kernel void k(global int* a) { int d = 0; a[0] = get_local_id(d); }");
  ASSERT_FALSE(r.ok());
  auto r2 = check_text("kernel void k(global int* a) { a[0] = get_local_id(3); }");
  ASSERT_FALSE(r2.ok());
}

TEST(Typecheck, HandlesAreOpaque) {
  auto r = check_text("kernel void k(read_only pipe int p, global int* a) { a[0] = p; }");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(first_error(r.diags).find("opaque handle"), std::string::npos);
}

TEST(Typecheck, UnsignedLiteralAdaptation) {
  auto r = check_text("kernel void k(global uint* a) { uint x = 3; a[0] = x * 2 + 1u; }");
  EXPECT_TRUE(r.ok()) << first_error(r.diags);
}

TEST(Typecheck, EnqueueChecksChildSignature) {
  const char* good =
      "kernel void child(global int* o, int v) { o[0] = v; }\n"
      "kernel void parent(queue_t q, global int* o) { enqueue_kernel(q, 4, 2, \"child\", o, 7); }\n";
  auto r = check_text(good);
  ASSERT_TRUE(r.ok()) << first_error(r.diags);
  auto r2 = check_text(
      "kernel void child(global int* o, int v) { o[0] = v; }\n"
      "kernel void parent(queue_t q, global int* o) { enqueue_kernel(q, 4, 2, \"child\", o); }\n");
  EXPECT_FALSE(r2.ok());
  auto r3 = check_text(
      "kernel void parent(queue_t q) { enqueue_kernel(q, 4, 2, \"nope\"); }\n");
  EXPECT_FALSE(r3.ok());
}

TEST(Typecheck, DivergentBarrierWarns) {
  auto r = check_text(
      "kernel void k(global int* a) { if (get_local_id(0) == 0) { barrier(); } a[0] = 1; }");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.diags.size(), 1u);
  EXPECT_EQ(r.diags[0].severity, Severity::kWarning);

  auto r2 = check_text(
      "kernel void k(global int* a, int n) { for (int i = 0; i < n; i++) { barrier(); } }");
  ASSERT_TRUE(r2.ok());
  EXPECT_TRUE(r2.diags.empty());
}

TEST(Typecheck, DuplicateKernelNames) {
  auto r = check_text("kernel void a() {} kernel void a() {}");
  ASSERT_FALSE(r.ok());
  EXPECT_NE(first_error(r.diags).find("duplicate kernel"), std::string::npos);
}

TEST(Typecheck, ConstBufferStore) {
  auto r = check_text("kernel void k(global const int* a) { a[0] = 1; }");
  EXPECT_FALSE(r.ok());
}

}  // namespace
}  // namespace kf
