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

#include "kf/ir/dump.hpp"

#include <fmt/format.h>

#include "kf/frontend/printer.hpp"

namespace kf::ir {
namespace {

std::string val(ValueId v) { return fmt::format("%{}", v); }

std::string operand_text(const Function& f, const Operand& o) {
  if (o.is_value()) return val(o.id);
  return f.params[o.id].name;
}

std::string join_operands(const Function& f, const Instr& in, std::size_t from = 0) {
  std::string s;
  for (std::size_t i = from; i < in.operands.size(); ++i) {
    if (i > from) s += ", ";
    s += operand_text(f, in.operands[i]);
  }
  return s;
}

std::string param_name(const Function& f, int p) {
  return f.params[static_cast<std::size_t>(p)].name;
}

std::string instr_text(const Function& f, const Instr& in) {
  const std::string lhs = in.result == kNoValue ? "" : val(in.result) + " = ";
  const auto tn = type_name(in.type);
  switch (in.op) {
    case Opcode::kConst:
      return fmt::format("{}const {} {}", lhs, tn, constant_text(in.type, in.imm));
    case Opcode::kArg:
      return fmt::format("{}arg {} {}", lhs, tn, param_name(f, in.param));
    case Opcode::kBinop:
      return fmt::format("{}{} {} {}", lhs, binop_name(in.bin), type_name(in.operand_type),
                         join_operands(f, in));
    case Opcode::kCast:
      return fmt::format("{}{} {} {}", lhs, castop_name(in.cast), tn, join_operands(f, in));
    case Opcode::kSelect:
      return fmt::format("{}select {} {}", lhs, tn, join_operands(f, in));
    case Opcode::kLoadStream:
      return fmt::format("{}load {} {}[{}]", lhs, tn, param_name(f, in.param),
                         join_operands(f, in));
    case Opcode::kStoreStream:
      return fmt::format("store {} {}[{}], {}", tn, param_name(f, in.param),
                         operand_text(f, in.operands[0]), operand_text(f, in.operands[1]));
    case Opcode::kBuiltinCall:
      return fmt::format("{}{} {}", lhs, builtin_info(in.query).name, in.imm);
    case Opcode::kPipeRead:
      return fmt::format("{}read_pipe {} {}", lhs, tn, param_name(f, in.param));
    case Opcode::kPipeWrite:
      return fmt::format("write_pipe {} {}, {}", tn, param_name(f, in.param),
                         join_operands(f, in));
    case Opcode::kEnqueue: {
      std::string s = fmt::format("enqueue {}, {}, {}, \"{}\"", param_name(f, in.param),
                                  operand_text(f, in.operands[0]),
                                  operand_text(f, in.operands[1]), in.callee);
      if (in.operands.size() > 2) s += ", " + join_operands(f, in, 2);
      return s;
    }
    case Opcode::kBarrier:
      return "barrier";
    case Opcode::kWgFunc:
      return fmt::format("{}{} {} {}", lhs, wgop_name(in.wg), tn, join_operands(f, in));
    case Opcode::kVarLoad:
      return fmt::format("{}load_var {} ${}", lhs, tn, in.param);
    case Opcode::kVarStore:
      return fmt::format("store_var {} ${}, {}", tn, in.param, join_operands(f, in));
  }
  return "?";
}

}  // namespace

std::string constant_text(Type t, std::uint32_t bits) {
  switch (t) {
    case Type::kBool: return bits ? "true" : "false";
    case Type::kI32: return fmt::format("{}", static_cast<std::int32_t>(bits));
    case Type::kF32: return fmt::format("0x{:08x}", bits);
    default: return fmt::format("{}", bits);
  }
}

std::string dump(const Function& f) {
  std::string out = "func " + f.name + "(";
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    if (i) out += ", ";
    out += param_text(f.params[i]);
  }
  out += ")\n";
  const auto preds = f.predecessors();
  for (const auto& b : f.blocks) {
    out += fmt::format("b{}:", b.id);
    if (!preds[b.id].empty()) {
      out += " ; preds:";
      for (std::size_t i = 0; i < preds[b.id].size(); ++i)
        out += fmt::format("{} b{}", i ? "," : "", preds[b.id][i]);
    }
    out += "\n";
    for (const auto& phi : b.phis) {
      out += fmt::format("  {} = phi {}", val(phi.result), type_name(phi.type));
      for (std::size_t i = 0; i < phi.incoming.size(); ++i)
        out += fmt::format("{} [b{}: {}]", i ? "," : "", phi.incoming[i].first,
                           val(phi.incoming[i].second));
      out += "\n";
    }
    for (const auto& in : b.instrs) out += "  " + instr_text(f, in) + "\n";
    switch (b.term.kind) {
      case TermKind::kBr: out += fmt::format("  br b{}\n", b.term.target); break;
      case TermKind::kCondBr:
        out += fmt::format("  condbr {}, b{}, b{}\n", val(b.term.cond), b.term.target,
                           b.term.false_target);
        break;
      case TermKind::kRet: out += "  ret\n"; break;
      case TermKind::kNone: out += "  <no terminator>\n"; break;
    }
  }
  return out;
}

}  // namespace kf::ir
