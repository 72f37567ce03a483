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

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "kf/netlist/netlist.hpp"

namespace kf::netlist {

namespace {

using dfg::ArithOp;
using dfg::NodeKind;

std::string range(int width) { return fmt::format("[{}:0]", width - 1); }

int type_width(Type t) { return t == Type::kBool ? 1 : 32; }

std::string literal(int width, std::uint32_t bits) {
  if (width == 1) return fmt::format("1'b{}", bits & 1u);
  return fmt::format("32'h{:08x}", bits);
}

// Combinational expression of an arithmetic primitive over inputs i0..iN.
std::string arith_expr(ArithOp op, Type t) {
  const bool s = t == Type::kI32;
  auto cmp = [&](const char* o) {
    return s ? fmt::format("$signed(i0) {} $signed(i1)", o) : fmt::format("i0 {} i1", o);
  };
  switch (op) {
    case ArithOp::kAdd: return "i0 + i1";
    case ArithOp::kSub: return "i0 - i1";
    case ArithOp::kMul: return "i0 * i1";
    case ArithOp::kDiv:
      return s ? "(i1 == 32'd0) ? 32'd0 : $signed(i0) / $signed(i1)"
               : "(i1 == 32'd0) ? 32'd0 : i0 / i1";
    case ArithOp::kRem:
      return s ? "(i1 == 32'd0) ? 32'd0 : $signed(i0) % $signed(i1)"
               : "(i1 == 32'd0) ? 32'd0 : i0 % i1";
    case ArithOp::kLt: return cmp("<");
    case ArithOp::kLe: return cmp("<=");
    case ArithOp::kGt: return cmp(">");
    case ArithOp::kGe: return cmp(">=");
    case ArithOp::kEq: return "i0 == i1";
    case ArithOp::kNe: return "i0 != i1";
    case ArithOp::kAnd: return "i0 & i1";
    case ArithOp::kOr: return "i0 | i1";
    case ArithOp::kXor: return "i0 ^ i1";
    case ArithOp::kNeg: return t == Type::kF32 ? "{~i0[31], i0[30:0]}" : "32'd0 - i0";
    case ArithOp::kBitcast: return "i0";
    case ArithOp::kBoolToInt: return "{31'd0, i0}";
    case ArithOp::kSelect: return "i0 ? i1 : i2";
    default: return "i0";
  }
}

// Shift-register body delaying `expr` by `latency` cycles into y.
std::string delay_body(const std::string& expr, int width, int latency) {
  if (latency == 0) return fmt::format("  assign y = {};\n", expr);
  std::string out;
  for (int k = 0; k < latency; ++k) out += fmt::format("  reg {} p{};\n", range(width), k);
  out += "  always @(posedge clk) begin\n    if (rst) begin\n";
  for (int k = 0; k < latency; ++k) out += fmt::format("      p{} <= {}'d0;\n", k, width);
  out += "    end else if (en) begin\n";
  out += fmt::format("      p0 <= {};\n", expr);
  for (int k = 1; k < latency; ++k) out += fmt::format("      p{} <= p{};\n", k, k - 1);
  out += "    end\n  end\n";
  out += fmt::format("  assign y = p{};\n", latency - 1);
  return out;
}

std::string arith_primitive(const Unit& u) {
  const auto& n = u.node;
  std::string out = fmt::format("module {} (\n", u.primitive);
  out += "  input wire [0:0] clk,\n  input wire [0:0] rst,\n  input wire [0:0] en,\n";
  if (n.kind == NodeKind::kPhi) {
    const int k = static_cast<int>(n.phi_incoming.size());
    out += fmt::format("  input wire {} sel,\n", range(k));
    for (int i = 0; i < k; ++i) out += fmt::format("  input wire {} i{},\n", range(n.out_width), i);
    out += fmt::format("  output wire {} y\n);\n", range(n.out_width));
    std::string expr;
    for (int i = 0; i + 1 < k; ++i) expr += fmt::format("sel[{}] ? i{} : ", i, i);
    expr += fmt::format("i{}", k - 1);
    out += delay_body(expr, n.out_width, u.latency);
    return out + "endmodule\n";
  }
  for (std::size_t i = 0; i < n.in_widths.size(); ++i) {
    out += fmt::format("  input wire {} i{},\n", range(n.in_widths[i]), i);
  }
  out += fmt::format("  output wire {} y\n);\n", range(n.out_width));
  if (u.primitive.starts_with("kf_bb_")) {
    return out + "  // black box: bind a floating-point core with this interface\nendmodule\n";
  }
  out += delay_body(arith_expr(n.arith, n.op_type), n.out_width, u.latency);
  return out + "endmodule\n";
}

std::string sync_primitive(const Unit& u) {
  const auto& n = u.node;
  const bool data = n.sync != dfg::SyncKind::kBarrier;
  std::string out = fmt::format("module {} #(parameter PW = 1) (\n", u.primitive);
  out += "  input wire [0:0] clk,\n  input wire [0:0] rst,\n  input wire [0:0] en,\n";
  if (data) out += "  input wire [31:0] x,\n";
  if (n.sync == dfg::SyncKind::kBroadcast) out += "  input wire [31:0] src,\n";
  out +=
      "  input wire [0:0] arrive,\n"
      "  input wire [31:0] tag,\n"
      "  input wire [31:0] count,\n"
      "  input wire [PW-1:0] pl_in,\n"
      "  input wire [0:0] take,\n"
      "  output wire [0:0] ready,\n"
      "  output wire [0:0] rel,\n"
      "  output wire [31:0] tag_out,\n"
      "  output wire [PW-1:0] pl_out,\n";
  if (data) out += "  output wire [31:0] y,\n";
  const std::string sw = data ? "[PW+31:0]" : "[PW-1:0]";
  out += fmt::format(
      "  output wire [0:0] sram_we,\n"
      "  output wire [31:0] sram_addr,\n"
      "  output wire {0} sram_wdata,\n"
      "  input wire {0} sram_rdata\n);\n",
      sw);
  if (u.primitive.starts_with("kf_bb_")) {
    return out + "  // black box: bind a floating-point core with this interface\nendmodule\n";
  }
  if (data) out += "  reg [31:0] xq;\n  reg [31:0] acc;\n";
  if (n.sync == dfg::SyncKind::kBroadcast) out += "  reg [31:0] sq;\n";
  out +=
      "  reg [0:0] phase;\n"
      "  reg [31:0] arrived;\n"
      "  reg [31:0] cursor;\n"
      "  assign ready = ~phase;\n"
      "  assign rel = phase;\n"
      "  assign sram_we = arrive & ~phase;\n"
      "  assign sram_addr = phase ? cursor : tag;\n";
  out += data ? "  assign sram_wdata = {xq, pl_in};\n  assign y = acc;\n"
              : "  assign sram_wdata = pl_in;\n";
  out += "  assign tag_out = cursor;\n  assign pl_out = sram_rdata[PW-1:0];\n";
  std::string fold;
  const bool s = n.op_type == Type::kI32;
  switch (n.reduce) {
    case ir::WgOp::kBroadcast: fold = "(tag == sq) ? xq : acc"; break;
    case ir::WgOp::kReduceAdd: fold = "(arrived == 32'd0) ? xq : acc + xq"; break;
    case ir::WgOp::kReduceMin:
      fold = s ? "(arrived == 32'd0) | ($signed(xq) < $signed(acc)) ? xq : acc"
               : "(arrived == 32'd0) | (xq < acc) ? xq : acc";
      break;
    case ir::WgOp::kReduceMax:
      fold = s ? "(arrived == 32'd0) | ($signed(xq) > $signed(acc)) ? xq : acc"
               : "(arrived == 32'd0) | (xq > acc) ? xq : acc";
      break;
  }
  out += "  always @(posedge clk) begin\n    if (rst) begin\n";
  if (data) out += "      xq <= 32'd0;\n      acc <= 32'd0;\n";
  if (n.sync == dfg::SyncKind::kBroadcast) out += "      sq <= 32'd0;\n";
  out +=
      "      phase <= 1'b0;\n"
      "      arrived <= 32'd0;\n"
      "      cursor <= 32'd0;\n"
      "    end else begin\n";
  if (data) {
    out += "      if (en) begin\n        xq <= x;\n";
    if (n.sync == dfg::SyncKind::kBroadcast) out += "        sq <= src;\n";
    out += "      end\n";
  }
  out +=
      "      if (~phase) begin\n"
      "        if (arrive) begin\n"
      "          arrived <= arrived + 32'd1;\n";
  if (data) out += fmt::format("          acc <= {};\n", fold);
  out +=
      "          if (arrived + 32'd1 == count) phase <= 1'b1;\n"
      "        end\n"
      "      end else if (take) begin\n"
      "        cursor <= cursor + 32'd1;\n"
      "        if (cursor + 32'd1 == count) begin\n"
      "          phase <= 1'b0;\n"
      "          arrived <= 32'd0;\n"
      "          cursor <= 32'd0;\n"
      "        end\n"
      "      end\n"
      "    end\n"
      "  end\n"
      "endmodule\n";
  return out;
}

constexpr const char* kHs4 = R"(module kf_hs4 (
  input wire [0:0] clk,
  input wire [0:0] rst,
  input wire [0:0] send,
  input wire [0:0] take,
  output wire [0:0] ready,
  output wire [0:0] valid
);
  // req rise, ack rise, req fall, ack fall
  reg [1:0] state;
  assign ready = state == 2'd0;
  assign valid = state == 2'd2;
  always @(posedge clk) begin
    if (rst) begin
      state <= 2'd0;
    end else begin
      case (state)
        2'd0: if (send) state <= 2'd1;
        2'd1: state <= 2'd2;
        2'd2: if (take) state <= 2'd3;
        default: state <= 2'd0;
      endcase
    end
  end
endmodule
)";

constexpr const char* kFifo = R"(module kf_fifo #(parameter W = 32, parameter DEPTH = 16) (
  input wire [0:0] clk,
  input wire [0:0] rst,
  input wire [0:0] wr,
  input wire [W-1:0] wdata,
  output wire [0:0] full,
  input wire [0:0] rd,
  output wire [W-1:0] rdata,
  output wire [0:0] valid
);
  reg [W-1:0] mem [0:DEPTH-1];
  reg [31:0] head;
  reg [31:0] tail;
  reg [31:0] count;
  wire [0:0] push;
  wire [0:0] pop;
  assign full = count == DEPTH;
  assign valid = count != 32'd0;
  assign rdata = mem[head];
  assign push = wr & ~full;
  assign pop = rd & valid;
  always @(posedge clk) begin
    if (rst) begin
      head <= 32'd0;
      tail <= 32'd0;
      count <= 32'd0;
    end else begin
      if (push) begin
        mem[tail] <= wdata;
        tail <= (tail + 32'd1 == DEPTH) ? 32'd0 : tail + 32'd1;
      end
      if (pop) head <= (head + 32'd1 == DEPTH) ? 32'd0 : head + 32'd1;
      count <= count + {31'd0, push} - {31'd0, pop};
    end
  end
endmodule
)";

constexpr const char* kSram = R"(module kf_sram #(parameter W = 32, parameter WORDS = 256) (
  input wire [0:0] clk,
  input wire [0:0] we,
  input wire [31:0] addr,
  input wire [W-1:0] wdata,
  output wire [W-1:0] rdata
);
  reg [W-1:0] mem [0:WORDS-1];
  assign rdata = mem[addr];
  always @(posedge clk) begin
    if (we) mem[addr] <= wdata;
  end
endmodule
)";

struct Source {
  std::string valid;
  std::string take;
  std::string tag;
  int link = -1;  // -1: the work-item dispatcher
};

class Emitter {
 public:
  explicit Emitter(const Module& m) : m_(m), d_(m.design()), ds_(m.schedule) {}

  HdlText run();

 private:
  const dfg::BlockGraph& graph(ir::BlockId b) const { return d_.blocks[b]; }
  const sched::BlockSchedule& sched(ir::BlockId b) const { return ds_.blocks[b]; }

  std::string node_wire(ir::BlockId b, dfg::NodeId n) const {
    return fmt::format("b{}_n{}", b, n);
  }
  std::string tag_at(ir::BlockId b, int t) const {
    return t == 0 ? fmt::format("b{}_tag_in", b) : fmt::format("t_b{}_s{}", b, t - 1);
  }
  // Signal carrying `x` during cycle `t` of block b.
  std::string src_at(ir::BlockId b, const dfg::Input& x, int t) const {
    if (x.from_node()) {
      const auto& s = sched(b);
      if (t <= s.start[x.node] + s.latency[x.node]) return node_wire(b, x.node);
      return fmt::format("r_b{}_n{}_s{}", b, x.node, t - 1);
    }
    if (t == 0) return fmt::format("b{}_in_v{}", b, x.value);
    return fmt::format("r_b{}_v{}_s{}", b, x.value, t - 1);
  }
  dfg::Input value_input(ir::BlockId b, ir::ValueId v) const {
    for (const auto& n : graph(b).nodes) {
      if (n.result == v) return {n.id, ir::kNoValue};
    }
    return {dfg::kNoNode, v};
  }
  int value_width(ir::ValueId v) const { return type_width(d_.value_types[v]); }

  void decl(const char* kind, int width, const std::string& name) {
    decls_.push_back(fmt::format("  {} {} {};", kind, range(width), name));
  }
  void assign(const std::string& lhs, const std::string& rhs) {
    body_.push_back(fmt::format("  assign {} = {};", lhs, rhs));
  }
  static std::string any(const std::vector<std::string>& terms, const char* op,
                         const char* empty) {
    if (terms.empty()) return empty;
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) s += (i ? fmt::format(" {} ", op) : "") + terms[i];
    return s;
  }
  void need(const Unit& u, std::string text) { prims_.emplace(u.primitive, std::move(text)); }

  std::string id_expr(const dfg::HwNode& n, const std::string& tag) const;
  void emit_links();
  void emit_block(ir::BlockId b);
  void emit_group_control();
  void emit_channels();

  const Module& m_;
  const dfg::KernelDesign& d_;
  const sched::DesignSchedule& ds_;
  std::vector<std::string> decls_;
  std::vector<std::string> body_;
  std::vector<std::string> seq_;
  std::map<std::string, std::string> prims_;
  std::vector<std::string> retire_terms_;
  // Per pipe/queue parameter: (enable, data) of each writer, and read requests.
  std::map<int, std::vector<std::pair<std::string, std::string>>> channel_writes_;
  std::map<int, std::vector<std::string>> pipe_reads_;
  // Statements capturing link payloads, per link.
  std::map<int, std::vector<std::pair<std::string, std::string>>> link_loads_;
};

std::string Emitter::id_expr(const dfg::HwNode& n, const std::string& tag) const {
  auto lid = [&](int dim) {
    switch (dim) {
      case 0: return fmt::format("({} % lsz0)", tag);
      case 1: return fmt::format("(({} / lsz0) % lsz1)", tag);
      default: return fmt::format("({} / (lsz0 * lsz1))", tag);
    }
  };
  switch (n.id_query) {
    case Builtin::kLocalId: return lid(n.dim);
    case Builtin::kGlobalId: return fmt::format("grp{0} * lsz{0} + {1}", n.dim, lid(n.dim));
    case Builtin::kGroupId: return fmt::format("grp{}", n.dim);
    case Builtin::kGlobalSize: return fmt::format("gsz{}", n.dim);
    case Builtin::kLocalSize: return fmt::format("lsz{}", n.dim);
    default: return "32'd0";
  }
}

void Emitter::emit_links() {
  for (std::size_t k = 0; k < ds_.links.size(); ++k) {
    const auto& l = ds_.links[k];
    for (const char* s : {"send", "take", "ready", "valid"}) decl("wire", 1, fmt::format("l{}_{}", k, s));
    if (l.kind == sched::HandshakeLink::Kind::kEdge) {
      decl("reg", 32, fmt::format("l{}_tag", k));
      for (ir::ValueId v : l.payload) decl("reg", value_width(v), fmt::format("l{}_v{}", k, v));
    }
    body_.push_back(fmt::format(
        "  kf_hs4 hs_l{0} (.clk(clk), .rst(rst), .send(l{0}_send), .take(l{0}_take), "
        ".ready(l{0}_ready), .valid(l{0}_valid));",
        k));
  }
}

void Emitter::emit_block(ir::BlockId b) {
  const auto& g = graph(b);
  const auto& s = sched(b);
  const int depth = s.depth;
  const std::string p = fmt::format("b{}", b);

  decl("wire", 1, p + "_en");
  decl("wire", 1, p + "_in");
  decl("wire", 32, p + "_tag_in");
  decl("wire", depth + 1, p + "_valid");
  if (depth > 0) decls_.push_back(fmt::format("  reg [{}:1] {}_pipe;", depth, p));
  for (int t = 0; t < depth; ++t) decl("reg", 32, fmt::format("t_{}_s{}", p, t));
  if (s.block_ii > 1) decl("reg", 32, p + "_gap");

  // Token sources: back edges first, then forward edges, then the dispatcher.
  std::vector<Source> sources;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < ds_.links.size(); ++k) {
      const auto& l = ds_.links[k];
      if (l.kind != sched::HandshakeLink::Kind::kEdge || l.to != b) continue;
      if (l.back_edge != (pass == 0)) continue;
      sources.push_back({fmt::format("l{}_valid", k), fmt::format("l{}_take", k),
                         fmt::format("l{}_tag", k), static_cast<int>(k)});
    }
  }
  if (b == d_.entry) sources.push_back({"disp_valid", "disp_take", "issued", -1});

  const std::string open = s.block_ii > 1 ? fmt::format("({}_gap == 32'd0) & ", p) : "";
  std::vector<std::string> sels;
  std::vector<std::string> higher;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const std::string sel = fmt::format("{}_sel{}", p, i);
    decl("wire", 1, sel);
    std::string rhs = open + sources[i].valid;
    if (!higher.empty()) rhs += " & ~(" + any(higher, "|", "") + ")";
    assign(sel, rhs);
    assign(sources[i].take, fmt::format("{}_en & {}", p, sel));
    higher.push_back(sources[i].valid);
    sels.push_back(sel);
  }
  assign(p + "_in", sels.empty() ? "1'b0" : fmt::format("{}_en & ({})", p, any(sels, "|", "")));
  {
    std::string tag;
    for (std::size_t i = 0; i + 1 < sources.size(); ++i) tag += fmt::format("{} ? {} : ", sels[i], sources[i].tag);
    tag += sources.empty() ? "32'd0" : sources.back().tag;
    assign(p + "_tag_in", tag);
  }
  assign(p + "_valid", depth > 0 ? fmt::format("{{{}_pipe, {}_in}}", p, p) : p + "_in");

  // Values arriving with the token.
  for (ir::ValueId v : g.live_in) {
    const std::string w = fmt::format("{}_in_v{}", p, v);
    decl("wire", value_width(v), w);
    std::vector<std::pair<std::string, std::string>> alts;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      if (sources[i].link < 0) continue;
      const auto& pl = ds_.links[static_cast<std::size_t>(sources[i].link)].payload;
      if (std::find(pl.begin(), pl.end(), v) != pl.end()) {
        alts.emplace_back(sels[i], fmt::format("l{}_v{}", sources[i].link, v));
      }
    }
    std::string rhs;
    for (std::size_t i = 0; i + 1 < alts.size(); ++i) rhs += alts[i].first + " ? " + alts[i].second + " : ";
    rhs += alts.empty() ? literal(value_width(v), 0) : alts.back().second;
    assign(w, rhs);
  }

  std::vector<std::string> stalls;
  auto valid_at = [&](int t) { return fmt::format("{}_valid[{}]", p, t); };
  for (const auto& u : m_.units[b]) {
    const auto& n = u.node;
    const std::string out = node_wire(b, n.id);
    if (n.out_width > 0) decl("wire", n.out_width, out);
    auto in = [&](std::size_t i) { return src_at(b, n.inputs[i], u.start); };
    switch (n.kind) {
      case NodeKind::kConst: assign(out, literal(n.out_width, n.value)); break;
      case NodeKind::kIdGen: assign(out, id_expr(n, tag_at(b, u.start))); break;
      case NodeKind::kArg: assign(out, "arg_" + d_.params[static_cast<std::size_t>(n.port)].name); break;
      case NodeKind::kStreamLoad:
        assign(fmt::format("s{}_addr", n.stream), in(0));
        assign(fmt::format("s{}_rd", n.stream), fmt::format("{} & {}_en", valid_at(u.start), p));
        assign(out, fmt::format("s{}_rdata", n.stream));
        break;
      case NodeKind::kStreamStore:
        assign(fmt::format("s{}_addr", n.stream), in(0));
        assign(fmt::format("s{}_wdata", n.stream), in(1));
        assign(fmt::format("s{}_we", n.stream), fmt::format("{} & {}_en", valid_at(u.start), p));
        break;
      case NodeKind::kPipeRead: {
        const auto& name = d_.params[static_cast<std::size_t>(n.port)].name;
        pipe_reads_[n.port].push_back(valid_at(u.start));
        stalls.push_back(fmt::format("{} & ~pipe_{}_grant", valid_at(u.start), name));
        assign(out, fmt::format("pipe_{}_data", name));
        break;
      }
      case NodeKind::kPipeWrite: {
        const auto& name = d_.params[static_cast<std::size_t>(n.port)].name;
        channel_writes_[n.port].emplace_back(fmt::format("{} & {}_en", valid_at(u.start), p), in(0));
        stalls.push_back(fmt::format("{} & f_{}_full", valid_at(u.start), name));
        break;
      }
      case NodeKind::kEnqueue: {
        const auto& name = d_.params[static_cast<std::size_t>(n.port)].name;
        std::set<std::string> callees;
        for (const auto& bg : d_.blocks) {
          for (const auto& x : bg.nodes) {
            if (x.kind == NodeKind::kEnqueue) callees.insert(x.callee);
          }
        }
        const auto index = std::distance(callees.begin(), callees.find(n.callee));
        // Record fields from the low word up: kernel index, sizes, arguments.
        std::string rec = fmt::format("32'd{}", index);
        for (std::size_t i = 0; i < n.inputs.size(); ++i) rec = in(i) + ", " + rec;
        int width = 0;
        for (const auto& f : m_.fifos) {
          if (f.param == n.port) width = f.width;
        }
        const int pad = width - 32 * static_cast<int>(n.inputs.size() + 1);
        if (pad > 0) rec = fmt::format("{}'d0, {}", pad, rec);
        channel_writes_[n.port].emplace_back(fmt::format("{} & {}_en", valid_at(u.start), p),
                                             "{" + rec + "}");
        stalls.push_back(fmt::format("{} & f_{}_full", valid_at(u.start), name));
        break;
      }
      case NodeKind::kPhi: {
        need(u, arith_primitive(u));
        std::vector<std::string> sel;
        std::string conns;
        for (std::size_t i = 0; i < n.phi_incoming.size(); ++i) {
          const auto [pred, v] = n.phi_incoming[i];
          std::string bit = "1'b0";
          for (std::size_t j = 0; j < sources.size(); ++j) {
            if (sources[j].link >= 0 && ds_.links[static_cast<std::size_t>(sources[j].link)].from == pred) {
              bit = sels[j];
              break;
            }
          }
          sel.insert(sel.begin(), bit);
          conns += fmt::format(", .i{}({})", i, src_at(b, {dfg::kNoNode, v}, u.start));
        }
        body_.push_back(fmt::format("  {} {} (.clk(clk), .rst(rst), .en({}_en), .sel({{{}}}){}, .y({}));",
                                    u.primitive, u.instance, p, any(sel, ",", ""), conns, out));
        break;
      }
      case NodeKind::kArith: {
        need(u, arith_primitive(u));
        std::string conns;
        for (std::size_t i = 0; i < n.inputs.size(); ++i) conns += fmt::format(", .i{}({})", i, in(i));
        body_.push_back(fmt::format("  {} {} (.clk(clk), .rst(rst), .en({}_en){}, .y({}));", u.primitive,
                                    u.instance, p, conns, out));
        break;
      }
      case NodeKind::kSync: break;  // with the block exit below
    }
  }

  // Exit at cycle `depth`, or through the sync unit's release port.
  const bool ret = g.term.kind == ir::TermKind::kRet;
  const auto& outs = ds_.out_links[b];
  if (g.sync_node != dfg::kNoNode) {
    const auto& u = m_.units[b][g.sync_node];
    const auto& n = u.node;
    need(u, sync_primitive(u));
    const auto& payload = g.edge_payload.empty() ? std::vector<ir::ValueId>{} : g.edge_payload[0];
    std::vector<std::string> parts;
    std::map<ir::ValueId, std::pair<int, int>> slice;
    int pw = 0;
    for (ir::ValueId v : payload) {
      if (v == n.result) continue;
      const int w = value_width(v);
      slice[v] = {pw + w - 1, pw};
      pw += w;
      parts.insert(parts.begin(), src_at(b, value_input(b, v), depth));
    }
    const std::string pl_in = parts.empty() ? "1'b0" : "{" + any(parts, ",", "") + "}";
    pw = std::max(pw, 1);
    const std::string un = u.instance;
    for (const char* sig : {"ready", "rel", "take", "we"}) decl("wire", 1, fmt::format("{}_{}", un, sig));
    decl("wire", 32, un + "_tag");
    decl("wire", 32, un + "_addr");
    decl("wire", pw, un + "_pl");
    const int sw = pw + (n.sync == dfg::SyncKind::kBarrier ? 0 : 32);
    decl("wire", sw, un + "_wd");
    decl("wire", sw, un + "_rd");
    std::string data;
    if (n.sync != dfg::SyncKind::kBarrier) data += fmt::format(", .x({})", src_at(b, n.inputs[0], u.start));
    if (n.sync == dfg::SyncKind::kBroadcast) data += fmt::format(", .src({})", src_at(b, n.inputs[1], u.start));
    if (n.sync != dfg::SyncKind::kBarrier) data += fmt::format(", .y({})", node_wire(b, n.id));
    body_.push_back(fmt::format(
        "  {0} #(.PW({1})) {2} (.clk(clk), .rst(rst), .en({3}_en){4}, .arrive({5} & {3}_en), "
        ".tag({6}), .count(items), .pl_in({7}), .take({2}_take), .ready({2}_ready), .rel({2}_rel), "
        ".tag_out({2}_tag), .pl_out({2}_pl), .sram_we({2}_we), .sram_addr({2}_addr), "
        ".sram_wdata({2}_wd), .sram_rdata({2}_rd));",
        u.primitive, pw, un, p, data, valid_at(depth), tag_at(b, depth), pl_in));
    for (const auto& sr : m_.srams) {
      if (sr.block != b) continue;
      body_.push_back(fmt::format(
          "  kf_sram #(.W({0}), .WORDS({1})) {2} (.clk(clk), .we({3}_we), .addr({3}_addr), "
          ".wdata({3}_wd), .rdata({3}_rd));",
          sw, sr.words, sr.name, un));
    }
    stalls.push_back(fmt::format("{} & ~{}_ready", valid_at(depth), un));
    if (ret) {
      assign(un + "_take", un + "_rel");
      retire_terms_.push_back(un + "_rel");
    } else {
      const int k = outs[0];
      assign(fmt::format("l{}_send", k), fmt::format("{}_rel & l{}_ready", un, k));
      assign(un + "_take", fmt::format("l{}_send", k));
      link_loads_[k].emplace_back(fmt::format("l{}_tag", k), un + "_tag");
      for (ir::ValueId v : payload) {
        std::string rhs = v == n.result ? node_wire(b, n.id)
                                        : fmt::format("{}_pl[{}:{}]", un, slice[v].first, slice[v].second);
        link_loads_[k].emplace_back(fmt::format("l{}_v{}", k, v), rhs);
      }
    }
  } else if (ret) {
    decl("wire", 1, p + "_retire");
    assign(p + "_retire", fmt::format("{} & {}_en", valid_at(depth), p));
    retire_terms_.push_back(p + "_retire");
  } else {
    std::string cond;
    if (g.term.kind == ir::TermKind::kCondBr) cond = src_at(b, g.cond, depth);
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const int k = outs[i];
      std::string guard;
      if (!cond.empty()) guard = i == 0 ? " & " + cond : " & ~" + cond;
      assign(fmt::format("l{}_send", k), fmt::format("{} & {}_en{}", valid_at(depth), p, guard));
      link_loads_[k].emplace_back(fmt::format("l{}_tag", k), tag_at(b, depth));
      for (ir::ValueId v : ds_.links[static_cast<std::size_t>(k)].payload) {
        link_loads_[k].emplace_back(fmt::format("l{}_v{}", k, v), src_at(b, value_input(b, v), depth));
      }
    }
    if (outs.size() == 1) {
      stalls.push_back(fmt::format("{} & ~l{}_ready", valid_at(depth), outs[0]));
    } else if (outs.size() == 2) {
      stalls.push_back(fmt::format("{} & ({} ? ~l{}_ready : ~l{}_ready)", valid_at(depth), cond, outs[0],
                                   outs[1]));
    }
  }
  assign(p + "_en", stalls.empty() ? "1'b1" : "~(" + any(stalls, "|", "") + ")");

  // Stage registers.
  std::vector<std::string> resets;
  std::vector<std::string> loads;
  if (depth == 1) {
    resets.push_back(fmt::format("{}_pipe <= 1'b0;", p));
    loads.push_back(fmt::format("{}_pipe <= {}_in;", p, p));
  } else if (depth > 1) {
    resets.push_back(fmt::format("{}_pipe <= {}'d0;", p, depth));
    loads.push_back(fmt::format("{}_pipe <= {{{}_pipe[{}:1], {}_in}};", p, p, depth - 1, p));
  }
  for (int t = 0; t < depth; ++t) {
    resets.push_back(fmt::format("t_{}_s{} <= 32'd0;", p, t));
    loads.push_back(fmt::format("t_{}_s{} <= {};", p, t, tag_at(b, t)));
  }
  for (const auto& r : m_.registers) {
    if (r.block != b) continue;
    decl("reg", r.width, r.name);
    resets.push_back(fmt::format("{} <= {}'d0;", r.name, r.width));
    const int ready = r.source.from_node() ? s.start[r.source.node] + s.latency[r.source.node] : 0;
    loads.push_back(fmt::format("{} <= {};", r.name, src_at(b, r.source, r.stage == ready ? ready : r.stage)));
  }
  if (!resets.empty()) {
    seq_.push_back("  always @(posedge clk) begin");
    seq_.push_back("    if (rst) begin");
    for (const auto& x : resets) seq_.push_back("      " + x);
    seq_.push_back(fmt::format("    end else if ({}_en) begin", p));
    for (const auto& x : loads) seq_.push_back("      " + x);
    seq_.push_back("    end");
    seq_.push_back("  end");
  }
  if (s.block_ii > 1) {
    seq_.push_back("  always @(posedge clk) begin");
    seq_.push_back(fmt::format("    if (rst) {}_gap <= 32'd0;", p));
    seq_.push_back(fmt::format("    else if ({}_in) {}_gap <= 32'd{};", p, p, s.block_ii - 1));
    seq_.push_back(fmt::format("    else if ({0}_gap != 32'd0) {0}_gap <= {0}_gap - 32'd1;", p));
    seq_.push_back("  end");
  }
}

void Emitter::emit_group_control() {
  for (const char* r : {"items", "issued", "retired"}) decl("reg", 32, r);
  decl("reg", 1, "active");
  decl("wire", 1, "disp_valid");
  decl("wire", 1, "disp_take");
  decl("wire", 1, "grp_done");
  decl("wire", 32, "retire_now");
  const int launch = ds_.launch_link;
  assign(fmt::format("l{}_send", launch), "launch_req");
  assign(fmt::format("l{}_take", launch), fmt::format("l{}_valid & ~active", launch));
  assign("launch_ack", fmt::format("l{}_valid", launch));
  assign("disp_valid", "active & (issued != items)");
  std::vector<std::string> terms;
  for (const auto& t : retire_terms_) terms.push_back("{31'd0, " + t + "}");
  assign("retire_now", any(terms, "+", "32'd0"));
  assign("grp_done", "active & (issued == items) & (retired == items)");
  // The group completes over the first completion link.
  int done = -1;
  std::vector<std::string> done_valid;
  for (std::size_t k = 0; k < ds_.links.size(); ++k) {
    if (ds_.links[k].kind != sched::HandshakeLink::Kind::kComplete) continue;
    if (done < 0) {
      done = static_cast<int>(k);
      assign(fmt::format("l{}_send", k), fmt::format("grp_done & l{}_ready", k));
    } else {
      assign(fmt::format("l{}_send", k), "1'b0");
    }
    assign(fmt::format("l{}_take", k), "done_ack");
    done_valid.push_back(fmt::format("l{}_valid", k));
  }
  assign("done_req", any(done_valid, "|", "1'b0"));
  seq_.push_back("  always @(posedge clk) begin");
  seq_.push_back("    if (rst) begin");
  seq_.push_back("      active <= 1'b0;");
  seq_.push_back("      items <= 32'd0;");
  seq_.push_back("      issued <= 32'd0;");
  seq_.push_back("      retired <= 32'd0;");
  seq_.push_back(fmt::format("    end else if (l{}_take) begin", launch));
  seq_.push_back("      active <= 1'b1;");
  seq_.push_back("      items <= launch_items;");
  seq_.push_back("      issued <= 32'd0;");
  seq_.push_back("      retired <= 32'd0;");
  seq_.push_back("    end else begin");
  seq_.push_back("      if (disp_take) issued <= issued + 32'd1;");
  seq_.push_back("      retired <= retired + retire_now;");
  if (done >= 0) seq_.push_back(fmt::format("      if (l{}_send) active <= 1'b0;", done));
  seq_.push_back("    end");
  seq_.push_back("  end");
}

void Emitter::emit_channels() {
  for (const auto& [param, reads] : pipe_reads_) {
    assign(fmt::format("pipe_{}_req", d_.params[static_cast<std::size_t>(param)].name), any(reads, "|", "1'b0"));
  }
  for (const auto& f : m_.fifos) {
    const auto& name = d_.params[static_cast<std::size_t>(f.param)].name;
    decl("wire", 1, f.name + "_wr");
    decl("wire", f.width, f.name + "_wdata");
    decl("wire", 1, f.name + "_full");
    const auto& writes = channel_writes_[f.param];
    std::vector<std::string> en;
    std::string data;
    for (std::size_t i = 0; i < writes.size(); ++i) {
      en.push_back(writes[i].first);
      data += i + 1 < writes.size() ? fmt::format("{} ? {} : ", writes[i].first, writes[i].second)
                                    : writes[i].second;
    }
    assign(f.name + "_wr", any(en, "|", "1'b0"));
    assign(f.name + "_wdata", data.empty() ? fmt::format("{}'d0", f.width) : data);
    const bool pipe = f.kind == FifoInstance::Kind::kPipe;
    body_.push_back(fmt::format(
        "  kf_fifo #(.W({0}), .DEPTH({1})) {2} (.clk(clk), .rst(rst), .wr({2}_wr), .wdata({2}_wdata), "
        ".full({2}_full), .rd({3}_req), .rdata({3}_{4}), .valid({3}_grant));",
        f.width, f.depth, f.name, pipe ? "pipe_" + name : "q_" + name, pipe ? "data" : "rec"));
  }
}

HdlText Emitter::run() {
  emit_links();
  for (const auto& g : d_.blocks) emit_block(g.block);
  emit_group_control();
  emit_channels();
  for (const auto& [param, loads] : link_loads_) {
    seq_.push_back("  always @(posedge clk) begin");
    seq_.push_back("    if (rst) begin");
    for (const auto& [lhs, rhs] : loads) {
      (void)rhs;
      const bool tag = lhs.ends_with("_tag");
      int w = 32;
      if (!tag) w = value_width(static_cast<ir::ValueId>(std::stoul(lhs.substr(lhs.rfind("_v") + 2))));
      seq_.push_back(fmt::format("      {} <= {}'d0;", lhs, w));
    }
    seq_.push_back(fmt::format("    end else if (l{}_send) begin", param));
    for (const auto& [lhs, rhs] : loads) seq_.push_back(fmt::format("      {} <= {};", lhs, rhs));
    seq_.push_back("    end");
    seq_.push_back("  end");
  }

  HdlText out;
  int line = 1;
  auto add = [&](const std::string& name, const std::string& text) {
    const int lines = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    out.manifest.push_back({name, line, line + lines - 1});
    out.text += text;
    line += lines;
  };
  const std::string header = fmt::format("// kernelforge: kernel {}\n", m_.kernel());
  out.text += header;
  ++line;
  prims_.emplace("kf_hs4", kHs4);
  if (!m_.fifos.empty()) prims_.emplace("kf_fifo", kFifo);
  if (!m_.srams.empty()) prims_.emplace("kf_sram", kSram);
  for (const auto& [name, text] : prims_) {
    out.text += fmt::format("`ifndef KF_PRIM_{0}\n`define KF_PRIM_{0}\n", name);
    line += 2;
    add(name, text);
    out.text += "`endif\n";
    ++line;
  }
  std::string top = fmt::format("module {} (\n", m_.name);
  for (std::size_t i = 0; i < m_.ports.size(); ++i) {
    const auto& pt = m_.ports[i];
    top += fmt::format("  {} wire {} {}{}\n", pt.dir == Dir::kIn ? "input" : "output", range(pt.width), pt.name,
                       i + 1 < m_.ports.size() ? "," : "");
  }
  top += ");\n";
  for (const auto& x : decls_) top += x + "\n";
  for (const auto& x : body_) top += x + "\n";
  for (const auto& x : seq_) top += x + "\n";
  top += "endmodule\n";
  add(m_.name, top);
  return out;
}

}  // namespace

HdlText emit_hdl(const Module& m) { return Emitter(m).run(); }

}  // namespace kf::netlist
