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
#include <array>
#include <map>
#include <set>

#include <fmt/format.h>

#include "kf/netlist/netlist.hpp"

namespace kf::netlist {

namespace {

constexpr std::array kReserved = {
    "always",    "and",       "assign",     "automatic", "begin",    "buf",       "case",
    "casex",     "casez",     "cell",       "cmos",      "config",   "deassign",  "default",
    "defparam",  "design",    "disable",    "edge",      "else",     "end",       "endcase",
    "endconfig", "endfunction", "endgenerate", "endmodule", "endprimitive", "endspecify",
    "endtable",  "endtask",   "event",      "for",       "force",    "forever",   "fork",
    "function",  "generate",  "genvar",     "highz0",    "highz1",   "if",        "ifnone",
    "incdir",    "include",   "initial",    "inout",     "input",    "instance",  "integer",
    "join",      "large",     "liblist",    "library",   "localparam", "macromodule", "medium",
    "module",    "nand",      "negedge",    "nmos",      "nor",      "noshowcancelled", "not",
    "notif0",    "notif1",    "or",         "output",    "parameter", "pmos",     "posedge",
    "primitive", "pull0",     "pull1",      "pulldown",  "pullup",   "pulsestyle_ondetect",
    "pulsestyle_onevent", "rcmos", "real",  "realtime",  "reg",      "release",   "repeat",
    "rnmos",     "rpmos",     "rtran",      "rtranif0",  "rtranif1", "scalared",  "showcancelled",
    "signed",    "small",     "specify",    "specparam", "strong0",  "strong1",   "supply0",
    "supply1",   "table",     "task",       "time",      "tran",     "tranif0",   "tranif1",
    "tri",       "tri0",      "tri1",       "triand",    "trior",    "trireg",    "unsigned",
    "use",       "uwire",     "vectored",   "wait",      "wand",     "weak0",     "weak1",
    "while",     "wire",      "wor",        "xnor",      "xor",
};

int type_width(Type t) { return t == Type::kBool ? 1 : 32; }

std::string_view short_type(Type t) {
  switch (t) {
    case Type::kBool: return "b1";
    case Type::kI32: return "i32";
    case Type::kU32: return "u32";
    case Type::kF32: return "f32";
    case Type::kVoid: break;
  }
  return "v";
}

}  // namespace

bool is_reserved_word(std::string_view s) {
  return std::find(kReserved.begin(), kReserved.end(), s) != kReserved.end();
}

std::string mangle(std::string_view name, int& counter) {
  if (!is_reserved_word(name) && !name.starts_with("kf_")) return std::string(name);
  return fmt::format("{}_m{}", name, counter++);
}

std::string primitive_name(const dfg::HwNode& n, int latency) {
  if (n.kind == dfg::NodeKind::kPhi) {
    return fmt::format("kf_phi{}_{}_l{}", n.phi_incoming.size(), short_type(n.out_type), latency);
  }
  using dfg::ArithOp;
  const bool f = n.op_type == Type::kF32;
  bool black_box = false;
  switch (n.arith) {
    case ArithOp::kAdd:
    case ArithOp::kSub:
    case ArithOp::kMul:
    case ArithOp::kDiv:
    case ArithOp::kRem:
    case ArithOp::kLt:
    case ArithOp::kLe:
    case ArithOp::kGt:
    case ArithOp::kGe:
    case ArithOp::kEq:
    case ArithOp::kNe: black_box = f; break;
    case ArithOp::kIToF:
    case ArithOp::kUToF:
    case ArithOp::kFToI:
    case ArithOp::kFToU: black_box = true; break;
    default: break;
  }
  return fmt::format("kf_{}{}_{}_l{}", black_box ? "bb_" : "", dfg::arith_op_name(n.arith),
                     short_type(n.op_type), latency);
}

const Module* Netlist::find(std::string_view kernel) const {
  for (const auto& m : modules) {
    if (m.kernel() == kernel) return &m;
  }
  return nullptr;
}

Module elaborate(const sched::DesignSchedule& ds, const ElaborateOptions& opt) {
  Module m;
  int counter = 1;
  m.name = mangle(ds.design.name, counter);
  m.schedule = ds;
  const auto& d = ds.design;

  auto port = [&](std::string name, Dir dir, int width) {
    m.ports.push_back({std::move(name), dir, width});
  };
  port("clk", Dir::kIn, 1);
  port("rst", Dir::kIn, 1);
  port("launch_req", Dir::kIn, 1);
  port("launch_ack", Dir::kOut, 1);
  port("launch_items", Dir::kIn, 32);
  port("done_req", Dir::kOut, 1);
  port("done_ack", Dir::kIn, 1);

  // Items carry their linear local id; the other ids derive from these
  // per-group inputs.
  bool uses_ids = false;
  for (const auto& g : d.blocks) {
    for (const auto& n : g.nodes) uses_ids |= n.kind == dfg::NodeKind::kIdGen;
  }
  if (uses_ids) {
    for (const char* p : {"grp", "lsz", "gsz"}) {
      for (int dim = 0; dim < 3; ++dim) port(fmt::format("{}{}", p, dim), Dir::kIn, 32);
    }
  }
  for (const auto& s : d.streams) {
    port(fmt::format("s{}_addr", s.id), Dir::kOut, 32);
    if (s.is_write) {
      port(fmt::format("s{}_we", s.id), Dir::kOut, 1);
      port(fmt::format("s{}_wdata", s.id), Dir::kOut, 32);
    } else {
      port(fmt::format("s{}_rd", s.id), Dir::kOut, 1);
      port(fmt::format("s{}_rdata", s.id), Dir::kIn, 32);
    }
  }
  // Pipe pins: a read port is a FIFO consumer interface; a write port owns
  // its FIFO and exposes the FIFO's read side with the same pin names.
  int max_enqueue_args = 0;
  for (const auto& g : d.blocks) {
    for (const auto& n : g.nodes) {
      if (n.kind == dfg::NodeKind::kEnqueue) {
        max_enqueue_args = std::max(max_enqueue_args, static_cast<int>(n.inputs.size()) - 2);
      }
    }
  }
  for (std::size_t p = 0; p < d.params.size(); ++p) {
    const auto& pd = d.params[p];
    const int pi = static_cast<int>(p);
    if (pd.kind == ParamKind::kScalar) {
      port("arg_" + pd.name, Dir::kIn, 32);
    } else if (pd.kind == ParamKind::kPipe &&
               std::find(d.pipe_ports.begin(), d.pipe_ports.end(), pi) != d.pipe_ports.end()) {
      const bool w = pd.dir == PipeDir::kWrite;
      port(fmt::format("pipe_{}_data", pd.name), w ? Dir::kOut : Dir::kIn, 32);
      port(fmt::format("pipe_{}_req", pd.name), w ? Dir::kIn : Dir::kOut, 1);
      port(fmt::format("pipe_{}_grant", pd.name), w ? Dir::kOut : Dir::kIn, 1);
      if (w) {
        m.fifos.push_back({FifoInstance::Kind::kPipe, pi, 32, opt.pipe_depth,
                           fmt::format("f_{}", pd.name)});
      }
    } else if (pd.kind == ParamKind::kDeviceQueue &&
               std::find(d.queue_ports.begin(), d.queue_ports.end(), pi) != d.queue_ports.end()) {
      // Record: kernel index word, global size, local size, arguments.
      const int width = 32 * (3 + max_enqueue_args);
      port(fmt::format("q_{}_rec", pd.name), Dir::kOut, width);
      port(fmt::format("q_{}_req", pd.name), Dir::kIn, 1);
      port(fmt::format("q_{}_grant", pd.name), Dir::kOut, 1);
      m.fifos.push_back({FifoInstance::Kind::kQueue, pi, width, opt.queue_depth,
                         fmt::format("f_{}", pd.name)});
    }
  }

  m.units.resize(d.blocks.size());
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    const auto& g = d.blocks[b];
    const auto& s = ds.blocks[b];
    for (const auto& n : g.nodes) {
      Unit u;
      u.block = g.block;
      u.node = n;
      u.start = s.start[n.id];
      u.latency = s.latency[n.id];
      u.ii = s.ii[n.id];
      u.instance = fmt::format("u_b{}_n{}", g.block, n.id);
      if (n.kind == dfg::NodeKind::kArith || n.kind == dfg::NodeKind::kPhi) {
        u.primitive = primitive_name(n, u.latency);
      } else if (n.kind == dfg::NodeKind::kSync) {
        u.primitive = n.sync == dfg::SyncKind::kBarrier
                          ? "kf_sync_barrier"
                          : fmt::format("kf_{}sync_{}_{}",
                                        n.sync == dfg::SyncKind::kReduce &&
                                                n.op_type == Type::kF32 &&
                                                n.reduce == ir::WgOp::kReduceAdd
                                            ? "bb_"
                                            : "",
                                        ir::wgop_name(n.reduce), short_type(n.op_type));
        // The SRAM holds the node input plus the payload each item carries
        // past the sync.
        int payload = 0;
        for (ir::ValueId v : g.edge_payload.empty() ? std::vector<ir::ValueId>{}
                                                    : g.edge_payload[0]) {
          payload += type_width(d.value_types[v]);
        }
        m.srams.push_back({g.block, n.id, opt.sram_words, 32 + std::max(payload, 1),
                           fmt::format("sram_b{}", g.block)});
      }
      m.units[b].push_back(std::move(u));
    }

    // Last cycle each value is read within the block; the exit counts as a
    // read at the block depth.
    std::map<std::pair<dfg::NodeId, ir::ValueId>, int> last;
    auto use = [&](const dfg::Input& x, int cycle) {
      if (!x.from_node() && x.value == ir::kNoValue) return;
      auto key = std::pair{x.node, x.from_node() ? ir::kNoValue : x.value};
      auto [it, fresh] = last.emplace(key, cycle);
      if (!fresh) it->second = std::max(it->second, cycle);
    };
    for (const auto& n : g.nodes) {
      for (const auto& x : n.inputs) use(x, s.start[n.id]);
    }
    use(g.cond, s.depth);
    for (ir::ValueId v : g.live_out) {
      dfg::Input x{dfg::kNoNode, v};
      for (const auto& n : g.nodes) {
        if (n.result == v) x = {n.id, ir::kNoValue};
      }
      use(x, s.depth);
    }
    for (const auto& [key, l] : last) {
      const auto [node, value] = key;
      const dfg::Input src{node, value};
      const int ready = src.from_node() ? s.start[node] + s.latency[node] : 0;
      const int width = src.from_node() ? g.nodes[node].out_width
                                        : type_width(d.value_types[value]);
      for (int k = ready; k < l; ++k) {
        m.registers.push_back(
            {g.block, src, k, width,
             src.from_node() ? fmt::format("r_b{}_n{}_s{}", g.block, node, k)
                             : fmt::format("r_b{}_v{}_s{}", g.block, value, k)});
      }
    }
  }

  for (std::size_t i = 0; i < ds.links.size(); ++i) {
    m.fsms.push_back({static_cast<int>(i), fmt::format("hs_l{}", i)});
  }
  return m;
}

Netlist elaborate(const std::vector<sched::DesignSchedule>& designs, const ElaborateOptions& opt) {
  Netlist n;
  int counter = 1;
  std::set<std::string> used;
  for (const auto& ds : designs) {
    Module m = elaborate(ds, opt);
    m.name = mangle(ds.design.name, counter);
    while (used.count(m.name) != 0) m.name = fmt::format("{}_m{}", ds.design.name, counter++);
    used.insert(m.name);
    n.modules.push_back(std::move(m));
  }
  return n;
}

}  // namespace kf::netlist
