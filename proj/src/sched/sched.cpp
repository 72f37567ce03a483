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

#include "kf/sched/sched.hpp"

#include <algorithm>
#include <charconv>
#include <queue>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "kf/support/error.hpp"

namespace kf::sched {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

const std::vector<std::string>& LatencyTable::opcodes() {
  static const std::vector<std::string> kOps = {
      "add",   "sub",    "mul",   "div",  "rem",   "cmp",   "logic", "fadd",
      "fsub",  "fmul",   "fdiv",  "fcmp", "fneg",  "cast",  "select", "const",
      "idgen", "arg",    "phi",   "load", "store", "fifo",  "enqueue", "sync"};
  return kOps;
}

LatencyTable LatencyTable::defaults() {
  LatencyTable t;
  for (const auto& op : opcodes()) t.entries_[op] = {1, 1};
  t.entries_["mul"] = {3, 1};
  t.entries_["div"] = {8, 8};
  t.entries_["rem"] = {8, 8};
  t.entries_["fadd"] = {3, 1};
  t.entries_["fsub"] = {3, 1};
  t.entries_["fmul"] = {4, 1};
  t.entries_["fdiv"] = {10, 10};
  for (const char* op : {"const", "idgen", "arg", "phi"}) t.entries_[op] = {0, 1};
  return t;
}

LatencyTable LatencyTable::parse(std::string_view text) {
  LatencyTable t = defaults();
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("latency table line {}: expected key = value", line_no));
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view val = trim(line.substr(eq + 1));
    const bool is_lat = key.starts_with("lat.");
    const bool is_ii = key.starts_with("ii.");
    const std::string op(key.substr(is_lat ? 4 : 3));
    if ((!is_lat && !is_ii) ||
        std::find(opcodes().begin(), opcodes().end(), op) == opcodes().end())
      throw ConfigError(fmt::format("latency table line {}: unknown key '{}'", line_no, key));
    int n = 0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), n);
    if (ec != std::errc() || ptr != val.data() + val.size())
      throw ConfigError(
          fmt::format("latency table line {}: '{}' is not an integer", line_no, val));
    if (is_lat && (n < 0 || n > 1000))
      throw ConfigError(fmt::format("latency table line {}: latency out of range", line_no));
    if (is_ii && (n < 1 || n > 1000))
      throw ConfigError(fmt::format("latency table line {}: ii must be at least 1", line_no));
    if (is_lat && n != 0 && (op == "const" || op == "idgen"))
      throw ConfigError(fmt::format("latency table line {}: {} latency must be 0", line_no, op));
    (is_lat ? t.entries_[op].latency : t.entries_[op].ii) = n;
  }
  return t;
}

const OpTiming* LatencyTable::find(std::string_view op) const {
  auto it = entries_.find(op);
  return it == entries_.end() ? nullptr : &it->second;
}

const OpTiming& LatencyTable::at(std::string_view op) const {
  const OpTiming* t = find(op);
  if (!t) throw ConfigError(fmt::format("latency table has no entry for opcode '{}'", op));
  return *t;
}

std::string node_opcode(const dfg::HwNode& n) {
  using dfg::ArithOp;
  using dfg::NodeKind;
  switch (n.kind) {
    case NodeKind::kConst: return "const";
    case NodeKind::kIdGen: return "idgen";
    case NodeKind::kArg: return "arg";
    case NodeKind::kPhi: return "phi";
    case NodeKind::kStreamLoad: return "load";
    case NodeKind::kStreamStore: return "store";
    case NodeKind::kPipeRead:
    case NodeKind::kPipeWrite: return "fifo";
    case NodeKind::kEnqueue: return "enqueue";
    case NodeKind::kSync: return "sync";
    case NodeKind::kArith: break;
  }
  const bool f = n.op_type == Type::kF32;
  switch (n.arith) {
    case ArithOp::kAdd: return f ? "fadd" : "add";
    case ArithOp::kSub: return f ? "fsub" : "sub";
    case ArithOp::kMul: return f ? "fmul" : "mul";
    case ArithOp::kDiv: return f ? "fdiv" : "div";
    case ArithOp::kRem: return f ? "fdiv" : "rem";
    case ArithOp::kLt:
    case ArithOp::kLe:
    case ArithOp::kGt:
    case ArithOp::kGe:
    case ArithOp::kEq:
    case ArithOp::kNe: return f ? "fcmp" : "cmp";
    case ArithOp::kAnd:
    case ArithOp::kOr:
    case ArithOp::kXor: return "logic";
    case ArithOp::kNeg: return f ? "fneg" : "sub";
    case ArithOp::kSelect: return "select";
    default: return "cast";
  }
}

BlockSchedule schedule_block(const dfg::BlockGraph& g, const LatencyTable& t) {
  const std::size_t n = g.nodes.size();
  BlockSchedule s;
  s.block = g.block;
  s.start.assign(n, 0);
  s.latency.resize(n);
  s.ii.resize(n);
  for (const auto& node : g.nodes) {
    const OpTiming& ot = t.at(node_opcode(node));
    s.latency[node.id] = ot.latency;
    s.ii[node.id] = ot.ii;
  }
  std::vector<std::vector<const dfg::Edge*>> in(n);
  std::vector<std::vector<dfg::NodeId>> out(n);
  std::vector<int> indeg(n, 0);
  for (const auto& e : g.edges) {
    in[e.to].push_back(&e);
    out[e.from].push_back(e.to);
    ++indeg[e.to];
  }
  // Kahn's algorithm, smallest id first.
  std::priority_queue<dfg::NodeId, std::vector<dfg::NodeId>, std::greater<>> ready;
  for (dfg::NodeId i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    const dfg::NodeId v = ready.top();
    ready.pop();
    for (const auto* e : in[v])
      s.start[v] = std::max(s.start[v], s.start[e->from] + s.latency[e->from]);
    for (dfg::NodeId c : out[v]) {
      if (--indeg[c] == 0) ready.push(c);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.depth = std::max(s.depth, s.start[i] + s.latency[i]);
    s.block_ii = std::max(s.block_ii, s.ii[i]);
  }
  return s;
}

std::vector<std::string> validate_schedule(const dfg::BlockGraph& g, const BlockSchedule& s,
                                           const LatencyTable& t) {
  std::vector<std::string> v;
  const std::size_t n = g.nodes.size();
  if (s.start.size() != n || s.latency.size() != n) {
    v.push_back("schedule size does not match the graph");
    return v;
  }
  int depth = 0;
  int ii = 1;
  for (const auto& node : g.nodes) {
    const OpTiming* ot = t.find(node_opcode(node));
    if (!ot) {
      v.push_back(fmt::format("n{}: no latency entry", node.id));
      continue;
    }
    if (s.latency[node.id] != ot->latency)
      v.push_back(fmt::format("n{}: latency {} differs from table {}", node.id,
                              s.latency[node.id], ot->latency));
    if (s.start[node.id] < 0) v.push_back(fmt::format("n{}: negative start", node.id));
    depth = std::max(depth, s.start[node.id] + ot->latency);
    ii = std::max(ii, ot->ii);
  }
  for (const auto& e : g.edges) {
    if (s.start[e.to] < s.start[e.from] + s.latency[e.from])
      v.push_back(fmt::format("edge n{} -> n{}: consumer starts at {} before producer ends at {}",
                              e.from, e.to, s.start[e.to], s.start[e.from] + s.latency[e.from]));
  }
  if (depth != s.depth) v.push_back(fmt::format("depth {} should be {}", s.depth, depth));
  if (ii != s.block_ii) v.push_back(fmt::format("ii {} should be {}", s.block_ii, ii));
  return v;
}

DesignSchedule schedule_design(dfg::KernelDesign d, const LatencyTable& t) {
  DesignSchedule ds;
  for (const auto& g : d.blocks) ds.blocks.push_back(schedule_block(g, t));
  ds.design = std::move(d);
  wire_handshakes(ds);
  return ds;
}

void wire_handshakes(DesignSchedule& ds) {
  const auto& d = ds.design;
  ds.links.clear();
  ds.out_links.assign(d.blocks.size(), {});
  ds.launch_link = 0;
  ds.links.push_back({HandshakeLink::Kind::kLaunch, ir::kNoBlock, d.entry, {}, false});
  // Block order is reverse post-order, so an edge to an earlier (or the
  // same) block is a back edge.
  for (const auto& g : d.blocks) {
    std::vector<ir::BlockId> succs;
    if (g.term.kind == ir::TermKind::kBr) succs = {g.term.target};
    if (g.term.kind == ir::TermKind::kCondBr) succs = {g.term.target, g.term.false_target};
    for (ir::BlockId s : succs) {
      HandshakeLink l{HandshakeLink::Kind::kEdge, g.block, s, {}, s <= g.block};
      // Payload: values live into the target plus its phi inputs from here.
      l.payload = g.edge_payload[ds.out_links[g.block].size()];
      ds.out_links[g.block].push_back(static_cast<int>(ds.links.size()));
      ds.links.push_back(std::move(l));
    }
    if (g.term.kind == ir::TermKind::kRet) {
      ds.out_links[g.block].push_back(static_cast<int>(ds.links.size()));
      ds.links.push_back({HandshakeLink::Kind::kComplete, g.block, ir::kNoBlock, {}, false});
    }
  }
}

int count_registers(const dfg::BlockGraph& g, const BlockSchedule& s) {
  // Last cycle at which each node result or live-in value is read.
  std::map<ir::ValueId, int> live_in_last;
  std::vector<int> last(g.nodes.size(), -1);
  for (const auto& n : g.nodes) {
    for (const auto& x : n.inputs) {
      if (x.from_node()) {
        last[x.node] = std::max(last[x.node], s.start[n.id]);
      } else {
        auto& l = live_in_last[x.value];
        l = std::max(l, s.start[n.id]);
      }
    }
  }
  auto at_exit = [&](const dfg::Input& x) {
    if (x.from_node()) {
      last[x.node] = std::max(last[x.node], s.depth);
    } else if (x.value != ir::kNoValue) {
      auto& l = live_in_last[x.value];
      l = std::max(l, s.depth);
    }
  };
  at_exit(g.cond);
  for (ir::ValueId v : g.live_out) {
    dfg::Input x{dfg::kNoNode, v};
    for (const auto& n : g.nodes) {
      if (n.result == v) x = {n.id, ir::kNoValue};
    }
    at_exit(x);
  }
  int regs = 0;
  for (const auto& n : g.nodes) {
    if (last[n.id] < 0) continue;
    regs += std::max(0, last[n.id] - (s.start[n.id] + s.latency[n.id]));
  }
  for (const auto& [v, l] : live_in_last) regs += std::max(0, l);
  return regs;
}

ResourceReport estimate_resources(const DesignSchedule& ds, const ResourceParams& p) {
  ResourceReport r;
  const auto& d = ds.design;
  r.kernel = d.name;
  r.blocks = static_cast<int>(d.blocks.size());
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    const auto& g = d.blocks[b];
    r.registers += count_registers(g, ds.blocks[b]);
    r.max_depth = std::max(r.max_depth, ds.blocks[b].depth);
    for (const auto& n : g.nodes) {
      switch (n.kind) {
        case dfg::NodeKind::kArith: ++r.arith_units[node_opcode(n)]; break;
        case dfg::NodeKind::kStreamLoad:
        case dfg::NodeKind::kStreamStore: ++r.stream_ports; break;
        case dfg::NodeKind::kSync:
          if (n.sync != dfg::SyncKind::kBarrier) r.sram_bits += 32LL * p.group_size;
          break;
        default: break;
      }
    }
  }
  // The FIFO lives with the producer, so only write ports hold storage.
  for (int port : d.pipe_ports) {
    if (d.params[static_cast<std::size_t>(port)].dir != PipeDir::kWrite) continue;
    auto it = p.pipe_depth.find(port);
    const int depth = it == p.pipe_depth.end() ? p.pipe_depth_default : it->second;
    r.fifo_bits += 32LL * depth;
  }
  r.handshake_fsms = static_cast<int>(ds.links.size());
  return r;
}

std::string report_json(const std::vector<ResourceReport>& reports) {
  nlohmann::ordered_json doc;
  doc["schema"] = "kernelforge.report/1";
  doc["kernels"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json k;
    k["name"] = r.kernel;
    k["arith_units"] = nlohmann::ordered_json::object();
    for (const auto& [op, c] : r.arith_units) k["arith_units"][op] = c;
    k["stream_ports"] = r.stream_ports;
    k["registers"] = r.registers;
    k["sram_bits"] = r.sram_bits;
    k["fifo_bits"] = r.fifo_bits;
    k["handshake_fsms"] = r.handshake_fsms;
    k["blocks"] = r.blocks;
    k["max_depth"] = r.max_depth;
    doc["kernels"].push_back(std::move(k));
  }
  return doc.dump(2) + "\n";
}

std::string dump_schedule(const DesignSchedule& ds) {
  std::string out = fmt::format("schedule {}\n", ds.design.name);
  for (const auto& s : ds.blocks) {
    out += fmt::format("block b{} depth {} ii {}\n", s.block, s.depth, s.block_ii);
    for (std::size_t i = 0; i < s.start.size(); ++i)
      out += fmt::format("  n{} start {} lat {}\n", i, s.start[i], s.latency[i]);
  }
  for (const auto& l : ds.links) {
    auto end = [](ir::BlockId b) {
      return b == ir::kNoBlock ? std::string("host") : fmt::format("b{}", b);
    };
    const char* kind = l.kind == HandshakeLink::Kind::kLaunch     ? "launch"
                       : l.kind == HandshakeLink::Kind::kComplete ? "complete"
                                                                  : (l.back_edge ? "back" : "edge");
    out += fmt::format("link {} {} -> {}", kind, end(l.from), end(l.to));
    for (ir::ValueId v : l.payload) out += fmt::format(" %{}", v);
    out += "\n";
  }
  return out;
}

}  // namespace kf::sched
