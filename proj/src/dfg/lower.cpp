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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "kf/dfg/arith.hpp"
#include "kf/dfg/dfg.hpp"

namespace kf::dfg {
namespace {

using ir::BlockId;
using ir::Instr;
using ir::Opcode;
using ir::ValueId;

int width_of(Type t) { return t == Type::kBool ? 1 : 32; }

ArithOp arith_of(ir::BinOp op) {
  switch (op) {
    case ir::BinOp::kAdd: return ArithOp::kAdd;
    case ir::BinOp::kSub: return ArithOp::kSub;
    case ir::BinOp::kMul: return ArithOp::kMul;
    case ir::BinOp::kDiv: return ArithOp::kDiv;
    case ir::BinOp::kRem: return ArithOp::kRem;
    case ir::BinOp::kLt: return ArithOp::kLt;
    case ir::BinOp::kLe: return ArithOp::kLe;
    case ir::BinOp::kGt: return ArithOp::kGt;
    case ir::BinOp::kGe: return ArithOp::kGe;
    case ir::BinOp::kEq: return ArithOp::kEq;
    case ir::BinOp::kNe: return ArithOp::kNe;
    case ir::BinOp::kAnd: return ArithOp::kAnd;
    case ir::BinOp::kOr: return ArithOp::kOr;
    case ir::BinOp::kXor: return ArithOp::kXor;
    case ir::BinOp::kNeg: return ArithOp::kNeg;
  }
  return ArithOp::kAdd;
}

ArithOp arith_of(ir::CastOp op) {
  switch (op) {
    case ir::CastOp::kIToF: return ArithOp::kIToF;
    case ir::CastOp::kUToF: return ArithOp::kUToF;
    case ir::CastOp::kFToI: return ArithOp::kFToI;
    case ir::CastOp::kFToU: return ArithOp::kFToU;
    case ir::CastOp::kBitcast: return ArithOp::kBitcast;
    case ir::CastOp::kBoolToInt: return ArithOp::kBoolToInt;
  }
  return ArithOp::kBitcast;
}

struct DefSite {
  const Instr* instr = nullptr;
  const ir::Phi* phi = nullptr;
  BlockId block = ir::kNoBlock;
};

std::vector<DefSite> def_sites(const ir::Function& f) {
  std::vector<DefSite> defs(f.value_types.size());
  for (const auto& b : f.blocks) {
    for (const auto& phi : b.phis) defs[phi.result] = {nullptr, &phi, b.id};
    for (const auto& in : b.instrs) {
      if (in.result != ir::kNoValue) defs[in.result] = {&in, nullptr, b.id};
    }
  }
  return defs;
}

std::int64_t const_int(const Instr& in) {
  return in.type == Type::kI32 ? static_cast<std::int32_t>(in.imm) : in.imm;
}

class Classifier {
 public:
  explicit Classifier(const ir::Function& f) : f_(f), defs_(def_sites(f)) {}

  IndexClass classify(ValueId v) {
    auto r = affine(v, 0);
    if (!r) return {};
    IndexClass c;
    c.is_static = true;
    c.constant = r->constant;
    for (const auto& [key, coeff] : r->terms) {
      if (coeff == 0) continue;
      c.terms.push_back({key.first, key.second, coeff});
    }
    return c;
  }

 private:
  using Key = std::pair<AffineTerm::Kind, std::uint32_t>;
  struct Form {
    std::int64_t constant = 0;
    std::map<Key, std::int64_t> terms;
    bool is_constant() const {
      return std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.second == 0; });
    }
  };

  const Instr* def(ValueId v) const {
    return v < defs_.size() ? defs_[v].instr : nullptr;
  }

  // A header phi counts as a loop counter when its initial value, its step
  // and the bound it is compared against are all literals.
  bool is_loop_counter(ValueId v) const {
    const DefSite& d = defs_[v];
    if (!d.phi || d.phi->incoming.size() != 2) return false;
    int inits = 0;
    int steps = 0;
    for (auto [pred, in] : d.phi->incoming) {
      const Instr* x = def(in);
      if (!x) return false;
      if (x->op == Opcode::kConst) {
        ++inits;
      } else if (x->op == Opcode::kBinop &&
                 (x->bin == ir::BinOp::kAdd || x->bin == ir::BinOp::kSub)) {
        const Instr* a = def(x->operands[0].id);
        const Instr* b = def(x->operands[1].id);
        const bool lhs_phi = x->operands[0].id == v && b && b->op == Opcode::kConst;
        const bool rhs_phi = x->bin == ir::BinOp::kAdd && x->operands[1].id == v && a &&
                             a->op == Opcode::kConst;
        if (lhs_phi || rhs_phi) ++steps;
      }
    }
    if (inits != 1 || steps != 1) return false;
    const auto& term = f_.blocks[d.block].term;
    if (term.kind != ir::TermKind::kCondBr) return false;
    const Instr* c = def(term.cond);
    if (!c || c->op != Opcode::kBinop || !ir::is_compare(c->bin)) return false;
    const ValueId l = c->operands[0].id;
    const ValueId r = c->operands[1].id;
    const Instr* li = def(l);
    const Instr* ri = def(r);
    return (l == v && ri && ri->op == Opcode::kConst) ||
           (r == v && li && li->op == Opcode::kConst);
  }

  std::optional<Form> affine(ValueId v, int depth) {
    if (depth > 64 || v >= defs_.size()) return std::nullopt;
    const DefSite& d = defs_[v];
    if (d.phi) {
      if (!is_loop_counter(v)) return std::nullopt;
      Form f;
      f.terms[{AffineTerm::Kind::kLoopCounter, v}] = 1;
      return f;
    }
    const Instr* in = d.instr;
    if (!in) return std::nullopt;
    switch (in->op) {
      case Opcode::kConst: {
        if (in->type != Type::kI32 && in->type != Type::kU32) return std::nullopt;
        Form f;
        f.constant = const_int(*in);
        return f;
      }
      case Opcode::kBuiltinCall: {
        Form f;
        AffineTerm::Kind k;
        if (in->query == Builtin::kGlobalId) k = AffineTerm::Kind::kGlobalId;
        else if (in->query == Builtin::kLocalId) k = AffineTerm::Kind::kLocalId;
        else if (in->query == Builtin::kGroupId) k = AffineTerm::Kind::kGroupId;
        else return std::nullopt;
        f.terms[{k, in->imm}] = 1;
        return f;
      }
      case Opcode::kCast:
        if (in->cast != ir::CastOp::kBitcast) return std::nullopt;
        return affine(in->operands[0].id, depth + 1);
      case Opcode::kBinop: {
        if (in->bin != ir::BinOp::kAdd && in->bin != ir::BinOp::kSub &&
            in->bin != ir::BinOp::kMul)
          return std::nullopt;
        auto a = affine(in->operands[0].id, depth + 1);
        if (!a) return std::nullopt;
        auto b = affine(in->operands[1].id, depth + 1);
        if (!b) return std::nullopt;
        if (in->bin == ir::BinOp::kMul) {
          if (!a->is_constant() && !b->is_constant()) return std::nullopt;
          if (a->is_constant()) std::swap(a, b);
          const std::int64_t k = b->constant;
          a->constant *= k;
          for (auto& [key, c] : a->terms) c *= k;
          return a;
        }
        const std::int64_t sign = in->bin == ir::BinOp::kSub ? -1 : 1;
        a->constant += sign * b->constant;
        for (const auto& [key, c] : b->terms) a->terms[key] += sign * c;
        return a;
      }
      default:
        return std::nullopt;
    }
  }

  const ir::Function& f_;
  std::vector<DefSite> defs_;
};

using ValueSet = std::set<ValueId>;

}  // namespace

std::string_view node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::kArith: return "arith";
    case NodeKind::kConst: return "const";
    case NodeKind::kIdGen: return "idgen";
    case NodeKind::kArg: return "arg";
    case NodeKind::kStreamLoad: return "load";
    case NodeKind::kStreamStore: return "store";
    case NodeKind::kSync: return "sync";
    case NodeKind::kPipeRead: return "pipe_read";
    case NodeKind::kPipeWrite: return "pipe_write";
    case NodeKind::kEnqueue: return "enqueue";
    case NodeKind::kPhi: return "phi";
  }
  return "?";
}

std::string_view arith_op_name(ArithOp op) {
  static constexpr std::string_view kNames[] = {
      "add", "sub", "mul", "div", "rem", "lt", "le", "gt", "ge", "eq", "ne",
      "and", "or", "xor", "neg", "itof", "utof", "ftoi", "ftou", "bitcast", "btoi", "select"};
  return kNames[static_cast<int>(op)];
}

std::string index_class_text(const IndexClass& c) {
  if (!c.is_static) return "dynamic";
  std::string s = fmt::format("static {}", c.constant);
  for (const auto& t : c.terms) {
    std::string name;
    switch (t.kind) {
      case AffineTerm::Kind::kGlobalId: name = fmt::format("gid{}", t.which); break;
      case AffineTerm::Kind::kLocalId: name = fmt::format("lid{}", t.which); break;
      case AffineTerm::Kind::kGroupId: name = fmt::format("grp{}", t.which); break;
      case AffineTerm::Kind::kLoopCounter: name = fmt::format("loop%{}", t.which); break;
    }
    s += fmt::format(" + {}*{}", t.coeff, name);
  }
  return s;
}

IndexClass classify_index(const ir::Function& f, ValueId idx) {
  return Classifier(f).classify(idx);
}

Liveness compute_liveness(const ir::Function& f) {
  const std::size_t n = f.blocks.size();
  std::vector<ValueSet> defs(n), uses(n), in(n), out(n);
  for (const auto& b : f.blocks) {
    for (const auto& phi : b.phis) defs[b.id].insert(phi.result);
    auto use = [&](ValueId v) {
      if (v != ir::kNoValue && !defs[b.id].count(v)) uses[b.id].insert(v);
    };
    for (const auto& i : b.instrs) {
      for (const auto& o : i.operands) {
        if (o.is_value()) use(o.id);
      }
      if (i.result != ir::kNoValue) defs[b.id].insert(i.result);
    }
    use(b.term.cond);
  }
  auto phi_inputs = [&](BlockId s, BlockId p) {
    ValueSet vs;
    for (const auto& phi : f.blocks[s].phis) {
      for (auto [from, v] : phi.incoming) {
        if (from == p) vs.insert(v);
      }
    }
    return vs;
  };
  auto rpo = ir::reverse_post_order(f);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = rpo.rbegin(); it != rpo.rend(); ++it) {
      const BlockId b = *it;
      ValueSet o;
      for (BlockId s : f.blocks[b].successors()) {
        o.insert(in[s].begin(), in[s].end());
        const auto pv = phi_inputs(s, b);
        o.insert(pv.begin(), pv.end());
      }
      ValueSet i = uses[b];
      for (ValueId v : o) {
        if (!defs[b].count(v)) i.insert(v);
      }
      if (i != in[b] || o != out[b]) {
        in[b] = std::move(i);
        out[b] = std::move(o);
        changed = true;
      }
    }
  }
  Liveness l;
  l.live_in.resize(n);
  l.payload.resize(n);
  for (const auto& b : f.blocks) {
    l.live_in[b.id].assign(in[b.id].begin(), in[b.id].end());
    for (BlockId s : b.successors()) {
      ValueSet p = in[s];
      const auto pv = phi_inputs(s, b.id);
      p.insert(pv.begin(), pv.end());
      l.payload[b.id].emplace_back(p.begin(), p.end());
    }
  }
  return l;
}

HwNode map_builtin(const Instr& in) {
  HwNode n;
  n.result = in.result;
  n.loc = in.loc;
  n.out_type = in.result == ir::kNoValue ? Type::kVoid : in.type;
  n.out_width = in.result == ir::kNoValue ? 0 : width_of(in.type);
  n.op_type = in.type;
  switch (in.op) {
    case Opcode::kBuiltinCall:
      n.kind = NodeKind::kIdGen;
      n.id_query = in.query;
      n.dim = static_cast<int>(in.imm);
      break;
    case Opcode::kBarrier:
      n.kind = NodeKind::kSync;
      n.sync = SyncKind::kBarrier;
      break;
    case Opcode::kWgFunc:
      n.kind = NodeKind::kSync;
      n.sync = in.wg == ir::WgOp::kBroadcast ? SyncKind::kBroadcast : SyncKind::kReduce;
      n.reduce = in.wg;
      n.in_widths.push_back(width_of(in.type));
      if (in.wg == ir::WgOp::kBroadcast) n.in_widths.push_back(32);
      break;
    case Opcode::kPipeRead:
      n.kind = NodeKind::kPipeRead;
      n.port = in.param;
      break;
    case Opcode::kPipeWrite:
      n.kind = NodeKind::kPipeWrite;
      n.port = in.param;
      n.in_widths.push_back(width_of(in.type));
      break;
    case Opcode::kEnqueue:
      n.kind = NodeKind::kEnqueue;
      n.port = in.param;
      n.callee = in.callee;
      n.in_widths = {32, 32};
      for (std::size_t a = 2; a < in.operands.size(); ++a) {
        const auto& o = in.operands[a];
        n.handle_args.push_back(o.is_value() ? -1 : static_cast<int>(o.id));
        if (o.is_value()) n.in_widths.push_back(32);
      }
      break;
    default:
      throw std::logic_error(fmt::format("map_builtin: not a builtin: {}", ir::opcode_name(in.op)));
  }
  return n;
}

KernelDesign lower_function(const ir::Function& f) {
  KernelDesign d;
  d.name = f.name;
  d.params = f.params;
  d.entry = f.entry;
  d.value_types = f.value_types;
  const Liveness live = compute_liveness(f);
  Classifier classifier(f);
  std::vector<char> pipe_used(f.params.size(), 0), queue_used(f.params.size(), 0);

  for (const auto& b : f.blocks) {
    for (BlockId s : b.successors()) d.control_edges.emplace_back(b.id, s);
    BlockGraph g;
    g.block = b.id;
    g.term = b.term;
    std::unordered_map<ValueId, NodeId> node_of;
    std::vector<HwNode> nodes;
    auto input = [&](ValueId v) {
      auto it = node_of.find(v);
      return it == node_of.end() ? Input{kNoNode, v} : Input{it->second, ir::kNoValue};
    };
    auto add = [&](HwNode n) {
      n.id = static_cast<NodeId>(nodes.size());
      if (n.result != ir::kNoValue) node_of[n.result] = n.id;
      nodes.push_back(std::move(n));
    };
    for (const auto& phi : b.phis) {
      HwNode n;
      n.kind = NodeKind::kPhi;
      n.out_type = phi.type;
      n.op_type = phi.type;
      n.out_width = width_of(phi.type);
      n.result = phi.result;
      n.phi_incoming = phi.incoming;
      add(std::move(n));
    }
    for (const auto& in : b.instrs) {
      HwNode n;
      switch (in.op) {
        case Opcode::kConst:
          n.kind = NodeKind::kConst;
          n.value = in.imm;
          break;
        case Opcode::kArg:
          n.kind = NodeKind::kArg;
          n.port = in.param;
          break;
        case Opcode::kBinop:
          n.kind = NodeKind::kArith;
          n.arith = arith_of(in.bin);
          n.op_type = in.operand_type;
          n.in_widths.assign(in.operands.size(), width_of(in.operand_type));
          break;
        case Opcode::kCast:
          n.kind = NodeKind::kArith;
          n.arith = arith_of(in.cast);
          n.op_type = in.operand_type;
          n.in_widths = {width_of(in.operand_type)};
          break;
        case Opcode::kSelect:
          n.kind = NodeKind::kArith;
          n.arith = ArithOp::kSelect;
          n.op_type = in.type;
          n.in_widths = {1, width_of(in.type), width_of(in.type)};
          break;
        case Opcode::kLoadStream:
        case Opcode::kStoreStream: {
          const bool is_write = in.op == Opcode::kStoreStream;
          n.kind = is_write ? NodeKind::kStreamStore : NodeKind::kStreamLoad;
          n.port = in.param;
          n.op_type = in.type;
          n.stream = static_cast<int>(d.streams.size());
          n.in_widths = {32};
          if (is_write) n.in_widths.push_back(width_of(in.type));
          StreamDescriptor sd;
          sd.id = n.stream;
          sd.param = in.param;
          sd.is_write = is_write;
          sd.index = classifier.classify(in.operands[0].id);
          sd.block = b.id;
          sd.node = static_cast<NodeId>(nodes.size());
          d.streams.push_back(sd);
          break;
        }
        case Opcode::kVarLoad:
        case Opcode::kVarStore:
          throw std::logic_error("lower_function: function is not in SSA form");
        default:
          n = map_builtin(in);
          if (in.op == Opcode::kBuiltinCall) d.id_dims |= 1u << in.imm;
          if (in.op == Opcode::kPipeRead || in.op == Opcode::kPipeWrite)
            pipe_used[static_cast<std::size_t>(in.param)] = 1;
          if (in.op == Opcode::kEnqueue) queue_used[static_cast<std::size_t>(in.param)] = 1;
          break;
      }
      if (in.op != Opcode::kBuiltinCall && in.op != Opcode::kBarrier && in.op != Opcode::kWgFunc &&
          in.op != Opcode::kPipeRead && in.op != Opcode::kPipeWrite && in.op != Opcode::kEnqueue) {
        n.result = in.result;
        n.loc = in.loc;
        n.out_type = in.result == ir::kNoValue ? Type::kVoid : in.type;
        n.out_width = in.result == ir::kNoValue ? 0 : width_of(in.type);
      }
      for (const auto& o : in.operands) {
        if (o.is_value()) n.inputs.push_back(input(o.id));
      }
      // Constant folding of arithmetic on constant inputs.
      if (n.kind == NodeKind::kArith &&
          std::all_of(n.inputs.begin(), n.inputs.end(), [&](const Input& x) {
            return x.from_node() && nodes[x.node].kind == NodeKind::kConst;
          })) {
        std::vector<std::uint32_t> vals;
        for (const auto& x : n.inputs) vals.push_back(nodes[x.node].value);
        n.value = eval_arith(n.arith, n.op_type, vals);
        n.kind = NodeKind::kConst;
        n.inputs.clear();
        n.in_widths.clear();
      }
      add(std::move(n));
    }
    g.live_in = live.live_in[b.id];
    for (const auto& phi : b.phis) {
      for (auto [p, v] : phi.incoming) g.live_in.push_back(v);
    }
    std::sort(g.live_in.begin(), g.live_in.end());
    g.live_in.erase(std::unique(g.live_in.begin(), g.live_in.end()), g.live_in.end());
    {
      std::set<ValueId> out;
      for (const auto& p : live.payload[b.id]) out.insert(p.begin(), p.end());
      g.live_out.assign(out.begin(), out.end());
      g.edge_payload = live.payload[b.id];
    }

    // Drop constants nothing reads.
    std::vector<int> uses(nodes.size(), 0);
    for (const auto& n : nodes) {
      for (const auto& x : n.inputs) {
        if (x.from_node()) ++uses[x.node];
      }
    }
    if (b.term.cond != ir::kNoValue) {
      auto it = node_of.find(b.term.cond);
      if (it != node_of.end()) ++uses[it->second];
    }
    for (ValueId v : g.live_out) {
      auto it = node_of.find(v);
      if (it != node_of.end()) ++uses[it->second];
    }
    std::vector<NodeId> remap(nodes.size(), kNoNode);
    for (const auto& n : nodes) {
      if (n.kind == NodeKind::kConst && uses[n.id] == 0) {
        ++g.folded;
        continue;
      }
      remap[n.id] = static_cast<NodeId>(g.nodes.size());
      g.nodes.push_back(n);
      g.nodes.back().id = remap[n.id];
    }
    for (auto& n : g.nodes) {
      for (auto& x : n.inputs) {
        if (x.from_node()) x.node = remap[x.node];
      }
    }
    for (auto& s : d.streams) {
      if (s.block == b.id) s.node = remap[s.node];
    }
    node_of.clear();
    for (const auto& n : g.nodes) {
      if (n.result != ir::kNoValue) node_of[n.result] = n.id;
    }
    if (b.term.cond != ir::kNoValue) g.cond = input(b.term.cond);

    // Data edges, then ordering edges.
    std::set<std::pair<NodeId, NodeId>> linked;
    for (const auto& n : g.nodes) {
      for (std::size_t s = 0; s < n.inputs.size(); ++s) {
        if (!n.inputs[s].from_node()) continue;
        g.edges.push_back({n.inputs[s].node, n.id, static_cast<int>(s)});
        linked.insert({n.inputs[s].node, n.id});
      }
    }
    auto order = [&](NodeId a, NodeId c) {
      if (linked.insert({a, c}).second) g.edges.push_back({a, c, -1});
    };
    std::vector<NodeId> mem, chan;
    for (const auto& n : g.nodes) {
      const bool is_mem = n.kind == NodeKind::kStreamLoad || n.kind == NodeKind::kStreamStore;
      if (is_mem) {
        // Buffers may alias, so a store is ordered against every access.
        for (NodeId p : mem) {
          if (n.kind == NodeKind::kStreamStore || g.nodes[p].kind == NodeKind::kStreamStore)
            order(p, n.id);
        }
        mem.push_back(n.id);
      }
      if (n.kind == NodeKind::kPipeRead || n.kind == NodeKind::kPipeWrite ||
          n.kind == NodeKind::kEnqueue) {
        if (!chan.empty()) order(chan.back(), n.id);
        chan.push_back(n.id);
      }
      if (n.kind == NodeKind::kSync) g.sync_node = n.id;
    }
    if (g.sync_node != kNoNode) {
      std::vector<char> has_out(g.nodes.size(), 0);
      for (const auto& e : g.edges) has_out[e.from] = 1;
      for (const auto& n : g.nodes) {
        if (n.id != g.sync_node && !has_out[n.id]) order(n.id, g.sync_node);
      }
    }
    std::stable_sort(g.edges.begin(), g.edges.end(), [](const Edge& x, const Edge& y) {
      return std::tie(x.to, x.slot, x.from) < std::tie(y.to, y.slot, y.from);
    });
    d.blocks.push_back(std::move(g));
  }
  for (std::size_t p = 0; p < f.params.size(); ++p) {
    if (pipe_used[p]) d.pipe_ports.push_back(static_cast<int>(p));
    if (queue_used[p]) d.queue_ports.push_back(static_cast<int>(p));
  }
  return d;
}

std::vector<GraphViolation> verify_design(const KernelDesign& d) {
  std::vector<GraphViolation> out;
  for (const auto& g : d.blocks) {
    auto report = [&](std::string m) { out.push_back({g.block, std::move(m)}); };
    const std::size_t n = g.nodes.size();
    std::vector<int> indeg(n, 0);
    std::vector<std::vector<NodeId>> succ(n);
    for (const auto& e : g.edges) {
      if (e.from >= n || e.to >= n) {
        report(fmt::format("edge n{} -> n{} names a missing node", e.from, e.to));
        continue;
      }
      ++indeg[e.to];
      succ[e.from].push_back(e.to);
      if (e.slot < 0) continue;
      const HwNode& c = g.nodes[e.to];
      const HwNode& p = g.nodes[e.from];
      if (static_cast<std::size_t>(e.slot) >= c.in_widths.size()) {
        report(fmt::format("edge n{} -> n{} targets missing slot {}", e.from, e.to, e.slot));
      } else if (p.out_width != c.in_widths[static_cast<std::size_t>(e.slot)]) {
        report(fmt::format("width mismatch on n{} -> n{} slot {}: {} vs {}", e.from, e.to,
                           e.slot, p.out_width, c.in_widths[static_cast<std::size_t>(e.slot)]));
      }
    }
    for (const auto& node : g.nodes) {
      if (node.out_width != 0 && node.out_width != 1 && node.out_width != 32)
        report(fmt::format("n{} has width {}", node.id, node.out_width));
      for (std::size_t s = 0; s < node.inputs.size(); ++s) {
        const Input& x = node.inputs[s];
        if (x.from_node() || s >= node.in_widths.size()) continue;
        const int w = x.value < d.value_types.size() && d.value_types[x.value] == Type::kBool ? 1 : 32;
        if (w != node.in_widths[s])
          report(fmt::format("width mismatch on live-in %{} -> n{} slot {}", x.value, node.id, s));
      }
    }
    // Kahn's algorithm for acyclicity.
    std::vector<NodeId> ready;
    for (NodeId i = 0; i < n; ++i) {
      if (indeg[i] == 0) ready.push_back(i);
    }
    std::size_t seen = 0;
    std::vector<char> reach_sync(n, 0);
    while (!ready.empty()) {
      const NodeId v = ready.back();
      ready.pop_back();
      ++seen;
      for (NodeId s : succ[v]) {
        if (--indeg[s] == 0) ready.push_back(s);
      }
    }
    if (seen != n) report("graph has a cycle");
    if (g.sync_node != kNoNode) {
      // Every other node must reach the sync node.
      std::vector<char> mark(n, 0);
      std::vector<std::vector<NodeId>> pred(n);
      for (const auto& e : g.edges) {
        if (e.from < n && e.to < n) pred[e.to].push_back(e.from);
      }
      std::vector<NodeId> work{g.sync_node};
      mark[g.sync_node] = 1;
      while (!work.empty()) {
        const NodeId v = work.back();
        work.pop_back();
        for (NodeId p : pred[v]) {
          if (!mark[p]) {
            mark[p] = 1;
            work.push_back(p);
          }
        }
      }
      for (NodeId i = 0; i < n; ++i) {
        if (!mark[i]) report(fmt::format("n{} is not ordered before the sync node", i));
      }
    }
    for (const auto& node : g.nodes) {
      if (node.kind == NodeKind::kSync && node.id != g.sync_node)
        report("more than one sync node in a block");
    }
  }
  return out;
}

namespace {

std::string input_text(const Input& x) {
  return x.from_node() ? fmt::format("n{}", x.node) : fmt::format("%{}", x.value);
}

std::string node_text(const KernelDesign& d, const HwNode& n) {
  std::string s = fmt::format("n{} = ", n.id);
  auto pname = [&](int p) { return d.params[static_cast<std::size_t>(p)].name; };
  switch (n.kind) {
    case NodeKind::kArith:
      s += fmt::format("{} {}", arith_op_name(n.arith), type_name(n.op_type));
      break;
    case NodeKind::kConst:
      s += fmt::format("const {} 0x{:08x}", type_name(n.out_type), n.value);
      break;
    case NodeKind::kIdGen:
      s += fmt::format("idgen {} {}", builtin_info(n.id_query).name, n.dim);
      break;
    case NodeKind::kArg:
      s += fmt::format("arg {} {}", type_name(n.out_type), pname(n.port));
      break;
    case NodeKind::kStreamLoad:
    case NodeKind::kStreamStore:
      s += fmt::format("{} {} s{} {}", node_kind_name(n.kind), type_name(n.op_type), n.stream,
                       pname(n.port));
      break;
    case NodeKind::kSync:
      s += n.sync == SyncKind::kBarrier ? std::string("sync barrier")
                                        : fmt::format("sync {} {}", ir::wgop_name(n.reduce),
                                                      type_name(n.op_type));
      break;
    case NodeKind::kPipeRead:
    case NodeKind::kPipeWrite:
      s += fmt::format("{} {} {}", node_kind_name(n.kind), type_name(n.op_type), pname(n.port));
      break;
    case NodeKind::kEnqueue: {
      s += fmt::format("enqueue {} \"{}\"", pname(n.port), n.callee);
      for (int h : n.handle_args) s += h < 0 ? " val" : " " + pname(h);
      break;
    }
    case NodeKind::kPhi: {
      s += fmt::format("phi {}", type_name(n.out_type));
      for (auto [p, v] : n.phi_incoming) s += fmt::format(" [b{}: %{}]", p, v);
      break;
    }
  }
  for (std::size_t i = 0; i < n.inputs.size(); ++i)
    s += fmt::format("{}{}", i ? ", " : " <- ", input_text(n.inputs[i]));
  s += fmt::format(" : w{}", n.out_width);
  if (n.result != ir::kNoValue) s += fmt::format(" ; %{}", n.result);
  return s;
}

std::string values_text(const std::vector<ValueId>& vs) {
  std::string s;
  for (ValueId v : vs) s += fmt::format(" %{}", v);
  return s;
}

}  // namespace

std::string dump_design(const KernelDesign& d) {
  std::string out = fmt::format("design {}\n", d.name);
  for (const auto& g : d.blocks) {
    out += fmt::format("block b{}", g.block);
    switch (g.term.kind) {
      case ir::TermKind::kBr: out += fmt::format(" br b{}", g.term.target); break;
      case ir::TermKind::kCondBr:
        out += fmt::format(" condbr {} b{} b{}", input_text(g.cond), g.term.target,
                           g.term.false_target);
        break;
      default: out += " ret"; break;
    }
    out += fmt::format(" folded {}\n", g.folded);
    out += "  live_in:" + values_text(g.live_in) + "\n";
    out += "  live_out:" + values_text(g.live_out) + "\n";
    for (const auto& n : g.nodes) out += "  " + node_text(d, n) + "\n";
    for (const auto& e : g.edges) {
      out += e.slot < 0 ? fmt::format("  edge n{} -> n{} order\n", e.from, e.to)
                        : fmt::format("  edge n{} -> n{} slot {}\n", e.from, e.to, e.slot);
    }
  }
  for (const auto& s : d.streams) {
    out += fmt::format("stream s{} {} {} {}\n", s.id, d.params[static_cast<std::size_t>(s.param)].name,
                       s.is_write ? "write" : "read", index_class_text(s.index));
  }
  return out;
}

}  // namespace kf::dfg
