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

#include "kf/sim/sim.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "kf/dfg/arith.hpp"
#include "kf/support/error.hpp"

namespace kf::sim {

namespace {

using rt::RuntimeError;

constexpr int kHs = sched::kHandshakeCycles;

struct Token {
  std::uint32_t item = 0;
  int stage = 0;
  // Block the token arrived from; kNoBlock for the dispatcher.
  ir::BlockId pred = ir::kNoBlock;
  std::vector<std::uint32_t> vals;   // by ValueId
  std::vector<std::uint32_t> nodes;  // by NodeId of the current block
  // Headers of the gated loops this token is inside.
  std::vector<ir::BlockId> gates;
};

struct LinkState {
  bool full = false;
  std::uint64_t ready_at = 0;
  Token tok;
};

struct SyncState {
  std::map<std::uint32_t, Token> waiting;
  // Computed results awaiting release, in item order.
  std::deque<Token> release;
};

struct BlockInfo {
  const dfg::BlockGraph* g = nullptr;
  const sched::BlockSchedule* s = nullptr;
  // Non-phi nodes by start cycle, each list in topological order.
  std::vector<std::vector<dfg::NodeId>> by_stage;
  std::vector<dfg::NodeId> phis;
  bool ret = false;
  bool sync = false;
  // Headers of gated loops containing the block.
  std::set<ir::BlockId> loops;
};

struct BlockRun {
  // Front is the oldest token (highest stage).
  std::deque<Token> tokens;
  std::optional<std::uint64_t> last_admit;
  SyncState sync;
};

enum class Phase : std::uint8_t { kLaunch, kRun, kComplete, kDone };

struct Launch {
  const netlist::Module* m = nullptr;
  rt::LaunchRecord rec;
  std::vector<BlockInfo> blocks;
  bool serial = false;

  Phase phase = Phase::kLaunch;
  std::uint64_t timer = 0;
  std::uint32_t group = 0;
  std::uint32_t items = 0;
  std::uint32_t next_item = 0;
  std::uint32_t retired = 0;
  std::vector<BlockRun> runs;
  std::vector<LinkState> links;
  std::map<ir::BlockId, std::int64_t> gate;  // holder item or -1
  std::vector<std::string> blocked;

  const sched::DesignSchedule& ds() const { return m->schedule; }
  const dfg::KernelDesign& design() const { return m->schedule.design; }
  const netlist::Unit& unit(ir::BlockId b, dfg::NodeId n) const { return m->units[b][n]; }
  std::string label(ir::BlockId b) const { return fmt::format("{}.b{}", rec.kernel, b); }
};

struct Staged {
  std::vector<std::tuple<int, std::uint32_t, std::uint32_t>> stores;
  std::map<int, int> reads;
  std::map<int, std::vector<std::uint32_t>> writes;
  std::vector<rt::LaunchRecord> enqueues;
  std::vector<std::string> trace;
};

// Topological order of a block's nodes over data and ordering edges, ties
// broken by node id.
std::vector<dfg::NodeId> topo_order(const dfg::BlockGraph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<dfg::NodeId>> succ(n);
  std::vector<int> indeg(n, 0);
  auto add = [&](dfg::NodeId from, dfg::NodeId to) {
    succ[from].push_back(to);
    ++indeg[to];
  };
  for (const auto& e : g.edges) add(e.from, e.to);
  std::set<dfg::NodeId> ready;
  for (dfg::NodeId i = 0; i < n; ++i) {
    if (indeg[i] == 0) ready.insert(i);
  }
  std::vector<dfg::NodeId> order;
  while (!ready.empty()) {
    const dfg::NodeId i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (dfg::NodeId j : succ[i]) {
      if (--indeg[j] == 0) ready.insert(j);
    }
  }
  if (order.size() != n) throw std::logic_error(fmt::format("block b{} has a cyclic graph", g.block));
  return order;
}

std::string hex_list(const std::vector<std::uint32_t>& v) {
  std::string s;
  for (auto x : v) s += fmt::format("{:x} ", x);
  return s;
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.max_cycles == 0) throw ConfigError("max_cycles must be at least 1");
  if (cfg.pipe_depth_default < 1) throw ConfigError("pipe_depth_default must be at least 1");
  if (cfg.mem_latency < 0) throw ConfigError("mem_latency must not be negative");
}

void apply_memory_latency(sched::LatencyTable& t, const SimConfig& cfg) {
  if (cfg.mem_latency == 0) return;
  auto timing = t.at("load");
  timing.latency = cfg.mem_latency;
  t.set("load", timing);
}

bool inject_fault(netlist::Netlist& n, std::string_view fault) {
  const bool swap = fault == "swap-add-sub";
  if (!swap && fault != "flip-const") throw ConfigError(fmt::format("unknown fault '{}'", fault));
  for (auto& m : n.modules) {
    for (auto& block : m.units) {
      for (auto& u : block) {
        if (swap && u.node.kind == dfg::NodeKind::kArith && u.node.arith == dfg::ArithOp::kAdd &&
            u.node.op_type != Type::kF32) {
          u.node.arith = dfg::ArithOp::kSub;
          return true;
        }
        if (!swap && u.node.kind == dfg::NodeKind::kConst) {
          u.node.value ^= 1u;
          return true;
        }
      }
    }
  }
  return false;
}

struct Simulator::Impl {
  const netlist::Netlist& net;
  rt::DeviceState& dev;
  SimConfig cfg;
  std::uint64_t cycle = 0;
  std::uint64_t last_progress = 0;
  int idle_limit = 2 * kHs + 2;
  std::vector<std::unique_ptr<Launch>> launches;
  Census census;
  std::string trace;
  std::function<void(const Simulator&)> observer;

  // Per-cycle pipe bookkeeping.
  std::vector<int> pre_occ;
  std::vector<int> reads;
  std::vector<std::vector<std::uint32_t>> writes;
  bool progress = false;

  Impl(const netlist::Netlist& n, rt::DeviceState& d, SimConfig c) : net(n), dev(d), cfg(c) {}

  void emit(const std::string& block, std::string_view event, const std::string& detail) {
    if (cfg.trace) trace += fmt::format("{},{},{},{}\n", cycle, block, event, detail);
  }

  bool active() const {
    for (const auto& l : launches) {
      if (l->phase != Phase::kDone) return true;
    }
    return false;
  }
  bool done() const { return !active() && dev.work_queue.empty(); }

  // --- Launch setup -------------------------------------------------------

  std::unique_ptr<Launch> make_launch(rt::LaunchRecord rec) {
    const netlist::Module* m = net.find(rec.kernel);
    if (m == nullptr) {
      throw RuntimeError(RuntimeError::Kind::kPrecondition, fmt::format("unknown kernel '{}'", rec.kernel));
    }
    rec.nd.validate();
    dev.check_launch(rec.kernel, m->schedule.design.params, rec.args);
    auto L = std::make_unique<Launch>();
    L->m = m;
    L->rec = std::move(rec);
    const auto& d = m->schedule.design;
    L->blocks.resize(d.blocks.size());
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
      const auto& g = d.blocks[b];
      if (g.block != b) throw std::logic_error("design blocks are not indexed by id");
      BlockInfo& bi = L->blocks[b];
      bi.g = &g;
      bi.s = &m->schedule.blocks[b];
      bi.by_stage.assign(static_cast<std::size_t>(bi.s->depth) + 1, {});
      for (dfg::NodeId id : topo_order(g)) {
        const auto& u = m->units[b][id];
        if (u.node.kind == dfg::NodeKind::kPhi) {
          bi.phis.push_back(id);
        } else {
          bi.by_stage[static_cast<std::size_t>(u.start)].push_back(id);
        }
        if (u.node.kind == dfg::NodeKind::kPipeRead || u.node.kind == dfg::NodeKind::kPipeWrite ||
            u.node.kind == dfg::NodeKind::kEnqueue) {
          L->serial = true;
        }
      }
      bi.ret = g.term.kind == ir::TermKind::kRet;
      bi.sync = g.sync_node != dfg::kNoNode;
      idle_limit = std::max(idle_limit, 2 * kHs + 2 + bi.s->block_ii);
    }
    // Natural loops: the body of back edge u -> h is h plus every block that
    // reaches u without passing through h. Loops holding a sync stay open.
    std::map<ir::BlockId, std::set<ir::BlockId>> bodies;
    std::vector<std::vector<ir::BlockId>> preds(d.blocks.size());
    for (const auto& [from, to] : d.control_edges) preds[to].push_back(from);
    for (const auto& link : m->schedule.links) {
      if (link.kind != sched::HandshakeLink::Kind::kEdge || !link.back_edge) continue;
      auto& body = bodies[link.to];
      body.insert(link.to);
      std::vector<ir::BlockId> work{link.from};
      while (!work.empty()) {
        const ir::BlockId x = work.back();
        work.pop_back();
        if (!body.insert(x).second) continue;
        for (ir::BlockId p : preds[x]) work.push_back(p);
      }
    }
    for (const auto& [h, body] : bodies) {
      const bool has_sync =
          std::any_of(body.begin(), body.end(), [&](ir::BlockId x) { return L->blocks[x].sync; });
      if (has_sync) continue;
      L->gate[h] = -1;
      for (ir::BlockId x : body) L->blocks[x].loops.insert(h);
    }
    L->runs.resize(d.blocks.size());
    L->links.resize(m->schedule.links.size());
    start_group(*L);
    return L;
  }

  void start_group(Launch& L) {
    L.phase = Phase::kLaunch;
    L.timer = cycle + kHs;
    L.items = L.rec.nd.group_size();
    L.next_item = 0;
    L.retired = 0;
    emit(L.rec.kernel, "launch", fmt::format("group={} items={}", L.group, L.items));
  }

  // --- Token helpers ------------------------------------------------------

  static std::uint32_t input(const Token& t, const dfg::Input& x) {
    return x.from_node() ? t.nodes[x.node] : t.vals[x.value];
  }

  std::uint64_t in_flight(const Launch& L) const {
    std::uint64_t n = 0;
    for (const auto& r : L.runs) n += r.tokens.size();
    for (const auto& l : L.links) n += l.full ? 1 : 0;
    return n;
  }

  // Gates the token must take to move from block `from` into `to`.
  static std::vector<ir::BlockId> gates_needed(const Launch& L, ir::BlockId from, ir::BlockId to) {
    std::vector<ir::BlockId> need;
    for (ir::BlockId h : L.blocks[to].loops) {
      if (from == ir::kNoBlock || L.blocks[from].loops.count(h) == 0) need.push_back(h);
    }
    return need;
  }

  static void release_gates(Launch& L, Token& t, ir::BlockId to) {
    std::vector<ir::BlockId> keep;
    for (ir::BlockId h : t.gates) {
      if (to != ir::kNoBlock && L.blocks[to].loops.count(h) != 0) {
        keep.push_back(h);
      } else {
        L.gate[h] = -1;
      }
    }
    t.gates = std::move(keep);
  }

  void admit(Launch& L, ir::BlockId b, Token t) {
    const BlockInfo& bi = L.blocks[b];
    for (ir::BlockId h : gates_needed(L, t.pred, b)) {
      L.gate[h] = t.item;
      t.gates.push_back(h);
    }
    t.stage = 0;
    t.nodes.assign(bi.g->nodes.size(), 0);
    // Phis read their incoming values before any of them is written.
    std::vector<std::pair<ir::ValueId, std::uint32_t>> phi_vals;
    for (dfg::NodeId id : bi.phis) {
      const auto& n = L.unit(b, id).node;
      auto it = std::find_if(n.phi_incoming.begin(), n.phi_incoming.end(),
                             [&](const auto& in) { return in.first == t.pred; });
      if (it == n.phi_incoming.end()) {
        throw std::logic_error(fmt::format("phi n{} of b{} has no input from b{}", id, b, t.pred));
      }
      t.nodes[id] = t.vals[it->second];
      phi_vals.emplace_back(n.result, t.nodes[id]);
    }
    for (const auto& [v, bits] : phi_vals) t.vals[v] = bits;
    emit(L.label(b), "enter",
         fmt::format("item={} from={}", t.item, t.pred == ir::kNoBlock ? "dispatch" : fmt::format("b{}", t.pred)));
    L.runs[b].tokens.push_back(std::move(t));
    L.runs[b].last_admit = cycle;
    progress = true;
  }

  void send(Launch& L, int link, Token t, ir::BlockId from) {
    const auto& hl = L.ds().links[static_cast<std::size_t>(link)];
    release_gates(L, t, hl.to);
    // Only the link payload crosses the handshake.
    std::vector<std::uint32_t> vals(t.vals.size(), 0);
    for (ir::ValueId v : hl.payload) vals[v] = t.vals[v];
    t.vals = std::move(vals);
    t.nodes.clear();
    t.pred = from;
    auto& ls = L.links[static_cast<std::size_t>(link)];
    ls.full = true;
    ls.ready_at = cycle + kHs;
    ls.tok = std::move(t);
    emit(L.label(from), "exit", fmt::format("item={} link=l{}", ls.tok.item, link));
  }

  // --- Per-cycle processing -----------------------------------------------

  void admissions(Launch& L, const std::vector<char>& link_was_full) {
    const auto& ds = L.ds();
    for (std::size_t b = 0; b < L.runs.size(); ++b) {
      auto& run = L.runs[b];
      const auto& bi = L.blocks[b];
      if (!run.tokens.empty() && run.tokens.back().stage == 0) continue;
      if (run.last_admit && cycle - *run.last_admit < static_cast<std::uint64_t>(bi.s->block_ii)) continue;
      auto gates_free = [&](ir::BlockId from) {
        for (ir::BlockId h : gates_needed(L, from, static_cast<ir::BlockId>(b))) {
          if (L.gate.at(h) >= 0) return false;
        }
        return true;
      };
      bool admitted = false;
      for (int pass = 0; pass < 2 && !admitted; ++pass) {
        for (std::size_t k = 0; k < ds.links.size() && !admitted; ++k) {
          const auto& hl = ds.links[k];
          auto& ls = L.links[k];
          if (hl.kind != sched::HandshakeLink::Kind::kEdge || hl.to != b || hl.back_edge != (pass == 0)) continue;
          if (!link_was_full[k] || !ls.full || ls.ready_at > cycle || !gates_free(hl.from)) continue;
          Token t = std::move(ls.tok);
          ls = LinkState{};
          admit(L, static_cast<ir::BlockId>(b), std::move(t));
          admitted = true;
        }
      }
      if (admitted || b != L.design().entry || L.phase != Phase::kRun || L.next_item >= L.items) continue;
      if (L.serial && in_flight(L) != 0) continue;
      if (!gates_free(ir::kNoBlock)) continue;
      Token t;
      t.item = L.next_item++;
      t.vals.assign(L.design().value_types.size(), 0);
      ++census.admitted;
      admit(L, static_cast<ir::BlockId>(b), std::move(t));
    }
  }

  // Executes node `id` for token `t`; returns a reason when it must stall.
  std::optional<std::string> exec(Launch& L, ir::BlockId b, Token& t, dfg::NodeId id, Staged& st) {
    const auto& n = L.unit(b, id).node;
    const auto& d = L.design();
    std::uint32_t r = 0;
    auto in = [&](std::size_t i) { return input(t, n.inputs[i]); };
    auto buffer_of = [&](int stream, std::uint32_t idx, const char* what) -> int {
      const auto& sd = d.streams[static_cast<std::size_t>(stream)];
      const int buf = L.rec.args[static_cast<std::size_t>(sd.param)].index;
      const auto& words = dev.buffers[static_cast<std::size_t>(buf)].words;
      if (idx >= words.size()) {
        throw RuntimeError(RuntimeError::Kind::kBounds,
                           fmt::format("out-of-bounds {} in kernel '{}': buffer '{}' index {} (size {}), stream s{}",
                                       what, L.rec.kernel, dev.buffers[static_cast<std::size_t>(buf)].name, idx,
                                       words.size(), stream));
      }
      return buf;
    };
    switch (n.kind) {
      case dfg::NodeKind::kConst: r = n.value; break;
      case dfg::NodeKind::kArg: r = L.rec.args[static_cast<std::size_t>(n.port)].bits; break;
      case dfg::NodeKind::kIdGen:
        r = rt::query_id(n.id_query, n.dim, L.rec.nd, rt::item_ids(L.rec.nd, L.group, t.item));
        break;
      case dfg::NodeKind::kArith: {
        std::vector<std::uint32_t> v(n.inputs.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = in(i);
        r = dfg::eval_arith(n.arith, n.op_type, v);
        break;
      }
      case dfg::NodeKind::kStreamLoad: {
        const std::uint32_t idx = in(0);
        const int buf = buffer_of(n.stream, idx, "load");
        r = dev.buffers[static_cast<std::size_t>(buf)].words[idx];
        for (const auto& [sb, si, sv] : st.stores) {
          if (sb == buf && si == idx) r = sv;
        }
        break;
      }
      case dfg::NodeKind::kStreamStore: {
        const std::uint32_t idx = in(0);
        st.stores.emplace_back(buffer_of(n.stream, idx, "store"), idx, in(1));
        break;
      }
      case dfg::NodeKind::kPipeRead: {
        const int p = L.rec.args[static_cast<std::size_t>(n.port)].index;
        const auto& pipe = dev.pipes[static_cast<std::size_t>(p)];
        const int used = reads[static_cast<std::size_t>(p)] + st.reads[p];
        if (pre_occ[static_cast<std::size_t>(p)] - used <= 0) {
          return fmt::format("read from empty pipe '{}'", pipe.name);
        }
        r = pipe.contents[static_cast<std::size_t>(used)];
        ++st.reads[p];
        if (cfg.trace) {
          st.trace.push_back(fmt::format("{},{},pipe_read,pipe={} item={} value={:08x}\n", cycle, L.label(b),
                                         pipe.name, t.item, r));
        }
        break;
      }
      case dfg::NodeKind::kPipeWrite: {
        const int p = L.rec.args[static_cast<std::size_t>(n.port)].index;
        const auto& pipe = dev.pipes[static_cast<std::size_t>(p)];
        auto& mine = st.writes[p];
        const int occ = pre_occ[static_cast<std::size_t>(p)] +
                        static_cast<int>(writes[static_cast<std::size_t>(p)].size() + mine.size());
        if (occ >= pipe.depth) {
          return fmt::format("write to full pipe '{}' (occupancy {}/{})", pipe.name,
                             pre_occ[static_cast<std::size_t>(p)], pipe.depth);
        }
        mine.push_back(in(0));
        if (cfg.trace) {
          st.trace.push_back(fmt::format("{},{},pipe_write,pipe={} item={} value={:08x}\n", cycle, L.label(b),
                                         pipe.name, t.item, mine.back()));
        }
        break;
      }
      case dfg::NodeKind::kEnqueue: {
        rt::LaunchRecord child;
        child.kernel = n.callee;
        child.nd = rt::NdRange::linear(in(0), in(1));
        std::size_t next = 2;
        for (int h : n.handle_args) {
          child.args.push_back(h >= 0 ? L.rec.args[static_cast<std::size_t>(h)] : rt::ArgValue::scalar(in(next++)));
        }
        if (cfg.trace) {
          st.trace.push_back(fmt::format("{},{},enqueue,kernel={} gsize={} lsize={}\n", cycle, L.label(b),
                                         child.kernel, child.nd.global[0], child.nd.local[0]));
        }
        st.enqueues.push_back(std::move(child));
        break;
      }
      case dfg::NodeKind::kSync:
      case dfg::NodeKind::kPhi: break;
    }
    t.nodes[id] = r;
    if (n.result != ir::kNoValue) t.vals[n.result] = r;
    return std::nullopt;
  }

  enum class Exit : std::uint8_t { kNone, kLink, kRetire, kSync };

  void run_block(Launch& L, ir::BlockId b, const std::vector<char>& link_was_full) {
    auto& run = L.runs[b];
    if (run.tokens.empty()) return;
    const BlockInfo& bi = L.blocks[b];
    const int depth = bi.s->depth;
    Staged st;
    std::optional<std::string> blocked;
    Exit exit = Exit::kNone;
    int exit_link = -1;
    for (auto& t : run.tokens) {
      for (dfg::NodeId id : bi.by_stage[static_cast<std::size_t>(t.stage)]) {
        blocked = exec(L, b, t, id, st);
        if (blocked) break;
      }
      if (blocked) break;
      if (t.stage != depth) continue;
      if (bi.ret) {
        exit = Exit::kRetire;
      } else if (bi.sync) {
        if (!run.sync.release.empty()) {
          blocked = "sync release in progress";
          break;
        }
        exit = Exit::kSync;
      } else {
        std::size_t which = 0;
        if (bi.g->term.kind == ir::TermKind::kCondBr) which = input(t, bi.g->cond) != 0 ? 0 : 1;
        exit_link = L.ds().out_links[b][which];
        if (link_was_full[static_cast<std::size_t>(exit_link)] || L.links[static_cast<std::size_t>(exit_link)].full) {
          blocked = fmt::format("exit link l{} busy", exit_link);
          break;
        }
        exit = Exit::kLink;
      }
    }
    if (blocked) {
      L.blocked.push_back(fmt::format("{} stalled: {}", L.label(b), *blocked));
      emit(L.label(b), "stall", *blocked);
      return;
    }
    progress = true;
    for (const auto& [buf, idx, v] : st.stores) dev.buffers[static_cast<std::size_t>(buf)].words[idx] = v;
    for (const auto& [p, n] : st.reads) reads[static_cast<std::size_t>(p)] += n;
    for (auto& [p, w] : st.writes) {
      auto& dst = writes[static_cast<std::size_t>(p)];
      dst.insert(dst.end(), w.begin(), w.end());
    }
    for (auto& e : st.enqueues) {
      dev.work_queue.push_back(std::move(e));
      ++dev.child_launches;
    }
    for (auto& line : st.trace) trace += line;
    if (exit != Exit::kNone) {
      Token t = std::move(run.tokens.front());
      run.tokens.pop_front();
      switch (exit) {
        case Exit::kRetire:
          release_gates(L, t, ir::kNoBlock);
          ++L.retired;
          ++census.retired;
          emit(L.label(b), "retire", fmt::format("item={}", t.item));
          break;
        case Exit::kSync:
          emit(L.label(b), "sync_arrive", fmt::format("item={}", t.item));
          run.sync.waiting.emplace(t.item, std::move(t));
          break;
        case Exit::kLink: send(L, exit_link, std::move(t), b); break;
        case Exit::kNone: break;
      }
    }
    for (auto& t : run.tokens) ++t.stage;
  }

  void fire_sync(Launch& L, ir::BlockId b) {
    auto& ss = L.runs[b].sync;
    const auto& n = L.unit(b, L.blocks[b].g->sync_node).node;
    if (n.sync == dfg::SyncKind::kBroadcast) {
      std::vector<std::uint32_t> y;
      for (const auto& [item, t] : ss.waiting) {
        const std::uint32_t src = input(t, n.inputs[1]);
        if (src >= L.items) {
          throw RuntimeError(RuntimeError::Kind::kBounds,
                             fmt::format("work_group_broadcast in kernel '{}' selects item {} of a group of {}",
                                         L.rec.kernel, src, L.items));
        }
        y.push_back(input(ss.waiting.at(src), n.inputs[0]));
      }
      std::size_t i = 0;
      for (auto& [item, t] : ss.waiting) t.nodes[n.id] = y[i++];
    } else if (n.sync == dfg::SyncKind::kReduce) {
      std::optional<std::uint32_t> acc;
      for (const auto& [item, t] : ss.waiting) {
        const std::uint32_t x = input(t, n.inputs[0]);
        acc = acc ? dfg::eval_reduce(n.reduce, n.op_type, *acc, x) : x;
      }
      for (auto& [item, t] : ss.waiting) t.nodes[n.id] = *acc;
    }
    for (auto& [item, t] : ss.waiting) {
      if (n.result != ir::kNoValue) t.vals[n.result] = t.nodes[n.id];
      ss.release.push_back(std::move(t));
    }
    ss.waiting.clear();
    progress = true;
  }

  void syncs(Launch& L, const std::vector<char>& link_was_full) {
    for (std::size_t b = 0; b < L.runs.size(); ++b) {
      if (!L.blocks[b].sync) continue;
      auto& ss = L.runs[b].sync;
      if (ss.release.empty() && ss.waiting.size() == L.items) fire_sync(L, static_cast<ir::BlockId>(b));
      if (ss.release.empty()) continue;
      const int k = L.ds().out_links[b][0];
      if (link_was_full[static_cast<std::size_t>(k)] || L.links[static_cast<std::size_t>(k)].full) continue;
      if (L.serial && in_flight(L) != 0) continue;
      Token t = std::move(ss.release.front());
      ss.release.pop_front();
      emit(L.label(static_cast<ir::BlockId>(b)), "sync_release", fmt::format("item={}", t.item));
      send(L, k, std::move(t), static_cast<ir::BlockId>(b));
      progress = true;
    }
    // With nothing moving, items split between syncs or between a sync and
    // retirement can never meet.
    if (L.next_item < L.items || in_flight(L) != 0) return;
    std::vector<std::string> where;
    for (std::size_t b = 0; b < L.runs.size(); ++b) {
      const auto& ss = L.runs[b].sync;
      if (!ss.release.empty()) return;
      if (!ss.waiting.empty()) where.push_back(fmt::format("{} at b{}", ss.waiting.size(), b));
    }
    if (where.empty()) return;
    std::string msg = fmt::format("divergent sync in kernel '{}' group {}: ", L.rec.kernel, L.group);
    for (const auto& w : where) msg += w + " ";
    msg += fmt::format("of {} items, {} finished", L.items, L.retired);
    throw RuntimeError(RuntimeError::Kind::kDivergence, msg);
  }

  void process(Launch& L) {
    if (L.phase == Phase::kLaunch && cycle >= L.timer) {
      L.phase = Phase::kRun;
      progress = true;
    }
    if (L.phase == Phase::kComplete && cycle >= L.timer) {
      emit(L.rec.kernel, "complete", fmt::format("group={}", L.group));
      progress = true;
      if (++L.group < L.rec.nd.group_count()) {
        start_group(L);
      } else {
        L.phase = Phase::kDone;
      }
    }
    if (L.phase != Phase::kRun) return;
    std::vector<char> link_was_full(L.links.size());
    for (std::size_t k = 0; k < L.links.size(); ++k) link_was_full[k] = L.links[k].full ? 1 : 0;
    admissions(L, link_was_full);
    for (std::size_t b = 0; b < L.runs.size(); ++b) run_block(L, static_cast<ir::BlockId>(b), link_was_full);
    syncs(L, link_was_full);
    if (L.next_item == L.items && L.retired == L.items) {
      L.phase = Phase::kComplete;
      L.timer = cycle + kHs;
      progress = true;
    }
  }

  std::string diagnosis() const {
    std::string s;
    std::vector<std::string> blocked;
    for (const auto& L : launches) {
      for (const auto& r : L->blocked) blocked.push_back(r);
    }
    if (!blocked.empty()) s += "; blocked: " + fmt::format("{}", fmt::join(blocked, "; "));
    s += "; pipes:";
    if (dev.pipes.empty()) s += " none";
    for (const auto& p : dev.pipes) s += fmt::format(" {}={}/{}", p.name, p.occupancy(), p.depth);
    s += "; in flight:";
    for (const auto& L : launches) {
      if (L->phase == Phase::kDone) continue;
      for (std::size_t b = 0; b < L->runs.size(); ++b) {
        const auto& r = L->runs[b];
        s += fmt::format(" {}={}", L->label(static_cast<ir::BlockId>(b)),
                         r.tokens.size() + r.sync.waiting.size() + r.sync.release.size());
      }
      std::size_t in_links = 0;
      for (const auto& l : L->links) in_links += l.full ? 1 : 0;
      s += fmt::format(" {}.links={}", L->rec.kernel, in_links);
    }
    return s;
  }

  bool step() {
    if (done()) {
      ++cycle;
      return false;
    }
    const std::size_t np = dev.pipes.size();
    pre_occ.assign(np, 0);
    for (std::size_t p = 0; p < np; ++p) pre_occ[p] = dev.pipes[p].occupancy();
    reads.assign(np, 0);
    writes.assign(np, {});
    progress = false;
    for (auto& L : launches) {
      L->blocked.clear();
      if (L->phase != Phase::kDone) process(*L);
    }
    for (std::size_t p = 0; p < np; ++p) {
      auto& pipe = dev.pipes[p];
      for (int i = 0; i < reads[p]; ++i) pipe.contents.pop_front();
      for (auto w : writes[p]) pipe.contents.push_back(w);
      if (pipe.occupancy() > pipe.depth) throw std::logic_error(fmt::format("pipe '{}' overflowed", pipe.name));
    }
    ++cycle;
    if (!active() && !dev.work_queue.empty()) {
      // Children run one at a time once everything before them has drained.
      rt::LaunchRecord next = std::move(dev.work_queue.front());
      dev.work_queue.pop_front();
      launches.push_back(make_launch(std::move(next)));
      progress = true;
    }
    if (progress) {
      last_progress = cycle;
    } else if (cycle - last_progress > static_cast<std::uint64_t>(idle_limit)) {
      throw RuntimeError(RuntimeError::Kind::kDeadlock,
                         fmt::format("watchdog: deadlock at cycle {}, no progress since cycle {}{}", cycle,
                                     last_progress, diagnosis()));
    }
    if (!done() && cycle >= cfg.max_cycles) {
      throw RuntimeError(RuntimeError::Kind::kWatchdog,
                         fmt::format("watchdog: max_cycles {} reached{}", cfg.max_cycles, diagnosis()));
    }
    return !done();
  }

  Census current_census() const {
    Census c = census;
    for (const auto& L : launches) {
      for (const auto& r : L->runs) {
        c.in_pipeline += r.tokens.size();
        c.at_sync += r.sync.waiting.size() + r.sync.release.size();
      }
      for (const auto& l : L->links) c.in_links += l.full ? 1 : 0;
    }
    return c;
  }

  std::string snapshot() const {
    std::string s = fmt::format("cycle {}\n", cycle);
    auto token_text = [](const Token& t) {
      std::string g;
      for (auto h : t.gates) g += fmt::format("{} ", h);
      return fmt::format("item {} stage {} pred {} gates [{}] vals [{}] nodes [{}]", t.item, t.stage,
                         static_cast<std::int64_t>(t.pred == ir::kNoBlock ? -1 : t.pred), g, hex_list(t.vals),
                         hex_list(t.nodes));
    };
    for (const auto& L : launches) {
      s += fmt::format("launch {} phase {} timer {} group {} items {} next {} retired {}\n", L->rec.kernel,
                       static_cast<int>(L->phase), L->timer, L->group, L->items, L->next_item, L->retired);
      for (std::size_t b = 0; b < L->runs.size(); ++b) {
        const auto& r = L->runs[b];
        s += fmt::format(" b{} last_admit {}\n", b, r.last_admit ? static_cast<std::int64_t>(*r.last_admit) : -1);
        for (const auto& t : r.tokens) s += "  " + token_text(t) + "\n";
        for (const auto& [item, t] : r.sync.waiting) s += "  wait " + token_text(t) + "\n";
        for (const auto& t : r.sync.release) s += "  release " + token_text(t) + "\n";
      }
      for (std::size_t k = 0; k < L->links.size(); ++k) {
        const auto& l = L->links[k];
        if (l.full) s += fmt::format(" l{} ready {} {}\n", k, l.ready_at, token_text(l.tok));
      }
      for (const auto& [h, holder] : L->gate) s += fmt::format(" gate b{} {}\n", h, holder);
    }
    for (const auto& p : dev.pipes) {
      s += fmt::format("pipe {} [{}]\n", p.name, hex_list({p.contents.begin(), p.contents.end()}));
    }
    for (const auto& b : dev.buffers) s += fmt::format("buffer {} [{}]\n", b.name, hex_list(b.words));
    s += fmt::format("queue {} children {}\n", dev.work_queue.size(), dev.child_launches);
    return s;
  }
};

Simulator::Simulator(const netlist::Netlist& net, rt::DeviceState& dev, std::vector<rt::LaunchRecord> roots,
                     SimConfig cfg)
    : impl_(std::make_unique<Impl>(net, dev, cfg)) {
  validate(cfg);
  std::vector<const std::vector<ParamDecl>*> params;
  for (const auto& r : roots) {
    const auto* m = net.find(r.kernel);
    if (m == nullptr) {
      throw RuntimeError(RuntimeError::Kind::kPrecondition, fmt::format("unknown kernel '{}'", r.kernel));
    }
    params.push_back(&m->schedule.design.params);
  }
  rt::check_co_launch(roots, params);
  for (auto& r : roots) impl_->launches.push_back(impl_->make_launch(std::move(r)));
}

Simulator::~Simulator() = default;

bool Simulator::step() {
  const bool more = impl_->step();
  if (impl_->observer) impl_->observer(*this);
  return more;
}

bool Simulator::done() const { return impl_->done(); }

void Simulator::run_until(std::uint64_t cycle) {
  while (impl_->cycle < cycle) step();
}

RunResult Simulator::run() {
  while (!done()) step();
  RunResult r;
  r.cycles = impl_->cycle;
  r.buffers = impl_->dev.buffers;
  r.pipes = impl_->dev.residues();
  r.child_launches = impl_->dev.child_launches;
  r.trace = impl_->trace;
  return r;
}

std::uint64_t Simulator::cycle() const { return impl_->cycle; }
Census Simulator::census() const { return impl_->current_census(); }
std::string Simulator::snapshot() const { return impl_->snapshot(); }
std::string_view Simulator::trace() const { return impl_->trace; }
void Simulator::set_observer(std::function<void(const Simulator&)> f) { impl_->observer = std::move(f); }
const rt::DeviceState& Simulator::device() const { return impl_->dev; }

RunResult run_ndrange(const netlist::Netlist& net, rt::DeviceState& dev, std::vector<rt::LaunchRecord> roots,
                      const SimConfig& cfg) {
  Simulator s(net, dev, std::move(roots), cfg);
  return s.run();
}

}  // namespace kf::sim
