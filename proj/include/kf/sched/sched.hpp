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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kf/dfg/dfg.hpp"

namespace kf::sched {

struct OpTiming {
  int latency = 0;
  int ii = 1;
  friend bool operator==(const OpTiming&, const OpTiming&) = default;
};

// Per-opcode latency and initiation interval. Text form: one `lat.<op> = n`
// or `ii.<op> = n` per line, `#` comments; see docs/latency-table.md.
class LatencyTable {
 public:
  // The built-in table; every opcode has an entry.
  static LatencyTable defaults();
  // Defaults overridden by `text`. Throws ConfigError on unknown keys,
  // malformed lines or out-of-range values.
  static LatencyTable parse(std::string_view text);

  // Every opcode key the table may contain.
  static const std::vector<std::string>& opcodes();

  const OpTiming* find(std::string_view op) const;
  // Throws ConfigError naming the opcode when it has no entry.
  const OpTiming& at(std::string_view op) const;
  void set(const std::string& op, OpTiming t) { entries_[op] = t; }
  void erase(const std::string& op) { entries_.erase(op); }
  const std::map<std::string, OpTiming, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, OpTiming, std::less<>> entries_;
};

// Latency table key of a node: add, sub, mul, div, rem, cmp, logic, fadd,
// fsub, fmul, fdiv, fcmp, fneg, cast, select, const, idgen, arg, phi, load,
// store, fifo, enqueue or sync.
std::string node_opcode(const dfg::HwNode& n);

struct BlockSchedule {
  ir::BlockId block = 0;
  std::vector<int> start;
  std::vector<int> latency;
  std::vector<int> ii;
  int depth = 0;
  int block_ii = 1;
};

// ASAP: each node starts when its last producer finishes; sources at 0.
BlockSchedule schedule_block(const dfg::BlockGraph& g, const LatencyTable& t);

// Independent legality check of a schedule against its graph.
std::vector<std::string> validate_schedule(const dfg::BlockGraph& g, const BlockSchedule& s,
                                           const LatencyTable& t);

inline constexpr int kHandshakeCycles = 4;

struct HandshakeLink {
  enum class Kind : std::uint8_t { kLaunch, kEdge, kComplete };
  Kind kind = Kind::kEdge;
  // kNoBlock stands for the work dispatcher.
  ir::BlockId from = ir::kNoBlock;
  ir::BlockId to = ir::kNoBlock;
  std::vector<ir::ValueId> payload;
  bool back_edge = false;
};

struct DesignSchedule {
  dfg::KernelDesign design;
  std::vector<BlockSchedule> blocks;
  std::vector<HandshakeLink> links;
  // links index of each successor edge of a block, in terminator order.
  std::vector<std::vector<int>> out_links;
  int launch_link = -1;
};

DesignSchedule schedule_design(dfg::KernelDesign d, const LatencyTable& t);

// Adds the launch link, one link per CFG edge and one completion link per
// returning block.
void wire_handshakes(DesignSchedule& ds);

struct ResourceParams {
  // Work-group size used to size sync SRAM.
  int group_size = 256;
  // Depth of each pipe parameter by index; missing entries use the default.
  std::map<int, int> pipe_depth;
  int pipe_depth_default = 16;
};

struct ResourceReport {
  std::string kernel;
  std::map<std::string, int> arith_units;
  int stream_ports = 0;
  int registers = 0;
  long long sram_bits = 0;
  long long fifo_bits = 0;
  int handshake_fsms = 0;
  int blocks = 0;
  int max_depth = 0;
};

// Pipeline registers of one block: for every value, the number of cycle
// boundaries between the cycle it is ready and its last use.
int count_registers(const dfg::BlockGraph& g, const BlockSchedule& s);

ResourceReport estimate_resources(const DesignSchedule& ds, const ResourceParams& p);

// JSON document with schema "kernelforge.report/1".
std::string report_json(const std::vector<ResourceReport>& reports);

std::string dump_schedule(const DesignSchedule& ds);

}  // namespace kf::sched
